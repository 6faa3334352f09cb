use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::TailRow;
use super::tail::estimate_tail;
use crate::asymptotics::{finger_lower_bound, tail_bounds, FingerGeometry, TailBounds};
use crate::error::Result;
use crate::model::{sample, ModelConfig, Obstacles};
use crate::rng::child_seed;
use crate::visibility::PlanarShadows;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub row: TailRow,
    pub bounds: TailBounds,
    /// `p_hat` lies within three standard errors of the sandwich.
    pub within: bool,
}

/// Simulated tail probabilities next to the analytic lower and upper bounds.
pub fn bounds_check(config: &ModelConfig, r_grid: &[f64], trials: u64, seed: u64) -> Result<Vec<BoundsRow>> {
    let bounds: Vec<TailBounds> = r_grid.iter().map(|r| tail_bounds(*r, config)).collect::<Result<_>>()?;
    let est = estimate_tail(config, r_grid, trials, seed)?;
    Ok(est
        .rows
        .into_iter()
        .zip(bounds)
        .map(|(row, bounds)| {
            let slack = 3.0 * row.stderr();
            let above = row.p_hat >= bounds.lower - slack;
            let below = bounds.upper.is_none_or(|u| row.p_hat <= u + slack);
            BoundsRow {
                row,
                bounds,
                within: above && below,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerReport {
    pub geometry: FingerGeometry,
    /// `N_r e^{−2Rr}`.
    pub first_term: f64,
    pub trials: u64,
    /// Replicates in which some point `A_{k,r}` is visible.
    pub finger_hits: u64,
    /// Replicates with `𝔙 ≥ r`.
    pub visible_hits: u64,
}

impl FingerReport {
    pub fn finger_p(&self) -> f64 {
        self.finger_hits as f64 / self.trials as f64
    }
    pub fn visible_p(&self) -> f64 {
        self.visible_hits as f64 / self.trials as f64
    }
    /// Standard error of the difference of the two nested indicators.
    pub fn ordering_stderr(&self) -> f64 {
        let d = (self.visible_hits - self.finger_hits) as f64 / self.trials as f64;
        (d * (1.0 - d) / self.trials as f64).sqrt()
    }
}

/// Monte Carlo of the finger events `{A_{k,r} visible}` against `{𝔙 ≥ r}`
/// for unit-intensity discs of radius `radius`.
pub fn finger_check(radius: f64, r: f64, zeta: f64, trials: u64, seed: u64) -> Result<FingerReport> {
    let (first_term, geometry) = finger_lower_bound(r, radius, zeta)?;
    let config = ModelConfig::discs(2, radius)?;
    let dirs: Vec<Vector2<f64>> = (0..geometry.n_r)
        .map(|k| {
            let a = k as f64 * geometry.theta_r;
            Vector2::new(a.cos(), a.sin())
        })
        .collect();
    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let set = sample(&config, r, child_seed(seed, i))?;
            let Obstacles::Planar(list) = set.obstacles() else { unreachable!("planar config") };
            let finger = dirs
                .iter()
                .any(|u| list.iter().all(|o| o.first_hit_distance(u).is_none_or(|t| t >= r)));
            let visible = !PlanarShadows::new(&set)?.covered_at(r);
            Ok((finger, visible))
        })
        .collect::<Result<_>>()?;
    Ok(FingerReport {
        geometry,
        first_term,
        trials,
        finger_hits: outcomes.iter().filter(|o| o.0).count() as u64,
        visible_hits: outcomes.iter().filter(|o| o.1).count() as u64,
    })
}
