use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::TailRow;
use crate::asymptotics::directional_tail;
use crate::coverage::CoverageVerdict;
use crate::error::{ensure, invalid, Result};
use crate::model::{sample, ModelConfig, ObstacleSet, Obstacles};
use crate::rng::child_seed;
use crate::visibility::{PlanarShadows, SpatialShadows, VisibilityResult, RESOLUTION_FLOOR};

/// Largest number of extensions before a simulation gives up.
const MAX_EXTENSIONS: usize = 64;

/// Tail rows together with the replicates whose spatial coverage could not be
/// certified at some grid radius (counted as non-hits there).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub rows: Vec<TailRow>,
    pub undecided: u64,
}

fn check_grid(grid: &[f64], config: &ModelConfig) -> Result<()> {
    ensure(!grid.is_empty(), || "radius grid is empty".into())?;
    ensure(grid.windows(2).all(|w| w[0] < w[1]), || "radius grid must be strictly ascending".into())?;
    ensure(grid[0] > 0.0, || "radii must be > 0".into())?;
    let r0 = config.clearing_radius();
    ensure(grid[grid.len() - 1] > r0, || {
        format!("largest radius must exceed the clearing radius {r0}")
    })
}

/// Number of leading grid radii at which the shadows leave a gap, i.e. at
/// which `𝔙 ≥ r`. Coverage is monotone in `r`, so this is a binary search.
fn grid_hits(set: &ObstacleSet, grid: &[f64]) -> Result<(usize, bool)> {
    let (mut lo, mut hi) = (0, grid.len());
    match set.obstacles() {
        Obstacles::Planar(_) => {
            let mut shadows = PlanarShadows::new(set)?;
            while lo < hi {
                let mid = (lo + hi) / 2;
                if shadows.covered_at(grid[mid]) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            Ok((lo, false))
        }
        Obstacles::Spatial(_) => {
            let mut shadows = SpatialShadows::new(set, RESOLUTION_FLOOR)?;
            let mut undecided = false;
            while lo < hi {
                let mid = (lo + hi) / 2;
                match shadows.verdict_at(grid[mid]) {
                    CoverageVerdict::Uncovered { .. } => lo = mid + 1,
                    CoverageVerdict::Covered => hi = mid,
                    CoverageVerdict::Unknown { .. } => {
                        undecided = true;
                        hi = mid;
                    }
                }
            }
            Ok((lo, undecided))
        }
    }
}

fn tally(grid: &[f64], trials: u64, counts: &[usize]) -> Result<Vec<TailRow>> {
    // hits at grid index j = replicates whose leading count exceeds j
    let mut at_least = vec![0u64; grid.len() + 1];
    for &c in counts {
        at_least[c] += 1;
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut hits: u64 = at_least.iter().sum();
    for (j, r) in grid.iter().enumerate() {
        hits -= at_least[j];
        rows.push(TailRow::new(*r, trials, hits)?);
    }
    Ok(rows)
}

/// Estimates `P(𝔙 ≥ r)` on an ascending grid. Each replicate is sampled once
/// up to the largest radius and reused across the grid, so the estimates are
/// non-increasing in `r`. Replicate `i` uses child seed `i` of `seed`.
pub fn estimate_tail(config: &ModelConfig, r_grid: &[f64], trials: u64, seed: u64) -> Result<TailEstimate> {
    check_grid(r_grid, config)?;
    ensure(trials >= 1, || "need at least one trial".into())?;
    let reach = r_grid[r_grid.len() - 1];
    let per_replicate: Vec<(usize, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let set = sample(config, reach, child_seed(seed, i))?;
            grid_hits(&set, r_grid)
        })
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = per_replicate.iter().map(|(c, _)| *c).collect();
    Ok(TailEstimate {
        rows: tally(r_grid, trials, &counts)?,
        undecided: per_replicate.iter().filter(|(_, u)| *u).count() as u64,
    })
}

/// Estimates `P(V(u) > r)` for the planar direction at `angle`.
pub fn estimate_directional_tail(
    config: &ModelConfig,
    angle: f64,
    r_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailRow>> {
    check_grid(r_grid, config)?;
    ensure(config.dimension == 2, || "directional estimates are planar".into())?;
    let reach = r_grid[r_grid.len() - 1];
    let u = Vector2::new(angle.cos(), angle.sin());
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let set = sample(config, reach, child_seed(seed, i))?;
            let Obstacles::Planar(list) = set.obstacles() else { unreachable!("planar config") };
            let v = list.iter().filter_map(|o| o.first_hit_distance(&u)).fold(f64::INFINITY, f64::min);
            Ok(r_grid.partition_point(|r| *r < v))
        })
        .collect::<Result<_>>()?;
    tally(r_grid, trials, &counts)
}

/// Initial reach for a single-realisation simulation: a few mean free paths
/// past the clearing radius.
pub fn default_reach(config: &ModelConfig) -> Result<f64> {
    let rate = -directional_tail(1.0, config)?.ln();
    Ok(config.clearing_radius() + (3.0 / rate).max(1.0))
}

/// One realisation of `𝔙`, sampled out to `initial_reach` and extended
/// (excess over the clearing radius grows by 1.5) until the shadows cover.
pub fn simulate_visibility(config: &ModelConfig, seed: u64, tol: f64, initial_reach: f64) -> Result<VisibilityResult> {
    let r0 = config.clearing_radius();
    let mut set = sample(config, initial_reach, seed)?;
    for _ in 0..MAX_EXTENSIONS {
        let result = match config.dimension {
            2 => PlanarShadows::new(&set)?.total(tol)?,
            _ => SpatialShadows::new(&set, RESOLUTION_FLOOR)?.total(tol)?,
        };
        if !matches!(result, VisibilityResult::UnboundedBeyond { .. }) {
            return Ok(result);
        }
        let reach = set.reach();
        set = set.extend(r0 + 1.5 * (reach - r0))?;
    }
    Err(invalid(format!(
        "visibility still unbounded at reach {} after {MAX_EXTENSIONS} extensions",
        set.reach()
    )))
}

/// `P(𝔙 ≥ r + r^α | S ≥ r)`: the clearing conditioning is exactly `S ≥ r`.
pub fn conditional_tail(config: &ModelConfig, r: f64, alpha: f64, trials: u64, seed: u64) -> Result<TailRow> {
    ensure(alpha > 0.0 && alpha < 1.0, || format!("alpha {alpha} outside (0, 1)"))?;
    ensure(r > 0.0, || format!("distance {r} must be > 0"))?;
    let cleared = config.clone().with_clearing(r)?;
    let threshold = r + r.powf(alpha);
    let est = estimate_tail(&cleared, &[threshold], trials, seed)?;
    Ok(est.rows[0])
}
