use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{ks_distance, mean};
use super::tail::simulate_visibility;
use crate::asymptotics::{gumbel_cdf, k_d, k_prime_d, psi_transform, xi_transform};
use crate::error::{ensure, Error, Result};
use crate::model::{Conditioning, GrainLaw, ModelConfig};
use crate::numeric::unit_ball_volume;
use crate::rng::child_seed;
use crate::visibility::VisibilityResult;

/// Mean of the standard Gumbel law.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Samples of a normalised visibility and their distance to the Gumbel law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GumbelReport {
    pub visibilities: Vec<f64>,
    pub transformed: Vec<f64>,
    pub ks: f64,
    pub mean: f64,
    /// Replicates whose visibility is only known to lie in an interval
    /// (its midpoint is used).
    pub intervals: u64,
}

fn run(config: &ModelConfig, samples: usize, seed: u64, tol: f64, reach: f64) -> Result<(Vec<f64>, u64)> {
    ensure(samples >= 1, || "need at least one sample".into())?;
    let results: Vec<VisibilityResult> = (0..samples as u64)
        .into_par_iter()
        .map(|i| simulate_visibility(config, child_seed(seed, i), tol, reach))
        .collect::<Result<_>>()?;
    let intervals = results.iter().filter(|r| matches!(r, VisibilityResult::Interval { .. })).count() as u64;
    let values = results.iter().map(|r| r.value().expect("simulation returns a bounded result")).collect();
    Ok((values, intervals))
}

fn report(visibilities: Vec<f64>, transformed: Vec<f64>, intervals: u64) -> Result<GumbelReport> {
    ensure(transformed.iter().all(|x| x.is_finite()), || "non-finite transformed sample".into())?;
    Ok(GumbelReport {
        ks: ks_distance(&transformed, gumbel_cdf)?,
        mean: mean(&transformed),
        visibilities,
        transformed,
        intervals,
    })
}

/// Visibility for small constant radius `radius` at unit intensity, mapped by
/// the small-radius transform.
pub fn gumbel_small_r(radius: f64, d: usize, samples: usize, seed: u64, tol: f64) -> Result<GumbelReport> {
    ensure(radius > 0.0 && radius < (-1.0f64).exp(), || format!("radius {radius} outside (0, 1/e)"))?;
    ensure(d == 2 || d == 3, || format!("dimension {d} not in {{2, 3}}"))?;
    let config = ModelConfig::discs(d, radius)?;
    let m = d as f64 - 1.0;
    // visibility at which the transform equals 3
    let reach = (3.0 - d as f64 * m * radius.ln() + 2.0 * m * (-radius.ln()).ln() + k_d(d)?)
        / (unit_ball_volume(d - 1) * radius.powf(m));
    let (vis, intervals) = run(&config, samples, seed, tol, reach.max(4.0 * radius))?;
    let xi = vis.iter().map(|v| xi_transform(*v, radius, d)).collect::<Result<_>>()?;
    report(vis, xi, intervals)
}

/// Visibility beyond a clearing of radius `r`, mapped by the large-clearing transform.
pub fn gumbel_clearing(r: f64, law: &GrainLaw, d: usize, samples: usize, seed: u64, tol: f64) -> Result<GumbelReport> {
    ensure(r > std::f64::consts::E, || format!("clearing radius {r} must exceed e"))?;
    let config = ModelConfig::new(d, 1.0, law.clone(), Conditioning::Clearing { r0: r })?;
    let m = d as f64 - 1.0;
    let high = law
        .radius_moment(d as i32 - 1)
        .ok_or_else(|| Error::Unsupported("the transform needs disc radius moments".into()))?;
    let excess = (3.0 + m * r.ln() + m * r.ln().ln() + k_prime_d(d, law)?) / (unit_ball_volume(d - 1) * high);
    let (vis, intervals) = run(&config, samples, seed, tol, r + excess.max(law.max_radius()))?;
    let psi = vis.iter().map(|v| psi_transform(*v, r, law, d)).collect::<Result<_>>()?;
    report(vis, psi, intervals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_radius_samples() {
        let rep = gumbel_small_r(0.2, 2, 60, 4, 1e-8).unwrap();
        assert_eq!(rep.transformed.len(), 60);
        assert!(rep.transformed.iter().all(|x| x.is_finite()));
        assert_eq!(rep, gumbel_small_r(0.2, 2, 60, 4, 1e-8).unwrap());
        // the transform is increasing in the visibility
        let mut pairs: Vec<(f64, f64)> = rep.visibilities.iter().copied().zip(rep.transformed.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(gumbel_small_r(0.5, 2, 10, 0, 1e-6).is_err());
    }

    #[test]
    fn clearing_samples_exceed_the_clearing() {
        let law = GrainLaw::constant_disc(1.0).unwrap();
        let rep = gumbel_clearing(30.0, &law, 2, 40, 2, 1e-8).unwrap();
        assert!(rep.visibilities.iter().all(|v| *v > 30.0));
        assert!(gumbel_clearing(2.0, &law, 2, 5, 0, 1e-6).is_err());
    }
}
