use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.96;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if hits == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

/// Estimate of one tail probability `P(X ≥ r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl TailRow {
    pub fn new(r: f64, trials: u64, hits: u64) -> Result<Self> {
        ensure(trials > 0, || "a row needs at least one trial".into())?;
        ensure(hits <= trials, || format!("hits {hits} exceed trials {trials}"))?;
        let (ci_lo, ci_hi) = wilson_interval(hits, trials, Z95);
        Ok(Self {
            r,
            trials,
            hits,
            p_hat: hits as f64 / trials as f64,
            ci_lo,
            ci_hi,
        })
    }

    /// Binomial standard error of `p_hat`.
    pub fn stderr(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    ensure(!samples.is_empty(), || "KS distance needs samples".into())?;
    ensure(samples.iter().all(|x| !x.is_nan()), || "samples contain NaN".into())?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |acc: f64, (i, x)| {
        let f = cdf(*x);
        acc.max((((i + 1) as f64) / n - f).abs()).max((f - i as f64 / n).abs())
    }))
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}
