use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use super::stats::TailRow;
use crate::error::{ensure, Error, Result};
use crate::numeric::unit_ball_volume;
use crate::rng::stream_rng;

/// Rows with fewer hits are left out of fits.
pub const MIN_HITS: u64 = 10;
pub const MIN_ROWS: usize = 4;
const BOOTSTRAP_DRAWS: usize = 400;
const BOOTSTRAP_SEED: u64 = 0x0b00_7575;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeModel {
    /// `log p = a + b r`
    Linear,
    /// `log p = a + b r + c log r`
    LinearPlusLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub model: SlopeModel,
    pub slope: f64,
    /// Bootstrap standard error of `slope` over binomial resampling of the rows.
    pub stderr: f64,
    pub intercept: f64,
    pub log_coefficient: Option<f64>,
    pub rows_used: usize,
}

fn least_squares(r: &[f64], y: &[f64], model: SlopeModel) -> Option<DVector<f64>> {
    let p = match model {
        SlopeModel::Linear => 2,
        SlopeModel::LinearPlusLog => 3,
    };
    let x = DMatrix::from_fn(r.len(), p, |i, j| match j {
        0 => 1.0,
        1 => r[i],
        _ => r[i].ln(),
    });
    x.svd(true, true).solve(&DVector::from_column_slice(y), 1e-12).ok()
}

/// Least-squares fit of `log p_hat` against `r` (and `log r`). Rows with
/// fewer than ten hits are ignored.
pub fn fit_log_slope(rows: &[TailRow], model: SlopeModel) -> Result<SlopeFit> {
    let used: Vec<&TailRow> = rows.iter().filter(|row| row.hits >= MIN_HITS).collect();
    if used.len() < MIN_ROWS {
        return Err(Error::InsufficientData(format!(
            "{} rows with at least {MIN_HITS} hits, need {MIN_ROWS}",
            used.len()
        )));
    }
    ensure(used.iter().all(|row| row.r > 0.0), || "fit radii must be > 0".into())?;
    let r: Vec<f64> = used.iter().map(|row| row.r).collect();
    let y: Vec<f64> = used.iter().map(|row| row.p_hat.ln()).collect();
    let coef = least_squares(&r, &y, model)
        .ok_or_else(|| Error::InsufficientData("degenerate design matrix".into()))?;

    let mut rng = stream_rng(BOOTSTRAP_SEED, 0);
    let mut slopes = Vec::with_capacity(BOOTSTRAP_DRAWS);
    'draw: for _ in 0..BOOTSTRAP_DRAWS {
        let mut yb = Vec::with_capacity(used.len());
        for row in &used {
            let hits = rng.sample(Binomial::new(row.trials, row.p_hat).expect("p in [0, 1]"));
            if hits == 0 {
                continue 'draw;
            }
            yb.push((hits as f64 / row.trials as f64).ln());
        }
        if let Some(c) = least_squares(&r, &yb, model) {
            slopes.push(c[1]);
        }
    }
    let stderr = if slopes.len() > 1 {
        let m = slopes.iter().sum::<f64>() / slopes.len() as f64;
        (slopes.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (slopes.len() - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(SlopeFit {
        model,
        slope: coef[1],
        stderr,
        intercept: coef[0],
        log_coefficient: (model == SlopeModel::LinearPlusLog).then(|| coef[2]),
        rows_used: used.len(),
    })
}

/// Admissible range `[−ω_{d−1}R^{d−1}, −ω_{d−1}R^{d−1}/d]` of the log-tail slope.
pub fn slope_bracket(radius: f64, d: usize) -> Result<(f64, f64)> {
    ensure(radius > 0.0, || format!("radius {radius} must be > 0"))?;
    ensure(d >= 2, || format!("dimension {d} must be ≥ 2"))?;
    let rate = unit_ball_volume(d - 1) * radius.powi(d as i32 - 1);
    Ok((-rate, -rate / d as f64))
}

/// Whether the fitted slope lies in the bracket widened by `sigmas` standard errors.
pub fn bracket_verdict(fit: &SlopeFit, bracket: (f64, f64), sigmas: f64) -> bool {
    let pad = sigmas * fit.stderr.max(0.0);
    fit.slope >= bracket.0 - pad && fit.slope <= bracket.1 + pad
}
