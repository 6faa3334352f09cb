//! Experiment drivers: tail estimation with confidence intervals, slope
//! fits, Gumbel-limit samples and bound checks, plus CSV/JSON reporting.
//!
//! Every driver parallelises over replicates; replicate `i` always draws
//! from child seed `i` of the run seed and results are tallied in replicate
//! order, so output depends only on the configuration and the seed.

mod checks;
mod fit;
mod gumbel;
mod report;
mod stats;
mod tail;

pub use checks::{bounds_check, finger_check, BoundsRow, FingerReport};
pub use fit::{bracket_verdict, fit_log_slope, slope_bracket, SlopeFit, SlopeModel, MIN_HITS, MIN_ROWS};
pub use gumbel::{gumbel_clearing, gumbel_small_r, GumbelReport, EULER_GAMMA};
pub use report::{samples_csv, sig9, tail_csv, Check, ExperimentReport, TAIL_CSV_HEADER};
pub use stats::{ks_distance, mean, wilson_interval, TailRow, Z95};
pub use tail::{
    conditional_tail, default_reach, estimate_directional_tail, estimate_tail, simulate_visibility, TailEstimate,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelConfig;

/// Tail estimate in dimension three with a slope fit checked against the
/// admissible bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub tail: TailEstimate,
    pub fit: SlopeFit,
    pub bracket: (f64, f64),
    pub pass: bool,
}

/// Unit-intensity balls of radius `radius`; the fit includes the `log r` term and
/// the bracket is widened by two bootstrap standard errors.
pub fn d3_slope_bracket(radius: f64, r_grid: &[f64], trials: u64, seed: u64) -> Result<BracketReport> {
    let config = ModelConfig::discs(3, radius)?;
    let tail = estimate_tail(&config, r_grid, trials, seed)?;
    let fit = fit_log_slope(&tail.rows, SlopeModel::LinearPlusLog)?;
    let bracket = slope_bracket(radius, 3)?;
    let pass = bracket_verdict(&fit, bracket, 2.0);
    Ok(BracketReport {
        tail,
        fit,
        bracket,
        pass,
    })
}
