use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::stats::TailRow;

/// One named pass/fail check against a declared tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let pass = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Value,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<TailRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<f64>,
    pub summary: Value,
    pub checks: Vec<Check>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `x` rounded to nine significant digits, printed in its shortest form.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub const TAIL_CSV_HEADER: &str = "r,trials,hits,p_hat,ci_lo,ci_hi";

pub fn tail_csv(rows: &[TailRow]) -> String {
    let mut out = String::from(TAIL_CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(row.r),
            row.trials,
            row.hits,
            sig9(row.p_hat),
            sig9(row.ci_lo),
            sig9(row.ci_hi)
        )
        .expect("writing to a string");
    }
    out
}

/// Single-column CSV of samples under `header`.
pub fn samples_csv(header: &str, samples: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for x in samples {
        writeln!(out, "{}", sig9(*x)).expect("writing to a string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.123456789123), "0.123456789");
        assert_eq!(sig9(2.0), "2");
        assert_eq!(sig9(1234567890.0), "1234567890");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn tail_csv_layout() {
        let rows = vec![TailRow::new(2.0, 100, 50).unwrap()];
        let csv = tail_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TAIL_CSV_HEADER));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&fields[..4], &["2", "100", "50", "0.5"]);
        assert!(fields[4].len() <= 12);
    }

    #[test]
    fn report_round_trips_through_json() {
        let rep = ExperimentReport {
            experiment: "tail".into(),
            config: serde_json::json!({ "dimension": 2 }),
            seed: 3,
            rows: vec![TailRow::new(1.0, 10, 2).unwrap()],
            samples: vec![],
            summary: Value::Null,
            checks: vec![Check::within("slope", -1.0, Some(-1.15), Some(-0.85))],
            wall_clock_seconds: 0.5,
        };
        assert!(rep.passed());
        let text = serde_json::to_string(&rep).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert!(!Check::within("nan", f64::NAN, None, None).pass);
    }
}
