//! `bvis`: command-line front end for the visibility experiments.

mod args;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use boolean_visibility::asymptotics::directional_tail;
use boolean_visibility::coverage::{
    shepp_bound, siegel_holst_cover_prob, stevens_cover_prob, twoatom_uncover_prob, ArcLengthLaw,
};
use boolean_visibility::experiments::{
    bounds_check, conditional_tail, d3_slope_bracket, estimate_tail, finger_check, fit_log_slope, gumbel_clearing,
    gumbel_small_r, samples_csv, sig9, tail_csv, Check, ExperimentReport, SlopeModel, EULER_GAMMA,
};
use boolean_visibility::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use args::{Common, Format};

#[derive(Debug, Parser)]
#[command(name = "bvis", version, about = "Total visibility in Boolean models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Linear,
    LinearPlusLog,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Formula {
    Stevens,
    TwoAtom,
    Shepp,
    SiegelHolst,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate P(V ≥ r) on a radius grid.
    Tail {
        #[command(flatten)]
        common: Common,
    },
    /// Tail estimate plus a log-slope fit against the directional rate.
    Slope {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModelArg::LinearPlusLog)]
        model: ModelArg,
        /// Relative tolerance on the slope for --assert.
        #[arg(long, default_value_t = 0.15)]
        slope_tol: f64,
    },
    /// Small-radius Gumbel limit (samples = --trials).
    GumbelSmall {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.15)]
        ks_max: f64,
        #[arg(long, default_value_t = 0.3)]
        mean_tol: f64,
    },
    /// Large-clearing Gumbel limit (samples = --trials).
    GumbelClearing {
        #[command(flatten)]
        common: Common,
        /// Clearing radius.
        #[arg(long)]
        clearing: f64,
        #[arg(long, default_value_t = 0.10)]
        ks_max: f64,
        /// Also estimate P(V ≥ r + r^alpha | S ≥ r).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Three-dimensional slope against its admissible bracket.
    D3Bracket {
        #[command(flatten)]
        common: Common,
    },
    /// Simulated tail next to the analytic lower and upper bounds.
    BoundsCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Finger events against the total visibility at one distance.
    FingerCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8.0)]
        distance: f64,
        #[arg(long, default_value_t = 1.0)]
        zeta: f64,
    },
    /// Covering probabilities of random arcs.
    CoverProb {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        formula: Formula,
        /// Arc length, or mean length for the two-atom law.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        n: u64,
        /// Use the shadow-length law of --grain at this distance (siegel-holst).
        #[arg(long)]
        distance: Option<f64>,
    },
}

struct Output {
    csv: String,
    report: ExperimentReport,
}

fn report(experiment: &str, common: &Common, config: Value) -> ExperimentReport {
    ExperimentReport {
        experiment: experiment.into(),
        config,
        seed: common.seed,
        rows: Vec::new(),
        samples: Vec::new(),
        summary: Value::Null,
        checks: Vec::new(),
        wall_clock_seconds: 0.0,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

fn run(command: &Command) -> Result<(Output, &Common)> {
    match command {
        Command::Tail { common } => {
            let config = common.config()?;
            let est = estimate_tail(&config, &common.grid("1:5:1")?, common.trials, common.seed)?;
            let mut rep = report("tail", common, to_value(&config));
            rep.summary = json!({ "undecided": est.undecided });
            rep.rows = est.rows;
            Ok((Output { csv: tail_csv(&rep.rows), report: rep }, common))
        }
        Command::Slope { common, model, slope_tol } => {
            let config = common.config()?;
            let est = estimate_tail(&config, &common.grid("2:8:1")?, common.trials, common.seed)?;
            let model = match model {
                ModelArg::Linear => SlopeModel::Linear,
                ModelArg::LinearPlusLog => SlopeModel::LinearPlusLog,
            };
            let fit = fit_log_slope(&est.rows, model)?;
            let target = directional_tail(1.0, &config)?.ln();
            let mut rep = report("slope", common, to_value(&config));
            let band = slope_tol * target.abs();
            rep.checks.push(Check::within("slope", fit.slope, Some(target - band), Some(target + band)));
            rep.summary = json!({ "fit": fit, "target": target, "undecided": est.undecided });
            rep.rows = est.rows;
            Ok((Output { csv: tail_csv(&rep.rows), report: rep }, common))
        }
        Command::GumbelSmall { common, ks_max, mean_tol } => {
            let radius = common.constant_radius()?;
            let g = gumbel_small_r(radius, common.dim, common.trials as usize, common.seed, common.tol)?;
            let mut rep = report("gumbel-small", common, json!({ "dimension": common.dim, "radius": radius }));
            rep.checks.push(Check::within("ks", g.ks, None, Some(*ks_max)));
            rep.checks.push(Check::within("mean", g.mean, Some(EULER_GAMMA - mean_tol), Some(EULER_GAMMA + mean_tol)));
            rep.summary = json!({ "ks": g.ks, "mean": g.mean, "intervals": g.intervals });
            rep.samples = g.transformed;
            Ok((Output { csv: samples_csv("xi", &rep.samples), report: rep }, common))
        }
        Command::GumbelClearing { common, clearing, ks_max, alpha } => {
            let law = common.law()?;
            let g = gumbel_clearing(*clearing, &law, common.dim, common.trials as usize, common.seed, common.tol)?;
            let mut rep = report(
                "gumbel-clearing",
                common,
                json!({ "dimension": common.dim, "grain_law": law, "clearing": clearing }),
            );
            rep.checks.push(Check::within("ks", g.ks, None, Some(*ks_max)));
            let mut summary = json!({ "ks": g.ks, "mean": g.mean, "intervals": g.intervals });
            if let Some(alpha) = alpha {
                let row = conditional_tail(&common.config()?, *clearing, *alpha, common.trials, common.seed)?;
                summary["conditional_tail"] = to_value(&row);
            }
            rep.summary = summary;
            rep.samples = g.transformed;
            Ok((Output { csv: samples_csv("psi", &rep.samples), report: rep }, common))
        }
        Command::D3Bracket { common } => {
            let radius = common.constant_radius()?;
            let b = d3_slope_bracket(radius, &common.grid("2:5:0.5")?, common.trials, common.seed)?;
            let pad = 2.0 * b.fit.stderr;
            let mut rep = report("d3-bracket", common, json!({ "dimension": 3, "radius": radius }));
            rep.checks.push(Check::within("slope", b.fit.slope, Some(b.bracket.0 - pad), Some(b.bracket.1 + pad)));
            rep.summary = json!({ "fit": b.fit, "bracket": b.bracket, "undecided": b.tail.undecided });
            rep.rows = b.tail.rows;
            Ok((Output { csv: tail_csv(&rep.rows), report: rep }, common))
        }
        Command::BoundsCheck { common } => {
            let config = common.config()?;
            let rows = bounds_check(&config, &common.grid("3:5:1")?, common.trials, common.seed)?;
            let mut rep = report("bounds-check", common, to_value(&config));
            for b in &rows {
                let slack = 3.0 * b.row.stderr();
                rep.checks.push(Check::within(
                    format!("r={}", sig9(b.row.r)),
                    b.row.p_hat,
                    Some(b.bounds.lower - slack),
                    b.bounds.upper.map(|u| u + slack),
                ));
            }
            let mut csv = String::from("r,trials,hits,p_hat,lower,upper\n");
            for b in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sig9(b.row.r),
                    b.row.trials,
                    b.row.hits,
                    sig9(b.row.p_hat),
                    sig9(b.bounds.lower),
                    b.bounds.upper.map_or(String::new(), sig9)
                ));
            }
            rep.summary = to_value(&rows);
            rep.rows = rows.iter().map(|b| b.row).collect();
            Ok((Output { csv, report: rep }, common))
        }
        Command::FingerCheck { common, distance, zeta } => {
            let radius = common.constant_radius()?;
            let f = finger_check(radius, *distance, *zeta, common.trials, common.seed)?;
            let mut rep = report(
                "finger-check",
                common,
                json!({ "radius": radius, "distance": distance, "zeta": zeta }),
            );
            rep.checks.push(Check::within(
                "ordering",
                f.finger_p() - f.visible_p(),
                None,
                Some(3.0 * f.ordering_stderr()),
            ));
            rep.checks.push(Check::within("first_term", f.finger_p(), Some(0.75 * f.first_term), None));
            let csv = format!(
                "trials,finger_hits,visible_hits,first_term\n{},{},{},{}\n",
                f.trials,
                f.finger_hits,
                f.visible_hits,
                sig9(f.first_term)
            );
            rep.summary = to_value(&f);
            Ok((Output { csv, report: rep }, common))
        }
        Command::CoverProb { common, formula, a, n, distance } => {
            let need_a = || a.ok_or_else(|| Error::InvalidArgument("--a is required for this formula".into()));
            let value = match formula {
                Formula::Stevens => json!({ "cover": stevens_cover_prob(need_a()?, *n)? }),
                Formula::TwoAtom => json!({ "uncover": twoatom_uncover_prob(need_a()?, *n)? }),
                Formula::Shepp => to_value(&shepp_bound(need_a()?, *n)?),
                Formula::SiegelHolst => {
                    let law = match distance {
                        Some(r) => ArcLengthLaw::nu_r(&common.law()?, *r)?,
                        None => ArcLengthLaw::deterministic(need_a()?)?,
                    };
                    to_value(&siegel_holst_cover_prob(&law, *n, common.trials as usize, common.seed)?)
                }
            };
            let mut rep = report("cover-prob", common, json!({ "formula": format!("{formula:?}"), "a": a, "n": n, "distance": distance }));
            let mut csv = String::new();
            if let Value::Object(map) = &value {
                let keys: Vec<&String> = map.keys().collect();
                csv.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
                csv.push('\n');
                let vals: Vec<String> = map
                    .values()
                    .map(|v| v.as_f64().map_or(v.to_string(), sig9))
                    .collect();
                csv.push_str(&vals.join(","));
                csv.push('\n');
            }
            rep.summary = value;
            Ok((Output { csv, report: rep }, common))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (mut output, common) = match run(&cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("bvis: {e}");
            return match e {
                Error::InsufficientData(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            };
        }
    };
    output.report.wall_clock_seconds = start.elapsed().as_secs_f64();
    let text = match common.format {
        Format::Csv => output.csv,
        Format::Json => serde_json::to_string_pretty(&output.report).expect("serialisable") + "\n",
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("bvis: cannot write output: {e}");
        return ExitCode::from(1);
    }
    for c in output.report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check {} failed: {} outside [{:?}, {:?}]", c.name, c.value, c.lower, c.upper);
    }
    if common.assert_checks && !output.report.passed() {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
