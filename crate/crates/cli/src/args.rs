use std::path::PathBuf;
use std::sync::Arc;

use boolean_visibility::geometry::ConvexPolygon;
use boolean_visibility::model::{Conditioning, GrainLaw, ModelConfig};
use boolean_visibility::{Error, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Space dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Poisson intensity of the germs.
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    /// Grain law: const:R, discrete:R1:p1,R2:p2,... or polygon:FILE (JSON vertices).
    #[arg(long, default_value = "const:0.5")]
    pub grain: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replicates (or samples) per run.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Radius grid lo:hi:step, both ends included.
    #[arg(long = "r")]
    pub r_grid: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Absolute tolerance for visibility bisection.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Exit with status 3 if a declared check fails.
    #[arg(long = "assert")]
    pub assert_checks: bool,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn number(text: &str, what: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| bad(format!("cannot parse {what} from {text:?}")))
}

pub fn parse_grain(text: &str) -> Result<GrainLaw> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| bad(format!("grain {text:?} lacks a kind prefix")))?;
    match kind {
        "const" => GrainLaw::constant_disc(number(rest, "radius")?),
        "discrete" => {
            let components = rest
                .split(',')
                .map(|item| {
                    let (r, p) = item
                        .split_once(':')
                        .ok_or_else(|| bad(format!("component {item:?} is not R:p")))?;
                    Ok((number(r, "radius")?, number(p, "weight")?))
                })
                .collect::<Result<Vec<_>>>()?;
            GrainLaw::discrete_disc(components)
        }
        "polygon" => {
            let text = std::fs::read_to_string(rest).map_err(|e| bad(format!("cannot read {rest}: {e}")))?;
            let shape: ConvexPolygon =
                serde_json::from_str(&text).map_err(|e| bad(format!("bad polygon file {rest}: {e}")))?;
            Ok(GrainLaw::RotatedPolygon { shape: Arc::new(shape) })
        }
        other => Err(bad(format!("unknown grain kind {other:?}"))),
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!("grid {text:?} is not lo:hi:step")));
    }
    let (lo, hi, step) = (number(parts[0], "lo")?, number(parts[1], "hi")?, number(parts[2], "step")?);
    if !(step > 0.0 && lo > 0.0 && hi >= lo) {
        return Err(bad(format!("grid {text:?} needs 0 < lo ≤ hi and step > 0")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

impl Common {
    pub fn law(&self) -> Result<GrainLaw> {
        parse_grain(&self.grain)
    }

    pub fn config(&self) -> Result<ModelConfig> {
        ModelConfig::new(self.dim, self.intensity, self.law()?, Conditioning::OriginFree)
    }

    pub fn grid(&self, default: &str) -> Result<Vec<f64>> {
        parse_grid(self.r_grid.as_deref().unwrap_or(default))
    }

    /// Constant radius of the grain law, for experiments stated for one radius.
    pub fn constant_radius(&self) -> Result<f64> {
        match self.law()? {
            GrainLaw::ConstantDisc { radius } => Ok(radius),
            _ => Err(Error::Unsupported("this experiment needs --grain const:R".into())),
        }
    }
}
