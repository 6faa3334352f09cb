//! Closed-form laws, bounds and normalising constants for the visibility.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::coverage::{simplex_moments, stevens_cover_prob, twoatom_uncover_prob, ArcLengthLaw, McEstimate};
use crate::error::{ensure, Error, Result};
use crate::model::{exclusion_volume, Conditioning, GrainLaw, ModelConfig};
use crate::numeric::{ln_gamma, unit_ball_volume, CompensatedSum, GaussLegendre};

/// `P(V(u) > r)` for a fixed direction `u`.
pub fn directional_tail(r: f64, config: &ModelConfig) -> Result<f64> {
    ensure(r >= 0.0, || format!("distance {r} must be ≥ 0"))?;
    let d = config.dimension;
    let rate = match &config.grain_law {
        GrainLaw::RotatedPolygon { .. } if d == 2 => config.grain_law.mean_width(),
        GrainLaw::RotatedPolygon { .. } => {
            return Err(Error::Unsupported("polygon grains exist only in dimension 2".into()))
        }
        law => unit_ball_volume(d - 1) * law.radius_moment(d as i32 - 1).expect("disc law"),
    };
    Ok((-config.intensity * rate * r).exp())
}

fn shape_params(radius: f64, r: f64) -> (f64, f64) {
    let q = r / radius;
    (q, q * (2.0 + q))
}

/// Normalised shadow length of a disc of radius `radius` whose centre is
/// uniform on the annulus of admissible centres, driven by `u ∈ [0, 1]`.
pub fn shadow_length_map(radius: f64, r: f64, u: f64) -> Result<f64> {
    ensure(radius > 0.0 && r > 0.0, || format!("need R > 0 and r > 0, got R = {radius}, r = {r}"))?;
    ensure((0.0..=1.0).contains(&u), || format!("uniform variate {u} outside [0, 1]"))?;
    Ok(shadow_length_unchecked(radius, r, u))
}

#[inline]
fn shadow_length_unchecked(radius: f64, r: f64, u: f64) -> f64 {
    let (q, c) = shape_params(radius, r);
    let s = (1.0 + c * u).sqrt();
    if u <= r / (r + 2.0 * radius) {
        (1.0 / s).min(1.0).asin() / PI
    } else {
        ((q + (2.0 + q) * u) / (2.0 * s)).clamp(-1.0, 1.0).acos() / PI
    }
}

/// Density of the shadow-length law at `u` (zero outside `[0, 1/2]`).
pub fn nu_r_pdf(u: f64, radius: f64, r: f64) -> f64 {
    if !(0.0..=0.5).contains(&u) {
        return 0.0;
    }
    let norm = r * radius + r * r / 2.0;
    let split = (radius / r).atan() / PI;
    let (s1, c1) = (PI * u).sin_cos();
    if u <= split {
        let s2 = (2.0 * PI * u).sin();
        let c2 = (2.0 * PI * u).cos();
        let root = (radius * radius - r * r * s1 * s1).max(0.0).sqrt();
        PI * r / norm * (r * s2 + s1 * (radius * radius + r * r * c2) / root)
    } else {
        PI * radius * radius / norm * c1 / (s1 * s1 * s1)
    }
}

/// Distribution function of the shadow-length law.
pub fn nu_r_cdf(u: f64, radius: f64, r: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 0.5 {
        return 1.0;
    }
    let (q, c) = shape_params(radius, r);
    let split = (radius / r).atan() / PI;
    let (s, co) = (PI * u).sin_cos();
    let v = if u >= split {
        // tangent regime: sin(πu) = 1/√(1 + cV)
        (co / s).powi(2) / c
    } else {
        // ρ/R solves ρ² − 2q cos(πu) ρ + q² − 1 = 0 (larger root)
        let t = q * co + (1.0 - q * q * s * s).max(0.0).sqrt();
        (t * t - 1.0) / c
    };
    (1.0 - v).clamp(0.0, 1.0)
}

fn disc_atoms(law: &GrainLaw) -> Result<Vec<(f64, f64)>> {
    law.disc_radii()
        .ok_or_else(|| Error::Unsupported("only disc grains have a closed-form shadow law".into()))
}

/// Mean normalised shadow length `m_r` of a disc meeting the disc of radius `r`.
pub fn mean_shadow(r: f64, law: &GrainLaw) -> Result<f64> {
    ensure(r > 0.0, || format!("distance {r} must be > 0"))?;
    let atoms = disc_atoms(law)?;
    let gl = GaussLegendre::new(128);
    let mut total = 0.0;
    let mut weight = 0.0;
    for (radius, p) in atoms {
        let split = r / (r + 2.0 * radius);
        // U = s² and U = 1 − s² remove the square-root behaviour at both ends
        let head = gl.integrate(|s| 2.0 * s * shadow_length_unchecked(radius, r, s * s), 0.0, split.sqrt());
        let tail = gl.integrate(
            |s| 2.0 * s * shadow_length_unchecked(radius, r, 1.0 - s * s),
            0.0,
            (1.0 - split).sqrt(),
        );
        let w = p * (r * r + 2.0 * r * radius);
        total += w * (head + tail);
        weight += w;
    }
    Ok(total / weight)
}

/// Sandwich on `P(𝔙 ≥ r)` for planar disc grains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub lower: f64,
    /// `None` when the mean shadow exceeds 1/4 and the bound does not apply.
    pub upper: Option<f64>,
    pub mean_shadow: f64,
    /// Poisson mean of grains meeting the disc of radius `r`.
    pub exclusion: f64,
}

fn require_planar_discs(config: &ModelConfig) -> Result<()> {
    ensure(config.dimension == 2, || "the shadow-arc formulas are planar".into())?;
    ensure(config.conditioning == Conditioning::OriginFree, || {
        "the shadow-arc formulas assume the origin-free conditioning".into()
    })?;
    disc_atoms(&config.grain_law).map(|_| ())
}

pub fn tail_bounds(r: f64, config: &ModelConfig) -> Result<TailBounds> {
    require_planar_discs(config)?;
    let m = mean_shadow(r, &config.grain_law)?;
    let g = exclusion_volume(r, config)?;
    let lower = 2.0 * g * m * (-g * m).exp() + (-2.0 * g * m).exp();
    let upper = (m <= 0.25).then(|| 2.0 * (g + 2.0) * (-g * m).exp());
    Ok(TailBounds {
        lower,
        upper,
        mean_shadow: m,
        exclusion: g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverModel {
    /// Deterministic arcs of the mean length (upper-bound chain).
    StevensAtMean,
    /// Two-atom arcs with the same mean (lower-bound chain).
    TwoAtomAtMean,
    /// The exact shadow law, simplex integrals by Monte Carlo.
    SiegelHolstMc { samples: usize, seed: u64 },
}

/// Smallest `n ≥ g` whose Poisson(`g`) upper tail beyond `n` is below `eps`.
fn poisson_truncation(g: f64, eps: f64) -> u64 {
    let mut n = g.floor() as u64;
    loop {
        let next = (n + 1) as f64;
        let log_pmf = next * g.ln() - g - ln_gamma(next + 1.0);
        let ratio = g / (next + 1.0);
        if ratio < 1.0 && log_pmf.exp() / (1.0 - ratio) < eps {
            return n;
        }
        n += 1;
    }
}

/// `P(𝔙 ≥ r)` as a Poisson mixture over the number of shadows, with the
/// covering probabilities supplied by `model`.
pub fn lawwithcover_eval(r: f64, config: &ModelConfig, model: CoverModel, trunc_eps: f64) -> Result<McEstimate> {
    ensure(r >= 0.0, || format!("distance {r} must be ≥ 0"))?;
    ensure(trunc_eps > 0.0 && trunc_eps < 1.0, || format!("truncation {trunc_eps} outside (0, 1)"))?;
    require_planar_discs(config)?;
    let g = exclusion_volume(r, config)?;
    if g == 0.0 {
        return Ok(McEstimate { estimate: 1.0, stderr: 0.0 });
    }
    let nmax = poisson_truncation(g, trunc_eps);
    let weight = |n: u64| (n as f64 * g.ln() - g - ln_gamma(n as f64 + 1.0)).exp();
    match model {
        CoverModel::StevensAtMean | CoverModel::TwoAtomAtMean => {
            let m = mean_shadow(r, &config.grain_law)?;
            let mut sum = CompensatedSum::new();
            for n in 0..=nmax {
                let uncover = match model {
                    CoverModel::StevensAtMean => 1.0 - stevens_cover_prob(m, n)?,
                    _ => twoatom_uncover_prob(m, n)?,
                };
                sum.add(weight(n) * uncover);
            }
            Ok(McEstimate {
                estimate: sum.value(),
                stderr: 0.0,
            })
        }
        CoverModel::SiegelHolstMc { samples, seed } => {
            ensure(samples >= 2, || "need at least two Monte Carlo samples".into())?;
            // Σ_n w_n Σ_k (−1)^{k+1} C(n,k) E[A_k B_k^{n−k}] summed over n first:
            // Σ_k (−1)^{k+1} g^k/k! E[A_k exp(−g (1 − B_k))].
            let law = ArcLengthLaw::nu_r(&config.grain_law, r)?;
            let lg = g.ln();
            let moments = simplex_moments(&law, nmax as usize, samples, seed, |k, b| {
                (k as f64 * lg - ln_gamma(k as f64 + 1.0) - g * (1.0 - b)).exp()
            });
            let mut sum = CompensatedSum::new();
            sum.add((-g).exp());
            let mut variance = 0.0;
            for (idx, (mean, var)) in moments.iter().enumerate() {
                let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
                sum.add(sign * mean);
                variance += var / samples as f64;
            }
            Ok(McEstimate {
                estimate: sum.value(),
                stderr: variance.sqrt(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelConstants {
    pub d: usize,
    /// Centring constant for the small-radius limit.
    pub k_d: f64,
    /// Centring constant for the large-clearing limit (depends on the radius law).
    pub k_prime_d: f64,
}

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Small-radius centring constant.
pub fn k_d(d: usize) -> Result<f64> {
    ensure(d >= 2, || format!("dimension {d} must be ≥ 2"))?;
    let df = d as f64;
    let m = df - 1.0;
    Ok(2.0 * m * df.ln() + (3.0 * m - 1.0) * m.ln() + (2.0 * df - 2.0) * ln_gamma(df / 2.0 - 0.5)
        - ln_factorial(d - 1)
        - ((m * m + 1.0) / 2.0) * PI.ln()
        - (2.0 * df - 3.0) * 2f64.ln()
        - (df - 2.0) * ln_gamma(df / 2.0))
}

/// Large-clearing centring constant.
pub fn k_prime_d(d: usize, law: &GrainLaw) -> Result<f64> {
    ensure(d >= 2, || format!("dimension {d} must be ≥ 2"))?;
    let df = d as f64;
    let m = df - 1.0;
    let low = law
        .radius_moment(d as i32 - 2)
        .ok_or_else(|| Error::Unsupported("the constant needs disc radius moments".into()))?;
    let high = law.radius_moment(d as i32 - 1).expect("disc law");
    let ratio = PI.sqrt() * (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp();
    Ok(-ln_factorial(d - 1) + (df - 2.0) * ratio.ln() + m * low.ln() - (df - 2.0) * high.ln() + m * m.ln()
        - (unit_ball_volume(d - 1) * high / (df * unit_ball_volume(d))).ln())
}

pub fn gumbel_constants(d: usize, law: &GrainLaw) -> Result<GumbelConstants> {
    Ok(GumbelConstants {
        d,
        k_d: k_d(d)?,
        k_prime_d: k_prime_d(d, law)?,
    })
}

/// Normalised visibility for small constant radius `radius`.
pub fn xi_transform(v: f64, radius: f64, d: usize) -> Result<f64> {
    ensure(radius > 0.0 && radius < 1.0, || format!("radius {radius} outside (0, 1)"))?;
    ensure(v >= 0.0, || format!("visibility {v} must be ≥ 0"))?;
    let m = d as f64 - 1.0;
    Ok(unit_ball_volume(d - 1) * radius.powf(m) * v + d as f64 * m * radius.ln()
        - 2.0 * m * (-radius.ln()).ln()
        - k_d(d)?)
}

/// Normalised visibility beyond a clearing of radius `r`.
pub fn psi_transform(v: f64, r: f64, law: &GrainLaw, d: usize) -> Result<f64> {
    ensure(r > E, || format!("clearing radius {r} must exceed e"))?;
    ensure(v >= r, || format!("visibility {v} below the clearing radius {r}"))?;
    let m = d as f64 - 1.0;
    let high = law
        .radius_moment(d as i32 - 1)
        .ok_or_else(|| Error::Unsupported("the transform needs disc radius moments".into()))?;
    Ok(unit_ball_volume(d - 1) * high * (v - r) - m * r.ln() - m * r.ln().ln() - k_prime_d(d, law)?)
}

/// Standard Gumbel distribution function.
pub fn gumbel_cdf(u: f64) -> f64 {
    (-(-u).exp()).exp()
}

/// Discretised directions and finger parameters at distance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerGeometry {
    pub zeta: f64,
    pub n_r: u64,
    pub theta_r: f64,
    pub rho_r: f64,
    pub kappa: f64,
}

/// First term `N_r e^{−2Rr}` of the union bound over fingers.
pub fn finger_lower_bound(r: f64, radius: f64, zeta: f64) -> Result<(f64, FingerGeometry)> {
    ensure(radius > 0.0, || format!("radius {radius} must be > 0"))?;
    ensure(zeta > 0.0 && zeta < 2.0 / radius, || {
        format!("zeta {zeta} outside (0, 2/R) = (0, {})", 2.0 / radius)
    })?;
    ensure(r > radius, || format!("distance {r} must exceed R = {radius}"))?;
    let n_r = (zeta * r).floor() as u64;
    ensure(n_r >= 1, || format!("zeta r = {} gives no directions", zeta * r))?;
    let theta_r = 2.0 * PI / (zeta * r);
    let rho_r = radius / (theta_r / 2.0).sin();
    ensure(theta_r < PI && rho_r < r, || {
        format!("r = {r} too small: finger overlap radius {rho_r} must be < r")
    })?;
    let geometry = FingerGeometry {
        zeta,
        n_r,
        theta_r,
        rho_r,
        kappa: radius * zeta / PI,
    };
    Ok((n_r as f64 * (-2.0 * radius * r).exp(), geometry))
}
