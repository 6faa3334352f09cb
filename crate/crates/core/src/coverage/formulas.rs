use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numeric::{integrate, ln_gamma, unit_ball_volume, CompensatedSum};

/// Probability that `n` arcs of normalised length `a`, with independent
/// uniform positions, cover the circle of perimeter one.
///
/// Evaluated in floating point when the alternating terms are small, and
/// exactly over the integers otherwise (`a` is a dyadic rational, so every
/// term is).
pub fn stevens_cover_prob(a: f64, n: u64) -> Result<f64> {
    ensure((0.0..1.0).contains(&a), || format!("arc length {a} outside [0, 1)"))?;
    if n == 0 || (n as f64) * a < 1.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let kmax = ((1.0 / a).ceil() as u64).min(n);
    let log_max_term = (0..=kmax)
        .map(|k| ln_choose(n, k) + (nf - 1.0) * (1.0 - k as f64 * a).max(1e-300).ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let p = if log_max_term < (1e3f64).ln() {
        stevens_float(a, n)
    } else {
        stevens_exact(a, n)
    };
    Ok(p.clamp(0.0, 1.0))
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn stevens_float(a: f64, n: u64) -> f64 {
    let mut sum = CompensatedSum::new();
    let mut binom = 1.0f64;
    for k in 0..=n {
        let x = 1.0 - k as f64 * a;
        if x <= 0.0 {
            break;
        }
        let term = binom * x.powi((n - 1) as i32);
        sum.add(if k % 2 == 0 { term } else { -term });
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    sum.value()
}

fn stevens_exact(a: f64, n: u64) -> f64 {
    // a = p / 2^e exactly
    let mut e = 0u32;
    let mut scaled = a;
    while scaled.fract() != 0.0 {
        scaled *= 2.0;
        e += 1;
    }
    let p = BigInt::from(scaled as u64);
    let one = BigInt::one() << e as usize;
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=n {
        let x = &one - &p * k;
        if !x.is_positive() {
            break;
        }
        let term = &binom * x.pow((n - 1) as u32);
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * (n - k) / (k + 1);
    }
    dyadic_to_f64(&total, e as u64 * (n - 1))
}

/// `num / 2^shift` rounded to f64.
fn dyadic_to_f64(num: &BigInt, shift: u64) -> f64 {
    let bits = num.bits();
    let drop = bits.saturating_sub(62);
    let mantissa = (num >> drop as usize).to_f64().unwrap_or(0.0);
    let mut exp = drop as i64 - shift as i64;
    let mut v = mantissa;
    while exp < -1000 {
        v *= 2f64.powi(-1000);
        exp += 1000;
    }
    v * 2f64.powi(exp as i32)
}

/// Uncovering probability `1 − P` for arcs of length 0 or 1/2, the latter
/// with probability `2m`.
pub fn twoatom_uncover_prob(m: f64, n: u64) -> Result<f64> {
    ensure((0.0..=0.5).contains(&m), || format!("mean {m} outside [0, 1/2]"))?;
    let nf = n as f64;
    let first = if n == 0 { 0.0 } else { 2.0 * nf * m * (1.0 - m).powf(nf - 1.0) };
    Ok(first + (1.0 - 2.0 * m).powf(nf))
}

/// Upper bounds on the probability that `n` arcs of length `a` leave a gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheppBound {
    pub tight: f64,
    pub simple: f64,
}

pub fn shepp_bound(a: f64, n: u64) -> Result<SheppBound> {
    ensure((0.0..=0.25).contains(&a), || format!("arc length {a} outside [0, 1/4]"))?;
    ensure(n >= 1, || "need at least one arc".into())?;
    let nf = n as f64;
    let integral = ((1.0 - a).powf(nf + 1.0) - (1.0 - 2.0 * a).powf(nf + 1.0)) / (nf + 1.0);
    let tight = 2.0 * (1.0 - a).powf(2.0 * nf) / (integral + (0.25 - a) * (1.0 - 2.0 * a).powf(nf));
    let simple = 2.0 * (nf + 1.0) * (1.0 - a).powf(nf - 1.0);
    Ok(SheppBound { tight, simple })
}

/// Fraction of the unit sphere in `R^d` covered by a cap of angular radius `theta`.
pub fn cap_fraction(theta: f64, d: usize) -> Result<f64> {
    ensure((0.0..=std::f64::consts::PI).contains(&theta), || {
        format!("cap radius {theta} outside [0, π]")
    })?;
    ensure(d >= 2, || format!("dimension {d} must be ≥ 2"))?;
    let f = match d {
        2 => theta / std::f64::consts::PI,
        3 => (1.0 - theta.cos()) / 2.0,
        _ => {
            let c = (d - 1) as f64 * unit_ball_volume(d - 1) / (d as f64 * unit_ball_volume(d));
            c * integrate(|t| t.sin().powi(d as i32 - 2), 0.0, theta, 1e-12)
        }
    };
    Ok(f.clamp(0.0, 1.0))
}
