//! Covering probability for random arc lengths, estimated by Monte Carlo
//! over the uniform simplex.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::nu_r_cdf;
use crate::error::{ensure, Error, Result};
use crate::model::GrainLaw;
use crate::numeric::{integrate, ln_gamma, CompensatedSum};
use crate::rng::stream_rng;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Law of the normalised length of one random arc (perimeter one).
#[derive(Debug, Clone, PartialEq)]
pub enum ArcLengthLaw {
    Deterministic(f64),
    /// Mass `1 − 2m` at 0 and `2m` at 1/2.
    TwoAtom(f64),
    Empirical(EmpiricalArcLaw),
    NuR(NuRLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalArcLaw {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

/// Shadow-length law at distance `r` for disc grains, with a tabulated
/// antiderivative of its distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct NuRLaw {
    r: f64,
    components: Vec<(f64, f64)>,
    step: f64,
    integrated: Vec<f64>,
    cdf_nodes: Vec<f64>,
}

const NUR_NODES: usize = 2048;

impl ArcLengthLaw {
    pub fn deterministic(a: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&a), || format!("arc length {a} outside [0, 1]"))?;
        Ok(ArcLengthLaw::Deterministic(a))
    }

    pub fn two_atom(m: f64) -> Result<Self> {
        ensure((0.0..=0.5).contains(&m), || format!("mean {m} outside [0, 1/2]"))?;
        Ok(ArcLengthLaw::TwoAtom(m))
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        ensure(!samples.is_empty(), || "empirical law needs samples".into())?;
        ensure(samples.iter().all(|x| (0.0..=1.0).contains(x)), || {
            "empirical arc lengths must lie in [0, 1]".into()
        })?;
        samples.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(samples.len() + 1);
        prefix.push(0.0);
        let mut acc = CompensatedSum::new();
        for x in &samples {
            acc.add(*x);
            prefix.push(acc.value());
        }
        Ok(ArcLengthLaw::Empirical(EmpiricalArcLaw { sorted: samples, prefix }))
    }

    /// Shadow-length law of a disc grain meeting the disc of radius `r`.
    pub fn nu_r(law: &GrainLaw, r: f64) -> Result<Self> {
        ensure(r > 0.0, || format!("distance {r} must be > 0"))?;
        let radii = law.disc_radii().ok_or_else(|| {
            Error::Unsupported("shadow-length law is only implemented for disc grains".into())
        })?;
        let total: f64 = radii.iter().map(|(rad, p)| p * (r * r + 2.0 * r * rad)).sum();
        let components: Vec<(f64, f64)> =
            radii.iter().map(|(rad, p)| (*rad, p * (r * r + 2.0 * r * rad) / total)).collect();
        let step = 0.5 / NUR_NODES as f64;
        let mut law = NuRLaw {
            r,
            components,
            step,
            integrated: Vec::with_capacity(NUR_NODES + 1),
            cdf_nodes: Vec::new(),
        };
        law.cdf_nodes = (0..=NUR_NODES).map(|i| law.cdf(i as f64 * step)).collect();
        let mut acc = 0.0;
        law.integrated.push(0.0);
        for i in 0..NUR_NODES {
            let a = i as f64 * step;
            acc += integrate(|u| law.cdf(u), a, a + step, 1e-15);
            law.integrated.push(acc);
        }
        Ok(ArcLengthLaw::NuR(law))
    }

    /// `F(u) = P(length ≤ u)`.
    pub fn cdf(&self, u: f64) -> f64 {
        match self {
            ArcLengthLaw::Deterministic(a) => (u >= *a) as u8 as f64,
            ArcLengthLaw::TwoAtom(m) => {
                if u >= 0.5 {
                    1.0
                } else if u >= 0.0 {
                    1.0 - 2.0 * m
                } else {
                    0.0
                }
            }
            ArcLengthLaw::Empirical(e) => e.sorted.partition_point(|x| *x <= u) as f64 / e.sorted.len() as f64,
            ArcLengthLaw::NuR(l) => l.cdf(u),
        }
    }

    /// `G(u) = ∫₀ᵘ F`.
    pub fn integrated_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            ArcLengthLaw::Deterministic(a) => (u - a).max(0.0),
            ArcLengthLaw::TwoAtom(m) => {
                if u < 0.5 {
                    (1.0 - 2.0 * m) * u
                } else {
                    0.5 * (1.0 - 2.0 * m) + (u - 0.5)
                }
            }
            ArcLengthLaw::Empirical(e) => {
                let k = e.sorted.partition_point(|x| *x <= u);
                (k as f64 * u - e.prefix[k]) / e.sorted.len() as f64
            }
            ArcLengthLaw::NuR(l) => l.integrated_cdf(u),
        }
    }

    pub fn mean(&self) -> f64 {
        1.0 - self.integrated_cdf(1.0)
    }
}

impl NuRLaw {
    pub fn r(&self) -> f64 {
        self.r
    }

    fn cdf(&self, u: f64) -> f64 {
        self.components.iter().map(|(rad, w)| w * nu_r_cdf(u, *rad, self.r)).sum()
    }

    fn integrated_cdf(&self, u: f64) -> f64 {
        if u >= 0.5 {
            return self.integrated[NUR_NODES] + (u - 0.5);
        }
        // cubic Hermite with G' = F at the nodes
        let x = u / self.step;
        let i = (x as usize).min(NUR_NODES - 1);
        let t = x - i as f64;
        let (g0, g1) = (self.integrated[i], self.integrated[i + 1]);
        let (d0, d1) = (self.cdf_nodes[i] * self.step, self.cdf_nodes[i + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * g0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * g1 + (t3 - t2) * d1
    }
}

/// Uniform point of the simplex `{x ≥ 0, Σx = 1}` in dimension `k`.
fn simplex_point<R: Rng>(rng: &mut R, out: &mut Vec<f64>, k: usize) {
    out.clear();
    let mut total = 0.0;
    for _ in 0..k {
        let e: f64 = rng.sample(Exp1);
        total += e;
        out.push(e);
    }
    for x in out.iter_mut() {
        *x /= total;
    }
}

/// Per-`k` simplex averages `E[Π F(U_i) · h(Σ G(U_i))]` with their variances.
pub(crate) fn simplex_moments<H>(law: &ArcLengthLaw, kmax: usize, samples: usize, seed: u64, h: H) -> Vec<(f64, f64)>
where
    H: Fn(usize, f64) -> f64 + Sync,
{
    (1..=kmax)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let mut point = Vec::with_capacity(k);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..samples {
                simplex_point(&mut rng, &mut point, k);
                let mut prod = 1.0;
                let mut g = 0.0;
                for &u in &point {
                    prod *= law.cdf(u);
                    if prod == 0.0 {
                        break;
                    }
                    g += law.integrated_cdf(u);
                }
                let v = if prod == 0.0 { 0.0 } else { prod * h(k, g) };
                sum += v;
                sum_sq += v * v;
            }
            let n = samples as f64;
            let mean = sum / n;
            let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            (mean, var)
        })
        .collect()
}

/// Probability that `n` i.i.d. isotropic arcs with length law `law` cover the
/// circle, as an alternating sum of simplex integrals each estimated from
/// `mc_samples` uniform simplex points. The `k = 0` term equals one.
pub fn siegel_holst_cover_prob(law: &ArcLengthLaw, n: u64, mc_samples: usize, seed: u64) -> Result<McEstimate> {
    ensure(mc_samples >= 1, || "need at least one Monte Carlo sample".into())?;
    if n == 0 {
        return Ok(McEstimate { estimate: 0.0, stderr: 0.0 });
    }
    if let ArcLengthLaw::Deterministic(_) = law {
        ensure(n <= 100, || {
            format!("n = {n} > 100 with deterministic lengths: use the closed form instead")
        })?;
    }
    let nf = n as f64;
    let moments = simplex_moments(law, n as usize, mc_samples, seed, |k, g| g.powi(n as i32 - k as i32));
    let mut estimate = CompensatedSum::new();
    estimate.add(1.0);
    let mut variance = 0.0;
    for (idx, (mean, var)) in moments.iter().enumerate() {
        let k = (idx + 1) as f64;
        let binom = (ln_gamma(nf + 1.0) - ln_gamma(k + 1.0) - ln_gamma(nf - k + 1.0)).exp();
        let sign = if (idx + 1) % 2 == 0 { 1.0 } else { -1.0 };
        estimate.add(sign * binom * mean);
        variance += binom * binom * var / mc_samples as f64;
    }
    Ok(McEstimate {
        estimate: estimate.value(),
        stderr: variance.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{stevens_cover_prob, twoatom_uncover_prob};
    use approx::assert_abs_diff_eq;

    #[test]
    fn deterministic_matches_closed_form() {
        let law = ArcLengthLaw::deterministic(0.3).unwrap();
        let est = siegel_holst_cover_prob(&law, 4, 200_000, 1).unwrap();
        assert!((est.estimate - 0.008).abs() < 3.0 * est.stderr.max(1e-12), "{est:?}");
        let law = ArcLengthLaw::deterministic(0.2).unwrap();
        let exact = stevens_cover_prob(0.2, 8).unwrap();
        let mut z_sum = 0.0;
        for seed in 0..8 {
            let est = siegel_holst_cover_prob(&law, 8, 100_000, seed).unwrap();
            z_sum += (est.estimate - exact) / est.stderr;
        }
        // mean of eight standardised errors has unit variance / 8
        assert!((z_sum / 8.0).abs() < 3.0 / 8f64.sqrt(), "{z_sum}");
    }

    #[test]
    fn two_atom_matches_closed_form() {
        let law = ArcLengthLaw::two_atom(0.2).unwrap();
        let est = siegel_holst_cover_prob(&law, 3, 200_000, 3).unwrap();
        let exact = 1.0 - twoatom_uncover_prob(0.2, 3).unwrap();
        assert_abs_diff_eq!(exact, 0.016, epsilon = 1e-14);
        assert!((est.estimate - exact).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn trivial_and_refused_cases() {
        let law = ArcLengthLaw::two_atom(0.1).unwrap();
        assert_eq!(siegel_holst_cover_prob(&law, 0, 10, 0).unwrap().estimate, 0.0);
        let det = ArcLengthLaw::deterministic(0.05).unwrap();
        assert!(siegel_holst_cover_prob(&det, 101, 10, 0).is_err());
        assert!(siegel_holst_cover_prob(&law, 3, 0, 0).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let law = ArcLengthLaw::two_atom(0.3).unwrap();
        let a = siegel_holst_cover_prob(&law, 6, 1000, 42).unwrap();
        let b = siegel_holst_cover_prob(&law, 6, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_law_primitives() {
        let law = ArcLengthLaw::empirical(vec![0.3, 0.1, 0.2]).unwrap();
        assert_abs_diff_eq!(law.cdf(0.15), 1.0 / 3.0);
        assert_abs_diff_eq!(law.integrated_cdf(0.25), (0.15 + 0.05) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(law.mean(), 0.2, epsilon = 1e-15);
        assert!(ArcLengthLaw::empirical(vec![]).is_err());
    }

    #[test]
    fn nu_r_antiderivative_is_accurate() {
        let grains = GrainLaw::constant_disc(0.5).unwrap();
        let law = ArcLengthLaw::nu_r(&grains, 3.0).unwrap();
        for &u in &[0.001, 0.013, 0.05, 0.1234, 0.3, 0.49999] {
            let direct = integrate(|t| law.cdf(t), 0.0, u, 1e-13);
            assert_abs_diff_eq!(law.integrated_cdf(u), direct, epsilon = 1e-10);
        }
        let m = crate::asymptotics::mean_shadow(3.0, &grains).unwrap();
        assert_abs_diff_eq!(law.mean(), m, epsilon = 1e-9);
    }
}
