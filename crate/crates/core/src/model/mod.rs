//! Poisson Boolean model: grain laws, conditioning and sampled windows.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{Rotation3, Vector2, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coverage::McEstimate;
use crate::error::{ensure, invalid, Result};
use crate::geometry::{Ball, ConvexPolygon, Grain, Obstacle};
use crate::numeric::unit_ball_volume;
use crate::rng::{child_seed, stream_rng};

/// Distribution of the grain attached to each Poisson point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrainLaw {
    ConstantDisc { radius: f64 },
    /// `(radius, probability)` pairs.
    DiscreteDisc { components: Vec<(f64, f64)> },
    /// A fixed polygon turned by an independent uniform angle.
    RotatedPolygon { shape: Arc<ConvexPolygon> },
}

impl GrainLaw {
    pub fn constant_disc(radius: f64) -> Result<Self> {
        ensure(radius > 0.0 && radius.is_finite(), || format!("radius {radius} must be > 0"))?;
        Ok(GrainLaw::ConstantDisc { radius })
    }

    pub fn discrete_disc(components: Vec<(f64, f64)>) -> Result<Self> {
        ensure(!components.is_empty(), || "discrete radius law needs at least one atom".into())?;
        for (r, p) in &components {
            ensure(*r > 0.0 && r.is_finite(), || format!("radius {r} must be > 0"))?;
            ensure(*p >= 0.0, || format!("probability {p} must be ≥ 0"))?;
        }
        let total: f64 = components.iter().map(|c| c.1).sum();
        ensure((total - 1.0).abs() <= 1e-12, || format!("probabilities sum to {total}, not 1"))?;
        Ok(GrainLaw::DiscreteDisc { components })
    }

    pub fn rotated_polygon(shape: ConvexPolygon) -> Self {
        GrainLaw::RotatedPolygon { shape: Arc::new(shape) }
    }

    /// Radius atoms for disc laws, `None` for polygons.
    pub fn disc_radii(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            GrainLaw::ConstantDisc { radius } => Some(vec![(*radius, 1.0)]),
            GrainLaw::DiscreteDisc { components } => Some(components.clone()),
            GrainLaw::RotatedPolygon { .. } => None,
        }
    }

    /// `E[R^k]` for disc laws.
    pub fn radius_moment(&self, k: i32) -> Option<f64> {
        self.disc_radii().map(|atoms| atoms.iter().map(|(r, p)| p * r.powi(k)).sum())
    }

    /// Expected mean width `E[W(K)]`.
    pub fn mean_width(&self) -> f64 {
        match self {
            GrainLaw::RotatedPolygon { shape } => shape.mean_width(),
            _ => 2.0 * self.radius_moment(1).expect("disc law"),
        }
    }

    /// Almost-sure bound `D` on the grain diameter.
    pub fn diameter_bound(&self) -> f64 {
        match self {
            GrainLaw::RotatedPolygon { shape } => shape.diameter(),
            _ => 2.0 * self.max_radius(),
        }
    }

    /// Largest distance from a germ to its grain.
    pub fn max_radius(&self) -> f64 {
        match self {
            GrainLaw::ConstantDisc { radius } => *radius,
            GrainLaw::DiscreteDisc { components } => components.iter().map(|c| c.0).fold(0.0, f64::max),
            GrainLaw::RotatedPolygon { shape } => shape.circumradius(),
        }
    }

    pub(crate) fn scaled(&self, s: f64) -> Result<Self> {
        Ok(match self {
            GrainLaw::ConstantDisc { radius } => GrainLaw::ConstantDisc { radius: radius * s },
            GrainLaw::DiscreteDisc { components } => GrainLaw::DiscreteDisc {
                components: components.iter().map(|(r, p)| (r * s, *p)).collect(),
            },
            GrainLaw::RotatedPolygon { shape } => GrainLaw::RotatedPolygon {
                shape: Arc::new(ConvexPolygon::new(shape.vertices().iter().map(|v| v * s).collect())?),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conditioning {
    /// The origin is not covered.
    OriginFree,
    /// No grain comes within distance `r0` of the origin.
    Clearing { r0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dimension: usize,
    pub intensity: f64,
    pub grain_law: GrainLaw,
    pub conditioning: Conditioning,
}

impl ModelConfig {
    pub fn new(dimension: usize, intensity: f64, grain_law: GrainLaw, conditioning: Conditioning) -> Result<Self> {
        ensure(dimension == 2 || dimension == 3, || format!("dimension {dimension} not in {{2, 3}}"))?;
        ensure(intensity > 0.0 && intensity.is_finite(), || format!("intensity {intensity} must be > 0"))?;
        if let GrainLaw::RotatedPolygon { .. } = grain_law {
            ensure(dimension == 2, || "polygon grains require dimension 2".into())?;
        }
        if let Conditioning::Clearing { r0 } = conditioning {
            ensure(r0 >= 0.0 && r0.is_finite(), || format!("clearing radius {r0} must be ≥ 0"))?;
        }
        Ok(Self {
            dimension,
            intensity,
            grain_law,
            conditioning,
        })
    }

    /// Unit intensity, constant disc radius, origin not covered.
    pub fn discs(dimension: usize, radius: f64) -> Result<Self> {
        Self::new(dimension, 1.0, GrainLaw::constant_disc(radius)?, Conditioning::OriginFree)
    }

    pub fn with_clearing(mut self, r0: f64) -> Result<Self> {
        ensure(r0 >= 0.0 && r0.is_finite(), || format!("clearing radius {r0} must be ≥ 0"))?;
        self.conditioning = Conditioning::Clearing { r0 };
        Ok(self)
    }

    /// Distance below which no grain may come (0 for the origin-free case).
    pub fn clearing_radius(&self) -> f64 {
        match self.conditioning {
            Conditioning::OriginFree => 0.0,
            Conditioning::Clearing { r0 } => r0,
        }
    }

    /// Same model with every length multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        ensure(s > 0.0 && s.is_finite(), || format!("scale {s} must be > 0"))?;
        let conditioning = match self.conditioning {
            Conditioning::OriginFree => Conditioning::OriginFree,
            Conditioning::Clearing { r0 } => Conditioning::Clearing { r0: r0 * s },
        };
        Ok(Self {
            dimension: self.dimension,
            intensity: self.intensity / s.powi(self.dimension as i32),
            grain_law: self.grain_law.scaled(s)?,
            conditioning,
        })
    }
}

/// Mean number of grains at distance in `(a, b]` from the origin.
fn shell_mass(config: &ModelConfig, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let d = config.dimension as i32;
    match &config.grain_law {
        GrainLaw::RotatedPolygon { shape } => {
            // Steiner: |(-K) ⊕ B(t)| = A + P t + π t²
            config.intensity * (shape.perimeter() * (b - a) + PI * (b * b - a * a))
        }
        law => {
            let omega = unit_ball_volume(config.dimension);
            let atoms = law.disc_radii().expect("disc law");
            config.intensity
                * omega
                * atoms
                    .iter()
                    .map(|(r, p)| p * ((b + r).powi(d) - (a + r).powi(d)))
                    .sum::<f64>()
        }
    }
}

/// Expected number of grains meeting the closed ball of radius `r` that are
/// admissible under the conditioning.
pub fn exclusion_volume(r: f64, config: &ModelConfig) -> Result<f64> {
    ensure(r >= 0.0, || format!("distance {r} must be ≥ 0"))?;
    Ok(shell_mass(config, config.clearing_radius(), r))
}

/// Monte Carlo estimate of [`exclusion_volume`] by sampling germs and grain
/// rotations in a bounding disc; used to cross-check the closed forms.
pub fn exclusion_volume_mc(r: f64, config: &ModelConfig, samples: usize, seed: u64) -> Result<McEstimate> {
    ensure(r >= 0.0, || format!("distance {r} must be ≥ 0"))?;
    ensure(samples >= 2, || "need at least two samples".into())?;
    ensure(config.dimension == 2, || "Monte Carlo exclusion volume is planar only".into())?;
    let r0 = config.clearing_radius();
    let bound = r + config.grain_law.max_radius();
    let area = PI * bound * bound;
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0usize;
    for _ in 0..samples {
        let (x, grain) = loop {
            let x = Vector2::new(rng.random_range(-bound..bound), rng.random_range(-bound..bound));
            if x.norm_squared() <= bound * bound {
                break (x, random_grain(&config.grain_law, &mut rng));
            }
        };
        if let Ok(o) = Obstacle::new(x, grain) {
            let dist = o.distance_from_origin();
            if dist > r0 && dist <= r {
                hits += 1;
            }
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: config.intensity * area * p,
        stderr: config.intensity * area * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

fn random_grain(law: &GrainLaw, rng: &mut ChaCha8Rng) -> Grain {
    match law {
        GrainLaw::ConstantDisc { radius } => Grain::Disc { radius: *radius },
        GrainLaw::DiscreteDisc { components } => {
            let mut u: f64 = rng.random();
            for (r, p) in components {
                if u < *p {
                    return Grain::Disc { radius: *r };
                }
                u -= p;
            }
            Grain::Disc {
                radius: components.last().expect("nonempty").0,
            }
        }
        GrainLaw::RotatedPolygon { shape } => Grain::RotatedPolygon {
            shape: shape.clone(),
            rotation: rng.random_range(0.0..TAU),
        },
    }
}

/// Root seed plus the number of windows drawn so far; window `i` uses the
/// child stream `child_seed(root, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub root: u64,
    pub windows: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "snake_case")]
pub enum Obstacles {
    Planar(Vec<Obstacle>),
    Spatial(Vec<Ball>),
}

impl Obstacles {
    pub fn len(&self) -> usize {
        match self {
            Obstacles::Planar(v) => v.len(),
            Obstacles::Spatial(v) => v.len(),
        }
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Obstacles of one realisation, complete inside the ball of radius `reach`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSet {
    obstacles: Obstacles,
    reach: f64,
    /// `None` for hand-built configurations, which cannot be extended.
    config: Option<ModelConfig>,
    seed: Option<SeedRecord>,
}

impl ObstacleSet {
    /// Explicit planar configuration, declared complete within `reach`.
    pub fn planar(obstacles: Vec<Obstacle>, reach: f64) -> Result<Self> {
        ensure(reach > 0.0, || format!("reach {reach} must be > 0"))?;
        Ok(Self {
            obstacles: Obstacles::Planar(obstacles),
            reach,
            config: None,
            seed: None,
        })
    }

    /// Explicit configuration of balls, declared complete within `reach`.
    pub fn spatial(balls: Vec<Ball>, reach: f64) -> Result<Self> {
        ensure(reach > 0.0, || format!("reach {reach} must be > 0"))?;
        Ok(Self {
            obstacles: Obstacles::Spatial(balls),
            reach,
            config: None,
            seed: None,
        })
    }

    pub fn obstacles(&self) -> &Obstacles {
        &self.obstacles
    }
    pub fn reach(&self) -> f64 {
        self.reach
    }
    pub fn config(&self) -> Option<&ModelConfig> {
        self.config.as_ref()
    }
    pub fn seed_record(&self) -> Option<SeedRecord> {
        self.seed
    }
    pub fn dimension(&self) -> usize {
        match self.obstacles {
            Obstacles::Planar(_) => 2,
            Obstacles::Spatial(_) => 3,
        }
    }
    pub fn len(&self) -> usize {
        self.obstacles.len()
    }
    pub fn is_empty(&self) -> bool {
        self.obstacles.is_empty()
    }

    /// Lengths multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        ensure(s > 0.0 && s.is_finite(), || format!("scale {s} must be > 0"))?;
        let obstacles = match &self.obstacles {
            Obstacles::Planar(v) => Obstacles::Planar(v.iter().map(|o| o.transformed(s, 0.0)).collect::<Result<_>>()?),
            Obstacles::Spatial(v) => Obstacles::Spatial(
                v.iter().map(|b| b.transformed(s, &Rotation3::identity())).collect::<Result<_>>()?,
            ),
        };
        Ok(Self {
            obstacles,
            reach: self.reach * s,
            config: self.config.as_ref().map(|c| c.scaled(s)).transpose()?,
            seed: self.seed,
        })
    }

    /// Planar set turned by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        match &self.obstacles {
            Obstacles::Planar(v) => Ok(Self {
                obstacles: Obstacles::Planar(v.iter().map(|o| o.transformed(1.0, angle)).collect::<Result<_>>()?),
                ..self.clone()
            }),
            Obstacles::Spatial(_) => Err(invalid("use rotated_3d for spatial sets")),
        }
    }

    pub fn rotated_3d(&self, rotation: &Rotation3<f64>) -> Result<Self> {
        match &self.obstacles {
            Obstacles::Spatial(v) => Ok(Self {
                obstacles: Obstacles::Spatial(v.iter().map(|b| b.transformed(1.0, rotation)).collect::<Result<_>>()?),
                ..self.clone()
            }),
            Obstacles::Planar(_) => Err(invalid("use rotated for planar sets")),
        }
    }

    /// Copy without obstacle `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut out = self.clone();
        match &mut out.obstacles {
            Obstacles::Planar(v) => {
                v.remove(index);
            }
            Obstacles::Spatial(v) => {
                v.remove(index);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("obstacle sets serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("bad obstacle set: {e}")))
    }

    /// Adds the grains meeting the ball of radius `new_reach` but not the
    /// current one, drawn from the next window stream of the seed record.
    pub fn extend(&self, new_reach: f64) -> Result<Self> {
        ensure(new_reach > self.reach, || {
            format!("new reach {new_reach} must exceed current reach {}", self.reach)
        })?;
        let (config, seed) = match (&self.config, self.seed) {
            (Some(c), Some(s)) => (c, s),
            _ => return Err(invalid("only sampled sets can be extended")),
        };
        let mut rng = stream_rng(child_seed(seed.root, seed.windows), 0);
        let mut out = self.clone();
        sample_window(config, self.reach, new_reach, &mut rng, &mut out.obstacles);
        out.reach = new_reach;
        out.seed = Some(SeedRecord {
            root: seed.root,
            windows: seed.windows + 1,
        });
        Ok(out)
    }
}

/// Draws the realisation inside the ball of radius `reach`.
pub fn sample(config: &ModelConfig, reach: f64, seed: u64) -> Result<ObstacleSet> {
    let r0 = config.clearing_radius();
    ensure(reach > r0 && reach.is_finite(), || {
        format!("reach {reach} must exceed the clearing radius {r0}")
    })?;
    let mut rng = stream_rng(child_seed(seed, 0), 0);
    let mut obstacles = if config.dimension == 2 {
        Obstacles::Planar(Vec::new())
    } else {
        Obstacles::Spatial(Vec::new())
    };
    sample_window(config, r0, reach, &mut rng, &mut obstacles);
    Ok(ObstacleSet {
        obstacles,
        reach,
        config: Some(config.clone()),
        seed: Some(SeedRecord { root: seed, windows: 1 }),
    })
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

/// Appends grains whose distance to the origin lies in `(a, b]`.
fn sample_window(config: &ModelConfig, a: f64, b: f64, rng: &mut ChaCha8Rng, out: &mut Obstacles) {
    let d = config.dimension;
    match &config.grain_law {
        GrainLaw::RotatedPolygon { shape } => {
            let Obstacles::Planar(list) = out else { unreachable!("polygons are planar") };
            // thinning of a Poisson proposal on the annulus that must contain the germ
            let c = shape.circumradius();
            let lo = (a - c).max(0.0);
            let hi = b + c;
            let n = poisson_count(config.intensity * PI * (hi * hi - lo * lo), rng);
            for _ in 0..n {
                let rho = (lo * lo + rng.random::<f64>() * (hi * hi - lo * lo)).sqrt();
                let phi = rng.random_range(0.0..TAU);
                let grain = Grain::RotatedPolygon {
                    shape: shape.clone(),
                    rotation: rng.random_range(0.0..TAU),
                };
                if let Ok(o) = Obstacle::new(Vector2::new(rho * phi.cos(), rho * phi.sin()), grain) {
                    let dist = o.distance_from_origin();
                    if dist > a && dist <= b {
                        list.push(o);
                    }
                }
            }
        }
        law => {
            let atoms = law.disc_radii().expect("disc law");
            let di = d as i32;
            let masses: Vec<f64> = atoms
                .iter()
                .map(|(r, p)| p * ((b + r).powi(di) - (a + r).powi(di)))
                .collect();
            let total: f64 = masses.iter().sum();
            let n = poisson_count(config.intensity * unit_ball_volume(d) * total, rng);
            for _ in 0..n {
                let mut u = rng.random::<f64>() * total;
                let mut j = 0;
                while j + 1 < masses.len() && u >= masses[j] {
                    u -= masses[j];
                    j += 1;
                }
                let radius = atoms[j].0;
                let (lo, hi) = ((a + radius).powi(di), (b + radius).powi(di));
                let rho = (lo + rng.random::<f64>() * (hi - lo)).powf(1.0 / d as f64);
                match out {
                    Obstacles::Planar(list) => {
                        let phi = rng.random_range(0.0..TAU);
                        let center = Vector2::new(rho * phi.cos(), rho * phi.sin());
                        if let Ok(o) = Obstacle::new(center, Grain::Disc { radius }) {
                            list.push(o);
                        }
                    }
                    Obstacles::Spatial(list) => {
                        let dir = random_unit_3d(rng);
                        if let Ok(ball) = Ball::new(dir * rho, radius) {
                            list.push(ball);
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn random_unit_3d<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Radius of the largest obstacle-free ball around the origin, capped at the
/// reach of the set.
pub fn spherical_contact(set: &ObstacleSet) -> f64 {
    let nearest = match set.obstacles() {
        Obstacles::Planar(v) => v.iter().map(|o| o.distance_from_origin()).fold(f64::INFINITY, f64::min),
        Obstacles::Spatial(v) => v.iter().map(|b| b.distance_from_origin()).fold(f64::INFINITY, f64::min),
    };
    nearest.min(set.reach())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exclusion_volume_examples() {
        let c = ModelConfig::discs(2, 1.0).unwrap();
        assert_abs_diff_eq!(exclusion_volume(1.0, &c).unwrap(), 3.0 * PI, epsilon = 1e-12);
        assert_eq!(exclusion_volume(0.0, &c).unwrap(), 0.0);
        let c3 = ModelConfig::discs(3, 0.5).unwrap();
        let v = exclusion_volume(1.0, &c3).unwrap();
        assert_abs_diff_eq!(v, 4.0 * PI / 3.0 * 3.25, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 13.6136, epsilon = 1e-4);
        let clear = ModelConfig::discs(2, 1.0).unwrap().with_clearing(2.0).unwrap();
        assert_eq!(exclusion_volume(1.5, &clear).unwrap(), 0.0);
        assert_abs_diff_eq!(exclusion_volume(3.0, &clear).unwrap(), PI * (16.0 - 9.0), epsilon = 1e-12);
        assert!(exclusion_volume(-1.0, &c).is_err());
    }

    #[test]
    fn polygon_exclusion_volume_matches_monte_carlo() {
        let law = GrainLaw::rotated_polygon(ConvexPolygon::square(1.0).unwrap());
        for cond in [Conditioning::OriginFree, Conditioning::Clearing { r0: 0.7 }] {
            let c = ModelConfig::new(2, 1.0, law.clone(), cond).unwrap();
            let exact = exclusion_volume(2.0, &c).unwrap();
            let mc = exclusion_volume_mc(2.0, &c, 400_000, 17).unwrap();
            assert!((mc.estimate - exact).abs() < 4.0 * mc.stderr, "{exact} vs {mc:?}");
        }
    }

    #[test]
    fn laws_validate() {
        assert!(GrainLaw::discrete_disc(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(GrainLaw::discrete_disc(vec![(1.0, 0.5), (-2.0, 0.5)]).is_err());
        let law = GrainLaw::discrete_disc(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        assert_eq!(law.radius_moment(1), Some(2.0));
        assert_eq!(law.diameter_bound(), 6.0);
        let square = GrainLaw::rotated_polygon(ConvexPolygon::square(1.0).unwrap());
        assert!(ModelConfig::new(3, 1.0, square, Conditioning::OriginFree).is_err());
        assert!(ModelConfig::new(4, 1.0, law.clone(), Conditioning::OriginFree).is_err());
        assert!(ModelConfig::new(2, 0.0, law, Conditioning::OriginFree).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_respects_conditioning() {
        let c = ModelConfig::discs(2, 0.2).unwrap().with_clearing(2.0).unwrap();
        let a = sample(&c, 5.0, 9).unwrap();
        let b = sample(&c, 5.0, 9).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let Obstacles::Planar(list) = a.obstacles() else { panic!() };
        assert!(!list.is_empty());
        for o in list {
            assert!(o.center().norm() - 0.2 > 2.0);
            assert!(o.distance_from_origin() <= 5.0);
        }
        assert!(spherical_contact(&a) > 2.0);
        let e = a.extend(8.0).unwrap();
        let Obstacles::Planar(ext) = e.obstacles() else { panic!() };
        assert!(ext.len() >= list.len());
        assert_eq!(&ext[..list.len()], &list[..]);
        assert!(ext.iter().all(|o| o.distance_from_origin() > 2.0));
        assert!(a.extend(4.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let law = GrainLaw::rotated_polygon(ConvexPolygon::square(0.5).unwrap());
        let c = ModelConfig::new(2, 1.0, law, Conditioning::OriginFree).unwrap();
        let s = sample(&c, 3.0, 1).unwrap();
        let back = ObstacleSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let c3 = ModelConfig::discs(3, 0.3).unwrap();
        let s3 = sample(&c3, 2.0, 1).unwrap();
        assert_eq!(ObstacleSet::from_json(&s3.to_json()).unwrap(), s3);
        // an obstacle covering the origin is rejected on load
        let bad = s3.to_json().replacen("\"radius\": 0.3", "\"radius\": 30.0", 1);
        assert!(ObstacleSet::from_json(&bad).is_err());
    }

    #[test]
    fn contact_examples() {
        let set = ObstacleSet::planar(
            vec![Obstacle::disc(3.0, 0.0, 1.0).unwrap(), Obstacle::disc(5.0, 0.0, 0.5).unwrap()],
            10.0,
        )
        .unwrap();
        assert_abs_diff_eq!(spherical_contact(&set), 2.0);
        assert_eq!(spherical_contact(&ObstacleSet::planar(vec![], 7.0).unwrap()), 7.0);
    }

    #[test]
    fn mean_counts_match_exclusion_volume() {
        let c = ModelConfig::discs(2, 1.0).unwrap();
        let reps = 20_000;
        let counts: Vec<f64> = (0..reps).map(|s| sample(&c, 1.0, s).unwrap().len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - 3.0 * PI).abs() < 4.0 * (var / reps as f64).sqrt(), "{mean}");
        // Poisson dispersion
        assert!((var / mean - 1.0).abs() < 0.05, "{var} vs {mean}");
        // extension reproduces the law of a fresh sample
        let ext: f64 = (0..5_000u64).map(|s| sample(&c, 0.5, s).unwrap().extend(1.0).unwrap().len() as f64).sum::<f64>() / 5000.0;
        assert!((ext - 3.0 * PI).abs() < 4.0 * (3.0 * PI / 5000.0f64).sqrt(), "{ext}");
    }
}
