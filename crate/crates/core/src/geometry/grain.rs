use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{shadow_half_angle_unchecked, wrap_angle, ArcInterval, Cap};
use crate::error::{ensure, invalid, Result};

/// Convex polygon in its local frame, vertices counter-clockwise.
///
/// The local origin is the grain's reference point (its "germ"); it lies in
/// the polygon, so translating by the germ position places the grain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct ConvexPolygon {
    vertices: Vec<Vector2<f64>>,
    diameter: f64,
    circumradius: f64,
    perimeter: f64,
    area: f64,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonRepr> for ConvexPolygon {
    type Error = crate::Error;
    fn try_from(repr: PolygonRepr) -> Result<Self> {
        ConvexPolygon::new(repr.vertices.iter().map(|v| Vector2::new(v[0], v[1])).collect())
    }
}

impl From<ConvexPolygon> for PolygonRepr {
    fn from(p: ConvexPolygon) -> Self {
        PolygonRepr {
            vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

#[inline]
fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

impl ConvexPolygon {
    /// Validates strict convexity (collinear vertices are rejected) and that
    /// the local origin lies in the closed polygon. Clockwise input is
    /// reoriented.
    pub fn new(mut vertices: Vec<Vector2<f64>>) -> Result<Self> {
        let n = vertices.len();
        ensure(n >= 3, || format!("polygon needs at least 3 vertices, got {n}"))?;
        ensure(vertices.iter().all(|v| v.x.is_finite() && v.y.is_finite()), || {
            "polygon vertex is not finite".into()
        })?;
        let twice_area: f64 = (0..n).map(|i| cross(&vertices[i], &vertices[(i + 1) % n])).sum();
        if twice_area < 0.0 {
            vertices.reverse();
        }
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let eps = 1e-12 * scale * scale;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            ensure(cross(&(b - a), &(c - b)) > eps, || {
                format!("polygon is not strictly convex at vertex {}", (i + 1) % n)
            })?;
            ensure(cross(&(b - a), &(-a)) >= -eps, || {
                "polygon does not contain its local origin".into()
            })?;
        }
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                diameter = diameter.max((vertices[i] - vertices[j]).norm());
            }
        }
        let perimeter = (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum();
        Ok(Self {
            circumradius: scale,
            diameter,
            perimeter,
            area: twice_area.abs() / 2.0,
            vertices,
        })
    }

    /// Axis-aligned square of side `side` centred on the local origin.
    pub fn square(side: f64) -> Result<Self> {
        ensure(side > 0.0, || format!("square side {side} must be > 0"))?;
        let h = side / 2.0;
        Self::new(vec![
            Vector2::new(-h, -h),
            Vector2::new(h, -h),
            Vector2::new(h, h),
            Vector2::new(-h, h),
        ])
    }

    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    /// Largest distance from the local origin to the polygon.
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    /// Mean width over uniform directions; perimeter / π for planar convex sets.
    pub fn mean_width(&self) -> f64 {
        self.perimeter / PI
    }
}

/// Shape of one obstacle around its germ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grain {
    Disc { radius: f64 },
    RotatedPolygon { shape: Arc<ConvexPolygon>, rotation: f64 },
}

impl Grain {
    pub fn disc(radius: f64) -> Result<Self> {
        ensure(radius > 0.0 && radius.is_finite(), || format!("disc radius {radius} must be > 0"))?;
        Ok(Grain::Disc { radius })
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Grain::Disc { radius } => 2.0 * radius,
            Grain::RotatedPolygon { shape, .. } => shape.diameter(),
        }
    }

    /// Largest distance from the germ to a point of the grain.
    pub fn outer_radius(&self) -> f64 {
        match self {
            Grain::Disc { radius } => *radius,
            Grain::RotatedPolygon { shape, .. } => shape.circumradius(),
        }
    }

    /// `W_u`: extent of the grain along the direction orthogonal to `u`.
    pub fn width_in_direction(&self, u: &Vector2<f64>) -> f64 {
        match self {
            Grain::Disc { radius } => 2.0 * radius,
            Grain::RotatedPolygon { shape, rotation } => {
                let (s, c) = rotation.sin_cos();
                let v = Vector2::new(-u.y, u.x);
                let (lo, hi) = shape.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let w = Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y);
                    let h = w.dot(&v);
                    (lo.min(h), hi.max(h))
                });
                hi - lo
            }
        }
    }
}

/// A planar grain placed at `center`, with the origin strictly outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObstacleRepr", into = "ObstacleRepr")]
pub struct Obstacle {
    center: Vector2<f64>,
    grain: Grain,
    distance: f64,
}

#[derive(Serialize, Deserialize)]
struct ObstacleRepr {
    center: [f64; 2],
    grain: Grain,
}

impl TryFrom<ObstacleRepr> for Obstacle {
    type Error = crate::Error;
    fn try_from(repr: ObstacleRepr) -> Result<Self> {
        Obstacle::new(Vector2::new(repr.center[0], repr.center[1]), repr.grain)
    }
}

impl From<Obstacle> for ObstacleRepr {
    fn from(o: Obstacle) -> Self {
        ObstacleRepr {
            center: [o.center.x, o.center.y],
            grain: o.grain,
        }
    }
}

impl Obstacle {
    pub fn new(center: Vector2<f64>, grain: Grain) -> Result<Self> {
        ensure(center.x.is_finite() && center.y.is_finite(), || "obstacle centre is not finite".into())?;
        if let Grain::Disc { radius } = grain {
            ensure(radius > 0.0, || format!("disc radius {radius} must be > 0"))?;
        }
        let distance = distance_from_origin(&center, &grain);
        ensure(distance > 0.0, || {
            format!("origin is not strictly outside the obstacle at ({}, {})", center.x, center.y)
        })?;
        Ok(Self { center, grain, distance })
    }

    pub fn disc(x: f64, y: f64, radius: f64) -> Result<Self> {
        Self::new(Vector2::new(x, y), Grain::disc(radius)?)
    }

    pub fn center(&self) -> &Vector2<f64> {
        &self.center
    }
    pub fn grain(&self) -> &Grain {
        &self.grain
    }

    /// Distance from the origin to the obstacle (its first contact radius).
    pub fn distance_from_origin(&self) -> f64 {
        self.distance
    }

    /// Same grain, germ moved by an affine map of the plane.
    pub(crate) fn transformed(&self, scale: f64, rotation: f64) -> Result<Self> {
        let (s, c) = rotation.sin_cos();
        let p = self.center * scale;
        let center = Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y);
        let grain = match &self.grain {
            Grain::Disc { radius } => Grain::Disc { radius: radius * scale },
            Grain::RotatedPolygon { shape, rotation: rot } => {
                let shape = if scale == 1.0 {
                    shape.clone()
                } else {
                    Arc::new(ConvexPolygon::new(shape.vertices().iter().map(|v| v * scale).collect())?)
                };
                Grain::RotatedPolygon {
                    shape,
                    rotation: wrap_angle(rot + rotation),
                }
            }
        };
        Obstacle::new(center, grain)
    }

    fn world_vertices(&self) -> impl Iterator<Item = Vector2<f64>> + '_ {
        let (shape, rot) = match &self.grain {
            Grain::RotatedPolygon { shape, rotation } => (shape.vertices(), *rotation),
            Grain::Disc { .. } => (&[][..], 0.0),
        };
        let (s, c) = rot.sin_cos();
        shape
            .iter()
            .map(move |p| self.center + Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y))
    }

    /// Smallest `t > 0` with `t u` in the obstacle, if the ray meets it.
    pub fn first_hit_distance(&self, u: &Vector2<f64>) -> Option<f64> {
        match &self.grain {
            Grain::Disc { radius } => {
                let b = self.center.dot(u);
                if b <= 0.0 {
                    return None;
                }
                let disc = b * b - self.center.norm_squared() + radius * radius;
                if disc < 0.0 {
                    None
                } else {
                    Some(b - disc.sqrt())
                }
            }
            Grain::RotatedPolygon { .. } => {
                // Cyrus–Beck clipping of the ray against the edge half-planes.
                let verts: Vec<Vector2<f64>> = self.world_vertices().collect();
                let n = verts.len();
                let (mut t_lo, mut t_hi) = (0.0f64, f64::INFINITY);
                for i in 0..n {
                    let p = verts[i];
                    let q = verts[(i + 1) % n];
                    let e = q - p;
                    // outward normal of a counter-clockwise edge
                    let normal = Vector2::new(e.y, -e.x);
                    let denom = normal.dot(u);
                    let num = normal.dot(&p);
                    if denom > 0.0 {
                        t_hi = t_hi.min(num / denom);
                    } else if denom < 0.0 {
                        t_lo = t_lo.max(num / denom);
                    } else if num < 0.0 {
                        return None;
                    }
                }
                (t_lo <= t_hi).then_some(t_lo)
            }
        }
    }

    /// Closed arc of directions whose first hit on this obstacle is within `r`,
    /// or `None` when the obstacle does not meet the closed ball of radius `r`.
    pub fn blocked_interval(&self, r: f64) -> Option<ArcInterval> {
        if !(r >= self.distance) {
            return None;
        }
        match &self.grain {
            Grain::Disc { radius } => {
                let rho = self.center.norm();
                if rho >= r + radius {
                    // tangency from outside: a single direction
                    return Some(ArcInterval {
                        center_angle: wrap_angle(self.center.y.atan2(self.center.x)),
                        half_width: 0.0,
                    });
                }
                Some(ArcInterval {
                    center_angle: wrap_angle(self.center.y.atan2(self.center.x)),
                    half_width: shadow_half_angle_unchecked(rho, *radius, r),
                })
            }
            Grain::RotatedPolygon { .. } => self.polygon_extent(r),
        }
    }

    /// Angular extent of (polygon ∩ closed ball of radius r). Along a segment
    /// or along an arc of the clipping circle the polar angle is monotone, so
    /// the extremes sit at vertices inside the ball or at edge–circle
    /// crossings.
    fn polygon_extent(&self, r: f64) -> Option<ArcInterval> {
        let reference = self.center / self.center.norm();
        let rel = |x: &Vector2<f64>| cross(&reference, x).atan2(reference.dot(x));
        let r2 = r * r;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut push = |x: &Vector2<f64>| {
            let a = rel(x);
            lo = lo.min(a);
            hi = hi.max(a);
        };
        let verts: Vec<Vector2<f64>> = self.world_vertices().collect();
        let n = verts.len();
        for i in 0..n {
            let p = verts[i];
            let q = verts[(i + 1) % n];
            if p.norm_squared() <= r2 {
                push(&p);
            }
            // |p + t d|² = r²
            let d = q - p;
            let a = d.norm_squared();
            let b = p.dot(&d);
            let c = p.norm_squared() - r2;
            let disc = b * b - a * c;
            if disc >= 0.0 && a > 0.0 {
                let sq = disc.sqrt();
                for t in [(-b - sq) / a, (-b + sq) / a] {
                    if (0.0..=1.0).contains(&t) {
                        push(&(p + d * t));
                    }
                }
            }
        }
        if lo > hi {
            return None;
        }
        let base = reference.y.atan2(reference.x);
        Some(ArcInterval {
            center_angle: wrap_angle(base + 0.5 * (lo + hi)),
            half_width: 0.5 * (hi - lo),
        })
    }

    /// Full angle Ψ under which the obstacle is seen from the origin.
    pub fn vision_angle(&self) -> f64 {
        match &self.grain {
            Grain::Disc { radius } => 2.0 * (radius / self.center.norm()).asin(),
            Grain::RotatedPolygon { .. } => {
                let reference = self.center / self.center.norm();
                let (lo, hi) = self.world_vertices().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    let a = cross(&reference, &x).atan2(reference.dot(&x));
                    (lo.min(a), hi.max(a))
                });
                hi - lo
            }
        }
    }
}

fn distance_from_origin(center: &Vector2<f64>, grain: &Grain) -> f64 {
    match grain {
        Grain::Disc { radius } => center.norm() - radius,
        Grain::RotatedPolygon { shape, rotation } => {
            let (s, c) = rotation.sin_cos();
            let verts: Vec<Vector2<f64>> = shape
                .vertices()
                .iter()
                .map(|p| center + Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y))
                .collect();
            let n = verts.len();
            let mut inside = true;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let p = verts[i];
                let q = verts[(i + 1) % n];
                let e = q - p;
                if cross(&e, &(-p)) < 0.0 {
                    inside = false;
                }
                let t = (-p.dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
                best = best.min((p + e * t).norm());
            }
            if inside {
                0.0
            } else {
                best
            }
        }
    }
}

/// A ball obstacle in space, origin strictly outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BallRepr", into = "BallRepr")]
pub struct Ball {
    center: Vector3<f64>,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct BallRepr {
    center: [f64; 3],
    radius: f64,
}

impl TryFrom<BallRepr> for Ball {
    type Error = crate::Error;
    fn try_from(repr: BallRepr) -> Result<Self> {
        Ball::new(Vector3::from(repr.center), repr.radius)
    }
}

impl From<Ball> for BallRepr {
    fn from(b: Ball) -> Self {
        BallRepr {
            center: [b.center.x, b.center.y, b.center.z],
            radius: b.radius,
        }
    }
}

impl Ball {
    pub fn new(center: Vector3<f64>, radius: f64) -> Result<Self> {
        ensure(radius > 0.0 && radius.is_finite(), || format!("ball radius {radius} must be > 0"))?;
        ensure(center.iter().all(|x| x.is_finite()), || "ball centre is not finite".into())?;
        if center.norm() <= radius {
            return Err(invalid(format!(
                "origin is not strictly outside the ball (|c| = {}, R = {radius})",
                center.norm()
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Vector3<f64> {
        &self.center
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn distance_from_origin(&self) -> f64 {
        self.center.norm() - self.radius
    }

    pub(crate) fn transformed(&self, scale: f64, rotation: &nalgebra::Rotation3<f64>) -> Result<Self> {
        Ball::new(rotation * (self.center * scale), self.radius * scale)
    }

    pub fn first_hit_distance(&self, u: &Vector3<f64>) -> Option<f64> {
        let b = self.center.dot(u);
        if b <= 0.0 {
            return None;
        }
        let disc = b * b - self.center.norm_squared() + self.radius * self.radius;
        (disc >= 0.0).then(|| b - disc.sqrt())
    }

    /// Cap of directions blocked within distance `r`.
    pub fn shadow_cap(&self, r: f64) -> Option<Cap> {
        let rho = self.center.norm();
        if !(r >= rho - self.radius) {
            return None;
        }
        let angular_radius = if rho >= r + self.radius {
            0.0
        } else {
            shadow_half_angle_unchecked(rho, self.radius, r)
        };
        Some(Cap {
            axis: self.center / rho,
            angular_radius,
        })
    }
}
