//! Shadows of obstacles seen from the origin.
//!
//! An obstacle blocks direction `u` within distance `r` when the segment
//! `[0, r u]` meets it. The set of such directions is a closed arc of the unit
//! circle (planar case) or a closed cap of the unit sphere (balls in space);
//! everything downstream reduces visibility questions to covering problems
//! over these arcs and caps.

mod grain;

pub use grain::{Ball, ConvexPolygon, Grain, Obstacle};

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Slack used when deciding whether two closed arcs touch.
pub const ANGLE_EPS: f64 = 1e-12;

/// Canonical angle wrap onto `[0, 2π)`.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed difference `a - b` reduced to `(-π, π]`.
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Closed arc of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcInterval {
    /// Polar angle of the arc midpoint, in `[0, 2π)`.
    pub center_angle: f64,
    /// Half the angular length, in `[0, π]`; `π` is the full circle.
    pub half_width: f64,
}

impl ArcInterval {
    pub fn new(center_angle: f64, half_width: f64) -> Result<Self> {
        ensure(center_angle.is_finite(), || format!("arc center {center_angle} is not finite"))?;
        ensure((0.0..=PI).contains(&half_width), || {
            format!("arc half width {half_width} outside [0, π]")
        })?;
        Ok(Self {
            center_angle: wrap_angle(center_angle),
            half_width,
        })
    }

    /// Start angle (counter-clockwise end is `start + 2 half_width`).
    #[inline]
    pub fn start(&self) -> f64 {
        wrap_angle(self.center_angle - self.half_width)
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.half_width >= PI
    }

    /// Closed membership test.
    #[inline]
    pub fn contains(&self, angle: f64) -> bool {
        angle_diff(angle, self.center_angle).abs() <= self.half_width
    }
}

/// Closed spherical cap on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub axis: Vector3<f64>,
    /// Geodesic radius in `[0, π]`.
    pub angular_radius: f64,
}

impl Cap {
    pub fn new(axis: Vector3<f64>, angular_radius: f64) -> Result<Self> {
        ensure((axis.norm() - 1.0).abs() <= 1e-12, || {
            format!("cap axis has norm {}, expected 1", axis.norm())
        })?;
        ensure((0.0..=PI).contains(&angular_radius), || {
            format!("cap radius {angular_radius} outside [0, π]")
        })?;
        Ok(Self { axis, angular_radius })
    }

    /// Closed membership test for a unit vector.
    pub fn contains(&self, u: &Vector3<f64>) -> bool {
        angle_between(&self.axis, u) <= self.angular_radius
    }
}

/// Angle between two unit vectors, accurate near 0 and π.
#[inline]
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Half-angle of the set of directions in which an obstacle of radius
/// `radius` centred at distance `rho` blocks sight within distance `r`.
///
/// Tangent-cone regime `arcsin(R/ρ)` while the tangent points lie inside the
/// ball of radius `r` (`ρ² ≤ R² + r²`), otherwise the angle subtended by the
/// intersection of the obstacle with the sphere of radius `r`.
pub fn shadow_half_angle(rho: f64, radius: f64, r: f64) -> Result<f64> {
    ensure(radius > 0.0, || format!("obstacle radius {radius} must be > 0"))?;
    ensure(rho > radius, || {
        format!("centre distance {rho} must exceed radius {radius} (origin inside obstacle)")
    })?;
    ensure(r > 0.0, || format!("distance {r} must be > 0"))?;
    ensure(rho < r + radius, || {
        format!("centre distance {rho} must be < r + R = {} (obstacle beyond reach)", r + radius)
    })?;
    Ok(shadow_half_angle_unchecked(rho, radius, r))
}

#[inline]
pub(crate) fn shadow_half_angle_unchecked(rho: f64, radius: f64, r: f64) -> f64 {
    if rho * rho <= radius * radius + r * r {
        (radius / rho).min(1.0).asin()
    } else {
        let c = (rho * rho + r * r - radius * radius) / (2.0 * r * rho);
        c.clamp(-1.0, 1.0).acos()
    }
}
