//! Certified cap coverage of the unit sphere.
//!
//! The net is an icosahedron with poles on the z axis, refined adaptively:
//! each spherical triangle is enclosed in a disc around its normalised
//! centroid. A triangle is settled as covered when one cap contains its whole
//! enclosing disc, and a triangle whose centroid misses every cap yields a
//! witness. Triangles already smaller than the requested resolution that are
//! neither are reported as undecided, which makes the verdict `Unknown`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use super::{CoverageVerdict, Direction};
use crate::geometry::{angle_between, Cap};

// Safety margin on covered-by-one-cap decisions, absorbing rounding in the
// dot products.
const CERT_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct SphereNet {
    vertices: [Vector3<f64>; 12],
    faces: [[usize; 3]; 20],
}

struct PreparedCap {
    axis: Vector3<f64>,
    radius: f64,
    cos_radius: f64,
}

impl SphereNet {
    pub(crate) fn new() -> Self {
        let z = 1.0 / 5f64.sqrt();
        let s = 2.0 / 5f64.sqrt();
        let mut vertices = [Vector3::zeros(); 12];
        vertices[0] = Vector3::new(0.0, 0.0, 1.0);
        vertices[11] = Vector3::new(0.0, 0.0, -1.0);
        for k in 0..5 {
            let a = TAU * k as f64 / 5.0;
            let b = a + PI / 5.0;
            vertices[1 + k] = Vector3::new(s * a.cos(), s * a.sin(), z);
            vertices[6 + k] = Vector3::new(s * b.cos(), s * b.sin(), -z);
        }
        let mut faces = [[0usize; 3]; 20];
        for k in 0..5 {
            let u = 1 + k;
            let u1 = 1 + (k + 1) % 5;
            let l = 6 + k;
            let l1 = 6 + (k + 1) % 5;
            faces[4 * k] = [0, u, u1];
            faces[4 * k + 1] = [u, l, u1];
            faces[4 * k + 2] = [u1, l, l1];
            faces[4 * k + 3] = [l, 11, l1];
        }
        Self { vertices, faces }
    }

    pub(crate) fn coverage(&self, caps: &[Cap], resolution: f64) -> CoverageVerdict {
        let prepared: Vec<PreparedCap> = caps
            .iter()
            .map(|c| PreparedCap {
                axis: c.axis,
                radius: c.angular_radius,
                cos_radius: c.angular_radius.cos(),
            })
            .collect();
        if prepared.iter().any(|c| c.radius >= PI) {
            return CoverageVerdict::Covered;
        }

        // Coarse pass: the vertex farthest from every cap, if any.
        let mut best: Option<(f64, Vector3<f64>)> = None;
        for v in &self.vertices {
            let margin = margin_outside(&prepared, v, f64::INFINITY);
            if margin > 0.0 && best.is_none_or(|(m, _)| margin > m) {
                best = Some((margin, *v));
            }
        }
        if let Some((margin, v)) = best {
            return uncovered(&v, margin);
        }

        let all: Vec<u32> = (0..prepared.len() as u32).collect();
        let mut undecided = false;
        for f in &self.faces {
            let [a, b, c] = f.map(|i| self.vertices[i]);
            if let Some(verdict) = refine(&prepared, &all, a, b, c, resolution, &mut undecided) {
                return verdict;
            }
        }
        if undecided {
            CoverageVerdict::Unknown { resolution }
        } else {
            CoverageVerdict::Covered
        }
    }
}

/// Smallest angular distance from `v` to a cap boundary among caps not
/// containing `v`; non-positive when some cap contains `v`.
fn margin_outside(caps: &[PreparedCap], v: &Vector3<f64>, cap_on: f64) -> f64 {
    let mut margin = cap_on;
    for c in caps {
        let m = angle_between(&c.axis, v) - c.radius;
        if m <= 0.0 {
            return m;
        }
        margin = margin.min(m);
    }
    margin
}

fn uncovered(v: &Vector3<f64>, margin: f64) -> CoverageVerdict {
    CoverageVerdict::Uncovered {
        witness: Direction::spatial(v),
        uncovered_measure: TAU * (1.0 - margin.min(PI).cos()),
    }
}

fn refine(
    caps: &[PreparedCap],
    candidates: &[u32],
    a: Vector3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
    resolution: f64,
    undecided: &mut bool,
) -> Option<CoverageVerdict> {
    let m = (a + b + c).normalize();
    let rho = angle_between(&m, &a).max(angle_between(&m, &b)).max(angle_between(&m, &c));
    let cos_reach = |theta: f64| if theta >= PI { -2.0 } else { theta.cos() };

    let mut inside_some = false;
    let mut local: Vec<u32> = Vec::with_capacity(candidates.len());
    for &i in candidates {
        let cap = &caps[i as usize];
        let d = cap.axis.dot(&m);
        if cap.radius - rho - CERT_EPS > 0.0 && d >= (cap.radius - rho - CERT_EPS).cos() {
            return None;
        }
        if d >= cos_reach(cap.radius + rho) {
            local.push(i);
            if d >= cap.cos_radius {
                inside_some = true;
            }
        }
    }
    if !inside_some {
        // caps outside `local` are farther than rho from m
        let sub: Vec<PreparedCap> = local
            .iter()
            .map(|&i| {
                let c = &caps[i as usize];
                PreparedCap { axis: c.axis, radius: c.radius, cos_radius: c.cos_radius }
            })
            .collect();
        let margin = margin_outside(&sub, &m, rho);
        if margin > 0.0 {
            return Some(uncovered(&m, margin));
        }
    }
    if rho <= resolution {
        *undecided = true;
        return None;
    }
    let ab = (a + b).normalize();
    let bc = (b + c).normalize();
    let ca = (c + a).normalize();
    for (p, q, r) in [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)] {
        if let Some(v) = refine(caps, &local, p, q, r, resolution, undecided) {
            return Some(v);
        }
    }
    None
}

/// Certified test whether `caps` cover the unit sphere, down to `resolution`.
pub fn sphere_coverage(caps: &[Cap], resolution: f64) -> crate::Result<CoverageVerdict> {
    crate::error::ensure(resolution > 0.0 && resolution.is_finite(), || {
        format!("resolution {resolution} must be > 0")
    })?;
    Ok(SphereNet::new().coverage(caps, resolution))
}
