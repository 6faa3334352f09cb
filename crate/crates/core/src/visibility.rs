//! Directional and total visibility from the origin.
//!
//! Total visibility is the smallest `r` at which the shadows of the obstacles
//! met by the ball of radius `r` cover the unit circle (sphere). Coverage is
//! monotone in `r`, so it is located by bisection between the spherical
//! contact distance and the reach of the set.

use std::f64::consts::{PI, TAU};

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::coverage::{ArcSweep, CoverageVerdict, SphereNet};
use crate::error::{ensure, invalid, Result};
use crate::geometry::{ArcInterval, Ball, Cap, Obstacle};
use crate::model::{spherical_contact, ObstacleSet, Obstacles};

/// Smallest resolution the spherical test refines to.
pub const RESOLUTION_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VisibilityResult {
    Exact { value: f64, tolerance: f64 },
    /// Coverage is certified absent at `lo` and present at `hi`.
    Interval { lo: f64, hi: f64 },
    /// Shadows within `guard` do not (certifiably) cover; the set must be extended.
    UnboundedBeyond { guard: f64 },
}

impl VisibilityResult {
    /// Point estimate, `None` when unbounded.
    pub fn value(&self) -> Option<f64> {
        match *self {
            VisibilityResult::Exact { value, .. } => Some(value),
            VisibilityResult::Interval { lo, hi } => Some(0.5 * (lo + hi)),
            VisibilityResult::UnboundedBeyond { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum UnitVector {
    Planar(Vector2<f64>),
    Spatial(Vector3<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalQuery {
    direction: UnitVector,
    guard: f64,
}

impl DirectionalQuery {
    pub fn planar(angle: f64, guard: f64) -> Result<Self> {
        ensure(guard > 0.0, || format!("guard {guard} must be > 0"))?;
        Ok(Self {
            direction: UnitVector::Planar(Vector2::new(angle.cos(), angle.sin())),
            guard,
        })
    }

    pub fn spatial(direction: Vector3<f64>, guard: f64) -> Result<Self> {
        ensure(guard > 0.0, || format!("guard {guard} must be > 0"))?;
        ensure((direction.norm() - 1.0).abs() <= 1e-12, || {
            format!("direction has norm {}, expected 1", direction.norm())
        })?;
        Ok(Self {
            direction: UnitVector::Spatial(direction),
            guard,
        })
    }
}

/// Distance to the first obstacle along the query direction, `None` if
/// nothing is hit within the guard.
pub fn directional_visibility(q: &DirectionalQuery, set: &ObstacleSet) -> Result<Option<f64>> {
    ensure(q.guard <= set.reach(), || {
        format!("guard {} exceeds the reach {} of the set", q.guard, set.reach())
    })?;
    let hit = match (q.direction, set.obstacles()) {
        (UnitVector::Planar(u), Obstacles::Planar(v)) => {
            v.iter().filter_map(|o| o.first_hit_distance(&u)).fold(f64::INFINITY, f64::min)
        }
        (UnitVector::Spatial(u), Obstacles::Spatial(v)) => {
            v.iter().filter_map(|b| b.first_hit_distance(&u)).fold(f64::INFINITY, f64::min)
        }
        _ => return Err(invalid("query and obstacle set differ in dimension")),
    };
    Ok((hit <= q.guard).then_some(hit))
}

/// Planar coverage probes over obstacles sorted by distance.
pub struct PlanarShadows<'a> {
    sorted: Vec<&'a Obstacle>,
    sweep: ArcSweep,
    reach: f64,
    contact: f64,
}

impl<'a> PlanarShadows<'a> {
    pub fn new(set: &'a ObstacleSet) -> Result<Self> {
        let Obstacles::Planar(list) = set.obstacles() else {
            return Err(invalid("planar visibility needs a planar obstacle set"));
        };
        let mut sorted: Vec<&Obstacle> = list.iter().collect();
        sorted.sort_by(|a, b| a.distance_from_origin().total_cmp(&b.distance_from_origin()));
        Ok(Self {
            sorted,
            sweep: ArcSweep::default(),
            reach: set.reach(),
            contact: spherical_contact(set),
        })
    }

    /// Whether the shadows within distance `r` cover the circle.
    pub fn covered_at(&mut self, r: f64) -> bool {
        self.sweep.clear();
        for o in &self.sorted {
            if o.distance_from_origin() > r {
                break;
            }
            if let Some(arc) = o.blocked_interval(r) {
                if self.sweep.push(&arc) {
                    return true;
                }
            }
        }
        self.sweep.covers()
    }

    /// Bisection on coverage. Once a radius `lo` is known to be uncovered,
    /// only the gaps at `lo` can stay open further out, so the covered part
    /// is kept as fixed pieces and obstacles whose shadow at `hi` lies
    /// inside it are dropped.
    pub fn total(&mut self, tol: f64) -> Result<VisibilityResult> {
        ensure(tol > 0.0, || format!("tolerance {tol} must be > 0"))?;
        if !self.covered_at(self.reach) {
            return Ok(VisibilityResult::UnboundedBeyond { guard: self.reach });
        }
        let (mut lo, mut hi) = (self.contact, self.reach);
        let mut active = self.sorted.clone();
        let mut fixed: Vec<(f64, f64)> = Vec::new();
        while hi - lo > 2.0 * tol {
            let mid = 0.5 * (lo + hi);
            self.sweep.clear();
            fixed.iter().for_each(|p| self.sweep.push_piece(*p));
            let mut full = false;
            for o in &active {
                if o.distance_from_origin() > mid {
                    break;
                }
                if let Some(arc) = o.blocked_interval(mid) {
                    if self.sweep.push(&arc) {
                        full = true;
                        break;
                    }
                }
            }
            match if full { None } else { self.sweep.merged() } {
                None => {
                    hi = mid;
                    let keep = active.partition_point(|o| o.distance_from_origin() <= hi);
                    active.truncate(keep);
                }
                Some(pieces) => {
                    lo = mid;
                    active.retain(|o| o.blocked_interval(hi).is_some_and(|arc| !inside(&pieces, &arc)));
                    fixed = pieces;
                }
            }
        }
        Ok(VisibilityResult::Exact {
            value: 0.5 * (lo + hi),
            tolerance: tol,
        })
    }
}

/// Whether `arc` lies in one of the sorted disjoint `pieces`.
fn inside(pieces: &[(f64, f64)], arc: &ArcInterval) -> bool {
    let contained = |a: f64, b: f64| {
        let i = pieces.partition_point(|p| p.0 <= a);
        i > 0 && pieces[i - 1].1 >= b
    };
    if arc.half_width >= PI {
        return false;
    }
    let start = arc.start();
    let end = start + 2.0 * arc.half_width;
    if end > TAU {
        contained(start, TAU) && contained(0.0, end - TAU)
    } else {
        contained(start, end)
    }
}

/// Total visibility of a planar set to absolute tolerance `tol`.
pub fn total_visibility_2d(set: &ObstacleSet, tol: f64) -> Result<VisibilityResult> {
    PlanarShadows::new(set)?.total(tol)
}

/// Spatial coverage probes with an adaptive certification resolution.
pub struct SpatialShadows<'a> {
    sorted: Vec<&'a Ball>,
    net: SphereNet,
    caps: Vec<Cap>,
    resolution: f64,
    reach: f64,
    contact: f64,
}

impl<'a> SpatialShadows<'a> {
    pub fn new(set: &'a ObstacleSet, initial_resolution: f64) -> Result<Self> {
        ensure(initial_resolution > 0.0, || format!("resolution {initial_resolution} must be > 0"))?;
        let Obstacles::Spatial(list) = set.obstacles() else {
            return Err(invalid("spatial visibility needs balls"));
        };
        let mut sorted: Vec<&Ball> = list.iter().collect();
        sorted.sort_by(|a, b| a.distance_from_origin().total_cmp(&b.distance_from_origin()));
        Ok(Self {
            sorted,
            net: SphereNet::new(),
            caps: Vec::new(),
            resolution: initial_resolution.max(RESOLUTION_FLOOR),
            reach: set.reach(),
            contact: spherical_contact(set),
        })
    }

    /// Coverage verdict at `r`, refining the resolution on `Unknown` down to
    /// the floor.
    pub fn verdict_at(&mut self, r: f64) -> CoverageVerdict {
        self.caps.clear();
        for b in &self.sorted {
            if b.distance_from_origin() > r {
                break;
            }
            if let Some(cap) = b.shadow_cap(r) {
                self.caps.push(cap);
            }
        }
        loop {
            let v = self.net.coverage(&self.caps, self.resolution);
            if !matches!(v, CoverageVerdict::Unknown { .. }) || self.resolution <= RESOLUTION_FLOOR {
                return v;
            }
            self.resolution = (0.5 * self.resolution).max(RESOLUTION_FLOOR);
        }
    }

    pub fn total(&mut self, tol: f64) -> Result<VisibilityResult> {
        ensure(tol > 0.0, || format!("tolerance {tol} must be > 0"))?;
        if !self.verdict_at(self.reach).is_covered() {
            return Ok(VisibilityResult::UnboundedBeyond { guard: self.reach });
        }
        let (mut lo, mut hi) = (self.contact, self.reach);
        while hi - lo > 2.0 * tol {
            let mid = 0.5 * (lo + hi);
            match self.verdict_at(mid) {
                CoverageVerdict::Covered => hi = mid,
                CoverageVerdict::Uncovered { .. } => lo = mid,
                CoverageVerdict::Unknown { .. } => return Ok(VisibilityResult::Interval { lo, hi }),
            }
        }
        Ok(VisibilityResult::Exact {
            value: 0.5 * (lo + hi),
            tolerance: tol,
        })
    }
}

/// Total visibility of a set of balls. `UnboundedBeyond` is also returned
/// when coverage at the reach cannot be certified at the resolution floor.
pub fn total_visibility_3d(set: &ObstacleSet, tol: f64, initial_resolution: f64) -> Result<VisibilityResult> {
    SpatialShadows::new(set, initial_resolution)?.total(tol)
}
