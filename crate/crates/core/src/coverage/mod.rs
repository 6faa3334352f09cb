//! Covering the circle and the sphere with shadows, and the classical
//! covering-probability formulas for random arcs.

mod formulas;
mod siegel_holst;
mod sphere;

pub use formulas::{cap_fraction, shepp_bound, stevens_cover_prob, twoatom_uncover_prob, SheppBound};
pub use siegel_holst::{siegel_holst_cover_prob, ArcLengthLaw, McEstimate};
pub use sphere::sphere_coverage;
pub(crate) use siegel_holst::simplex_moments;
pub(crate) use sphere::SphereNet;

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, ArcInterval, ANGLE_EPS};

/// A direction on the circle or the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Direction {
    Planar { angle: f64 },
    Spatial { x: f64, y: f64, z: f64 },
}

impl Direction {
    pub fn spatial(v: &Vector3<f64>) -> Self {
        Direction::Spatial { x: v.x, y: v.y, z: v.z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverageVerdict {
    Covered,
    /// `uncovered_measure` is exact on the circle and a certified lower
    /// bound (steradians) on the sphere.
    Uncovered { witness: Direction, uncovered_measure: f64 },
    Unknown { resolution: f64 },
}

impl CoverageVerdict {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverageVerdict::Covered)
    }
    pub fn is_uncovered(&self) -> bool {
        matches!(self, CoverageVerdict::Uncovered { .. })
    }
}

/// Reusable buffer for repeated circle sweeps.
#[derive(Debug, Default)]
pub(crate) struct ArcSweep {
    pieces: Vec<(f64, f64)>,
}

struct Gaps {
    total: f64,
    largest_start: f64,
    largest_len: f64,
}

impl ArcSweep {
    pub(crate) fn clear(&mut self) {
        self.pieces.clear();
    }

    /// Adds an arc; returns true if the arc alone covers the circle.
    #[inline]
    pub(crate) fn push(&mut self, arc: &ArcInterval) -> bool {
        if arc.half_width >= PI {
            return true;
        }
        let start = arc.start();
        let end = start + 2.0 * arc.half_width;
        if end > TAU {
            self.pieces.push((start, TAU));
            self.pieces.push((0.0, end - TAU));
        } else {
            self.pieces.push((start, end));
        }
        false
    }

    /// Adds a linear piece `[start, end]` with `0 ≤ start ≤ end ≤ 2π`.
    pub(crate) fn push_piece(&mut self, piece: (f64, f64)) {
        self.pieces.push(piece);
    }

    /// Sorts pieces and merges them, bridging gaps up to the touching
    /// tolerance; `None` when the union is the whole circle.
    pub(crate) fn merged(&mut self) -> Option<Vec<(f64, f64)>> {
        if self.pieces.is_empty() {
            return Some(Vec::new());
        }
        self.pieces
            .sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("arc endpoints are finite"));
        let mut out = Vec::new();
        let mut cur = self.pieces[0];
        for &(s, e) in &self.pieces[1..] {
            if s > cur.1 + ANGLE_EPS {
                out.push(cur);
                cur = (s, e);
            } else if e > cur.1 {
                cur.1 = e;
            }
        }
        out.push(cur);
        if out.len() == 1 && cur.0 + TAU <= cur.1 + ANGLE_EPS {
            return None;
        }
        Some(out)
    }

    /// Sorts pieces and reports whether the closed union is the circle.
    pub(crate) fn covers(&mut self) -> bool {
        self.gaps(true).is_none()
    }

    /// `None` when covered; with `early_exit` the gap summary is partial.
    fn gaps(&mut self, early_exit: bool) -> Option<Gaps> {
        if self.pieces.is_empty() {
            return Some(Gaps {
                total: TAU,
                largest_start: 0.0,
                largest_len: TAU,
            });
        }
        self.pieces
            .sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("arc endpoints are finite"));
        let first_start = self.pieces[0].0;
        let mut reach = self.pieces[0].1;
        let mut gaps: Option<Gaps> = None;
        for &(s, e) in &self.pieces[1..] {
            if s > reach + ANGLE_EPS {
                note(&mut gaps, reach, s);
                if early_exit {
                    return gaps;
                }
            }
            if e > reach {
                reach = e;
            }
        }
        let wrap = first_start + TAU;
        if wrap > reach + ANGLE_EPS {
            note(&mut gaps, reach, wrap);
        }
        gaps
    }
}

fn note(gaps: &mut Option<Gaps>, from: f64, to: f64) {
    let len = to - from;
    let g = gaps.get_or_insert(Gaps {
        total: 0.0,
        largest_start: from,
        largest_len: 0.0,
    });
    g.total += len;
    if len > g.largest_len {
        g.largest_len = len;
        g.largest_start = from;
    }
}

/// Exact test whether closed arcs cover the circle.
pub fn circle_union(intervals: &[ArcInterval]) -> CoverageVerdict {
    let mut sweep = ArcSweep::default();
    for arc in intervals {
        if sweep.push(arc) {
            return CoverageVerdict::Covered;
        }
    }
    match sweep.gaps(false) {
        None => CoverageVerdict::Covered,
        Some(g) => CoverageVerdict::Uncovered {
            witness: Direction::Planar {
                angle: wrap_angle(g.largest_start + 0.5 * g.largest_len),
            },
            uncovered_measure: g.total,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn arc(c: f64, h: f64) -> ArcInterval {
        ArcInterval::new(c, h).unwrap()
    }

    #[test]
    fn examples() {
        let third = [arc(0.0, PI / 3.0), arc(2.0 * PI / 3.0, PI / 3.0), arc(4.0 * PI / 3.0, PI / 3.0)];
        assert_eq!(circle_union(&third), CoverageVerdict::Covered);
        match circle_union(&[arc(0.0, 1.0)]) {
            CoverageVerdict::Uncovered {
                witness: Direction::Planar { angle },
                uncovered_measure,
            } => {
                assert_abs_diff_eq!(uncovered_measure, TAU - 2.0, epsilon = 1e-12);
                assert_abs_diff_eq!(angle, PI, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match circle_union(&[]) {
            CoverageVerdict::Uncovered { uncovered_measure, .. } => assert_eq!(uncovered_measure, TAU),
            other => panic!("{other:?}"),
        }
        assert!(circle_union(&[arc(1.0, PI)]).is_covered());
    }

    #[test]
    fn matches_grid_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = 1024;
        for _ in 0..2000 {
            let n = rng.random_range(0..8);
            let arcs: Vec<_> = (0..n)
                .map(|_| arc(rng.random_range(0.0..TAU), rng.random_range(0.0..1.5)))
                .collect();
            let verdict = circle_union(&arcs);
            let hole = (0..grid).map(|i| (i as f64 + 0.5) * TAU / grid as f64).find(|t| !arcs.iter().any(|a| a.contains(*t)));
            match verdict {
                CoverageVerdict::Covered => assert!(hole.is_none()),
                CoverageVerdict::Uncovered { witness: Direction::Planar { angle }, uncovered_measure } => {
                    assert!(!arcs.iter().any(|a| a.contains(angle)));
                    let covered_len: f64 = arcs.iter().map(|a| 2.0 * a.half_width).sum();
                    assert!(uncovered_measure >= TAU - covered_len - 1e-9);
                }
                other => panic!("{other:?}"),
            }
        }
    }
}
