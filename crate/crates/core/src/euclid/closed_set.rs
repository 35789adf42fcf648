//! Closed sets given as finite unions of closed axis-aligned boxes and
//! isolated points, with exact squared-distance arithmetic.
//!
//! Distances to such sets are generally irrational, so the exact route works
//! with squared distances throughout; `dist_to_closed` exposes the rounded
//! square root for reports.

use crate::error::{Error, Result};
use num::Zero;

use crate::numeric::{Rational, Scalar};

use super::dyadic::DyadicCube;

/// Closed axis-aligned box with rational corners, lo ≤ hi per coordinate
/// (equalities allowed, so boxes degenerate gracefully to points).
#[derive(Debug, Clone, PartialEq)]
pub struct RatBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl RatBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::MalformedInput("box corners must share a positive dimension".into()));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l > h {
                return Err(Error::MalformedInput("box has lo > hi".into()));
            }
        }
        Ok(RatBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn corners(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|d| if mask >> d & 1 == 1 { self.hi[d].clone() } else { self.lo[d].clone() })
                    .collect()
            })
            .collect()
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.lo.iter().zip(&self.hi).zip(p).all(|((l, h), x)| l <= x && x <= h)
    }
}

/// Squared distance between two closed boxes.
pub fn dist2_boxes(a: &RatBox, b: &RatBox) -> Rational {
    let mut acc = Rational::zero();
    for d in 0..a.dim() {
        let gap = gap(&a.lo[d], &a.hi[d], &b.lo[d], &b.hi[d]);
        acc = acc + gap.clone() * gap;
    }
    acc
}

fn gap(alo: &Rational, ahi: &Rational, blo: &Rational, bhi: &Rational) -> Rational {
    if blo > ahi {
        blo.clone() - ahi.clone()
    } else if alo > bhi {
        alo.clone() - bhi.clone()
    } else {
        Rational::zero()
    }
}

/// Nonempty closed subset: a finite union of closed boxes and points.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSetSpec {
    boxes: Vec<RatBox>,
}

impl ClosedSetSpec {
    pub fn new(boxes: Vec<RatBox>, points: Vec<Vec<Rational>>) -> Result<Self> {
        let mut all = boxes;
        for p in points {
            all.push(RatBox::new(p.clone(), p)?);
        }
        let Some(first) = all.first() else {
            return Err(Error::MalformedInput("closed set must be nonempty".into()));
        };
        let dim = first.dim();
        if all.iter().any(|b| b.dim() != dim) {
            return Err(Error::MalformedInput("closed-set components must share a dimension".into()));
        }
        Ok(ClosedSetSpec { boxes: all })
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub fn components(&self) -> &[RatBox] {
        &self.boxes
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(p))
    }

    /// Exact squared distance from a closed box to the set.
    pub fn dist2_from_box(&self, q: &RatBox) -> Rational {
        self.boxes
            .iter()
            .map(|b| dist2_boxes(q, b))
            .min()
            .expect("nonempty closed set")
    }

    /// Exact squared distance from a point to the set.
    pub fn dist2_from_point(&self, p: &[Rational]) -> Rational {
        let pb = RatBox { lo: p.to_vec(), hi: p.to_vec() };
        self.dist2_from_box(&pb)
    }

    /// Exact squared distance from a dyadic cube's closure to the set.
    pub fn dist2_from_cube(&self, q: &DyadicCube) -> Rational {
        let side = q.side();
        let lo: Vec<Rational> = (0..q.dim()).map(|d| q.lower(d)).collect();
        let hi: Vec<Rational> = lo.iter().map(|l| l.clone() + side.clone()).collect();
        self.dist2_from_box(&RatBox { lo, hi })
    }
}

/// Distance from a dyadic cube to the set, as a float (reports only; exact
/// comparisons use the squared forms).
pub fn dist_to_closed(q: &DyadicCube, spec: &ClosedSetSpec) -> f64 {
    spec.dist2_from_cube(q).to_f64_lossy().sqrt()
}
