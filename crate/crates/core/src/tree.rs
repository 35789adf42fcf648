//! Homogeneous trees with a level function and the weighted counting measure
//! τ{x} = q^{level(x)}, admissible trapezoids, their envelopes, and instance
//! construction.
//!
//! The model is the rooted word tree: vertices are words over q digits up to
//! a depth cap, level(x) = root_level − depth(x). A trapezoid is the band of
//! descendants of an apex at relative depths h..2h−1 (the singleton band
//! {apex} when h = 1), so its measure is exactly height × width, the width
//! being q^{level(apex)}. Envelopes widen the band to ⌈h/2⌉..4h−1 together
//! with the trapezoid itself.

use num::bigint::BigInt;
use num::Zero;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub depth: u32,
    /// Index among the q^depth vertices of this depth, in word order.
    pub offset: u64,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { depth: 0, offset: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeModel {
    pub q: u32,
    pub depth: u32,
    pub root_level: i32,
}

impl TreeModel {
    pub fn new(q: u32, depth: u32, root_level: i32) -> Result<Self> {
        if q < 2 {
            return Err(Error::MalformedInput("homogeneous tree needs q ≥ 2".into()));
        }
        if (depth as f64) * (q as f64).log2() > 62.0 {
            return Err(Error::Range("tree too deep for 64-bit offsets".into()));
        }
        Ok(TreeModel { q, depth, root_level })
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.depth <= self.depth && v.offset < self.width_at(v.depth)
    }

    /// Number of vertices at a depth: q^depth.
    pub fn width_at(&self, depth: u32) -> u64 {
        (self.q as u64).pow(depth)
    }

    pub fn level(&self, v: Vertex) -> i32 {
        self.root_level - v.depth as i32
    }

    /// τ{x} = q^{level(x)}, exact.
    pub fn tau_point(&self, v: Vertex) -> Result<Rational> {
        if !self.contains(v) {
            return Err(Error::Range(format!("vertex {v:?} outside the depth cap")));
        }
        Ok(self.pow_q(self.level(v)))
    }

    pub fn pow_q(&self, e: i32) -> Rational {
        let q = BigInt::from(self.q);
        if e >= 0 {
            Rational::from_integer(q.pow(e as u32))
        } else {
            Rational::new(BigInt::from(1), q.pow((-e) as u32))
        }
    }

    pub fn ancestor(&self, v: Vertex, depth: u32) -> Vertex {
        assert!(depth <= v.depth);
        Vertex { depth, offset: v.offset / (self.q as u64).pow(v.depth - depth) }
    }

    pub fn is_ancestor_or_self(&self, a: Vertex, b: Vertex) -> bool {
        a.depth <= b.depth && self.ancestor(b, a.depth) == a
    }

    /// Word label: "r" followed by base-q digits.
    pub fn label(&self, v: Vertex) -> String {
        let mut digits = Vec::with_capacity(v.depth as usize + 1);
        let mut off = v.offset;
        for _ in 0..v.depth {
            digits.push(char::from_digit((off % self.q as u64) as u32, 10).unwrap());
            off /= self.q as u64;
        }
        digits.push('r');
        digits.iter().rev().collect()
    }

    pub fn parse_label(&self, s: &str) -> Result<Vertex> {
        let rest = s
            .strip_prefix('r')
            .ok_or_else(|| Error::MalformedInput(format!("vertex label {s:?} must start with 'r'")))?;
        let mut v = Vertex::root();
        for ch in rest.chars() {
            let d = ch
                .to_digit(10)
                .filter(|&d| d < self.q)
                .ok_or_else(|| Error::MalformedInput(format!("bad digit {ch:?} in {s:?}")))?;
            v = Vertex { depth: v.depth + 1, offset: v.offset * self.q as u64 + d as u64 };
        }
        if !self.contains(v) {
            return Err(Error::Range(format!("vertex {s:?} outside the depth cap")));
        }
        Ok(v)
    }
}

/// Which member band realizes a trapezoid of height h ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandConvention {
    /// Relative depths h..2h−1: exactly h levels, so measure = height·width.
    #[default]
    HeightExact,
    /// The strict upper bound h..2h−2 (h−1 levels); kept for comparison.
    LiteralUpperBound,
}

/// Admissible trapezoid: apex plus height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Trapezoid {
    pub apex: Vertex,
    pub height: u32,
}

impl Trapezoid {
    pub fn new(apex: Vertex, height: u32) -> Result<Self> {
        if height == 0 {
            return Err(Error::MalformedInput("trapezoid height must be ≥ 1".into()));
        }
        Ok(Trapezoid { apex, height })
    }

    /// Member band in relative depths under the default convention.
    pub fn band(&self) -> (u32, u32) {
        self.band_with(BandConvention::HeightExact)
    }

    pub fn band_with(&self, conv: BandConvention) -> (u32, u32) {
        if self.height == 1 {
            (0, 0)
        } else {
            match conv {
                BandConvention::HeightExact => (self.height, 2 * self.height - 1),
                BandConvention::LiteralUpperBound => (self.height, 2 * self.height - 2),
            }
        }
    }

    /// Absolute depth band of the members.
    pub fn abs_band(&self) -> (u32, u32) {
        let (lo, hi) = self.band();
        (self.apex.depth + lo, self.apex.depth + hi)
    }

    /// Width ω(T) = q^{level(apex)}.
    pub fn width(&self, model: &TreeModel) -> Rational {
        model.pow_q(model.level(self.apex))
    }

    fn check_fits(&self, model: &TreeModel) -> Result<()> {
        if !model.contains(self.apex) {
            return Err(Error::Range("trapezoid apex outside the model".into()));
        }
        let (_, hi) = self.abs_band();
        if hi > model.depth {
            return Err(Error::Range(format!(
                "trapezoid at depth {} with height {} overflows the depth cap {}",
                self.apex.depth, self.height, model.depth
            )));
        }
        Ok(())
    }

    /// Exact measure τ(T): per-level sums; equals height·width under the
    /// default convention.
    pub fn measure(&self, model: &TreeModel) -> Result<Rational> {
        self.check_fits(model)?;
        let (lo, hi) = self.band();
        Ok(self.band_measure(model, lo, hi))
    }

    fn band_measure(&self, model: &TreeModel, lo_rel: u32, hi_rel: u32) -> Rational {
        // Each relative level d holds q^d descendants of weight
        // q^{level(apex)−d}, contributing exactly one width per level.
        let mut acc = Rational::zero();
        for d in lo_rel..=hi_rel {
            let count = Rational::from_integer(BigInt::from(model.width_at(d)));
            let tau = model.pow_q(model.level(self.apex) - d as i32);
            acc = acc + count * tau;
        }
        acc
    }

    /// Explicit member vertices (guarded; oracles and small models only).
    pub fn members(&self, model: &TreeModel) -> Result<Vec<Vertex>> {
        self.check_fits(model)?;
        let (lo, hi) = self.band();
        band_vertices(model, self.apex, lo, hi)
    }
}

fn band_vertices(model: &TreeModel, apex: Vertex, lo_rel: u32, hi_rel: u32) -> Result<Vec<Vertex>> {
    let mut total: u64 = 0;
    for d in lo_rel..=hi_rel {
        total += model.width_at(d);
        if total > (1 << 22) {
            return Err(Error::Range("band too large to enumerate explicitly".into()));
        }
    }
    let mut out = Vec::with_capacity(total as usize);
    for d in lo_rel..=hi_rel {
        let width = model.width_at(d);
        let base = apex.offset * width;
        for k in 0..width {
            out.push(Vertex { depth: apex.depth + d, offset: base + k });
        }
    }
    Ok(out)
}

/// Envelope band of a trapezoid: the trapezoid united with relative depths
/// ⌈h/2⌉..4h−1 (one contiguous band in this model).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeSet {
    pub apex: Vertex,
    pub lo_rel: u32,
    pub hi_rel: u32,
}

impl EnvelopeSet {
    pub fn tau(&self, model: &TreeModel) -> Rational {
        Trapezoid { apex: self.apex, height: 1 }.band_measure(model, self.lo_rel, self.hi_rel)
    }

    pub fn members(&self, model: &TreeModel) -> Result<Vec<Vertex>> {
        band_vertices(model, self.apex, self.lo_rel, self.hi_rel)
    }

    pub fn contains_vertex(&self, model: &TreeModel, v: Vertex) -> bool {
        model.is_ancestor_or_self(self.apex, v)
            && (self.apex.depth + self.lo_rel..=self.apex.depth + self.hi_rel)
                .contains(&v.depth)
    }
}

fn envelope_band(height: u32) -> (u32, u32) {
    let lo = if height == 1 { 0 } else { height.div_ceil(2) };
    (lo, 4 * height - 1)
}

/// Envelope of a trapezoid; the full band must fit the depth cap.
pub fn envelope(model: &TreeModel, t: &Trapezoid) -> Result<EnvelopeSet> {
    t.check_fits(model)?;
    let (lo, hi) = envelope_band(t.height);
    if t.apex.depth + hi > model.depth {
        return Err(Error::Range(format!(
            "envelope of height {} at depth {} overflows the depth cap {}",
            t.height, t.apex.depth, model.depth
        )));
    }
    Ok(EnvelopeSet { apex: t.apex, lo_rel: lo, hi_rel: hi })
}

/// Envelope truncated at the depth cap (containment checks on full models).
pub fn envelope_clipped(model: &TreeModel, t: &Trapezoid) -> Result<EnvelopeSet> {
    t.check_fits(model)?;
    let (lo, hi) = envelope_band(t.height);
    let hi = hi.min(model.depth - t.apex.depth);
    Ok(EnvelopeSet { apex: t.apex, lo_rel: lo, hi_rel: hi })
}

/// T₁ ∩ T₂ ≠ ∅ via band arithmetic: apexes comparable and depth bands meet.
pub fn trapezoids_intersect(model: &TreeModel, a: &Trapezoid, b: &Trapezoid) -> bool {
    let comparable = model.is_ancestor_or_self(a.apex, b.apex)
        || model.is_ancestor_or_self(b.apex, a.apex);
    if !comparable {
        return false;
    }
    let (alo, ahi) = a.abs_band();
    let (blo, bhi) = b.abs_band();
    alo.max(blo) <= ahi.min(bhi)
}

/// T ⊆ envelope via band arithmetic: the envelope's apex must sit on or above
/// the trapezoid's and the depth band must include the member band.
pub fn envelope_contains_trapezoid(model: &TreeModel, env: &EnvelopeSet, t: &Trapezoid) -> bool {
    if !model.is_ancestor_or_self(env.apex, t.apex) {
        return false;
    }
    let (lo, hi) = t.abs_band();
    env.apex.depth + env.lo_rel <= lo && hi <= env.apex.depth + env.hi_rel
}

/// All trapezoids with apexes in the given set and heights in the range;
/// errors when any member band overflows the depth cap.
pub fn enumerate_trapezoids(
    model: &TreeModel,
    apexes: &[Vertex],
    heights: std::ops::RangeInclusive<u32>,
) -> Result<Vec<Trapezoid>> {
    let mut out = Vec::new();
    for &apex in apexes {
        for h in heights.clone() {
            let t = Trapezoid::new(apex, h)?;
            t.check_fits(model)?;
            out.push(t);
        }
    }
    Ok(out)
}

/// Every trapezoid whose envelope fits: apexes down to `max_apex_depth`,
/// heights clamped per apex so that 4h−1 stays within the cap.
pub fn enumerate_fitting_trapezoids(
    model: &TreeModel,
    max_apex_depth: u32,
    height_cap: u32,
) -> Vec<Trapezoid> {
    let mut out = Vec::new();
    for depth in 0..=max_apex_depth.min(model.depth) {
        let budget = model.depth - depth;
        // largest h with 4h−1 ≤ budget; h = 1 needs band depth 0 ≤ budget 3
        let h_max = ((budget + 1) / 4).min(height_cap);
        for offset in 0..model.width_at(depth) {
            let apex = Vertex { depth, offset };
            for h in 1..=h_max {
                out.push(Trapezoid { apex, height: h });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreePointing {
    /// All trapezoids containing the vertex.
    Containing,
    /// Trapezoids whose apex is the vertex; they must contain it, so only
    /// height-1 singletons qualify.
    Apex,
}

/// Weighted instance of a trapezoid family: weights are exact τ values, sets
/// are member lists, pointing per mode. Vertices left with no pointed
/// trapezoid are dropped from the ground set.
pub fn tree_instance(
    model: &TreeModel,
    family: &[Trapezoid],
    pointing: TreePointing,
) -> Result<Instance<Rational>> {
    if family.is_empty() {
        return Err(Error::MalformedInput("trapezoid family is empty".into()));
    }
    if pointing == TreePointing::Apex {
        if let Some(t) = family.iter().find(|t| t.height != 1) {
            return Err(Error::MalformedInput(format!(
                "apex pointing requires every trapezoid to contain its apex; height {} at depth {} does not",
                t.height, t.apex.depth
            )));
        }
    }
    // Collect the ground vertices (union of member bands).
    let mut member_lists: Vec<Vec<Vertex>> = Vec::with_capacity(family.len());
    let mut ground: Vec<Vertex> = Vec::new();
    for t in family {
        let m = t.members(model)?;
        ground.extend_from_slice(&m);
        member_lists.push(m);
    }
    ground.sort_unstable();
    ground.dedup();
    let index_of = |v: &Vertex| ground.binary_search(v).expect("member vertex in ground") as u32;

    let point_labels: Vec<String> = ground.iter().map(|&v| model.label(v)).collect();
    let weights: Vec<Rational> = ground
        .iter()
        .map(|&v| model.tau_point(v))
        .collect::<Result<_>>()?;
    let set_labels: Vec<String> = family
        .iter()
        .map(|t| format!("{}#h{}", model.label(t.apex), t.height))
        .collect();
    let sets: Vec<Vec<u32>> = member_lists
        .iter()
        .map(|m| m.iter().map(&index_of).collect())
        .collect();

    match pointing {
        TreePointing::Containing => {
            Instance::with_containing_pointing(point_labels, weights, set_labels, sets, 0.0)
        }
        TreePointing::Apex => {
            let mut lists = vec![Vec::new(); ground.len()];
            for (si, t) in family.iter().enumerate() {
                lists[index_of(&t.apex) as usize].push(si as u32);
            }
            // Apex mode admits only singleton trapezoids, so every ground
            // vertex is an apex and every list is nonempty.
            Instance::from_indexed(point_labels, weights, set_labels, sets, lists, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{greedy_vitali, verify_cover, GaugedFamily};
    use crate::numeric::Scalar;
    use crate::instance::SetFunction;
    use crate::maximal::verify_hl_inequality;
    use rand::SeedableRng;

    fn rat(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn tau_examples() {
        let m = TreeModel::new(2, 6, 0).unwrap();
        assert_eq!(m.tau_point(Vertex::root()).unwrap(), rat(1));
        let deep = Vertex { depth: 3, offset: 5 };
        assert_eq!(m.tau_point(deep).unwrap(), Rational::from_ratio(1, 8));
        let m3 = TreeModel::new(3, 6, 2).unwrap();
        assert_eq!(m3.tau_point(Vertex::root()).unwrap(), rat(9));
        assert!(m.tau_point(Vertex { depth: 9, offset: 0 }).is_err());
    }

    #[test]
    fn label_roundtrip() {
        let m = TreeModel::new(3, 5, 0).unwrap();
        for v in [Vertex::root(), Vertex { depth: 3, offset: 17 }, Vertex { depth: 5, offset: 0 }] {
            assert_eq!(m.parse_label(&m.label(v)).unwrap(), v);
        }
        assert!(m.parse_label("x01").is_err());
        assert!(m.parse_label("r3").is_err());
    }

    #[test]
    fn member_counts() {
        let m = TreeModel::new(2, 8, 0).unwrap();
        let single = Trapezoid::new(Vertex::root(), 1).unwrap();
        assert_eq!(single.members(&m).unwrap(), vec![Vertex::root()]);
        // q=2, h=2, apex at the root: depths 2..3 → 4+8 = 12 vertices
        let t2 = Trapezoid::new(Vertex::root(), 2).unwrap();
        assert_eq!(t2.members(&m).unwrap().len(), 12);
        // h=3: depths 3..5 → 8+16+32 = 56
        let t3 = Trapezoid::new(Vertex::root(), 3).unwrap();
        assert_eq!(t3.members(&m).unwrap().len(), 56);
    }

    #[test]
    fn measure_is_height_times_width() {
        let m2 = TreeModel::new(2, 10, 0).unwrap();
        let t1 = Trapezoid::new(Vertex::root(), 1).unwrap();
        assert_eq!(t1.measure(&m2).unwrap(), rat(1));
        let t3 = Trapezoid::new(Vertex::root(), 3).unwrap();
        assert_eq!(t3.measure(&m2).unwrap(), rat(3));
        let m3 = TreeModel::new(3, 8, 2).unwrap();
        let t = Trapezoid::new(Vertex::root(), 2).unwrap();
        assert_eq!(t.measure(&m3).unwrap(), rat(18));
        // oracle: explicit member τ sums agree
        for (model, h) in [(&m2, 2u32), (&m2, 4), (&m3, 3)] {
            let t = Trapezoid::new(Vertex { depth: 1, offset: 1 }, h).unwrap();
            let explicit: Rational = t
                .members(model)
                .unwrap()
                .into_iter()
                .map(|v| model.tau_point(v).unwrap())
                .fold(rat(0), |a, b| a + b);
            assert_eq!(t.measure(model).unwrap(), explicit);
            assert_eq!(explicit, Rational::from_int(h as i64) * t.width(model));
        }
    }

    #[test]
    fn literal_band_convention_breaks_the_measure_identity() {
        let m = TreeModel::new(2, 10, 0).unwrap();
        let t = Trapezoid::new(Vertex::root(), 3).unwrap();
        let (lo, hi) = t.band_with(BandConvention::LiteralUpperBound);
        let literal = t.band_measure(&m, lo, hi);
        // h−1 = 2 levels instead of 3
        assert_eq!(literal, rat(2));
        assert_ne!(literal, Rational::from_int(3) * t.width(&m));
    }

    #[test]
    fn envelope_boundaries() {
        let m = TreeModel::new(2, 16, 0).unwrap();
        // h = 1: depths {0} ∪ 1..3 → τ = 4ω (the envelope bound is tight)
        let t1 = Trapezoid::new(Vertex::root(), 1).unwrap();
        let e1 = envelope(&m, &t1).unwrap();
        assert_eq!((e1.lo_rel, e1.hi_rel), (0, 3));
        assert_eq!(e1.tau(&m), rat(4));
        // h = 2: depths 1..7 → 7ω ≤ 8ω
        let t2 = Trapezoid::new(Vertex::root(), 2).unwrap();
        let e2 = envelope(&m, &t2).unwrap();
        assert_eq!((e2.lo_rel, e2.hi_rel), (1, 7));
        assert_eq!(e2.tau(&m), rat(7));
        // h = 4: depths 2..15 → 14ω ≤ 16ω
        let t4 = Trapezoid::new(Vertex::root(), 4).unwrap();
        let e4 = envelope(&m, &t4).unwrap();
        assert_eq!((e4.lo_rel, e4.hi_rel), (2, 15));
        assert_eq!(e4.tau(&m), rat(14));
        // depth overflow
        let deep = Trapezoid::new(Vertex { depth: 14, offset: 0 }, 2).unwrap();
        assert!(envelope(&m, &deep).is_err());
    }

    #[test]
    fn envelope_bound_holds_for_every_fitting_trapezoid() {
        for q in [2u32, 3] {
            let m = TreeModel::new(q, 12, 0).unwrap();
            for t in enumerate_fitting_trapezoids(&m, 3, 3) {
                let e = envelope(&m, &t).unwrap();
                let bound = Rational::from_int(4) * t.measure(&m).unwrap();
                assert!(e.tau(&m) <= bound, "envelope bound fails for {t:?}");
                assert!(envelope_contains_trapezoid(&m, &e, &t));
            }
        }
    }

    #[test]
    fn enumerate_counts() {
        let m = TreeModel::new(2, 8, 0).unwrap();
        // apexes at depths 0..2 (1+2+4 = 7), heights {1,2} → 14
        let apexes: Vec<Vertex> = (0..=2u32)
            .flat_map(|d| (0..m.width_at(d)).map(move |o| Vertex { depth: d, offset: o }))
            .collect();
        let ts = enumerate_trapezoids(&m, &apexes, 1..=2).unwrap();
        assert_eq!(ts.len(), 14);
        // empty apex set → empty
        assert!(enumerate_trapezoids(&m, &[], 1..=2).unwrap().is_empty());
        // member-band overflow errors (depth 7 + band 2..3 > 8)
        let deep = vec![Vertex { depth: 7, offset: 0 }];
        assert!(enumerate_trapezoids(&m, &deep, 1..=2).is_err());
    }

    #[test]
    fn band_algebra_matches_explicit_sets_exhaustively() {
        // depth-5 model: compare intersection/containment algebra against
        // explicit vertex sets over all trapezoid pairs.
        let m = TreeModel::new(2, 5, 0).unwrap();
        let mut ts = Vec::new();
        for depth in 0..=5u32 {
            for offset in 0..m.width_at(depth) {
                let apex = Vertex { depth, offset };
                for h in 1..=4u32 {
                    if depth + if h == 1 { 0 } else { 2 * h - 1 } <= m.depth {
                        ts.push(Trapezoid { apex, height: h });
                    }
                }
            }
        }
        let sets: Vec<std::collections::HashSet<Vertex>> = ts
            .iter()
            .map(|t| t.members(&m).unwrap().into_iter().collect())
            .collect();
        for (i, a) in ts.iter().enumerate() {
            for (j, b) in ts.iter().enumerate() {
                let fast = trapezoids_intersect(&m, a, b);
                let slow = sets[i].intersection(&sets[j]).next().is_some();
                assert_eq!(fast, slow, "{a:?} vs {b:?}");
                let env = envelope_clipped(&m, b).unwrap();
                let fast_cont = envelope_contains_trapezoid(&m, &env, a);
                let env_set: std::collections::HashSet<Vertex> =
                    env.members(&m).unwrap().into_iter().collect();
                let slow_cont = sets[i].is_subset(&env_set);
                assert_eq!(fast_cont, slow_cont, "{a:?} in env({b:?})");
            }
        }
    }

    #[test]
    fn containment_property_small_model() {
        // T₁ ∩ T₂ ≠ ∅ and ω(T₁) ≤ ω(T₂) imply T₁ ⊆ envelope(T₂).
        for q in [2u32, 3] {
            let m = TreeModel::new(q, 6, 0).unwrap();
            let mut ts = Vec::new();
            for depth in 0..=6u32 {
                for offset in 0..m.width_at(depth) {
                    for h in 1..=3u32 {
                        let t = Trapezoid { apex: Vertex { depth, offset }, height: h };
                        if t.abs_band().1 <= m.depth {
                            ts.push(t);
                        }
                    }
                }
            }
            for a in &ts {
                for b in &ts {
                    if a.apex.depth >= b.apex.depth && trapezoids_intersect(&m, a, b) {
                        let env = envelope_clipped(&m, b).unwrap();
                        assert!(
                            envelope_contains_trapezoid(&m, &env, a),
                            "q={q}: {a:?} ⊄ envelope({b:?})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn instance_examples() {
        let m = TreeModel::new(2, 6, 0).unwrap();
        // one singleton trapezoid → one-point instance
        let single = tree_instance(
            &m,
            &[Trapezoid::new(Vertex::root(), 1).unwrap()],
            TreePointing::Containing,
        )
        .unwrap();
        assert_eq!(single.n_points(), 1);

        // all member-fitting trapezoids with h ≤ 2 at apex depth ≤ 2:
        // measures match h·ω
        let apexes: Vec<Vertex> = (0..=2u32)
            .flat_map(|d| (0..m.width_at(d)).map(move |o| Vertex { depth: d, offset: o }))
            .collect();
        let fam = enumerate_trapezoids(&m, &apexes, 1..=2).unwrap();
        let inst = tree_instance(&m, &fam, TreePointing::Containing).unwrap();
        for (si, t) in fam.iter().enumerate() {
            assert_eq!(inst.set_measure(si as u32), &t.measure(&m).unwrap());
        }

        // apex pointing: only singleton families are admissible
        let singles: Vec<Trapezoid> = fam.iter().copied().filter(|t| t.height == 1).collect();
        let apex_inst = tree_instance(&m, &singles, TreePointing::Apex).unwrap();
        assert_eq!(apex_inst.n_points(), singles.len());
        assert!(tree_instance(&m, &fam, TreePointing::Apex).is_err());
    }

    #[test]
    fn weak_type_four_verifies_and_cover_realizes_it() {
        let m = TreeModel::new(2, 9, 0).unwrap();
        let fam = enumerate_fitting_trapezoids(&m, 2, 2);
        let inst = tree_instance(&m, &fam, TreePointing::Containing).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let eval = crate::norm::NormEvaluator::new(&inst, 64);
        for _ in 0..10 {
            let f = SetFunction::random(&inst, &mut rng);
            let rep = crate::maximal::verify_hl_inequality_with(&inst, &eval, &f, &rat(4)).unwrap();
            assert!(rep.passed && rep.conclusive);
        }
        let _ = verify_hl_inequality(&inst, &SetFunction::zero(&inst), &rat(4)).unwrap();

        // the covering step: width gauge, λ = 1 (max mode), envelope dilation
        let members: Vec<Vec<u32>> = (0..inst.n_sets() as u32)
            .map(|si| inst.set_members(si).to_vec())
            .collect();
        let hulls: Vec<Vec<u32>> = fam
            .iter()
            .map(|t| {
                let env = envelope_clipped(&m, t).unwrap();
                let mut points: Vec<u32> = env
                    .members(&m)
                    .unwrap()
                    .into_iter()
                    .filter_map(|v| inst.point_id(&m.label(v)).ok())
                    .collect();
                points.sort_unstable();
                points
            })
            .collect();
        let gauges: Vec<Rational> = fam.iter().map(|t| t.width(&m)).collect();
        let family = GaugedFamily::new(
            inst.point_labels().to_vec(),
            inst.set_labels().to_vec(),
            members,
            gauges,
            rat(1),
            Some(hulls),
        )
        .unwrap();
        let sel = greedy_vitali(&family).unwrap();
        assert!(verify_cover(&family, &sel).pass());
    }
}
