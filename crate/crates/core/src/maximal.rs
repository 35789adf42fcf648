//! Maximal functions, superlevel measures, the verified inequality and its
//! report type.
//!
//! For finite instances the supremum over r > 0 of r·μ{M F > r} is attained
//! in the limit r ↑ v at the finitely many distinct values v of M F, where it
//! equals v·μ{M F ≥ v}; every check below therefore runs over those
//! breakpoints with the non-strict superlevel set.

use crate::error::{Error, Result};
use crate::instance::{Instance, SetFunction};
use crate::norm::{NormEvaluator, NormKind, DEFAULT_NORM_CAP};
use crate::numeric::Scalar;

/// Per-point values of the maximal function plus the distinct value levels.
#[derive(Debug, Clone)]
pub struct MaximalProfile<S> {
    values: Vec<S>,
    /// Distinct per-point values, sorted descending.
    breakpoints: Vec<S>,
}

impl<S: Scalar> MaximalProfile<S> {
    pub fn value(&self, point: u32) -> &S {
        &self.values[point as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }
}

/// M F(x) = max over pointed sets Q of F(Q)/μ(Q).
pub fn maximal_function<S: Scalar>(
    instance: &Instance<S>,
    f: &SetFunction<S>,
) -> Result<MaximalProfile<S>> {
    if f.values().len() != instance.n_sets() {
        return Err(Error::MalformedInput("set function does not match the instance family".into()));
    }
    let mut values = Vec::with_capacity(instance.n_points());
    for p in 0..instance.n_points() as u32 {
        let mut best: Option<S> = None;
        for &si in instance.pointing_of(p) {
            let v = f.value(si).clone() / instance.set_measure(si).clone();
            best = Some(match best {
                Some(b) if b >= v => b,
                _ => v,
            });
        }
        // Pointing lists are never empty by construction.
        values.push(best.expect("nonempty pointing"));
    }
    let mut breakpoints = values.clone();
    breakpoints.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    breakpoints.dedup();
    Ok(MaximalProfile { values, breakpoints })
}

/// μ{x : M F(x) ≥ v} (or > v with `strict`).
pub fn superlevel_measure<S: Scalar>(
    instance: &Instance<S>,
    profile: &MaximalProfile<S>,
    level: &S,
    strict: bool,
) -> S {
    let mut acc = S::zero();
    for (p, m) in profile.values.iter().enumerate() {
        let inside = if strict { m > level } else { m >= level };
        if inside {
            acc = acc + instance.weight(p as u32).clone();
        }
    }
    acc
}

/// All (level, level·μ{M ≥ level}) pairs over the breakpoints, descending.
fn weighted_levels<S: Scalar>(
    instance: &Instance<S>,
    profile: &MaximalProfile<S>,
) -> Vec<(S, S)> {
    // Sort points by value descending once and accumulate weights.
    let mut order: Vec<u32> = (0..instance.n_points() as u32).collect();
    order.sort_by(|&a, &b| {
        profile.values[b as usize]
            .partial_cmp(&profile.values[a as usize])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = Vec::with_capacity(profile.breakpoints.len());
    let mut cum = S::zero();
    let mut it = order.iter().peekable();
    for v in &profile.breakpoints {
        while let Some(&&p) = it.peek() {
            if &profile.values[p as usize] >= v {
                cum = cum + instance.weight(p).clone();
                it.next();
            } else {
                break;
            }
        }
        out.push((v.clone(), v.clone() * cum.clone()));
    }
    out
}

/// max over breakpoints v of v·μ{M F ≥ v} together with the attaining v.
pub fn peak_level<S: Scalar>(
    instance: &Instance<S>,
    profile: &MaximalProfile<S>,
) -> Option<(S, S)> {
    weighted_levels(instance, profile)
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
}

/// The verified ratio max_v v·μ{M F ≥ v}/‖F‖; zero when ‖F‖ = 0.
pub fn hl_ratio<S: Scalar>(instance: &Instance<S>, f: &SetFunction<S>) -> Result<S> {
    let eval = NormEvaluator::new(instance, DEFAULT_NORM_CAP);
    hl_ratio_with(instance, &eval, f)
}

/// As [`hl_ratio`], with a caller-built norm evaluator for hot loops.
pub fn hl_ratio_with<S: Scalar>(
    instance: &Instance<S>,
    eval: &NormEvaluator<S>,
    f: &SetFunction<S>,
) -> Result<S> {
    let norm = eval.exact(f)?;
    if norm.is_zero() {
        return Ok(S::zero());
    }
    let profile = maximal_function(instance, f)?;
    Ok(match peak_level(instance, &profile) {
        Some((_, lhs)) => lhs / norm,
        None => S::zero(),
    })
}

/// One breakpoint check of v·μ{M ≥ v} ≤ c·‖F‖.
#[derive(Debug, Clone)]
pub struct BreakpointVerdict<S> {
    pub level: S,
    pub lhs: S,
    pub rhs: S,
    pub pass: bool,
}

/// Verification/search outcome shared by every route.
#[derive(Debug, Clone)]
pub struct HlReport<S> {
    /// ‖F‖ when a single set function was checked.
    pub norm: Option<S>,
    pub norm_kind: Option<NormKind>,
    /// max_v v·μ{M ≥ v}/‖F‖ (exact norms only).
    pub ratio: Option<S>,
    pub verdicts: Vec<BreakpointVerdict<S>>,
    /// Constant certified by the hull or dyadic route, when applicable.
    pub certified_c: Option<S>,
    /// Best searched ratio, when a search ran.
    pub lower_bound: Option<S>,
    pub passed: bool,
    /// False when a failure was observed against a lower-bound norm only.
    pub conclusive: bool,
    /// First failing breakpoint.
    pub witness: Option<S>,
}

impl<S: Scalar> HlReport<S> {
    /// Soundness cross-checks the report promises its consumers.
    pub fn consistent(&self) -> bool {
        match (&self.lower_bound, &self.certified_c) {
            (Some(lo), Some(c)) => lo.le_within(c, 1e-9),
            _ => true,
        }
    }
}

/// Check v·μ{M F ≥ v} ≤ c·‖F‖ at every breakpoint.
///
/// The exact norm is used whenever available (small family or laminar);
/// otherwise the greedy lower bound stands in, which keeps a pass sound but
/// makes a failure inconclusive.
pub fn verify_hl_inequality<S: Scalar>(
    instance: &Instance<S>,
    f: &SetFunction<S>,
    c: &S,
) -> Result<HlReport<S>> {
    let eval = NormEvaluator::new(instance, DEFAULT_NORM_CAP);
    verify_hl_inequality_with(instance, &eval, f, c)
}

/// As [`verify_hl_inequality`], reusing a caller-built norm evaluator.
pub fn verify_hl_inequality_with<S: Scalar>(
    instance: &Instance<S>,
    eval: &NormEvaluator<S>,
    f: &SetFunction<S>,
    c: &S,
) -> Result<HlReport<S>> {
    if !(c >= &S::zero()) || !c.is_finite_value() {
        return Err(Error::MalformedInput("constant c must be finite and nonnegative".into()));
    }
    let (norm, kind) = match eval.exact(f) {
        Ok(n) => (n, NormKind::Exact),
        Err(Error::NormCapacity { .. }) => (eval.greedy_lower(f), NormKind::LowerBound),
        Err(e) => return Err(e),
    };
    let profile = maximal_function(instance, f)?;
    let rhs = c.clone() * norm.clone();
    let tol = instance.tol();
    let mut verdicts = Vec::new();
    let mut witness = None;
    let mut peak: Option<S> = None;
    for (level, lhs) in weighted_levels(instance, &profile) {
        let pass = lhs.le_within(&rhs, tol);
        if !pass && witness.is_none() {
            witness = Some(level.clone());
        }
        if peak.as_ref().map_or(true, |p| &lhs > p) {
            peak = Some(lhs.clone());
        }
        verdicts.push(BreakpointVerdict { level, lhs, rhs: rhs.clone(), pass });
    }
    let passed = witness.is_none();
    let ratio = match (&peak, kind) {
        (Some(p), NormKind::Exact) if !norm.is_zero() => Some(p.clone() / norm.clone()),
        _ => None,
    };
    Ok(HlReport {
        norm: Some(norm),
        norm_kind: Some(kind),
        ratio,
        verdicts,
        certified_c: None,
        lower_bound: None,
        passed,
        conclusive: passed || kind == NormKind::Exact,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_integral_setfunction, family_union, Instance};
    use crate::numeric::Rational;
    use num::Zero;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn rat(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn two_point_instance() -> Instance<Rational> {
        Instance::new(
            vec![("a".into(), rat(1)), ("b".into(), rat(1))],
            vec![
                ("Q1".into(), vec!["a".into()]),
                ("Q2".into(), vec!["a".into(), "b".into()]),
            ],
            vec![
                ("a".into(), vec!["Q1".into(), "Q2".into()]),
                ("b".into(), vec!["Q2".into()]),
            ],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn maximal_function_examples() {
        let inst = two_point_instance();
        let f = SetFunction::new(&inst, vec![rat(2), rat(3)]).unwrap();
        let m = maximal_function(&inst, &f).unwrap();
        assert_eq!(m.value(0), &rat(2));
        assert_eq!(m.value(1), &Rational::from_ratio(3, 2));
        assert_eq!(m.breakpoints(), &[rat(2), Rational::from_ratio(3, 2)]);

        let zero = SetFunction::zero(&inst);
        let mz = maximal_function(&inst, &zero).unwrap();
        assert!(mz.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn indicator_profile_is_one_on_the_set() {
        // F = μ(Q)·1_Q with containing pointing: M = 1 exactly on Q, 0 elsewhere.
        let inst = Instance::with_containing_pointing(
            vec!["a".into(), "b".into(), "c".into()],
            vec![rat(1), rat(2), rat(1)],
            vec!["Q".into(), "R".into()],
            vec![vec![0, 1], vec![1, 2]],
            0.0,
        )
        .unwrap();
        let f = SetFunction::singleton(&inst, 0, inst.set_measure(0).clone()).unwrap();
        let m = maximal_function(&inst, &f).unwrap();
        assert_eq!(m.value(0), &rat(1));
        assert_eq!(m.value(1), &rat(1));
        assert_eq!(m.value(2), &rat(0));
    }

    #[test]
    fn hl_ratio_examples() {
        let inst = two_point_instance();
        // Spec's two-point example: v = 3/2 attains 3/2·2/3 = 1.
        let f = SetFunction::new(&inst, vec![rat(2), rat(3)]).unwrap();
        assert_eq!(hl_ratio(&inst, &f).unwrap(), rat(1));
        assert_eq!(hl_ratio(&inst, &SetFunction::zero(&inst)).unwrap(), rat(0));
    }

    #[test]
    fn verify_inequality_witness() {
        // F = μ on Q2, zero elsewhere: equality at v = 1.
        let inst = two_point_instance();
        let f = SetFunction::singleton(&inst, 1, inst.set_measure(1).clone()).unwrap();
        let ok = verify_hl_inequality(&inst, &f, &rat(1)).unwrap();
        assert!(ok.passed && ok.conclusive);
        let eq = ok.verdicts.iter().find(|v| v.level == rat(1)).unwrap();
        assert_eq!(eq.lhs, eq.rhs);

        let bad = verify_hl_inequality(&inst, &f, &Rational::from_ratio(1, 2)).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.witness, Some(rat(1)));
    }

    #[test]
    fn union_profile_is_pointwise_max() {
        let (a, b) = crate::instance::synth::random_instance_pair(&Default::default(), 7);
        let u = family_union(&a, &b).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let fu = SetFunction::random(&u.instance, &mut rng);
        // Restrict F to each operand through the set maps.
        let fa = SetFunction::new(
            &a,
            u.from_a.iter().map(|&si| fu.value(si).clone()).collect(),
        )
        .unwrap();
        let fb = SetFunction::new(
            &b,
            u.from_b.iter().map(|&si| fu.value(si).clone()).collect(),
        )
        .unwrap();
        let mu = maximal_function(&u.instance, &fu).unwrap();
        let ma = maximal_function(&a, &fa).unwrap();
        let mb = maximal_function(&b, &fb).unwrap();
        for p in 0..u.instance.n_points() as u32 {
            let expect = if ma.value(p) >= mb.value(p) { ma.value(p) } else { mb.value(p) };
            assert_eq!(mu.value(p), expect);
        }
    }

    #[test]
    fn scaling_identities() {
        let inst = two_point_instance();
        let f = SetFunction::new(&inst, vec![rat(2), rat(3)]).unwrap();
        let s = rat(2);
        let scaled = inst.scale_measure(&s).unwrap();
        let m = maximal_function(&inst, &f).unwrap();
        let ms = maximal_function(&scaled, &f).unwrap();
        // M_{sμ}F = s⁻¹·M_μF: values 1 and 3/4.
        assert_eq!(ms.value(0), &rat(1));
        assert_eq!(ms.value(1), &Rational::from_ratio(3, 4));
        for p in 0..inst.n_points() as u32 {
            assert_eq!(ms.value(p).clone() * s.clone(), m.value(p).clone());
        }
        // {M_{sμ}F > r} = {M_μF > sr}
        let r = Rational::from_ratio(7, 10);
        let lhs = superlevel_measure(&inst, &ms, &r, true);
        let rhs = superlevel_measure(&inst, &m, &(s.clone() * r), true);
        assert_eq!(lhs, rhs);
        // s = 1/2 doubles the profile
        let half = inst.scale_measure(&Rational::from_ratio(1, 2)).unwrap();
        let mh = maximal_function(&half, &f).unwrap();
        assert_eq!(mh.value(0), &rat(4));
    }

    #[test]
    fn identity_scaling_is_noop() {
        let inst = two_point_instance();
        let f = SetFunction::new(&inst, vec![rat(2), rat(3)]).unwrap();
        let same = inst.scale_measure(&rat(1)).unwrap();
        let m0 = maximal_function(&inst, &f).unwrap();
        let m1 = maximal_function(&same, &f).unwrap();
        assert_eq!(m0.values(), m1.values());
    }

    #[test]
    fn integral_setfunction_norm_bound() {
        // ‖F‖ ≤ Σ|f|·w for integral set functions.
        let inst = two_point_instance();
        let f = build_integral_setfunction(&inst, &[rat(2), rat(1)]).unwrap();
        let norm = crate::norm::family_norm(&inst, &f, crate::norm::NormMode::exact())
            .unwrap()
            .value;
        assert!(norm <= rat(3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Growing the pointing never decreases the maximal function or the ratio.
        #[test]
        fn pointing_monotonicity(seed in 0u64..4000) {
            let (a, b) = crate::instance::synth::random_instance_pair(&Default::default(), seed);
            let u = family_union(&a, &b).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let fu = SetFunction::random(&u.instance, &mut rng);
            let fa = SetFunction::new(&a, u.from_a.iter().map(|&si| fu.value(si).clone()).collect()).unwrap();
            let ma = maximal_function(&a, &fa).unwrap();
            let mu = maximal_function(&u.instance, &fu).unwrap();
            for p in 0..a.n_points() as u32 {
                prop_assert!(ma.value(p) <= mu.value(p));
            }
        }

        /// Measure scaling keeps every verified breakpoint value invariant:
        /// v·(sμ){M_{sμ} ≥ v} = (sv)·μ{M ≥ sv}, so a pass at c transports to
        /// a pass at the same c.
        #[test]
        fn scaling_transports_passes(seed in 0u64..4000) {
            let inst = crate::instance::synth::random_instance(&Default::default(), seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let f = SetFunction::random(&inst, &mut rng);
            let s = Rational::from_ratio(3, 2);
            let scaled = inst.scale_measure(&s).unwrap();
            let c = Rational::from_ratio(5, 4);
            let r0 = verify_hl_inequality(&inst, &f, &c).unwrap();
            let r1 = verify_hl_inequality(&scaled, &f, &c).unwrap();
            prop_assert_eq!(r0.passed, r1.passed);
        }
    }
}
