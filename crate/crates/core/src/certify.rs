//! Certified upper bounds for the maximal constant: the dilation-hull route
//! and the dyadic-conditions route.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numeric::Scalar;

/// Q̃ = ∪{R in the family : R ∩ Q ≠ ∅, μ(R) ≤ λ·μ(Q)} as sorted point indices.
///
/// Always contains Q (Q qualifies against itself). Float instances admit
/// boundary members within the instance tolerance, which can only enlarge the
/// hull and therefore keeps the derived constant on the safe side.
pub fn dilation_hull<S: Scalar>(
    instance: &Instance<S>,
    set: u32,
    lambda: &S,
) -> Result<Vec<u32>> {
    if (set as usize) >= instance.n_sets() {
        return Err(Error::MalformedInput(format!("unknown set index {set}")));
    }
    if !(lambda >= &S::one()) {
        return Err(Error::MalformedInput("dilation hull requires λ ≥ 1".into()));
    }
    let cap = lambda.clone() * instance.set_measure(set).clone();
    let tol = instance.tol();
    let mut in_hull = vec![false; instance.n_points()];
    let mut seen_sets = HashSet::new();
    for &p in instance.set_members(set) {
        for &r in instance.sets_containing(p) {
            if seen_sets.insert(r) && instance.set_measure(r).le_within(&cap, tol) {
                for &q in instance.set_members(r) {
                    in_hull[q as usize] = true;
                }
            }
        }
    }
    Ok((0..instance.n_points() as u32)
        .filter(|&p| in_hull[p as usize])
        .collect())
}

/// The hull-route certificate c = max over Q of μ(Q̃)/μ(Q) for a fixed λ > 1.
///
/// On a finite instance the maximum always exists, and the verified
/// inequality holds with this c for every set function.
pub fn hl4_constant<S: Scalar>(instance: &Instance<S>, lambda: &S) -> Result<S> {
    if !(lambda > &S::one()) {
        return Err(Error::MalformedInput("hull certificate requires λ > 1".into()));
    }
    let mut best = S::zero();
    for q in 0..instance.n_sets() as u32 {
        let hull = dilation_hull(instance, q, lambda)?;
        let ratio = instance.measure_of_indices(&hull)? / instance.set_measure(q).clone();
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Outcome of a single dyadic condition.
#[derive(Debug, Clone)]
pub struct ConditionVerdict {
    pub pass: bool,
    pub note: String,
    /// Offending set pair, when a pairwise condition fails.
    pub witness: Option<(String, String)>,
}

impl ConditionVerdict {
    fn pass(note: &str) -> Self {
        ConditionVerdict { pass: true, note: note.into(), witness: None }
    }
}

/// Per-condition report of the five dyadic conditions; all five passing
/// certifies the constant 1.
#[derive(Debug, Clone)]
pub struct DyadicReport {
    pub measurability: ConditionVerdict,
    pub countability: ConditionVerdict,
    pub laminarity: ConditionVerdict,
    pub measure_monotone: ConditionVerdict,
    pub value_discreteness: ConditionVerdict,
}

impl DyadicReport {
    pub fn certifies_c1(&self) -> bool {
        self.measurability.pass
            && self.countability.pass
            && self.laminarity.pass
            && self.measure_monotone.pass
            && self.value_discreteness.pass
    }
}

/// Check the five dyadic conditions on a finite weighted instance.
///
/// Measurability, countability and value discreteness hold vacuously for
/// finite weighted ground sets and are reported with a note; the pairwise
/// nesting condition and measure monotonicity are checked exhaustively.
pub fn check_dyadic_conditions<S: Scalar>(instance: &Instance<S>) -> DyadicReport {
    let mut laminarity = ConditionVerdict::pass("every intersecting pair is nested");
    let mut measure_monotone =
        ConditionVerdict::pass("μ(Q) ≤ μ(Q') for every strict nesting Q ⊊ Q'");

    let subset = |small: u32, big: u32| -> bool {
        let b = instance.set_members(big);
        instance.set_members(small).iter().all(|p| b.binary_search(p).is_ok())
    };

    let mut checked: HashSet<(u32, u32)> = HashSet::new();
    'outer: for p in 0..instance.n_points() as u32 {
        let here = instance.sets_containing(p);
        for (i, &a) in here.iter().enumerate() {
            for &b in &here[i + 1..] {
                let key = (a.min(b), a.max(b));
                if !checked.insert(key) {
                    continue;
                }
                // a and b share the point p, so they must be nested.
                let (small, big) = if instance.set_members(a).len() <= instance.set_members(b).len()
                {
                    (a, b)
                } else {
                    (b, a)
                };
                if !subset(small, big) {
                    laminarity = ConditionVerdict {
                        pass: false,
                        note: "found an overlapping non-nested pair".into(),
                        witness: Some((
                            instance.set_label(a).to_string(),
                            instance.set_label(b).to_string(),
                        )),
                    };
                    break 'outer;
                }
                let strict = instance.set_members(small).len() < instance.set_members(big).len();
                if strict
                    && !instance
                        .set_measure(small)
                        .le_within(instance.set_measure(big), instance.tol())
                {
                    measure_monotone = ConditionVerdict {
                        pass: false,
                        note: "nested pair with decreasing measure".into(),
                        witness: Some((
                            instance.set_label(small).to_string(),
                            instance.set_label(big).to_string(),
                        )),
                    };
                }
            }
        }
    }

    DyadicReport {
        measurability: ConditionVerdict::pass(
            "vacuously true: every subset of a finite weighted ground set is measurable",
        ),
        countability: ConditionVerdict::pass("finite family"),
        laminarity,
        measure_monotone,
        value_discreteness: ConditionVerdict::pass(
            "finite measure-value set has no limit point",
        ),
    }
}
