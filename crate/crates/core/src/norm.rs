//! The disjoint-sum norm ‖F‖: the maximum of Σ F(Q_i) over pairwise
//! disjoint subfamilies.
//!
//! Exact evaluation is a maximum-weight independent set search on the
//! intersection graph, done by branch-and-bound with the sum-of-remaining
//! upper bound and deterministic tie-breaking by set index. Families larger
//! than the cap are still evaluated exactly when they are laminar (any two
//! sets nested or disjoint) via a containment-forest dynamic program;
//! otherwise only the greedy lower bound is available.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::{Instance, SetFunction};
use crate::numeric::Scalar;

/// Default exact-mode family-size cap for the branch-and-bound search.
pub const DEFAULT_NORM_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Exact maximum; errors out beyond `cap` sets unless the family is laminar.
    Exact { cap: usize },
    /// Feasible disjoint subfamily's sum: a lower bound, flagged as such.
    GreedyLower,
}

impl NormMode {
    pub fn exact() -> Self {
        NormMode::Exact { cap: DEFAULT_NORM_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone)]
pub struct NormResult<S> {
    pub value: S,
    pub kind: NormKind,
}

/// ‖F‖ of a set function over the instance family.
pub fn family_norm<S: Scalar>(
    instance: &Instance<S>,
    f: &SetFunction<S>,
    mode: NormMode,
) -> Result<NormResult<S>> {
    let eval = NormEvaluator::new(instance, mode.cap());
    match mode {
        NormMode::Exact { .. } => Ok(NormResult { value: eval.exact(f)?, kind: NormKind::Exact }),
        NormMode::GreedyLower => {
            Ok(NormResult { value: eval.greedy_lower(f), kind: NormKind::LowerBound })
        }
    }
}

impl NormMode {
    fn cap(&self) -> usize {
        match self {
            NormMode::Exact { cap } => *cap,
            NormMode::GreedyLower => DEFAULT_NORM_CAP,
        }
    }
}

/// Reusable exact/greedy norm evaluator; build once per instance when many
/// set functions are evaluated.
pub struct NormEvaluator<'a, S: Scalar> {
    instance: &'a Instance<S>,
    cap: usize,
    plan: Plan,
}

enum Plan {
    BranchBound(Adjacency),
    Laminar(LaminarForest),
    TooBig,
}

impl<'a, S: Scalar> NormEvaluator<'a, S> {
    pub fn new(instance: &'a Instance<S>, cap: usize) -> Self {
        let n = instance.n_sets();
        let plan = if n <= cap {
            Plan::BranchBound(Adjacency::build(instance))
        } else if let Some(forest) = LaminarForest::try_build(instance) {
            Plan::Laminar(forest)
        } else {
            Plan::TooBig
        };
        NormEvaluator { instance, cap, plan }
    }

    /// True when `exact` will not fail with a capacity error.
    pub fn exact_available(&self) -> bool {
        !matches!(self.plan, Plan::TooBig)
    }

    pub fn exact(&self, f: &SetFunction<S>) -> Result<S> {
        debug_assert_eq!(f.values().len(), self.instance.n_sets());
        match &self.plan {
            Plan::BranchBound(adj) => Ok(branch_and_bound(f.values(), adj)),
            Plan::Laminar(forest) => Ok(forest.max_disjoint_sum(f.values())),
            Plan::TooBig => Err(Error::NormCapacity { cap: self.cap, size: self.instance.n_sets() }),
        }
    }

    /// Sum over a greedily chosen disjoint subfamily (value-descending order).
    pub fn greedy_lower(&self, f: &SetFunction<S>) -> S {
        let inst = self.instance;
        let mut order: Vec<u32> = (0..inst.n_sets() as u32).collect();
        order.sort_by(|&a, &b| {
            f.value(b)
                .partial_cmp(f.value(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut taken = vec![false; inst.n_points()];
        let mut acc = S::zero();
        for si in order {
            let members = inst.set_members(si);
            if members.iter().all(|&p| !taken[p as usize]) {
                for &p in members {
                    taken[p as usize] = true;
                }
                acc = acc + f.value(si).clone();
            }
        }
        acc
    }
}

/// Pairwise intersection structure as closed-neighborhood bit rows.
struct Adjacency {
    n: usize,
    /// Row i: bit j set iff sets i and j intersect, or i == j.
    closed: Vec<Vec<u64>>,
}

impl Adjacency {
    fn build<S: Scalar>(instance: &Instance<S>) -> Self {
        let n = instance.n_sets();
        let mut closed = vec![vec![0u64; n.div_ceil(64)]; n];
        for i in 0..n {
            closed[i][i / 64] |= 1u64 << (i % 64);
        }
        for p in 0..instance.n_points() as u32 {
            let here = instance.sets_containing(p);
            for (ai, &a) in here.iter().enumerate() {
                for &b in &here[ai + 1..] {
                    closed[a as usize][b as usize / 64] |= 1u64 << (b as usize % 64);
                    closed[b as usize][a as usize / 64] |= 1u64 << (a as usize % 64);
                }
            }
        }
        Adjacency { n, closed }
    }

    fn intersects(&self, a: usize, b: usize) -> bool {
        a != b && (self.closed[a][b / 64] >> (b % 64)) & 1 == 1
    }
}

/// Exact maximum-weight disjoint subfamily over the intersection graph.
fn branch_and_bound<S: Scalar>(values: &[S], adj: &Adjacency) -> S {
    let n = adj.n;
    if n == 0 {
        return S::zero();
    }
    // Candidates ordered by descending value, set index on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    // Remap adjacency into the ordered space.
    let words = n.div_ceil(64);
    let mut pos = vec![0usize; n];
    for (rank, &i) in order.iter().enumerate() {
        pos[i] = rank;
    }
    let mut closed = vec![vec![0u64; words]; n];
    for (rank, &i) in order.iter().enumerate() {
        for j in 0..n {
            if i == j || adj.intersects(i, j) {
                let rj = pos[j];
                closed[rank][rj / 64] |= 1u64 << (rj % 64);
            }
        }
    }
    let vals: Vec<S> = order.iter().map(|&i| values[i].clone()).collect();

    // Greedy incumbent for pruning.
    let mut best = {
        let mut live = vec![u64::MAX; words];
        mask_trim(&mut live, n);
        let mut acc = S::zero();
        while let Some(i) = first_bit(&live) {
            acc = acc + vals[i].clone();
            and_not(&mut live, &closed[i]);
        }
        acc
    };

    let mut cands = vec![u64::MAX; words];
    mask_trim(&mut cands, n);
    let rem: S = crate::numeric::sum(vals.iter().cloned());
    let mut stack = vec![(cands, S::zero(), rem)];
    while let Some((cands, sum, rem)) = stack.pop() {
        if sum.clone() + rem.clone() <= best {
            continue;
        }
        let Some(i) = first_bit(&cands) else {
            if sum > best {
                best = sum;
            }
            continue;
        };
        // Exclude branch.
        let mut ex = cands.clone();
        ex[i / 64] &= !(1u64 << (i % 64));
        stack.push((ex, sum.clone(), rem.clone() - vals[i].clone()));
        // Include branch.
        let mut inc = cands;
        let mut lost = S::zero();
        for w in 0..words {
            let removed = inc[w] & closed[i][w];
            inc[w] &= !closed[i][w];
            let mut bits = removed;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                lost = lost + vals[w * 64 + b].clone();
                bits &= bits - 1;
            }
        }
        let sum2 = sum + vals[i].clone();
        if sum2 > best {
            best = sum2.clone();
        }
        stack.push((inc, sum2, rem - lost));
    }
    best
}

fn mask_trim(mask: &mut [u64], n: usize) {
    let full = n / 64;
    for (w, m) in mask.iter_mut().enumerate() {
        if w > full {
            *m = 0;
        } else if w == full {
            *m = if n % 64 == 0 { *m } else { (1u64 << (n % 64)) - 1 };
        }
    }
    if n % 64 == 0 && n / 64 < mask.len() {
        for m in mask.iter_mut().skip(n / 64) {
            *m = 0;
        }
    }
}

fn first_bit(mask: &[u64]) -> Option<usize> {
    for (w, &m) in mask.iter().enumerate() {
        if m != 0 {
            return Some(w * 64 + m.trailing_zeros() as usize);
        }
    }
    None
}

fn and_not(mask: &mut [u64], other: &[u64]) {
    for (m, o) in mask.iter_mut().zip(other) {
        *m &= !o;
    }
}

/// Containment forest of a laminar family (any two sets nested or disjoint).
struct LaminarForest {
    /// Parent set index, or u32::MAX for roots.
    parent: Vec<u32>,
    /// Set indices in processing order: children strictly before parents.
    order: Vec<u32>,
}

impl LaminarForest {
    /// Checks laminarity and builds the forest; `None` when some pair of sets
    /// overlaps partially.
    fn try_build<S: Scalar>(instance: &Instance<S>) -> Option<Self> {
        let n = instance.n_sets();
        let size = |s: u32| instance.set_members(s).len();
        let mut verified: HashSet<(u32, u32)> = HashSet::new();
        let mut contains = |big: u32, small: u32| -> bool {
            if verified.contains(&(big, small)) {
                return true;
            }
            let b = instance.set_members(big);
            let s = instance.set_members(small);
            let ok = s.iter().all(|p| b.binary_search(p).is_ok());
            if ok {
                verified.insert((big, small));
            }
            ok
        };

        // Per point, the sets containing it must form a chain under inclusion.
        let mut parent = vec![u32::MAX; n];
        for p in 0..instance.n_points() as u32 {
            let mut chain: Vec<u32> = instance.sets_containing(p).to_vec();
            chain.sort_by_key(|&s| (size(s), s));
            for w in chain.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                if !contains(hi, lo) {
                    return None;
                }
            }
            for w in chain.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                // Successor in the chain of any member is the laminar parent.
                if parent[lo as usize] == u32::MAX || {
                    let cur = parent[lo as usize];
                    (size(hi), hi) < (size(cur), cur)
                } {
                    parent[lo as usize] = hi;
                }
            }
        }

        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&s| (size(s), s));
        Some(LaminarForest { parent, order })
    }

    /// Tree DP: every node takes either its own value or the best of its
    /// children; roots are pairwise disjoint so their bests add up.
    fn max_disjoint_sum<S: Scalar>(&self, values: &[S]) -> S {
        let mut best: Vec<S> = values.to_vec();
        let mut child_sum: Vec<S> = vec![S::zero(); values.len()];
        let mut total = S::zero();
        for &s in &self.order {
            let b = if child_sum[s as usize] > values[s as usize] {
                child_sum[s as usize].clone()
            } else {
                values[s as usize].clone()
            };
            best[s as usize] = b.clone();
            let p = self.parent[s as usize];
            if p == u32::MAX {
                total = total + b;
            } else {
                child_sum[p as usize] = child_sum[p as usize].clone() + b;
            }
        }
        total
    }
}
