//! Finite pointed families with positive weights: the ground data every
//! other module consumes.
//!
//! An [`Instance`] holds a finite ground set with strictly positive weights
//! (the measure is the weighted sum), a family of nonempty subsets, and a
//! pointing that assigns to every ground point a nonempty list of family
//! sets containing it.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// Finite weighted instance: ground points, family sets and the pointing.
#[derive(Debug, Clone)]
pub struct Instance<S: Scalar> {
    point_labels: Vec<String>,
    point_index: HashMap<String, u32>,
    weights: Vec<S>,
    set_labels: Vec<String>,
    set_index: HashMap<String, u32>,
    /// Sorted point indices per set; never empty.
    sets: Vec<Vec<u32>>,
    /// Exact measure of each set (sum of member weights).
    set_measures: Vec<S>,
    /// Per point: the set indices it points to; never empty, each contains the point.
    pointing: Vec<Vec<u32>>,
    /// Per point: every family set containing it (inverse membership).
    sets_at: Vec<Vec<u32>>,
    tol: f64,
}

impl<S: Scalar> Instance<S> {
    /// Build and validate an instance from label-keyed parts.
    pub fn new(
        points: Vec<(String, S)>,
        sets: Vec<(String, Vec<String>)>,
        pointing: Vec<(String, Vec<String>)>,
        tol: f64,
    ) -> Result<Self> {
        let mut point_labels = Vec::with_capacity(points.len());
        let mut weights = Vec::with_capacity(points.len());
        let mut point_index = HashMap::new();
        for (label, w) in points {
            if point_index.contains_key(&label) {
                return Err(Error::MalformedInput(format!("duplicate point id {label:?}")));
            }
            point_index.insert(label.clone(), point_labels.len() as u32);
            point_labels.push(label);
            weights.push(w);
        }

        let mut set_labels = Vec::with_capacity(sets.len());
        let mut set_index = HashMap::new();
        let mut members = Vec::with_capacity(sets.len());
        for (label, ms) in sets {
            if set_index.contains_key(&label) {
                return Err(Error::MalformedInput(format!("duplicate set id {label:?}")));
            }
            let mut idx = Vec::with_capacity(ms.len());
            for m in &ms {
                let &i = point_index
                    .get(m)
                    .ok_or_else(|| Error::MalformedInput(format!("set {label:?} references unknown point {m:?}")))?;
                idx.push(i);
            }
            idx.sort_unstable();
            idx.dedup();
            set_index.insert(label.clone(), set_labels.len() as u32);
            set_labels.push(label);
            members.push(idx);
        }

        let mut pointing_idx = vec![Vec::new(); point_labels.len()];
        for (pl, sl) in pointing {
            let &pi = point_index
                .get(&pl)
                .ok_or_else(|| Error::MalformedInput(format!("pointing references unknown point {pl:?}")))?;
            let mut list = Vec::with_capacity(sl.len());
            for s in &sl {
                let &si = set_index
                    .get(s)
                    .ok_or_else(|| Error::MalformedInput(format!("pointing of {pl:?} references unknown set {s:?}")))?;
                list.push(si);
            }
            list.sort_unstable();
            list.dedup();
            pointing_idx[pi as usize] = list;
        }

        Self::from_indexed(point_labels, weights, set_labels, members, pointing_idx, tol)
    }

    /// Build from already-indexed parts; the pointing lists hold set indices.
    pub fn from_indexed(
        point_labels: Vec<String>,
        weights: Vec<S>,
        set_labels: Vec<String>,
        sets: Vec<Vec<u32>>,
        pointing: Vec<Vec<u32>>,
        tol: f64,
    ) -> Result<Self> {
        if point_labels.is_empty() {
            return Err(Error::MalformedInput("instance has no points".into()));
        }
        if point_labels.len() != weights.len() || point_labels.len() != pointing.len() {
            return Err(Error::MalformedInput("points/weights/pointing length mismatch".into()));
        }
        if set_labels.len() != sets.len() {
            return Err(Error::MalformedInput("set labels/members length mismatch".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite_value() || !(S::zero() < w.clone()) {
                return Err(Error::MalformedInput(format!(
                    "weight of point {:?} must be strictly positive",
                    point_labels[i]
                )));
            }
        }
        let n_points = point_labels.len() as u32;
        let mut sets_sorted = sets;
        for (i, s) in sets_sorted.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::Degenerate(format!("set {:?} is empty", set_labels[i])));
            }
            if s.last().copied().unwrap_or(0) >= n_points {
                return Err(Error::MalformedInput(format!(
                    "set {:?} references point index out of range",
                    set_labels[i]
                )));
            }
        }

        let mut sets_at = vec![Vec::new(); point_labels.len()];
        for (si, s) in sets_sorted.iter().enumerate() {
            for &p in s {
                sets_at[p as usize].push(si as u32);
            }
        }

        let mut referenced = vec![false; sets_sorted.len()];
        for (pi, list) in pointing.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::MalformedInput(format!(
                    "point {:?} has empty pointing",
                    point_labels[pi]
                )));
            }
            for &si in list {
                let members = sets_sorted.get(si as usize).ok_or_else(|| {
                    Error::MalformedInput(format!(
                        "pointing of {:?} references set index out of range",
                        point_labels[pi]
                    ))
                })?;
                if members.binary_search(&(pi as u32)).is_err() {
                    return Err(Error::MalformedInput(format!(
                        "point {:?} points to set {:?} that does not contain it",
                        point_labels[pi], set_labels[si as usize]
                    )));
                }
                referenced[si as usize] = true;
            }
        }
        if let Some(si) = referenced.iter().position(|r| !r) {
            return Err(Error::MalformedInput(format!(
                "set {:?} appears in no pointing list (family must equal the union of pointings)",
                set_labels[si]
            )));
        }

        let set_measures = sets_sorted
            .iter()
            .map(|s| crate::numeric::sum(s.iter().map(|&p| weights[p as usize].clone())))
            .collect();

        let point_index = point_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        let set_index = set_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();

        Ok(Instance {
            point_labels,
            point_index,
            weights,
            set_labels,
            set_index,
            sets: sets_sorted,
            set_measures,
            pointing,
            sets_at,
            tol,
        })
    }

    /// Build with the pointing "all family sets containing x". Points covered
    /// by no set are dropped from the ground set.
    pub fn with_containing_pointing(
        point_labels: Vec<String>,
        weights: Vec<S>,
        set_labels: Vec<String>,
        sets: Vec<Vec<u32>>,
        tol: f64,
    ) -> Result<Self> {
        if point_labels.len() != weights.len() {
            return Err(Error::MalformedInput("points/weights length mismatch".into()));
        }
        let mut covered = vec![false; point_labels.len()];
        for s in &sets {
            for &p in s {
                if (p as usize) >= covered.len() {
                    return Err(Error::MalformedInput("set references point index out of range".into()));
                }
                covered[p as usize] = true;
            }
        }
        let mut remap = vec![u32::MAX; point_labels.len()];
        let mut kept_labels = Vec::new();
        let mut kept_weights = Vec::new();
        for (i, &c) in covered.iter().enumerate() {
            if c {
                remap[i] = kept_labels.len() as u32;
                kept_labels.push(point_labels[i].clone());
                kept_weights.push(weights[i].clone());
            }
        }
        if kept_labels.is_empty() {
            return Err(Error::Degenerate("no point is covered by any set".into()));
        }
        let remapped: Vec<Vec<u32>> = sets
            .into_iter()
            .map(|s| s.into_iter().map(|p| remap[p as usize]).collect())
            .collect();
        let mut pointing = vec![Vec::new(); kept_labels.len()];
        for (si, s) in remapped.iter().enumerate() {
            for &p in s {
                pointing[p as usize].push(si as u32);
            }
        }
        Self::from_indexed(kept_labels, kept_weights, set_labels, remapped, pointing, tol)
    }

    pub fn n_points(&self) -> usize {
        self.point_labels.len()
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn point_label(&self, i: u32) -> &str {
        &self.point_labels[i as usize]
    }

    pub fn set_label(&self, i: u32) -> &str {
        &self.set_labels[i as usize]
    }

    pub fn point_id(&self, label: &str) -> Result<u32> {
        self.point_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::MalformedInput(format!("unknown point id {label:?}")))
    }

    pub fn set_id(&self, label: &str) -> Result<u32> {
        self.set_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::MalformedInput(format!("unknown set id {label:?}")))
    }

    pub fn weight(&self, point: u32) -> &S {
        &self.weights[point as usize]
    }

    pub fn set_members(&self, set: u32) -> &[u32] {
        &self.sets[set as usize]
    }

    /// Exact measure of a family set.
    pub fn set_measure(&self, set: u32) -> &S {
        &self.set_measures[set as usize]
    }

    pub fn pointing_of(&self, point: u32) -> &[u32] {
        &self.pointing[point as usize]
    }

    /// Every family set containing the point, pointed-to or not.
    pub fn sets_containing(&self, point: u32) -> &[u32] {
        &self.sets_at[point as usize]
    }

    pub fn point_labels(&self) -> &[String] {
        &self.point_labels
    }

    pub fn set_labels(&self) -> &[String] {
        &self.set_labels
    }

    /// Weighted measure of an arbitrary point-index subset.
    pub fn measure_of_indices(&self, subset: &[u32]) -> Result<S> {
        let mut acc = S::zero();
        for &p in subset {
            if (p as usize) >= self.weights.len() {
                return Err(Error::MalformedInput(format!("point index {p} out of range")));
            }
            acc = acc + self.weights[p as usize].clone();
        }
        Ok(acc)
    }

    /// Weighted measure of a subset given by point ids.
    pub fn measure_of(&self, subset: &[&str]) -> Result<S> {
        let mut acc = S::zero();
        for label in subset {
            let i = self.point_id(label)?;
            acc = acc + self.weights[i as usize].clone();
        }
        Ok(acc)
    }

    /// New instance with every weight multiplied by `s > 0`.
    pub fn scale_measure(&self, s: &S) -> Result<Self> {
        if !s.is_finite_value() || !(S::zero() < s.clone()) {
            return Err(Error::MalformedInput("scale factor must be a finite positive number".into()));
        }
        let weights = self.weights.iter().map(|w| w.clone() * s.clone()).collect();
        Instance::from_indexed(
            self.point_labels.clone(),
            weights,
            self.set_labels.clone(),
            self.sets.clone(),
            self.pointing.clone(),
            self.tol,
        )
    }

    /// True when the pointing of every point is exactly the sets containing it.
    pub fn pointing_is_containing(&self) -> bool {
        self.pointing
            .iter()
            .zip(&self.sets_at)
            .all(|(p, s)| p == s)
    }
}

/// Result of [`family_union`]: the merged instance plus, for each operand,
/// the map from its set indices into the union's.
#[derive(Debug, Clone)]
pub struct FamilyUnion<S: Scalar> {
    pub instance: Instance<S>,
    pub from_a: Vec<u32>,
    pub from_b: Vec<u32>,
}

/// Union of two pointings over the same weighted ground set.
///
/// Sets with identical members are merged (first label wins); the pointing of
/// every point becomes the union of the two pointings.
pub fn family_union<S: Scalar>(a: &Instance<S>, b: &Instance<S>) -> Result<FamilyUnion<S>> {
    if a.point_labels != b.point_labels {
        return Err(Error::MalformedInput("family union requires identical ground points".into()));
    }
    if a.weights != b.weights {
        return Err(Error::MalformedInput("family union requires identical weights".into()));
    }

    let mut canon: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    let mut set_labels = Vec::new();
    let mut sets = Vec::new();
    let mut map_into = |inst: &Instance<S>| -> Vec<u32> {
        let mut out = Vec::with_capacity(inst.n_sets());
        for si in 0..inst.n_sets() as u32 {
            let members = inst.set_members(si).to_vec();
            let id = *canon.entry(members.clone()).or_insert_with(|| {
                set_labels.push(inst.set_label(si).to_string());
                sets.push(members);
                (sets.len() - 1) as u32
            });
            out.push(id);
        }
        out
    };
    let from_a = map_into(a);
    let from_b = map_into(b);

    // Duplicate labels can arise when distinct member sets carry the same id
    // in the two operands; qualify the clash.
    let mut seen = HashMap::new();
    for (i, l) in set_labels.iter_mut().enumerate() {
        match seen.entry(l.clone()) {
            std::collections::hash_map::Entry::Occupied(_) => {
                *l = format!("{l}#{i}");
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(());
            }
        }
    }

    let mut pointing = vec![Vec::new(); a.n_points()];
    for p in 0..a.n_points() as u32 {
        let mut list: Vec<u32> = a
            .pointing_of(p)
            .iter()
            .map(|&si| from_a[si as usize])
            .chain(b.pointing_of(p).iter().map(|&si| from_b[si as usize]))
            .collect();
        list.sort_unstable();
        list.dedup();
        pointing[p as usize] = list;
    }

    let instance = Instance::from_indexed(
        a.point_labels.clone(),
        a.weights.clone(),
        set_labels,
        sets,
        pointing,
        a.tol.max(b.tol),
    )?;
    Ok(FamilyUnion { instance, from_a, from_b })
}

/// Nonnegative set function on an instance's family.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction<S: Scalar> {
    values: Vec<S>,
}

impl<S: Scalar> SetFunction<S> {
    pub fn new(instance: &Instance<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != instance.n_sets() {
            return Err(Error::MalformedInput(format!(
                "set function has {} values for {} sets",
                values.len(),
                instance.n_sets()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite_value() || v < &S::zero() {
                return Err(Error::MalformedInput(format!(
                    "value of set {:?} must be finite and nonnegative",
                    instance.set_label(i as u32)
                )));
            }
        }
        Ok(SetFunction { values })
    }

    pub fn zero(instance: &Instance<S>) -> Self {
        SetFunction { values: vec![S::zero(); instance.n_sets()] }
    }

    /// F(Q) = v on one set, 0 elsewhere.
    pub fn singleton(instance: &Instance<S>, set: u32, value: S) -> Result<Self> {
        let mut values = vec![S::zero(); instance.n_sets()];
        *values
            .get_mut(set as usize)
            .ok_or_else(|| Error::MalformedInput(format!("set index {set} out of range")))? = value;
        Self::new(instance, values)
    }

    /// Uniform random values in [0, 1] (dyadic rationals in exact mode).
    pub fn random(instance: &Instance<S>, rng: &mut ChaCha8Rng) -> Self {
        let values = (0..instance.n_sets()).map(|_| S::sample_unit(rng)).collect();
        SetFunction { values }
    }

    pub fn from_map(instance: &Instance<S>, map: &BTreeMap<String, S>) -> Result<Self> {
        let mut values = vec![S::zero(); instance.n_sets()];
        for (label, v) in map {
            let si = instance.set_id(label)?;
            values[si as usize] = v.clone();
        }
        Self::new(instance, values)
    }

    pub fn value(&self, set: u32) -> &S {
        &self.values[set as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn set_value(&mut self, set: u32, v: S) {
        self.values[set as usize] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

/// F(Q) = Σ_{x∈Q} |f(x)|·w(x): the set function induced by integrating a
/// point function against the instance measure.
pub fn build_integral_setfunction<S: Scalar>(
    instance: &Instance<S>,
    f: &[S],
) -> Result<SetFunction<S>> {
    if f.len() != instance.n_points() {
        return Err(Error::MalformedInput(format!(
            "point function has {} values for {} points",
            f.len(),
            instance.n_points()
        )));
    }
    for v in f {
        if !v.is_finite_value() {
            return Err(Error::MalformedInput("point function must be finite".into()));
        }
    }
    let values = (0..instance.n_sets() as u32)
        .map(|si| {
            crate::numeric::sum(
                instance
                    .set_members(si)
                    .iter()
                    .map(|&p| f[p as usize].abs_value() * instance.weight(p).clone()),
            )
        })
        .collect();
    SetFunction::new(instance, values)
}

/// Random abstract instances for property tests and experiments.
pub mod synth {
    use super::*;
    use rand::SeedableRng;

    #[derive(Debug, Clone)]
    pub struct SynthConfig {
        pub points: std::ops::RangeInclusive<usize>,
        pub sets: std::ops::RangeInclusive<usize>,
        pub max_set_size: usize,
        /// Weights are k/weight_den with k in 1..=4*weight_den.
        pub weight_den: i64,
    }

    impl Default for SynthConfig {
        fn default() -> Self {
            SynthConfig { points: 3..=9, sets: 2..=12, max_set_size: 5, weight_den: 8 }
        }
    }

    /// Random exact instance with containing pointing.
    pub fn random_instance(cfg: &SynthConfig, seed: u64) -> Instance<crate::numeric::Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            if let Ok(inst) = try_random(cfg, &mut rng) {
                return inst;
            }
        }
    }

    /// Two instances over the same weighted ground set, different families.
    pub fn random_instance_pair(
        cfg: &SynthConfig,
        seed: u64,
    ) -> (Instance<crate::numeric::Rational>, Instance<crate::numeric::Rational>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let n = rng.gen_range(cfg.points.clone());
            let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let weights: Vec<crate::numeric::Rational> = (0..n)
                .map(|_| {
                    crate::numeric::Rational::from_ratio(
                        rng.gen_range(1..=4 * cfg.weight_den),
                        cfg.weight_den,
                    )
                })
                .collect();
            // Cover every point in both families so the shared ground set
            // survives the containing-pointing construction in each.
            let fam_a = random_covering_family(cfg, n, &mut rng);
            let fam_b = random_covering_family(cfg, n, &mut rng);
            let build = |tag: &str, fam: &[Vec<u32>]| {
                Instance::with_containing_pointing(
                    labels.clone(),
                    weights.clone(),
                    (0..fam.len()).map(|i| format!("{tag}{i}")).collect(),
                    fam.to_vec(),
                    0.0,
                )
            };
            if let (Ok(a), Ok(b)) = (build("a", &fam_a), build("b", &fam_b)) {
                return (a, b);
            }
        }
    }

    fn random_covering_family(cfg: &SynthConfig, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
        let k = rng.gen_range(cfg.sets.clone()).max(1);
        let mut fam: Vec<Vec<u32>> = (0..k)
            .map(|_| {
                let size = rng.gen_range(1..=cfg.max_set_size.min(n));
                let mut s: Vec<u32> = (0..size).map(|_| rng.gen_range(0..n as u32)).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        // Patch uncovered points with singletons.
        let mut covered = vec![false; n];
        for s in &fam {
            for &p in s {
                covered[p as usize] = true;
            }
        }
        for (p, c) in covered.into_iter().enumerate() {
            if !c {
                fam.push(vec![p as u32]);
            }
        }
        fam
    }

    fn try_random(
        cfg: &SynthConfig,
        rng: &mut ChaCha8Rng,
    ) -> Result<Instance<crate::numeric::Rational>> {
        let n = rng.gen_range(cfg.points.clone());
        let k = rng.gen_range(cfg.sets.clone()).max(1);
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let weights: Vec<crate::numeric::Rational> = (0..n)
            .map(|_| {
                crate::numeric::Rational::from_ratio(
                    rng.gen_range(1..=4 * cfg.weight_den),
                    cfg.weight_den,
                )
            })
            .collect();
        let sets: Vec<Vec<u32>> = (0..k)
            .map(|_| {
                let size = rng.gen_range(1..=cfg.max_set_size.min(n));
                let mut s: Vec<u32> = (0..size).map(|_| rng.gen_range(0..n as u32)).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let set_labels = (0..k).map(|i| format!("q{i}")).collect();
        Instance::with_containing_pointing(labels, weights, set_labels, sets, 0.0)
    }
}
