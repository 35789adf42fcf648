//! Experiment specs, geometry generators and the runner behind `hlml run`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hlml_core::axb::{cz_constants, cz_sample_partner, CzCase, CzSet};
use hlml_core::certify::{check_dyadic_conditions, hl4_constant, DyadicReport};
use hlml_core::error::{Error, Result};
use hlml_core::euclid::{dyadic_grid_instance, grid_instance, Ball, GridPointing, Metric, Shape};
use hlml_core::instance::{Instance, SetFunction};
use hlml_core::io::{self, AnyInstance};
use hlml_core::maximal::{maximal_function, verify_hl_inequality_with};
use hlml_core::norm::NormEvaluator;
use hlml_core::numeric::Scalar;
use hlml_core::search::{empirical_hl_lower_bound_with, SearchParams};
use hlml_core::tree::{enumerate_fitting_trapezoids, tree_instance, TreeModel, TreePointing};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    /// Exact dyadic window [0, 2^max_scale)^n with all cubes of scale 0..=max_scale.
    Dyadic { n: usize, max_scale: u32 },
    /// Random Euclidean balls on an h-grid over [0, window)^n.
    GridBalls { n: usize, h: f64, count: usize, radius: [f64; 2], window: f64 },
    /// Random max-metric balls (cubes) on an h-grid.
    GridCubes { n: usize, h: f64, count: usize, radius: [f64; 2], window: f64 },
    /// Homogeneous tree with every envelope-fitting trapezoid down to a depth.
    Tree { q: u32, depth: u32, max_apex_depth: u32, height_cap: u32 },
    /// Calderón–Zygmund boxes: one admissible base plus sampled partners.
    Cz { n: usize, count: usize, h: f64 },
    /// Instance loaded from a JSON file.
    Custom { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// c = 1 from the five dyadic conditions.
    Dyadic,
    /// c = 2^{4n} from the doubling-ball bound (K = 1, α = 2, β = 2^n).
    Doubling,
    /// c = 4 for admissible trapezoids on homogeneous trees.
    Tree,
    /// c = 4^{n+2}·e^{24n} on the affine group.
    Cz,
    /// c computed from the dilation-hull certificate at λ = 2.
    Hull,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantSpec {
    #[serde(default)]
    pub value: Option<Value>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Strategies {
    /// Random set functions to verify against the constant.
    #[serde(default = "default_random_f")]
    pub random_f: usize,
    #[serde(default = "default_trials")]
    pub lower_random_trials: usize,
    #[serde(default = "default_ascent")]
    pub lower_ascent_steps: usize,
}

fn default_random_f() -> usize {
    100
}
fn default_trials() -> usize {
    20
}
fn default_ascent() -> usize {
    40
}

impl Default for Strategies {
    fn default() -> Self {
        Strategies {
            random_f: default_random_f(),
            lower_random_trials: default_trials(),
            lower_ascent_steps: default_ascent(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub geometry: Geometry,
    pub constant: ConstantSpec,
    #[serde(default)]
    pub strategies: Strategies,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_norm_cap")]
    pub norm_cap: usize,
}

fn default_norm_cap() -> usize {
    96
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(format!("experiment spec: {e}")))
    }

    fn check_provenance(&self) -> Result<()> {
        let ok = match (&self.geometry, self.constant.provenance) {
            (Geometry::Dyadic { .. }, Provenance::Dyadic) => true,
            (Geometry::GridBalls { .. } | Geometry::GridCubes { .. }, Provenance::Doubling) => true,
            (Geometry::Tree { .. }, Provenance::Tree) => true,
            (Geometry::Cz { .. }, Provenance::Cz) => true,
            (_, Provenance::Hull) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedInput(format!(
                "constant provenance {:?} does not match the geometry",
                self.constant.provenance
            )))
        }
    }
}

/// Build the instance described by a geometry block.
pub fn build_geometry(geometry: &Geometry, seed: u64) -> Result<AnyInstance> {
    match geometry {
        Geometry::Dyadic { n, max_scale } => {
            Ok(AnyInstance::Exact(dyadic_grid_instance(*n, *max_scale)?))
        }
        Geometry::GridBalls { n, h, count, radius, window } => Ok(AnyInstance::Float(
            random_ball_grid(*n, *h, *count, *radius, *window, Metric::Euclidean, seed)?,
        )),
        Geometry::GridCubes { n, h, count, radius, window } => Ok(AnyInstance::Float(
            random_ball_grid(*n, *h, *count, *radius, *window, Metric::Max, seed)?,
        )),
        Geometry::Tree { q, depth, max_apex_depth, height_cap } => {
            let model = TreeModel::new(*q, *depth, 0)?;
            let family = enumerate_fitting_trapezoids(&model, *max_apex_depth, *height_cap);
            Ok(AnyInstance::Exact(tree_instance(&model, &family, TreePointing::Containing)?))
        }
        Geometry::Cz { n, count, h } => Ok(AnyInstance::Float(cz_grid(*n, *count, *h, seed)?)),
        Geometry::Custom { path } => {
            let text = std::fs::read_to_string(path)?;
            io::instance_from_json(&text)
        }
    }
}

fn random_ball_grid(
    n: usize,
    h: f64,
    count: usize,
    radius: [f64; 2],
    window: f64,
    metric: Metric,
    seed: u64,
) -> Result<Instance<f64>> {
    if count == 0 {
        return Err(Error::MalformedInput("grid geometry needs at least one ball".into()));
    }
    if !(radius[0] > 0.0 && radius[1] >= radius[0] && window > 2.0 * radius[1]) {
        return Err(Error::MalformedInput("need 0 < r_min ≤ r_max < window/2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772_6964);
    let shapes: Vec<Shape> = (0..count)
        .map(|_| {
            let r = rng.gen_range(radius[0]..=radius[1]);
            let center: Vec<f64> = (0..n).map(|_| rng.gen_range(r..window - r)).collect();
            Ok(Shape::Ball(Ball::new(center, r, metric)?))
        })
        .collect::<Result<_>>()?;
    grid_instance(&shapes, h, GridPointing::Containing, io::DEFAULT_FLOAT_TOL)
}

fn cz_grid(n: usize, count: usize, h: f64, seed: u64) -> Result<Instance<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x637a_7365);
    let base = CzSet::new(vec![0.0; n], 4.0, 0.0, 0.5)?;
    let mut sets = vec![base.clone()];
    let cases = [CzCase::BothSmall, CzCase::SmallLarge];
    for i in 1..count.max(1) {
        let z = cz_sample_partner(&base, cases[i % cases.len()], &mut rng, io::DEFAULT_FLOAT_TOL)?;
        sets.push(z);
    }
    let shapes: Vec<Shape> = sets
        .iter()
        .map(|z| {
            let mut lo = z.corner.clone();
            let mut hi: Vec<f64> = z.corner.iter().map(|c| c + z.side).collect();
            lo.push(z.center_t - z.half_height);
            hi.push(z.center_t + z.half_height);
            Shape::Box { lo, hi }
        })
        .collect();
    grid_instance(&shapes, h, GridPointing::Containing, io::DEFAULT_FLOAT_TOL)
}

/// The constant to verify for an instance in scalar form.
fn constant_for<S: Scalar>(
    spec: &ExperimentSpec,
    inst: &Instance<S>,
) -> Result<(S, Option<S>, Option<DyadicReport>)> {
    let declared = spec.constant.value.as_ref().map(S::from_json).transpose()?;
    let (derived, dyadic_report): (S, Option<DyadicReport>) = match spec.constant.provenance {
        Provenance::Dyadic => {
            let report = check_dyadic_conditions(inst);
            if !report.certifies_c1() {
                return Err(Error::Hypothesis(
                    "dyadic provenance but the dyadic conditions fail on this instance".into(),
                ));
            }
            (S::one(), Some(report))
        }
        Provenance::Doubling => {
            let n = geometry_dim(&spec.geometry)?;
            let bound = hlml_core::homogeneous::homogeneous_bound(1.0, 2.0, 2f64.powi(n as i32))?;
            (S::from_int(bound.bound as i64), None)
        }
        Provenance::Tree => (S::from_int(4), None),
        Provenance::Cz => {
            let n = geometry_dim(&spec.geometry)?;
            // float-only geometry; the constant is astronomically slack
            (S::from_json(&json!(cz_constants(n).bound))?, None)
        }
        Provenance::Hull => {
            let c = hl4_constant(inst, &S::from_int(2))?;
            (c, None)
        }
    };
    if let Some(v) = &declared {
        if spec.constant.provenance != Provenance::Hull {
            let (a, b) = (v.to_f64_lossy(), derived.to_f64_lossy());
            if (a - b).abs() > 1e-9 * b.abs().max(1.0) {
                return Err(Error::MalformedInput(format!(
                    "declared constant {a} does not match the {:?} value {b}",
                    spec.constant.provenance
                )));
            }
        }
    }
    let certified = Some(derived.clone());
    Ok((derived, certified, dyadic_report))
}

fn geometry_dim(g: &Geometry) -> Result<usize> {
    match g {
        Geometry::Dyadic { n, .. }
        | Geometry::GridBalls { n, .. }
        | Geometry::GridCubes { n, .. }
        | Geometry::Cz { n, .. } => Ok(*n),
        _ => Err(Error::MalformedInput("geometry has no ambient dimension".into())),
    }
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub passed: bool,
    pub report: Value,
    pub profile_csv: String,
    pub instance_json: Option<Value>,
}

/// Run the experiment: verify the constant on random set functions, search a
/// lower bound, and cross-check the sandwich. Bit-for-bit reproducible from
/// (spec, seed).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.check_provenance()?;
    let any = build_geometry(&spec.geometry, spec.seed)?;
    match any {
        AnyInstance::Exact(inst) => run_on(spec, &inst),
        AnyInstance::Float(inst) => run_on(spec, &inst),
    }
}

fn run_on<S: Scalar>(spec: &ExperimentSpec, inst: &Instance<S>) -> Result<ExperimentOutcome> {
    let (c, certified, dyadic_report) = constant_for(spec, inst)?;
    let eval = NormEvaluator::new(inst, spec.norm_cap);

    let mut failures = 0usize;
    let mut first_witness: Option<Value> = None;
    let mut worst_ratio: Option<S> = None;
    let mut inconclusive = 0usize;
    for trial in 0..spec.strategies.random_f {
        let mut rng = ChaCha8Rng::seed_from_u64(
            spec.seed ^ 0x7665_7269_6679u64.wrapping_add(trial as u64),
        );
        let f = SetFunction::random(inst, &mut rng);
        let rep = verify_hl_inequality_with(inst, &eval, &f, &c)?;
        if !rep.passed {
            failures += 1;
            if first_witness.is_none() {
                first_witness = Some(json!({
                    "trial": trial,
                    "witness": rep.witness.as_ref().map(|w| w.to_json()),
                }));
            }
            if !rep.conclusive {
                inconclusive += 1;
            }
        }
        if let Some(r) = rep.ratio {
            if worst_ratio.as_ref().map_or(true, |w| &r > w) {
                worst_ratio = Some(r);
            }
        }
    }

    let params = SearchParams {
        random_trials: spec.strategies.lower_random_trials,
        ascent_steps: spec.strategies.lower_ascent_steps,
        seed: spec.seed,
        norm_cap: spec.norm_cap,
    };
    let lower = empirical_hl_lower_bound_with(inst, &eval, &params)?;
    let sandwich_ok = match &certified {
        Some(cc) => lower.best_ratio.le_within(cc, inst.tol().max(1e-12)),
        None => true,
    };

    let profile = maximal_function(inst, &lower.best_f)?;
    let profile_csv = io::profile_to_csv(inst, &profile);

    let passed = failures == 0 && sandwich_ok;
    let report = json!({
        "geometry": serde_json::to_value(&spec.geometry).unwrap(),
        "seed": spec.seed,
        "points": inst.n_points(),
        "sets": inst.n_sets(),
        "constant": {
            "value": c.to_json(),
            "provenance": serde_json::to_value(spec.constant.provenance).unwrap(),
        },
        "verify": {
            "trials": spec.strategies.random_f,
            "failures": failures,
            "inconclusive_failures": inconclusive,
            "first_failure": first_witness,
            "worst_ratio": worst_ratio.as_ref().map(|r| r.to_json()),
        },
        "lower_bound": {
            "value": lower.best_ratio.to_json(),
            "strategy": lower.strategy,
            "sweep_ratio": lower.sweep_ratio.to_json(),
            "searched_random": lower.searched_random,
        },
        "certified_c": certified.as_ref().map(|v| v.to_json()),
        "sandwich_ok": sandwich_ok,
        "dyadic_conditions": dyadic_report.as_ref().map(dyadic_report_json),
        "passed": passed,
    });
    Ok(ExperimentOutcome {
        passed,
        report,
        profile_csv,
        instance_json: if matches!(spec.geometry, Geometry::Custom { .. }) {
            None
        } else {
            Some(io::instance_to_json(inst))
        },
    })
}

fn dyadic_report_json(rep: &DyadicReport) -> Value {
    let cond = |c: &hlml_core::certify::ConditionVerdict| {
        json!({"pass": c.pass, "note": c.note, "witness": c.witness})
    };
    json!({
        "measurability": cond(&rep.measurability),
        "countability": cond(&rep.countability),
        "laminarity": cond(&rep.laminarity),
        "measure_monotone": cond(&rep.measure_monotone),
        "value_discreteness": cond(&rep.value_discreteness),
        "certifies_c1": rep.certifies_c1(),
    })
}

/// Write run artifacts under a directory.
pub fn write_artifacts(out: &Path, outcome: &ExperimentOutcome) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&outcome.report).unwrap())?;
    std::fs::write(out.join("profile.csv"), &outcome.profile_csv)?;
    if let Some(inst) = &outcome.instance_json {
        std::fs::write(out.join("instance.json"), serde_json::to_string(inst).unwrap())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(geometry: Geometry, provenance: Provenance, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            geometry,
            constant: ConstantSpec { value: None, provenance },
            strategies: Strategies { random_f: 8, lower_random_trials: 4, lower_ascent_steps: 8 },
            seed,
            norm_cap: 96,
        }
    }

    #[test]
    fn dyadic_experiment_passes() {
        let s = spec(Geometry::Dyadic { n: 1, max_scale: 4 }, Provenance::Dyadic, 5);
        let out = run_experiment(&s).unwrap();
        assert!(out.passed, "{}", out.report);
        assert_eq!(out.report["constant"]["value"], json!("1"));
        // exact lower bound is exactly 1
        assert_eq!(out.report["lower_bound"]["value"], json!("1"));
    }

    #[test]
    fn tree_experiment_passes() {
        let s = spec(
            Geometry::Tree { q: 2, depth: 8, max_apex_depth: 1, height_cap: 2 },
            Provenance::Tree,
            9,
        );
        let out = run_experiment(&s).unwrap();
        assert!(out.passed, "{}", out.report);
    }

    #[test]
    fn grid_cubes_experiment_passes() {
        let s = spec(
            Geometry::GridCubes { n: 1, h: 1.0 / 16.0, count: 12, radius: [0.1, 0.25], window: 1.0 },
            Provenance::Doubling,
            3,
        );
        let out = run_experiment(&s).unwrap();
        assert!(out.passed, "{}", out.report);
        assert_eq!(out.report["constant"]["value"], json!(16.0));
    }

    #[test]
    fn provenance_mismatch_rejected() {
        let s = spec(Geometry::Dyadic { n: 1, max_scale: 3 }, Provenance::Tree, 0);
        assert!(run_experiment(&s).is_err());
    }

    #[test]
    fn declared_constant_must_match() {
        let mut s = spec(Geometry::Dyadic { n: 1, max_scale: 3 }, Provenance::Dyadic, 0);
        s.constant.value = Some(json!(2));
        assert!(run_experiment(&s).is_err());
        s.constant.value = Some(json!(1));
        assert!(run_experiment(&s).unwrap().passed);
    }

    #[test]
    fn runs_are_reproducible() {
        let s = spec(
            Geometry::GridBalls { n: 1, h: 0.125, count: 6, radius: [0.15, 0.3], window: 1.0 },
            Provenance::Doubling,
            11,
        );
        let a = run_experiment(&s).unwrap();
        let b = run_experiment(&s).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.profile_csv, b.profile_csv);
    }

    #[test]
    fn hull_provenance_certifies_any_geometry() {
        let s = spec(
            Geometry::GridBalls { n: 1, h: 0.125, count: 6, radius: [0.15, 0.3], window: 1.0 },
            Provenance::Hull,
            13,
        );
        let out = run_experiment(&s).unwrap();
        assert!(out.passed, "{}", out.report);
    }
}
