//! JSON interchange for instances, set functions, gauged families, closed
//! sets and reports, plus the CSV emitters.
//!
//! Numbers are plain JSON numbers in float mode; exact mode accepts and
//! emits `"p/q"` strings (integers allowed both ways).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::axb::CzSet;
use crate::covering::{CoverSelection, CoverVerdict, GaugedFamily};
use crate::error::{Error, Result};
use crate::euclid::{ClosedSetSpec, DyadicCube, RatBox, WhitneyCover};
use crate::instance::{Instance, SetFunction};
use crate::maximal::{HlReport, MaximalProfile};
use crate::numeric::{Rational, Scalar};

pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    #[default]
    Float,
}

#[derive(Debug, Serialize, Deserialize)]
struct PointDoc {
    id: String,
    w: Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct SetDoc {
    id: String,
    members: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    points: Vec<PointDoc>,
    sets: Vec<SetDoc>,
    pointing: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    mode: NumericMode,
    #[serde(default)]
    tolerance: Option<f64>,
}

/// An instance in either numeric mode.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Exact(Instance<Rational>),
    Float(Instance<f64>),
}

impl AnyInstance {
    pub fn mode(&self) -> NumericMode {
        match self {
            AnyInstance::Exact(_) => NumericMode::Exact,
            AnyInstance::Float(_) => NumericMode::Float,
        }
    }
}

fn build_instance<S: Scalar>(doc: &InstanceDoc, tol: f64) -> Result<Instance<S>> {
    let points = doc
        .points
        .iter()
        .map(|p| Ok((p.id.clone(), S::from_json(&p.w)?)))
        .collect::<Result<Vec<_>>>()?;
    let sets = doc
        .sets
        .iter()
        .map(|s| (s.id.clone(), s.members.clone()))
        .collect();
    let pointing = doc
        .pointing
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Instance::new(points, sets, pointing, tol)
}

pub fn instance_from_json(text: &str) -> Result<AnyInstance> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| Error::Json(format!("instance: {e}")))?;
    match doc.mode {
        NumericMode::Exact => Ok(AnyInstance::Exact(build_instance(&doc, 0.0)?)),
        NumericMode::Float => {
            let tol = doc.tolerance.unwrap_or(DEFAULT_FLOAT_TOL);
            Ok(AnyInstance::Float(build_instance(&doc, tol)?))
        }
    }
}

pub fn instance_to_json<S: Scalar>(inst: &Instance<S>) -> Value {
    let points: Vec<Value> = (0..inst.n_points() as u32)
        .map(|p| json!({"id": inst.point_label(p), "w": inst.weight(p).to_json()}))
        .collect();
    let sets: Vec<Value> = (0..inst.n_sets() as u32)
        .map(|s| {
            json!({
                "id": inst.set_label(s),
                "members": inst.set_members(s).iter().map(|&p| inst.point_label(p)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let pointing: BTreeMap<String, Vec<String>> = (0..inst.n_points() as u32)
        .map(|p| {
            (
                inst.point_label(p).to_string(),
                inst.pointing_of(p).iter().map(|&s| inst.set_label(s).to_string()).collect(),
            )
        })
        .collect();
    json!({
        "points": points,
        "sets": sets,
        "pointing": pointing,
        "mode": if S::EXACT { "exact" } else { "float" },
        "tolerance": if S::EXACT { Value::Null } else { json!(inst.tol()) },
    })
}

/// Parse a `{set-id: value}` map against an instance.
pub fn setfunction_from_json<S: Scalar>(
    inst: &Instance<S>,
    text: &str,
) -> Result<SetFunction<S>> {
    let doc: BTreeMap<String, Value> =
        serde_json::from_str(text).map_err(|e| Error::Json(format!("set function: {e}")))?;
    let mut map = BTreeMap::new();
    for (k, v) in doc {
        map.insert(k, S::from_json(&v)?);
    }
    SetFunction::from_map(inst, &map)
}

pub fn setfunction_to_json<S: Scalar>(inst: &Instance<S>, f: &SetFunction<S>) -> Value {
    let map: BTreeMap<String, Value> = (0..inst.n_sets() as u32)
        .map(|s| (inst.set_label(s).to_string(), f.value(s).to_json()))
        .collect();
    json!(map)
}

#[derive(Debug, Serialize, Deserialize)]
struct FamilyDoc {
    sets: Vec<SetDoc>,
    gauge: BTreeMap<String, Value>,
    lambda: Value,
    #[serde(default)]
    dilation: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    mode: NumericMode,
}

#[derive(Debug, Clone)]
pub enum AnyFamily {
    Exact(GaugedFamily<Rational>),
    Float(GaugedFamily<f64>),
}

fn build_family<S: Scalar>(doc: &FamilyDoc, lambda_override: Option<&Value>) -> Result<GaugedFamily<S>> {
    let mut point_labels: Vec<String> = doc
        .sets
        .iter()
        .flat_map(|s| s.members.iter().cloned())
        .chain(
            doc.dilation
                .iter()
                .flat_map(|d| d.values().flat_map(|v| v.iter().cloned())),
        )
        .collect();
    point_labels.sort();
    point_labels.dedup();
    let index: BTreeMap<&str, u32> = point_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as u32))
        .collect();
    let to_indices = |labels: &[String]| -> Vec<u32> {
        labels.iter().map(|l| index[l.as_str()]).collect()
    };
    let member_labels: Vec<String> = doc.sets.iter().map(|s| s.id.clone()).collect();
    let members: Vec<Vec<u32>> = doc.sets.iter().map(|s| to_indices(&s.members)).collect();
    let gauge = member_labels
        .iter()
        .map(|id| {
            let v = doc
                .gauge
                .get(id)
                .ok_or_else(|| Error::Json(format!("missing gauge for member {id:?}")))?;
            S::from_json(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda = S::from_json(lambda_override.unwrap_or(&doc.lambda))?;
    let dilation = match &doc.dilation {
        None => None,
        Some(map) => Some(
            member_labels
                .iter()
                .map(|id| {
                    let hull = map
                        .get(id)
                        .ok_or_else(|| Error::Json(format!("missing dilation for member {id:?}")))?;
                    Ok(to_indices(hull))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    GaugedFamily::new(point_labels, member_labels, members, gauge, lambda, dilation)
}

pub fn family_from_json(text: &str, lambda_override: Option<f64>) -> Result<AnyFamily> {
    let doc: FamilyDoc =
        serde_json::from_str(text).map_err(|e| Error::Json(format!("family: {e}")))?;
    let over = lambda_override.map(|l| json!(l));
    match doc.mode {
        NumericMode::Exact => Ok(AnyFamily::Exact(build_family(&doc, over.as_ref())?)),
        NumericMode::Float => Ok(AnyFamily::Float(build_family(&doc, over.as_ref())?)),
    }
}

pub fn selection_to_json<S: Scalar>(
    family: &GaugedFamily<S>,
    sel: &CoverSelection<S>,
    verdict: &CoverVerdict,
) -> Value {
    let chosen: Vec<&str> = sel.chosen.iter().map(|&i| family.member_label(i)).collect();
    let hulls: BTreeMap<String, Vec<String>> = sel
        .chosen
        .iter()
        .zip(&sel.hulls)
        .map(|(&i, hull)| {
            (
                family.member_label(i).to_string(),
                hull.iter().map(|&p| family.point_label(p).to_string()).collect(),
            )
        })
        .collect();
    json!({
        "chosen": chosen,
        "hulls": hulls,
        "residual_suprema": sel.residual_suprema.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "zero_gauge_selected": sel.zero_gauge_selected,
        "verified": verdict.pass(),
        "disjoint": verdict.disjoint,
        "covered": verdict.covered,
        "first_uncovered": verdict.first_uncovered,
        "overlap_witness": verdict.overlap_witness,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct BoxDoc {
    lo: Vec<Value>,
    hi: Vec<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClosedSetDoc {
    #[serde(default)]
    boxes: Vec<BoxDoc>,
    #[serde(default)]
    points: Vec<Vec<Value>>,
}

pub fn closed_set_from_json(text: &str) -> Result<ClosedSetSpec> {
    let doc: ClosedSetDoc =
        serde_json::from_str(text).map_err(|e| Error::Json(format!("closed set: {e}")))?;
    let rats = |vals: &[Value]| -> Result<Vec<Rational>> {
        vals.iter().map(Rational::from_json).collect()
    };
    let boxes = doc
        .boxes
        .iter()
        .map(|b| RatBox::new(rats(&b.lo)?, rats(&b.hi)?))
        .collect::<Result<Vec<_>>>()?;
    let points = doc.points.iter().map(|p| rats(p)).collect::<Result<Vec<_>>>()?;
    ClosedSetSpec::new(boxes, points)
}

pub fn ratbox_from_values(lo: &[Value], hi: &[Value]) -> Result<RatBox> {
    let lo = lo.iter().map(Rational::from_json).collect::<Result<Vec<_>>>()?;
    let hi = hi.iter().map(Rational::from_json).collect::<Result<Vec<_>>>()?;
    RatBox::new(lo, hi)
}

pub fn whitney_to_json(cover: &WhitneyCover) -> Value {
    json!({
        "scale_min": cover.scale_min,
        "scale_max": cover.scale_max,
        "cubes": cover
            .cubes
            .iter()
            .map(|c| json!({"scale": c.scale, "index": c.index}))
            .collect::<Vec<_>>(),
    })
}

/// CSV with one row per cube: scale, index (semicolon-joined), side, dist.
pub fn whitney_to_csv(cover: &WhitneyCover, spec: &ClosedSetSpec) -> String {
    let mut out = String::from("scale,index,side,dist\n");
    for c in &cover.cubes {
        let idx: Vec<String> = c.index.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.scale,
            idx.join(";"),
            c.side().to_f64_lossy(),
            crate::euclid::dist_to_closed(c, spec),
        ));
    }
    out
}

pub fn dyadic_cube_to_json(c: &DyadicCube) -> Value {
    json!({"scale": c.scale, "index": c.index})
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CzDoc {
    pub corner: Vec<f64>,
    #[serde(rename = "L")]
    pub side: f64,
    pub t: f64,
    pub r: f64,
}

pub fn cz_from_json(text: &str) -> Result<CzSet> {
    let doc: CzDoc = serde_json::from_str(text).map_err(|e| Error::Json(format!("cz set: {e}")))?;
    CzSet::new(doc.corner, doc.side, doc.t, doc.r)
}

pub fn cz_star_report(z: &CzSet, tol: f64) -> Result<Value> {
    let star = crate::axb::cz_star(z, tol)?;
    let c = &star.constants;
    Ok(json!({
        "corner": star.corner,
        "side": star.side,
        "t_lo": star.t_lo,
        "t_hi": star.t_hi,
        "lambda_cases": c.case_lambda,
        "eta_cases": c.case_eta,
        "lambda": c.lambda,
        "eta": c.eta,
        "measure": star.measure,
        "measure_ratio": star.measure / z.measure(),
        "bound_constant": c.bound,
        "measure_cap": star.measure_cap,
        "within_cap": star.measure <= star.measure_cap,
    }))
}

pub fn hl_report_to_json<S: Scalar>(report: &HlReport<S>) -> Value {
    json!({
        "norm": report.norm.as_ref().map(|n| n.to_json()),
        "norm_kind": report.norm_kind.map(|k| match k {
            crate::norm::NormKind::Exact => "exact",
            crate::norm::NormKind::LowerBound => "greedy-lower",
        }),
        "ratio": report.ratio.as_ref().map(|r| r.to_json()),
        "certified_c": report.certified_c.as_ref().map(|c| c.to_json()),
        "lower_bound": report.lower_bound.as_ref().map(|l| l.to_json()),
        "passed": report.passed,
        "conclusive": report.conclusive,
        "witness": report.witness.as_ref().map(|w| w.to_json()),
        "breakpoints_checked": report.verdicts.len(),
        "verdicts": report
            .verdicts
            .iter()
            .map(|v| json!({
                "level": v.level.to_json(),
                "lhs": v.lhs.to_json(),
                "rhs": v.rhs.to_json(),
                "pass": v.pass,
            }))
            .collect::<Vec<_>>(),
    })
}

/// CSV of a maximal profile: per-point weight and value (exact column filled
/// in exact mode).
pub fn profile_to_csv<S: Scalar>(inst: &Instance<S>, profile: &MaximalProfile<S>) -> String {
    let mut out = String::from("point,weight,value,value_exact\n");
    for p in 0..inst.n_points() as u32 {
        let v = profile.value(p);
        out.push_str(&format!(
            "{},{},{},{}\n",
            inst.point_label(p),
            inst.weight(p).to_f64_lossy(),
            v.to_f64_lossy(),
            if S::EXACT { format!("{v}") } else { String::new() },
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::greedy_dilation_select;
    use crate::maximal::verify_hl_inequality;

    #[test]
    fn instance_roundtrip_exact() {
        let text = r#"{
            "points": [{"id":"a","w":"1/2"},{"id":"b","w":3}],
            "sets": [{"id":"Q1","members":["a"]},{"id":"Q2","members":["a","b"]}],
            "pointing": {"a":["Q1","Q2"],"b":["Q2"]},
            "mode": "exact"
        }"#;
        let AnyInstance::Exact(inst) = instance_from_json(text).unwrap() else {
            panic!("expected exact mode");
        };
        assert_eq!(inst.set_measure(1), &Rational::from_ratio(7, 2));
        let emitted = instance_to_json(&inst);
        let AnyInstance::Exact(back) = instance_from_json(&emitted.to_string()).unwrap() else {
            panic!("expected exact mode");
        };
        assert_eq!(back.set_measure(1), inst.set_measure(1));
        assert_eq!(back.point_labels(), inst.point_labels());
    }

    #[test]
    fn instance_float_default_tolerance() {
        let text = r#"{
            "points": [{"id":"a","w":0.25}],
            "sets": [{"id":"Q","members":["a"]}],
            "pointing": {"a":["Q"]}
        }"#;
        let AnyInstance::Float(inst) = instance_from_json(text).unwrap() else {
            panic!("expected float mode");
        };
        assert_eq!(inst.tol(), DEFAULT_FLOAT_TOL);
        assert_eq!(inst.weight(0), &0.25);
    }

    #[test]
    fn setfunction_and_report_json() {
        let text = r#"{
            "points": [{"id":"a","w":1},{"id":"b","w":1}],
            "sets": [{"id":"Q1","members":["a"]},{"id":"Q2","members":["a","b"]}],
            "pointing": {"a":["Q1","Q2"],"b":["Q2"]},
            "mode": "exact"
        }"#;
        let AnyInstance::Exact(inst) = instance_from_json(text).unwrap() else {
            panic!()
        };
        let f = setfunction_from_json(&inst, r#"{"Q1":"2","Q2":3}"#).unwrap();
        assert_eq!(f.value(1), &Rational::from_int(3));
        let rep = verify_hl_inequality(&inst, &f, &Rational::from_int(1)).unwrap();
        let v = hl_report_to_json(&rep);
        assert_eq!(v["passed"], json!(true));
        assert_eq!(v["norm_kind"], json!("exact"));
        // unknown set id errors
        assert!(setfunction_from_json(&inst, r#"{"zz":1}"#).is_err());
    }

    #[test]
    fn family_json_and_selection() {
        let text = r#"{
            "sets": [{"id":"A","members":["x0","x1"]},{"id":"B","members":["x1","x2"]}],
            "gauge": {"A": 1.0, "B": 1.5},
            "lambda": 2.0
        }"#;
        let AnyFamily::Float(fam) = family_from_json(text, None).unwrap() else {
            panic!("expected float family");
        };
        let sel = greedy_dilation_select(&fam).unwrap();
        let verdict = crate::covering::verify_cover(&fam, &sel);
        let v = selection_to_json(&fam, &sel, &verdict);
        assert_eq!(v["verified"], json!(true));
        assert_eq!(v["chosen"], json!(["B"]));
    }

    #[test]
    fn closed_set_json() {
        let spec = closed_set_from_json(
            r#"{"boxes":[{"lo":["0","0"],"hi":["1/2",1]}],"points":[[2,2]]}"#,
        )
        .unwrap();
        assert_eq!(spec.dim(), 2);
        assert_eq!(spec.components().len(), 2);
        assert!(closed_set_from_json(r#"{"boxes":[],"points":[]}"#).is_err());
    }

    #[test]
    fn cz_json() {
        let z = cz_from_json(r#"{"corner":[0.0],"L":4.0,"t":0.0,"r":0.5}"#).unwrap();
        let rep = cz_star_report(&z, 1e-9).unwrap();
        assert_eq!(rep["within_cap"], json!(true));
    }
}
