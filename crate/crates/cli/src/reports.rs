//! Aggregation for `hlml report`: collect run reports from a directory tree
//! into one summary.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use hlml_core::error::Result;

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub path: PathBuf,
    pub passed: Option<bool>,
    pub summary: String,
}

/// Scan `dir` recursively for JSON files carrying a `passed` field.
pub fn collect_reports(dir: &Path) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let mut entries: Vec<_> = std::fs::read_dir(&d)?.collect::<std::io::Result<_>>()?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "json") {
                let Ok(text) = std::fs::read_to_string(&path) else { continue };
                let Ok(value) = serde_json::from_str::<Value>(&text) else { continue };
                if let Some(passed) = value.get("passed").and_then(Value::as_bool) {
                    let summary = describe(&value);
                    rows.push(ReportRow { path, passed: Some(passed), summary });
                }
            }
        }
    }
    rows.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(rows)
}

fn describe(v: &Value) -> String {
    let geometry = v
        .get("geometry")
        .and_then(|g| g.get("kind"))
        .and_then(Value::as_str)
        .unwrap_or("?");
    let c = v
        .get("constant")
        .and_then(|c| c.get("value"))
        .map(|c| c.to_string())
        .unwrap_or_else(|| "?".into());
    let failures = v
        .pointer("/verify/failures")
        .map(|f| f.to_string())
        .unwrap_or_else(|| "?".into());
    format!("geometry={geometry} c={c} failures={failures}")
}

pub fn summary_json(rows: &[ReportRow]) -> Value {
    json!({
        "reports": rows.len(),
        "passed": rows.iter().filter(|r| r.passed == Some(true)).count(),
        "failed": rows.iter().filter(|r| r.passed == Some(false)).count(),
        "rows": rows
            .iter()
            .map(|r| json!({
                "path": r.path.display().to_string(),
                "passed": r.passed,
                "summary": r.summary,
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn summary_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("path,passed,summary\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},\"{}\"\n",
            r.path.display(),
            r.passed.map(|p| p.to_string()).unwrap_or_default(),
            r.summary.replace('"', "'"),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collects_and_summarizes() {
        let dir = std::env::temp_dir().join(format!("hlml-report-test-{}", std::process::id()));
        std::fs::create_dir_all(dir.join("a")).unwrap();
        std::fs::write(
            dir.join("a/report.json"),
            r#"{"passed": true, "geometry": {"kind": "dyadic"}, "constant": {"value": "1"}, "verify": {"failures": 0}}"#,
        )
        .unwrap();
        std::fs::write(dir.join("not-a-report.json"), r#"{"hello": 1}"#).unwrap();
        std::fs::write(dir.join("b.json"), r#"{"passed": false}"#).unwrap();
        let rows = collect_reports(&dir).unwrap();
        assert_eq!(rows.len(), 2);
        let summary = summary_json(&rows);
        assert_eq!(summary["passed"], 1);
        assert_eq!(summary["failed"], 1);
        let csv = summary_csv(&rows);
        assert!(csv.lines().count() == 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
