//! Machine-readable run reports: a JSON document per run, with an optional
//! CSV flattening. Serialization is deterministic: struct field order is
//! fixed, map keys are sorted, and floats print in shortest round-trip form,
//! so identical scenarios produce byte-identical bytes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Version of the report document layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    /// Residual within tolerance.
    Pass,
    /// Residual above tolerance.
    Fail,
    /// Exploratory value; carries no pass/fail meaning.
    Info,
    /// The case could not be evaluated (quadrature failure, invalid input).
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    /// Stable identifier, `<suite>/<name>`.
    pub id: String,
    /// Hex digest of the inputs (scenario seed, case id, sample count fully
    /// determine the drawn inputs).
    pub digest: String,
    /// Named values produced by the case (both sides of identities, counts).
    pub values: BTreeMap<String, f64>,
    /// The quantity compared against the tolerance; absent when the case
    /// errored before producing one.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: CaseStatus,
    /// Human-oriented context: what was checked, or the failure message.
    pub note: String,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub info: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    pub versions: BTreeMap<String, String>,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, model: &str, seed: u64, samples: usize) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(
            env!("CARGO_PKG_NAME").to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        Report {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            model: model.to_string(),
            seed,
            samples,
            versions,
            cases: Vec::new(),
            summary: Summary::default(),
        }
    }

    /// Install cases (sorted by id) and recompute the summary.
    pub fn set_cases(&mut self, mut cases: Vec<CaseReport>) {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary {
            total: cases.len(),
            ..Summary::default()
        };
        for c in &cases {
            match c.status {
                CaseStatus::Pass => summary.passed += 1,
                CaseStatus::Fail => summary.failed += 1,
                CaseStatus::Info => summary.info += 1,
                CaseStatus::Error => summary.errors += 1,
            }
        }
        self.cases = cases;
        self.summary = summary;
    }

    /// Process exit code contract: numeric failures dominate suite failures.
    pub fn exit_code(&self) -> u8 {
        if self.summary.errors > 0 {
            3
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per case; `values` flattened as `key=value` pairs joined with
    /// `;` (keys already sorted by the map).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "suite,model,seed,samples,case_id,digest,status,residual,tolerance,values,note\n",
        );
        for c in &self.cases {
            let status = match c.status {
                CaseStatus::Pass => "pass",
                CaseStatus::Fail => "fail",
                CaseStatus::Info => "info",
                CaseStatus::Error => "error",
            };
            let residual = c.residual.map(|r| r.to_string()).unwrap_or_default();
            let values = c
                .values
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                self.suite,
                self.model,
                self.seed,
                self.samples,
                c.id,
                c.digest,
                status,
                residual,
                c.tolerance,
                csv_escape(&values),
                csv_escape(&c.note),
            ));
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
