//! Report rows, summary arithmetic and serialization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scenario: String,
    pub check: String,
    pub function_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub residual_max: f64,
    pub passed: bool,
    pub runtime_ms: f64,
    /// Set when the check could not be evaluated; such rows count as failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn errored(scenario: &str, check: &str, function_id: &str, error: impl ToString) -> Self {
        Row {
            scenario: scenario.to_string(),
            check: check.to_string(),
            function_id: function_id.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            residual_max: f64::NAN,
            passed: false,
            runtime_ms: 0.0,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest finite margin; `None` when no row has one.
    pub worst_margin: Option<f64>,
    /// Largest finite residual.
    pub worst_residual: Option<f64>,
}

impl Summary {
    pub fn of(rows: &[Row]) -> Self {
        let passed = rows.iter().filter(|r| r.passed).count();
        let finite = |v: f64| v.is_finite().then_some(v);
        Summary {
            total: rows.len(),
            passed,
            failed: rows.len() - passed,
            worst_margin: rows.iter().filter_map(|r| finite(r.margin)).reduce(f64::min),
            worst_residual: rows.iter().filter_map(|r| finite(r.residual_max)).reduce(f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON form of the configuration that ran.
    pub config_hash: String,
    /// Effective generator seeds, in scenario order.
    pub seed: Vec<u64>,
    pub tool_version: String,
    pub substitution_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Process exit code: 0 when every row passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scenario",
            "check",
            "function_id",
            "lhs",
            "rhs",
            "margin",
            "residual_max",
            "passed",
            "runtime_ms",
            "error",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.scenario.clone(),
                r.check.clone(),
                r.function_id.clone(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.residual_max.to_string(),
                r.passed.to_string(),
                r.runtime_ms.to_string(),
                r.error.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
