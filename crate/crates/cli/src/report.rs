//! Report schema ("report-v1") and atomic emission.
//!
//! Two runs with identical configuration produce byte-identical reports
//! except for the `timestamp_unix_ms` field.

use serde::{Deserialize, Serialize};
use std::path::Path;

use ncd_core::json::{VerdictJson, WitnessJson};
use ncd_core::verdict::Verdict;

pub const SCHEMA: &str = "report-v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridsJson {
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl From<&ncd_core::triangle::Grids> for GridsJson {
    fn from(g: &ncd_core::triangle::Grids) -> Self {
        GridsJson {
            t: g.t.clone(),
            alpha: g.alpha.clone(),
            beta: g.beta.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: String,
    pub status: String,
    pub margin: f64,
    pub samples: usize,
    pub seed: u64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl CheckEntry {
    pub fn from_verdict(check: impl Into<String>, v: &Verdict) -> Self {
        let vj = VerdictJson::from(v);
        CheckEntry {
            check: check.into(),
            status: vj.status,
            margin: vj.margin,
            samples: vj.samples,
            seed: vj.seed,
            method: vj.method,
            witness: vj.witness,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != "FAIL"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance: String,
    pub seed: u64,
    pub overall: String,
    pub checks: Vec<CheckEntry>,
}

impl InstanceResult {
    pub fn new(instance: impl Into<String>, seed: u64, checks: Vec<CheckEntry>) -> Self {
        let overall = if checks.iter().all(CheckEntry::passed) {
            "PASS"
        } else {
            "FAIL"
        };
        InstanceResult {
            instance: instance.into(),
            seed,
            overall: overall.into(),
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == "PASS"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub timestamp_unix_ms: u64,
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub grids: GridsJson,
    pub results: Vec<InstanceResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<String>,
    pub overall: String,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        seed: u64,
        samples: usize,
        grids: GridsJson,
        results: Vec<InstanceResult>,
    ) -> Self {
        let overall = if results.iter().all(InstanceResult::passed) {
            "PASS"
        } else {
            "FAIL"
        };
        Report {
            schema: SCHEMA.into(),
            timestamp_unix_ms: now_ms(),
            command: command.into(),
            seed,
            samples,
            grids,
            results,
            consistency: None,
            overall: overall.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.overall == "PASS"
    }
}

fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Atomic write: serialize to a sibling temp file, then rename into place.
/// No partial report survives a failure.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    std::fs::write(&tmp, text.as_bytes())?;
    std::fs::rename(&tmp, path)
}
