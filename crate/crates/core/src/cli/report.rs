//! Run reports and their JSON and text forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;
use crate::error::{KzError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// One verified property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Measured magnitude (residual, error), if numeric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// For exact checks: whether the identity held over the rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn exact(name: impl Into<String>, ok: bool, max_abs: Option<f64>) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value: max_abs.filter(|x| x.is_finite()),
            threshold: None,
            exact: Some(ok),
            detail: None,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        let ok = value.is_finite() && value < threshold;
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value: value.is_finite().then_some(value),
            threshold: Some(threshold),
            exact: None,
            detail: (!value.is_finite()).then(|| format!("non-finite value {value}")),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Command-specific results: exact values as `"p/q"` strings, floats as numbers,
    /// matrices as nested arrays.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Wall time; the only field that may differ between identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            status: Status::Pass,
            checks: Vec::new(),
            data: BTreeMap::new(),
            error: None,
            timing_ms: None,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn insert(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(serde_json::Value::Null);
        self.data.insert(key.to_string(), v);
    }

    /// Sets `status` from the checks, unless an error was recorded.
    pub fn finish(&mut self) {
        if self.error.is_none() {
            self.status = if self.checks.iter().all(|c| c.status == Status::Pass) {
                Status::Pass
            } else {
                Status::Fail
            };
        }
    }

    pub fn fail_with(&mut self, e: &KzError) {
        self.status = Status::Error;
        self.error = Some(ErrorInfo {
            kind: error_kind(e).to_string(),
            message: e.to_string(),
            exit_code: exit_code(e),
        });
    }

    /// 0 on pass, 1 when a check failed, otherwise the error's code.
    pub fn exit_code(&self) -> i32 {
        match (&self.status, &self.error) {
            (_, Some(e)) => e.exit_code,
            (Status::Pass, None) => 0,
            _ => 1,
        }
    }
}

pub fn error_kind(e: &KzError) -> &'static str {
    match e {
        KzError::Domain(_) => "domain",
        KzError::Range(_) => "range",
        KzError::Singular(_) => "singular",
        KzError::Resonance { .. } => "resonance",
        KzError::Convergence(_) => "convergence",
        KzError::Accuracy { .. } => "accuracy",
        KzError::Conditioning(_) => "conditioning",
        KzError::Dimension(_) => "dimension",
        KzError::Schema { .. } => "schema",
    }
}

/// 2 for invalid input, 3 for parameters on a singular or resonant locus or outside the
/// convergence regime, 4 when the requested accuracy could not be reached.
pub fn exit_code(e: &KzError) -> i32 {
    match e {
        KzError::Schema { .. } | KzError::Dimension(_) | KzError::Domain(_) => 2,
        KzError::Singular(_) | KzError::Resonance { .. } | KzError::Range(_) | KzError::Convergence(_) => 3,
        KzError::Accuracy { .. } | KzError::Conditioning(_) => 4,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn emit(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

pub fn parse_report(s: &str) -> Result<RunReport> {
    serde_json::from_str(s).map_err(|e| KzError::schema("$", e.to_string()))
}

fn text(r: &RunReport) -> String {
    let mut out = String::new();
    let status = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    };
    let _ = writeln!(out, "kzd {} {}: {status}", r.tool_version, r.command);
    for c in &r.checks {
        let mark = if c.status == Status::Pass { "ok  " } else { "FAIL" };
        let _ = write!(out, "  [{mark}] {}", c.name);
        if let Some(v) = c.value {
            let _ = write!(out, "  value={v:.3e}");
        }
        if let Some(t) = c.threshold {
            let _ = write!(out, "  threshold={t:.1e}");
        }
        if let Some(e) = c.exact {
            let _ = write!(out, "  exact={e}");
        }
        if let Some(d) = &c.detail {
            let _ = write!(out, "  ({d})");
        }
        out.push('\n');
    }
    if let Some(e) = &r.error {
        let _ = writeln!(out, "  error [{}]: {} (exit {})", e.kind, e.message, e.exit_code);
    }
    out
}
