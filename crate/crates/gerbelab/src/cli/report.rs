//! Report structures and deterministic rendering.  All maps are ordered, task
//! order follows the manifest, and floats are printed with 17 significant
//! digits, so identical manifests yield byte-identical reports.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The outcome of a full manifest run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Pass)
    }
}

/// One task's outcome: status, named values, and named residuals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskReport {
    pub index: usize,
    pub command: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

/// Task status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Output format for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// Print a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a report deterministically in the requested format.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = format!(
                "report version {} — {} task(s)\n",
                report.version,
                report.tasks.len()
            );
            for t in &report.tasks {
                out.push_str(&format!("[{}] {} {}\n", t.index, t.status.as_str(), t.command));
                for (k, v) in &t.values {
                    out.push_str(&format!("      {k} = {v}\n"));
                }
                for (k, v) in &t.residuals {
                    out.push_str(&format!("      residual {k} = {}\n", fmt_float(*v)));
                }
                if !t.detail.is_empty() {
                    for line in t.detail.lines() {
                        out.push_str(&format!("      {line}\n"));
                    }
                }
                if let Some(ms) = t.millis {
                    out.push_str(&format!("      elapsed {ms} ms\n"));
                }
            }
            out
        }
    }
}
