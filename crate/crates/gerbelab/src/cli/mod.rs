//! Manifest-driven front end: parse object manifests, run validation and
//! computation tasks, and emit deterministic JSON or text reports.

pub mod manifest;
pub mod report;
pub mod runner;

pub use manifest::{parse_manifest, Command, Manifest, ObjectSpec, Params, TaskSpec};
pub use report::{emit_report, Format, Report, Status, TaskReport};
pub use runner::{run, run_with, RunOptions};

use thiserror::Error;

/// Errors from manifest parsing and reference resolution.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {path}: {detail}")]
    ParseError { path: String, detail: String },
    #[error("unknown field `{field}` at {path}")]
    UnknownField { path: String, field: String },
    #[error("task {index} ({command}) references unknown object `{name}`")]
    BadReference {
        index: usize,
        command: String,
        name: String,
    },
    #[error("invalid parameter in task {index}: {detail}")]
    InvalidParameter { index: usize, detail: String },
}
