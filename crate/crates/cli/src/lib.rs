//! Experiment harness for the `lacunary` library: configuration, pipelines
//! and append-only records.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use lacunary::IntegerSet;

pub mod config;
pub mod pipeline;
pub mod record;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const FALSIFIED: i32 = 4;
}

/// Bad flags or malformed input files.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// An input violates a hypothesis of the requested run; carries the report
/// that shows it.
#[derive(Debug)]
pub struct PreconditionError {
    pub message: String,
    pub report: serde_json::Value,
}

impl PreconditionError {
    pub fn new(message: impl Into<String>, report: serde_json::Value) -> Self {
        Self {
            message: message.into(),
            report,
        }
    }
}

impl fmt::Display for PreconditionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.message, self.report)
    }
}

impl std::error::Error for PreconditionError {}

/// Exit status for an error that ended a run.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<serde_json::Error>().is_some() {
        exit::USAGE
    } else if err.downcast_ref::<PreconditionError>().is_some() || err.downcast_ref::<lacunary::Error>().is_some() {
        exit::PRECONDITION
    } else {
        exit::FAILURE
    }
}

/// Reads a set from JSON (`{label, elements}`) or text (one integer per line).
pub fn read_set(path: &Path) -> Result<IntegerSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())).into())
    } else {
        IntegerSet::from_text(label, &text).map_err(|e| UsageError(format!("{}: {e}", path.display())).into())
    }
}
