//! Experiment layer over `lggnn-core`: config-driven runs, edge-list
//! ingestion, report and plot-data emission, and the Cora pipeline.

pub mod config;
pub mod cora;
pub mod graph_io;
pub mod plot;
pub mod presets;
pub mod report;
pub mod runner;

use std::fmt;

/// CLI-facing error split by exit code: config errors exit 2, runtime
/// failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lggnn_core::Error> for CliError {
    fn from(err: lggnn_core::Error) -> Self {
        match err {
            lggnn_core::Error::Parameter(_) => CliError::Config(err.to_string()),
            _ => CliError::Runtime(err.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
