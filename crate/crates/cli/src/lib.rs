//! Batch front end for the two-stage efficiency pipeline: config parsing,
//! orchestration, report assembly and the synthetic demo bundle.

pub mod config;
pub mod demo;
pub mod pipeline;
pub mod report;

use thiserror::Error;

pub use config::{load_config, LoadedConfig, RunConfig};
pub use pipeline::{execute, write_outputs, Outcome};
pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The run could not start (unreadable data, bad catalog, ...).
    #[error("{step} failed: {message}")]
    Fatal { step: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Fatal { .. } => EXIT_ANALYSIS,
        }
    }
}
