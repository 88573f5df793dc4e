//! Batch front end for the optimal-control core: declarative JSON run
//! configurations, four subcommands (propagate, optimize, scan,
//! controllability) and deterministic file outputs.
//!
//! Every run writes fixed-name artifacts into one output directory; all
//! numeric columns carry 15 significant digits and no data file contains a
//! timestamp (wall time appears only in the convergence log's seconds
//! column, which determinism checks mask).

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod output;

/// Error split mirrored in the process exit codes: configuration and
/// validation problems exit 2, runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qoc_core::Error> for CliError {
    fn from(e: qoc_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
