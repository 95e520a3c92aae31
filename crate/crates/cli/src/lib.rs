//! Command-line front end: configuration parsing, study orchestration and
//! CSV artifact writers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

pub use config::{parse_config, SimConfig, StudyKind};
pub use run::{run_study, RunOptions, RunSummary};

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(#[source] ferrosim_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<ferrosim_core::Error> for CliError {
    fn from(e: ferrosim_core::Error) -> Self {
        use ferrosim_core::Error as E;
        match e {
            E::InvalidCoefficients(_) | E::Configuration(_) | E::ReadOutOfRange(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(other),
        }
    }
}
