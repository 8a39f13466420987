//! Configuration, scenario runs, convergence sweeps and the built-in
//! property suite behind the `weakdecay` binary.

pub mod check;
pub mod config;
pub mod scenario;
pub mod sweep;

use thiserror::Error;

pub use config::{FieldError, RawConfig, ScenarioConfig};
pub use scenario::{run_scenario, ResultRow, ScenarioOutput, Summary, CSV_HEADER};
pub use sweep::{convergence_sweep, SweepLevel, SweepTable, Trend};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration:\n{}", format_fields(.0))]
    ConfigInvalid(Vec<FieldError>),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Model(#[from] crate::Error),
}

fn format_fields(fields: &[FieldError]) -> String {
    fields
        .iter()
        .map(|f| format!("  {f}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ConfigInvalid(_) | HarnessError::Io { .. } => exit::INVALID_INPUT,
            HarnessError::Model(e) if e.is_numerical() => exit::NUMERICAL_FAILURE,
            HarnessError::Model(_) => exit::INVALID_INPUT,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const TOLERANCE_BREACH: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}

/// Exit code for a finished scenario.
pub fn scenario_exit_code(summary: &Summary) -> i32 {
    if summary.numerical_failure {
        exit::NUMERICAL_FAILURE
    } else if summary.pass {
        exit::OK
    } else {
        exit::TOLERANCE_BREACH
    }
}
