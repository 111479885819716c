use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line pipeline, tagged with the stage that raised them.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: tclplan_core::Error,
    },

    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    pub(crate) fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(tclplan_core::Error) -> Self {
        move |source| CliError::Stage { stage, source }
    }

    pub(crate) fn write(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        CliError::Write {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Process exit status: 2 for an infeasible budget, 1 when outputs could not be
    /// written, 3 for every other input problem.
    pub fn exit_code(&self) -> i32 {
        use tclplan_core::Error as E;
        match self {
            CliError::Stage {
                source: E::InfeasibleBudget { .. } | E::SlidingInfeasible { .. } | E::BudgetOutOfRange { .. },
                ..
            } => 2,
            CliError::Write { .. } => 1,
            _ => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
