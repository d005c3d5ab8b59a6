//! Batch front end: JSON experiment files in, JSON reports (or CSV traces) out.
//!
//! Exit codes: 0 when every gating assertion passes, 2 when one fails (or a numerical invariant
//! breaks during the run), 1 for malformed input.

pub mod report;
pub mod run;
pub mod spec;

use maslov_core::MaslovError;
use thiserror::Error;

pub use report::Report;
pub use run::{run, ConventionProfile, Outcome};
pub use spec::ExperimentSpec;

/// Environment variable selecting the convention profile.
pub const LEDGER_ENV: &str = "MASLOV_CONVENTION_LEDGER";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error at `{field}`: {message}")]
    Input { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(MaslovError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn input(field: impl Into<String>, message: String) -> Self {
        Self::Input { field: field.into(), message }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Io(_) => 1,
            CliError::Numerical(e) => match e {
                MaslovError::InvalidInput(_)
                | MaslovError::Dimension { .. }
                | MaslovError::Unsupported(_)
                | MaslovError::Immersion { .. }
                | MaslovError::Case(_) => 1,
                _ => 2,
            },
        }
    }

    /// Name of the broken invariant, for numerical failures.
    pub fn invariant(&self) -> Option<String> {
        match self {
            CliError::Numerical(MaslovError::InvariantViolation { what, .. }) => Some(what.to_string()),
            CliError::Numerical(e) if self.exit_code() == 2 => Some(e.to_string()),
            _ => None,
        }
    }
}

impl From<MaslovError> for CliError {
    fn from(e: MaslovError) -> Self {
        CliError::Numerical(e)
    }
}
