use std::path::PathBuf;

use crate::grid::ScalarField;

/// Errors raised by solvers, the particle integrator and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("characteristic integration failed at t = {time}: non-finite velocity")]
    IntegrationFailure { time: f64 },

    #[error("numerical instability at t = {time}: {reason}")]
    Instability {
        time: f64,
        reason: String,
        /// Last accepted `(u, v)` state before the failing step.
        last_valid: Option<Box<(ScalarField, ScalarField)>>,
    },

    #[error("particle step rejected at step {step}: time step too large")]
    DtTooLarge { step: u64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(key: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for configuration problems (as opposed to numerical or I/O failures).
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation { .. })
    }

    /// True for failures of the numerical methods themselves.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::IntegrationFailure { .. }
                | Error::Instability { .. }
                | Error::DtTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
