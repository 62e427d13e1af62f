//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented range of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The discrete forward system is close to singular, which signals a
    /// pole of the discrete resolvent at the requested wavenumber.
    #[error("near-resonance: estimated condition number {cond:.3e} exceeds {limit:.1e}")]
    NearResonance { cond: f64, limit: f64 },

    /// An internal cross-check failed (for example an imaginary residue that
    /// should vanish, or a Galerkin matrix that lost its symmetry).
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// A configuration field failed validation; the field path is included
    /// so the offending entry can be located in the JSON file.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NearResonance { .. } => 3,
            Error::InvalidArgument(_) | Error::Config { .. } | Error::Json(_) => 2,
            Error::Consistency(_) | Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
