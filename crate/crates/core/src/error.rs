use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered in {what}")]
    NonFinite { what: String },

    #[error("field is not real-valued: {0}")]
    NotReal(String),

    #[error("Picard iteration is not contracting (distance grew for {streak} consecutive iterations, last {distance:.3e})")]
    NonContraction { streak: usize, distance: f64 },

    #[error("calibration failed for `{constant}`: no grid value up to 2^{max_exponent} satisfies the probe corpus")]
    CalibrationFailed {
        constant: &'static str,
        max_exponent: u32,
    },

    #[error("identity `{name}` violated: relative residual {relative:.3e}")]
    IdentityViolated { name: &'static str, relative: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("override `{key}`: {message}")]
    Override { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed file: {message}")]
    Format { path: PathBuf, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
