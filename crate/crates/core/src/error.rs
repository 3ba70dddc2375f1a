use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Quadrature(#[from] QuadError),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("grid step {step} does not resolve the grating function (need < {required})")]
    Resolution { step: f64, required: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
