use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("iterate degree {degree} exceeds the configured maximum {max}; use orbit evaluation instead")]
    DegreeOverflow { degree: u128, max: usize },

    #[error("invalid weight sequence: {0}")]
    InvalidWeight(String),

    #[error("polynomial of degree {degree} needs weights up to index {degree}, sequence stops at {available}")]
    InsufficientWeights { degree: usize, available: usize },

    #[error("{x0} is not a fixed point (residual {residual:e})")]
    NotFixedPoint { x0: f64, residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("QR iteration did not converge after {sweeps} sweeps ({} eigenvalues found)", partial.len())]
    NoConvergence {
        sweeps: usize,
        partial: Vec<Complex64>,
    },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
