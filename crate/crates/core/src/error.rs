use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("index {index} out of range for alphabet of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("QR iteration failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("discrete spectrum did not stabilize: {coarse} at the coarse truncation, {fine} at the fine one")]
    UnstableSpectrum { coarse: f64, fine: f64 },

    #[error("Lyapunov gap {gap} is below the threshold {threshold}; splitting is ill-conditioned")]
    IllConditionedSplitting { gap: f64, threshold: f64 },

    #[error("sequence is not subadditive: a({n}+{m}) > a({n}) + a({m})")]
    NotSubadditive { n: usize, m: usize },
}
