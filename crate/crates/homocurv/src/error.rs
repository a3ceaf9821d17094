use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("subspace is not closed under the bracket (residual {residual:.3e})")]
    NotSubalgebra { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate plane: the two vectors are linearly dependent")]
    DegeneratePlane,

    #[error("sequence is not divergent: all growth exponents vanish")]
    NotDivergent,

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("metric does not have unit relative volume (volume = {0})")]
    NonUnitVolume(f64),

    #[error("direction is undefined at the base point metric (t = 0)")]
    BasePoint,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
