use thiserror::Error;

/// Errors raised by the solvers, geometry routines and dataset readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown model tag `{0}`")]
    UnknownModel(String),

    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    EigenNoConvergence { residual: f64, iterations: usize },

    #[error("optimizer did not converge after {iterations} iterations (best energy {best_energy})")]
    OptimizerNoConvergence {
        iterations: usize,
        best_energy: f64,
        best_point: crate::types::ExpectationPoint,
    },

    #[error("transfer matrix is not injective (spectral gap {gap:.3e}); resample")]
    Resample { gap: f64 },

    #[error("too many rejected samples: {rejected} of {attempted} draws were non-injective")]
    ResampleExhausted { rejected: usize, attempted: usize },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("subspace too large: {0}")]
    SubspaceOverflow(String),

    #[error("degenerate hull ({0}); operation requires a full-dimensional hull")]
    DegenerateHull(&'static str),

    #[error("unsupported direction for this backend: {0}")]
    UnsupportedDirection(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("integrity error: stored hash {stored} but rows hash to {computed}")]
    Integrity { stored: String, computed: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
