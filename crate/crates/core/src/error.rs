use thiserror::Error;

/// Errors raised by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("state vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation health violated: tail population {tail:e} exceeds {limit:e}")]
    Truncation { tail: f64, limit: f64 },

    #[error("decoding failed: trace of decoded operator is {0:e}")]
    Decoding(f64),

    #[error("SWAP parameters unsolvable for chi = {chi}, phi = {phi}")]
    SwapDomain { chi: f64, phi: f64 },

    #[error("pulse compilation failed: best residual {0:e}")]
    Compilation(f64),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best_objective:e})")]
    NoConvergence {
        iterations: usize,
        best_objective: f64,
        best_point: Vec<f64>,
    },

    #[error("{failed} of {total} bootstrap replicas failed")]
    Bootstrap { failed: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
