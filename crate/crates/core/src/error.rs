use thiserror::Error;

/// Errors surfaced by model construction, report design, and sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {max_asym:e} exceeds {tol:e})")]
    NotSymmetric { max_asym: f64, tol: f64 },

    #[error("matrix is not positive definite (pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix is not positive semidefinite (pivot {pivot} failed)")]
    NotPositiveSemidefinite { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix data length {len} is not a {dim}x{dim} square")]
    BadMatrixShape { dim: usize, len: usize },

    #[error("population must contain at least one viewer")]
    EmptyPopulation,

    #[error("filter radius epsilon must be positive, got {value}")]
    InvalidEpsilon { value: f64 },

    #[error("population moment matrix is singular at lambda = 0 (some viewer gain is degenerate)")]
    DegenerateMoments,

    #[error(
        "multiplier bisection did not converge: lambda in [{lambda_lo}, {lambda_hi}], residual gap {gap:e}"
    )]
    BisectionFailed {
        lambda_lo: f64,
        lambda_hi: f64,
        gap: f64,
    },

    #[error("rejection sampling for d_min = {d_min} failed after {attempts} attempts")]
    RejectionInfeasible { d_min: f64, attempts: u64 },

    #[error("permissiveness ratio is undefined: zero-variance audience gives 0/0")]
    ZeroDenominator,

    #[error("grid oracle supports dim <= 3, got {dim}")]
    OracleDimTooLarge { dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
