use thiserror::Error;

/// Errors raised by the constrained-space toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration {config:#b} violates the blockade constraint on {length} sites")]
    IllegalConfig { config: u64, length: usize },

    #[error("configuration {config:#b} has bits beyond site count {length}")]
    ConfigOutOfRange { config: u64, length: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian (max |M - M^T| = {0:e})")]
    NotHermitian(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigensolver(String),

    #[error("zero-energy shell is empty")]
    EmptyShell,

    #[error("zero-energy shell is not gap-separated: {small} states below {tol_small:e} but {large} below {tol_large:e}")]
    UnstableShell {
        small: usize,
        large: usize,
        tol_small: f64,
        tol_large: f64,
    },

    #[error("intervals overlap or leave the chain: {0}")]
    BadGeometry(String),

    #[error("density matrix eigenvalue {0:e} is negative beyond round-off")]
    NegativeEigenvalue(f64),

    #[error("population vector longer than energy spectrum ({probs} > {energies})")]
    LengthMismatch { probs: usize, energies: usize },

    #[error("Krylov propagation did not converge within {dim} vectors (residual {residual:e})")]
    KrylovNotConverged { dim: usize, residual: f64 },

    #[error("least-squares design matrix is rank deficient")]
    RankDeficient,

    #[error("no samples fall inside the averaging window [{0}, {1}]")]
    EmptyWindow(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
