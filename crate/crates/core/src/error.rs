use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H*| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U*U - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("partition ({p}, {q}) does not fit a {dim}x{dim} matrix with |p - q| <= 1")]
    PartitionMismatch { p: usize, q: usize, dim: usize },

    #[error("operation is not defined for matrix size {m} ({reason})")]
    UnsupportedOrder { m: usize, reason: &'static str },

    #[error("boundary pair is not self-adjoint (gram residual {gram_residual:e})")]
    NotSelfAdjoint { gram_residual: f64 },

    #[error("rank deficient: rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("even-order decomposition needs an even size, got {m}")]
    OddSize { m: usize },

    #[error("invalid unit-cosine target {k}: must lie in [0, {n}]")]
    InvalidTarget { k: usize, n: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("generator gave up after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
