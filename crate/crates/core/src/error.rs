use thiserror::Error;

/// Errors produced by matrix construction, file I/O, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size guard exceeded: {what} has {size} entries, limit {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("singular pencil: |a[{i},{i}] + b[{j},{j}]| = {magnitude:e} is numerically zero")]
    SingularPencil { i: usize, j: usize, magnitude: f64 },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("non-positive diagonal entry {value} at index {index}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("singular system: the assembled Kronecker matrix is not invertible")]
    SingularSystem,

    #[error("eigensolver failed to converge")]
    EigenFailed,

    #[error("divergence at outer step {outer_step}: relative residual {residual:e}")]
    Divergence { outer_step: usize, residual: f64 },

    #[error("inner solve failed at outer step {outer_step}: {source}")]
    InnerSolve {
        outer_step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: parse error at line {line}: {detail}")]
    MatrixMarketParse {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
