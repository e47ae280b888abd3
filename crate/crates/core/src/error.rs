use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("degenerate normal: norm {norm:e} is below 1e-12")]
    DegenerateNormal { norm: f64 },

    #[error("basis is not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("invalid convex body: {0}")]
    InvalidBody(String),

    #[error("inconsistent affine constraints")]
    InconsistentConstraints,

    #[error("affine map is not nonexpansive: spectral norm {norm}")]
    NotNonexpansive { norm: f64 },

    #[error("system must contain at least one map")]
    EmptySystem,

    #[error("symbol {symbol} outside alphabet 1..={alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("invalid driver: {0}")]
    InvalidDriver(String),

    #[error("driver exhausted after {position} symbols")]
    DriverExhausted { position: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("orbit tail is empty (burn-in {burn_in}, orbit length {len})")]
    EmptyTail { burn_in: usize, len: usize },

    #[error("degenerate tree: all {pairs} sampled pairs coincide")]
    DegenerateTree { pairs: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
