use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("unsupported root order {0} (expected 2..=64)")]
    UnsupportedOrder(usize),
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("expected {expected} coefficients, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("polynomial division is not exact")]
    InexactDivision,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid lattice configuration: {0}")]
    Config(String),
    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
    #[error("chain length L={l} is not a multiple of N={n}")]
    NotMultiple { n: usize, l: usize },
    #[error("operator dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("numerical stage aborted: {0}")]
    Numeric(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
