use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pattern support is not contained in the target support")]
    SupportNotContained,

    #[error("budget exhausted after {spent} nodes")]
    BudgetExhausted { spent: u64 },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("symbol index {symbol} out of range for alphabet of size {size}")]
    InvalidSymbol { symbol: u32, size: usize },

    #[error("empty support")]
    EmptySupport,

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("output support of the block code is empty (box too small for window)")]
    EmptyOutputSupport,

    #[error("radius {r} does not exceed the required bound {bound}")]
    RadiusTooSmall { r: i64, bound: i64 },

    #[error("cylinder alphabet needs {bits} bits, cap is {cap}")]
    SupportCapExceeded { bits: usize, cap: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cell leaves the oracle domain: {0}")]
    DomainViolation(String),

    #[error("trap region rejected: {0}")]
    TrapRejected(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
