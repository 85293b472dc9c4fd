use thiserror::Error;

/// Errors reported by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in the supported range 2..=97")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u8, u8),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("letter {letter} out of range for alphabet of size {d}")]
    LetterOutOfRange { letter: usize, d: usize },
    #[error("closure exceeded the cap of {0} states")]
    CapExceeded(usize),
    #[error("matrix size {0} exceeds the size guard")]
    SizeGuard(u64),
    #[error("element is not in the Kaloujnine group K_p")]
    NotInKp,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("undefined name `{0}`")]
    UndefinedName(String),
    #[error("invalid prefix code: {0}")]
    InvalidPrefixCode(String),
    #[error("symbol system is not column-finite")]
    NotColumnFinite,
    #[error("truncation order {0} is too short (need at least 8)")]
    TruncationTooShort(usize),
    #[error("term {0} is undefined")]
    UndefinedTerm(u64),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: u64, bound: u64 },
    #[error("operation requires p = 2, got p = {0}")]
    RequiresBinary(u8),
    #[error("basis is not marked: its first vector must be the constant 1")]
    NotMarked,
    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
