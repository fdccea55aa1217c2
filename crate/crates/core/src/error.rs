use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix not full row rank")]
    RankDeficient,

    #[error("singular matrix")]
    Singular,

    #[error("{what} cap exceeded: {needed} > {cap}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: String,
    },

    #[error("factorization incomplete: cofactor {0} exceeds the trial-division ceiling")]
    FactorizationIncomplete(BigInt),

    #[error("omega is undefined for {0}")]
    NonPositive(BigInt),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("group element does not belong to this group")]
    GroupMismatch,

    #[error("cone(A) differs from cone(W): column {0} of A lies outside cone(W)")]
    ConeMismatch(usize),

    #[error("coins must have gcd 1 (gcd is {0})")]
    CoinGcd(u64),

    #[error("invalid coin {0}: coins must be at least 2")]
    InvalidCoin(u64),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_exceeded(
    what: &'static str,
    needed: impl ToString,
    cap: impl ToString,
) -> Error {
    Error::CapExceeded {
        what,
        needed: needed.to_string(),
        cap: cap.to_string(),
    }
}
