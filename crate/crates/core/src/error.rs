use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector length {0} is outside 1..=64")]
    VectorLength(usize),
    #[error("bits {bits:#x} set past length {len}")]
    BitsPastLength { len: usize, bits: u64 },
    #[error("invalid bit character {0:?}")]
    BadBitChar(char),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("unsupported dimensions {n}x{m}x{p}: {reason}")]
    Dims {
        n: usize,
        m: usize,
        p: usize,
        reason: &'static str,
    },
    #[error("term {0} has a zero component")]
    ZeroComponent(usize),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("terms do not sum to the matrix multiplication tensor")]
    NotAScheme,
    #[error("brute-force check needs 2^{bits} matrix pairs; use the tensor verifier instead")]
    TooLargeForBruteForce { bits: usize },
    #[error("invalid search parameters: {0}")]
    Params(String),
    #[error("connectivity path: {0}")]
    Path(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),
    #[error("checkpoint write failed: {message}")]
    CheckpointWrite {
        message: String,
        /// Best result reached before the failure.
        partial: Box<crate::search::SearchOutcome>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A text-format error tied to a 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected `{expected}`")]
    Header { line: usize, expected: &'static str },
    #[error("line {line}: missing (file ends early)")]
    MissingLine { line: usize },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bit string has length {found}, expected {expected}")]
    BitLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid bit string {text:?}")]
    BitChars { line: usize, text: String },
    #[error("line {line}: zero component")]
    ZeroComponent { line: usize },
    #[error("line {line}: trailing content after the last term")]
    Trailing { line: usize },
    #[error("line {line}: terms do not sum to the matrix multiplication tensor")]
    Verify { line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}
