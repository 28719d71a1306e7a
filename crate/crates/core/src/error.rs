use thiserror::Error;

/// Errors raised by the balanced-modulation codecs, decoders and harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("word length {0} must be even")]
    OddLength(usize),
    #[error("empty input")]
    Empty,
    #[error("prefix length {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },
    #[error("word of length {len} has weight {weight}, expected {expected}")]
    NotBalanced { len: usize, weight: usize, expected: usize },
    #[error("prefix of length {prefix_len} can index at most {capacity} positions, need {required}")]
    PrefixCapacity { prefix_len: usize, capacity: u128, required: usize },
    #[error("non-finite cell level at position {0}")]
    NonFiniteLevel(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mixture component {component} collapsed (total responsibility {weight:e})")]
    ComponentCollapse { component: usize, weight: f64 },
    #[error("could not draw a parity-check matrix with acceptable rank after {attempts} attempts")]
    RankDeficient { attempts: usize },
    #[error("malformed balancing trace: {0}")]
    MalformedTrace(String),
    #[error("rank out of range")]
    RankOutOfRange,
    #[error("decoding failed: {0}")]
    DecodeFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
