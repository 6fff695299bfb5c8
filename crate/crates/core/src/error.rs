use thiserror::Error;

/// Errors produced by the codec and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series must contain at least one sample")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cones do not cover the series: {0}")]
    Coverage(String),

    #[error("symbol {symbol} at position {position} is outside alphabet of size {alphabet}")]
    SymbolOutOfRange { position: usize, symbol: u32, alphabet: u32 },

    #[error("resolution {requested} is finer than the stored resolution {stored}")]
    ResolutionTooFine { requested: f64, stored: f64 },

    #[error("values exceed {decimals} decimal places at indices {indices:?}")]
    PrecisionExceeded { decimals: u32, indices: Vec<usize> },

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("checksum mismatch in {section} section: stored {stored:08x}, computed {computed:08x}")]
    Checksum {
        section: &'static str,
        stored: u32,
        computed: u32,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
