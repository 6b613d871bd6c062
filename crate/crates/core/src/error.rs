use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A byte outside the binary alphabet (or outside the file grammar).
    #[error("invalid symbol {byte:#04x} at offset {offset}")]
    InvalidSymbol { offset: usize, byte: u8 },

    #[error("requested length {requested} exceeds the limit of {limit} symbols")]
    Budget { requested: usize, limit: usize },

    #[error("time budget of {seconds:.3}s exhausted")]
    Timeout { seconds: f64 },

    #[error("word of odd length {0} is not an image of the morphism")]
    OddLength(usize),

    #[error("block {index} (\"{block}\") is neither \"ab\" nor \"ba\"")]
    NotMorphicImage { index: usize, block: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    /// No reduction depth up to three met the size guarantee; this would
    /// falsify the amortized lower-bound argument and is never expected.
    #[error("no level i <= 3 with |B_(n-i)| <= |B_n| - i (sizes along the way: {sizes:?})")]
    BoundNotReached { sizes: Vec<usize> },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
