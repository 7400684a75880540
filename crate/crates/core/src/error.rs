use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("operands are not aligned: {0}")]
    Alignment(String),
    #[error("index ({i}, {j}) outside a {ni}x{nj} map")]
    IndexOutOfRange { i: usize, j: usize, ni: usize, nj: usize },
    #[error("flat index {k} outside a map of size {size}")]
    FlatIndexOutOfRange { k: usize, size: usize },
    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),
    #[error("function has zero area")]
    ZeroArea,
    #[error("zero norm in {0}")]
    ZeroNorm(&'static str),
    #[error("negative multiplicity in multiway input")]
    NegativeInput,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("basis member `{0}` is identically zero")]
    ZeroBasisFunction(String),
    #[error("series has no peak")]
    NoPeak,
    #[error("empty point set")]
    EmptyPoints,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by operands that do not share a grid or universe.
    pub fn is_alignment(&self) -> bool {
        matches!(self, Error::Alignment(_) | Error::LengthMismatch { .. })
    }
}
