use thiserror::Error;

/// Errors raised while building or combining distributions and channels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscordError {
    #[error("matrix is empty; every alphabet needs at least one symbol")]
    Empty,
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("entry at {index:?} is not finite")]
    NonFinite { index: Vec<usize> },
    #[error("entry at {index:?} is negative ({value})")]
    NegativeEntry { index: Vec<usize>, value: f64 },
    #[error("entries sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("channel matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("channel column {column} sums to {sum}, expected 1")]
    ColumnNotNormalized { column: usize, sum: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("vector of length {len} cannot be reshaped to {rows}x{cols}")]
    SizeMismatch { len: usize, rows: usize, cols: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("channel family is empty: {0}")]
    EmptyFamily(String),
    #[error("dimension {dim} is too large for {what} (max {max})")]
    DimensionTooLarge {
        what: &'static str,
        dim: usize,
        max: usize,
    },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl DiscordError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            DiscordError::Empty => "Empty",
            DiscordError::Ragged => "Ragged",
            DiscordError::NonFinite { .. } => "NonFinite",
            DiscordError::NegativeEntry { .. } => "NegativeEntry",
            DiscordError::NotNormalized { .. } => "NotNormalized",
            DiscordError::InvalidDistribution(_) => "InvalidDistribution",
            DiscordError::NotSquare { .. } => "NotSquare",
            DiscordError::ColumnNotNormalized { .. } => "ColumnNotNormalized",
            DiscordError::DimensionMismatch { .. } => "DimensionMismatch",
            DiscordError::OutOfRange { .. } => "OutOfRange",
            DiscordError::SizeMismatch { .. } => "SizeMismatch",
            DiscordError::InvalidWeights(_) => "InvalidWeights",
            DiscordError::EmptyFamily(_) => "EmptyFamily",
            DiscordError::DimensionTooLarge { .. } => "DimensionTooLarge",
            DiscordError::NumericalFailure(_) => "NumericalFailure",
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, DiscordError::NumericalFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, DiscordError>;
