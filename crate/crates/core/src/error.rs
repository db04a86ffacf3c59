use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}, column {column}: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column {column}: non-finite numeric value {value}")]
    NonFinite { row: usize, column: String, value: String },

    #[error("row {row}, column {column}: cannot read {value:?} as {expected}")]
    KindMismatch {
        row: usize,
        column: String,
        value: String,
        expected: &'static str,
    },

    #[error("column {column}: symbol {symbol:?} is not in the column alphabet")]
    UnseenSymbol { column: String, symbol: String },

    #[error("dataset must have at least one row and one column")]
    EmptyDataset,

    #[error("invalid column selection: {0}")]
    InvalidColumns(String),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("invalid role assignment: {0}")]
    InvalidRoles(String),

    #[error("k = {k} is out of range for n = {n} (need 1 <= k <= n - 1)")]
    InvalidK { k: usize, n: usize },

    #[error("{0}")]
    Domain(String),

    #[error("neighbor counts violate k <= k~ <= n_xz, n_yz <= n_z: {0}")]
    ChainInvariant(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from the input data rather than from numerics or I/O.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::RaggedRow { .. }
                | Error::MissingValue { .. }
                | Error::NonFinite { .. }
                | Error::KindMismatch { .. }
                | Error::UnseenSymbol { .. }
                | Error::EmptyDataset
                | Error::InvalidColumns(_)
                | Error::UnknownColumn(_)
                | Error::InvalidRoles(_)
                | Error::InvalidK { .. }
                | Error::Schema(_)
                | Error::Csv(_)
        )
    }
}
