use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: cell {cell:?} in column {column} is not a finite number")]
    NotNumeric { row: u64, column: usize, cell: String },

    #[error("row {row} has no column {column}")]
    MissingColumn { row: u64, column: usize },

    #[error("series row {row} requested but the file holds {rows}")]
    MissingRow { row: usize, rows: usize },

    #[error("no samples found")]
    Empty,

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid {name}: {reason}")]
    Config { name: &'static str, reason: String },

    #[error(transparent)]
    Codec(#[from] shrink_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Config {
        name,
        reason: reason.into(),
    }
}
