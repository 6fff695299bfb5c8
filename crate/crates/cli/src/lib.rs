//! Ingestion, verification and benchmark drivers behind the `shrink` binary.

pub mod bench;
pub mod error;
pub mod ingest;
pub mod output;
pub mod plot;
pub mod pool;

pub use error::{Error, Result};
pub use ingest::{ingest, Format, Ingested};
