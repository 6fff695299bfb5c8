//! Error-bounded compression of numeric series.
//!
//! A series is split into a *knowledge base* of merged piecewise-linear
//! semantics, extracted under a threshold that adapts to local fluctuation,
//! and a stream of quantized *residuals* that refines the base to any target
//! maximum absolute error, including exact reconstruction of fixed-precision
//! data. One stored artifact can serve every coarser resolution by
//! requantizing its residuals.
//!
//! ```
//! use shrink_core::{compress, decompress, max_abs_error, ErrorThresholds, Resolution, TimeSeries};
//!
//! let values: Vec<f64> = (0..1000).map(|i| (i as f64 / 40.0).sin()).collect();
//! let series = TimeSeries::new("sine", values).unwrap();
//! let thresholds = ErrorThresholds::from_range_pct(&series, 1e-3, 5.0).unwrap();
//! let artifact = compress(&series, thresholds, 0.01).unwrap();
//! let restored = decompress(&artifact, Resolution::Stored).unwrap();
//! assert!(max_abs_error(series.values(), restored.values()).unwrap() <= 1e-3);
//! ```

pub mod baseline;
pub mod codec;
pub mod container;
pub mod datasets;
pub mod entropy;
pub mod error;
pub mod knowledge_base;
pub mod model;
pub mod residual;
pub mod segmentation;

pub use codec::{
    compress, compress_lossless, compress_with, decompress, CodecOptions, CompressionReport,
    Resolution,
};
pub use error::{Error, Result};
pub use model::{
    compression_ratio, max_abs_error, worst_error, CompressedArtifact, Cone, ErrorThresholds,
    KnowledgeBase, ResidualStream, SizeAccount, SubBase, TimeSeries,
};
