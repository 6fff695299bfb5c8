//! Domain types shared by every stage of the codec, plus the error and size
//! accounting used to judge a compression run.
//!
//! Samples are index-regular: the timestamp of the `i`-th value is `i`, so no
//! timestamps are ever stored.

use crate::error::{invalid, Error, Result};

/// An ordered, index-regular series of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            name: name.into(),
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw size in bytes when stored as 64-bit floats.
    pub fn raw_bytes(&self) -> usize {
        self.values.len() * std::mem::size_of::<f64>()
    }

    /// `(min, max)` of the samples.
    pub fn bounds(&self) -> (f64, f64) {
        value_bounds(&self.values)
    }

    /// Global value range `max - min`.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub(crate) fn value_bounds(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// The triple of error thresholds driving a compression run.
///
/// `epsilon` is the target maximum absolute error, `epsilon_b` the default
/// quantization step for semantic extraction and `epsilon_r` the residual
/// quantization step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorThresholds {
    epsilon: f64,
    epsilon_b: f64,
    epsilon_r: f64,
}

impl ErrorThresholds {
    pub fn new(epsilon: f64, epsilon_b: f64, epsilon_r: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(invalid("epsilon", format!("{epsilon} must be finite and >= 0")));
        }
        if !(epsilon_b.is_finite() && epsilon_b > 0.0) {
            return Err(invalid("epsilon_b", format!("{epsilon_b} must be finite and > 0")));
        }
        if !(epsilon_r.is_finite() && epsilon_r >= 0.0) {
            return Err(invalid("epsilon_r", format!("{epsilon_r} must be finite and >= 0")));
        }
        if epsilon_r > epsilon {
            return Err(invalid(
                "epsilon_r",
                format!("{epsilon_r} exceeds the target error {epsilon}"),
            ));
        }
        Ok(Self {
            epsilon,
            epsilon_b,
            epsilon_r,
        })
    }

    /// Thresholds with the residual step equal to the target error.
    pub fn with_target(epsilon: f64, epsilon_b: f64) -> Result<Self> {
        Self::new(epsilon, epsilon_b, epsilon)
    }

    /// Thresholds whose base step is `pct` percent of the series range.
    ///
    /// A constant series has zero range; its base step falls back to `pct`
    /// percent of the largest magnitude (or of 1).
    pub fn from_range_pct(series: &TimeSeries, epsilon: f64, pct: f64) -> Result<Self> {
        if !(pct.is_finite() && pct > 0.0) {
            return Err(invalid("epsilon_b_pct", format!("{pct} must be > 0")));
        }
        let range = series.range();
        let scale = if range > 0.0 {
            range
        } else {
            let (lo, hi) = series.bounds();
            lo.abs().max(hi.abs()).max(1.0)
        };
        Self::with_target(epsilon, scale * pct / 100.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_b(&self) -> f64 {
        self.epsilon_b
    }

    pub fn epsilon_r(&self) -> f64 {
        self.epsilon_r
    }
}

/// A shrinking cone: a quantized origin plus the slope interval of every line
/// from that origin that stays within `eps_hat` of each covered point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub origin: f64,
    pub span_lo: f64,
    pub span_hi: f64,
    pub start: usize,
    pub length: usize,
    pub eps_hat: f64,
}

impl Cone {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

/// A contiguous index range `[start, start + length)` covered by one line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    pub start: usize,
    pub length: usize,
}

impl Run {
    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

/// Cones sharing one origin whose spans were merged, with the compact slope
/// picked from the merged span.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBase {
    pub origin: f64,
    pub span_lo: f64,
    pub span_hi: f64,
    pub slope: f64,
    /// Sorted by start; ranges are disjoint.
    pub runs: Vec<Run>,
}

/// Value predicted at `offset` samples past the start of a run.
#[inline]
pub fn predict(origin: f64, slope: f64, offset: usize) -> f64 {
    origin + slope * offset as f64
}

/// The knowledge base: every sub-base plus the parameters it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    pub sub_bases: Vec<SubBase>,
    pub n: usize,
    pub eps_b: f64,
    pub lambda: f64,
    /// Largest adaptive threshold used during extraction.
    pub eps_hat_max: f64,
}

impl KnowledgeBase {
    /// Total number of runs over all sub-bases.
    pub fn run_count(&self) -> usize {
        self.sub_bases.iter().map(|b| b.runs.len()).sum()
    }

    /// Sum of all run lengths; equals `n` for a well-formed base.
    pub fn covered(&self) -> usize {
        self.sub_bases
            .iter()
            .flat_map(|b| b.runs.iter())
            .map(|r| r.length)
            .sum()
    }

    /// Every `(origin, slope, run)` sorted by run start.
    pub fn lines_in_order(&self) -> Vec<(f64, f64, Run)> {
        let mut lines: Vec<_> = self
            .sub_bases
            .iter()
            .flat_map(|b| b.runs.iter().map(move |r| (b.origin, b.slope, *r)))
            .collect();
        lines.sort_by_key(|&(_, _, r)| r.start);
        lines
    }

    /// Checks that runs tile `[0, n)` exactly once.
    pub fn check_coverage(&self) -> Result<()> {
        let lines = self.lines_in_order();
        let mut next = 0usize;
        for (_, _, run) in &lines {
            if run.length == 0 {
                return Err(Error::Coverage(format!("empty run at {}", run.start)));
            }
            if run.start != next {
                return Err(Error::Coverage(format!(
                    "expected a run starting at {next}, found {}",
                    run.start
                )));
            }
            next = run.end();
        }
        if next != self.n {
            return Err(Error::Coverage(format!(
                "runs end at {next}, series has {} samples",
                self.n
            )));
        }
        Ok(())
    }

    /// Base-only reconstruction.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for b in &self.sub_bases {
            for run in &b.runs {
                for (offset, slot) in out[run.start..run.end()].iter_mut().enumerate() {
                    *slot = predict(b.origin, b.slope, offset);
                }
            }
        }
        out
    }
}

/// Residuals quantized to integer symbols at step `eps_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStream {
    pub symbols: Vec<u32>,
    pub r_min: f64,
    pub r_max: f64,
    pub eps_r: f64,
}

impl ResidualStream {
    /// Largest symbol the stream may contain.
    pub fn max_symbol(&self) -> u32 {
        max_symbol(self.r_min, self.r_max, self.eps_r)
    }

    pub fn alphabet_size(&self) -> u32 {
        self.max_symbol().saturating_add(1)
    }
}

pub(crate) fn max_symbol(r_min: f64, r_max: f64, eps_r: f64) -> u32 {
    let q = ((r_max - r_min) / eps_r).floor();
    if q <= 0.0 {
        0
    } else {
        q.min(u32::MAX as f64 - 1.0) as u32
    }
}

/// Parameters and metadata recorded in a container header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Header {
    pub lossless: bool,
    pub base_entropy_coded: bool,
    pub residuals_present: bool,
    pub backend: u8,
    pub decimals: u8,
    pub n: u64,
    pub epsilon: f64,
    pub eps_b: f64,
    pub lambda: f64,
    pub eps_r: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub eps_hat_max: f64,
    pub sub_base_count: u32,
}

/// A self-contained compressed series: header, base section and residual
/// section. An empty residual section means base-only reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedArtifact {
    pub header: Header,
    pub base_bytes: Vec<u8>,
    pub residual_bytes: Vec<u8>,
}

/// Sizes of the two halves of an artifact, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeAccount {
    /// Base section plus the fixed container overhead.
    pub base: usize,
    /// Residual section.
    pub residual: usize,
}

impl SizeAccount {
    pub fn total(&self) -> usize {
        self.base + self.residual
    }
}

/// Maximum absolute pointwise error between two equally long sequences.
pub fn max_abs_error(original: &[f64], reconstructed: &[f64]) -> Result<f64> {
    worst_error(original, reconstructed).map(|(_, e)| e)
}

/// Index and magnitude of the largest absolute error. Empty input yields
/// `(0, 0.0)`.
pub fn worst_error(original: &[f64], reconstructed: &[f64]) -> Result<(usize, f64)> {
    if original.len() != reconstructed.len() {
        return Err(Error::LengthMismatch {
            expected: original.len(),
            actual: reconstructed.len(),
        });
    }
    Ok(original
        .iter()
        .zip(reconstructed)
        .map(|(a, b)| (b - a).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, e)| if e > best.1 { (i, e) } else { best }))
}

/// `S / (S_b + S_r)`.
pub fn compression_ratio(original_bytes: usize, sizes: SizeAccount) -> Result<f64> {
    if original_bytes == 0 {
        return Err(invalid("original_bytes", "must be > 0"));
    }
    if sizes.total() == 0 {
        return Err(invalid("compressed size", "must be > 0"));
    }
    Ok(original_bytes as f64 / sizes.total() as f64)
}
