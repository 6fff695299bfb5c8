//! The compression pipeline: plan intervals, extract cones, build the
//! knowledge base, quantize residuals and entropy-code both sections.

use crate::container::{self, CONTAINER_OVERHEAD};
use crate::entropy;
use crate::error::{invalid, Error, Result};
use crate::knowledge_base::build_base;
use crate::model::{
    max_symbol, predict, CompressedArtifact, ErrorThresholds, Header, KnowledgeBase,
    ResidualStream, SizeAccount, TimeSeries,
};
use crate::residual::{compute_residuals, dequantize_one, quantize, requantize};
use crate::segmentation::{extract_semantics, plan_intervals};

/// Largest decimal precision probed when looking for fixed-precision input.
pub const MAX_DECIMALS: u32 = 8;

/// Resolution requested from [`decompress`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    /// The finest resolution the artifact holds.
    Stored,
    /// Any maximum absolute error at or above the stored target.
    Epsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecOptions {
    /// Entropy-code the base section.
    pub base_entropy: bool,
    /// Switch to exact fixed-precision coding when the input has at most
    /// [`MAX_DECIMALS`] decimals and the target is finer than half a unit in
    /// the last place.
    pub detect_precision: bool,
}

impl Default for CodecOptions {
    fn default() -> Self {
        Self {
            base_entropy: true,
            detect_precision: true,
        }
    }
}

/// Statistics of one compression run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub n: usize,
    pub intervals: usize,
    pub default_interval_len: usize,
    pub cones: usize,
    pub sub_bases: usize,
    pub eps_hat_max: f64,
    pub lossless: bool,
    pub decimals: Option<u32>,
    pub residual_alphabet: u32,
    pub sizes: SizeAccount,
}

pub fn compress(x: &TimeSeries, thresholds: ErrorThresholds, lambda: f64) -> Result<CompressedArtifact> {
    compress_with(x, thresholds, lambda, CodecOptions::default()).map(|(a, _)| a)
}

pub fn compress_with(
    x: &TimeSeries,
    thresholds: ErrorThresholds,
    lambda: f64,
    options: CodecOptions,
) -> Result<(CompressedArtifact, CompressionReport)> {
    let decimals = if options.detect_precision {
        detect_decimals(x.values(), MAX_DECIMALS)
    } else {
        None
    };
    match decimals {
        Some(d) if thresholds.epsilon() < lossless_step(d) => {
            encode_series(x, thresholds.epsilon_b(), lambda, Mode::Lossless(d), thresholds.epsilon(), options)
        }
        _ => {
            if thresholds.epsilon_r() <= 0.0 && thresholds.epsilon() == 0.0 {
                return Err(invalid(
                    "epsilon",
                    "zero error needs fixed-precision input; use compress_lossless",
                ));
            }
            encode_series(x, thresholds.epsilon_b(), lambda, Mode::Lossy(thresholds), thresholds.epsilon(), options)
        }
    }
}

/// Exact coding of input known to carry at most `decimals` decimal places.
pub fn compress_lossless(x: &TimeSeries, eps_b: f64, lambda: f64, decimals: u32) -> Result<CompressedArtifact> {
    compress_lossless_with(x, eps_b, lambda, decimals, CodecOptions::default()).map(|(a, _)| a)
}

pub fn compress_lossless_with(
    x: &TimeSeries,
    eps_b: f64,
    lambda: f64,
    decimals: u32,
    options: CodecOptions,
) -> Result<(CompressedArtifact, CompressionReport)> {
    if decimals > 15 {
        return Err(invalid("decimals", format!("{decimals} exceeds 15")));
    }
    let offending: Vec<usize> = x
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| !is_exact_at(v, decimals))
        .map(|(i, _)| i)
        .take(32)
        .collect();
    if !offending.is_empty() {
        return Err(Error::PrecisionExceeded {
            decimals,
            indices: offending,
        });
    }
    encode_series(x, eps_b, lambda, Mode::Lossless(decimals), 0.0, options)
}

#[derive(Clone, Copy)]
enum Mode {
    Lossy(ErrorThresholds),
    Lossless(u32),
}

/// Residual step that makes rounding to `decimals` places exact.
pub fn lossless_step(decimals: u32) -> f64 {
    0.5 / 10f64.powi(decimals as i32)
}

fn encode_series(
    x: &TimeSeries,
    eps_b: f64,
    lambda: f64,
    mode: Mode,
    epsilon: f64,
    options: CodecOptions,
) -> Result<(CompressedArtifact, CompressionReport)> {
    let values = x.values();
    let n = values.len();
    let plan = plan_intervals(values, eps_b, lambda)?;
    let cones = extract_semantics(values, &plan)?;
    let base = build_base(&cones, n, eps_b, lambda)?;
    let residuals = compute_residuals(values, &base)?;
    let worst = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let (lossless, decimals, eps_r, needs_residuals) = match mode {
        Mode::Lossless(d) => (true, Some(d), lossless_step(d), true),
        Mode::Lossy(t) => {
            let needed = t.epsilon() <= base.eps_hat_max || worst > t.epsilon();
            (false, None, t.epsilon_r(), needed)
        }
    };

    let (stream, residual_bytes) = if needs_residuals {
        if eps_r <= 0.0 {
            return Err(invalid("epsilon_r", "must be > 0 when residuals are stored"));
        }
        let stream = quantize(&residuals, eps_r)?;
        let bytes = entropy::encode(&stream.symbols, stream.alphabet_size())?;
        (Some(stream), bytes)
    } else {
        (None, Vec::new())
    };

    let raw_base = container::encode_base(&base);
    let base_bytes = if options.base_entropy {
        let symbols: Vec<u32> = raw_base.iter().map(|&b| b as u32).collect();
        entropy::encode(&symbols, 256)?
    } else {
        raw_base
    };

    let header = Header {
        lossless,
        base_entropy_coded: options.base_entropy,
        residuals_present: stream.is_some(),
        backend: entropy::BACKEND_ID,
        decimals: decimals.unwrap_or(0) as u8,
        n: n as u64,
        epsilon,
        eps_b,
        lambda,
        eps_r: stream.as_ref().map_or(0.0, |s| s.eps_r),
        r_min: stream.as_ref().map_or(0.0, |s| s.r_min),
        r_max: stream.as_ref().map_or(0.0, |s| s.r_max),
        eps_hat_max: base.eps_hat_max,
        sub_base_count: u32::try_from(base.sub_bases.len())
            .map_err(|_| invalid("series", "too many sub-bases"))?,
    };
    let artifact = CompressedArtifact {
        header,
        base_bytes,
        residual_bytes,
    };
    let report = CompressionReport {
        n,
        intervals: plan.intervals.len(),
        default_interval_len: plan.default_len,
        cones: cones.len(),
        sub_bases: base.sub_bases.len(),
        eps_hat_max: base.eps_hat_max,
        lossless,
        decimals,
        residual_alphabet: stream.as_ref().map_or(0, |s| s.alphabet_size()),
        sizes: artifact.sizes(),
    };
    Ok((artifact, report))
}

impl CompressedArtifact {
    /// `S_b` (base section plus container overhead) and `S_r`.
    pub fn sizes(&self) -> SizeAccount {
        SizeAccount {
            base: self.base_bytes.len() + CONTAINER_OVERHEAD,
            residual: self.residual_bytes.len(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        container::serialize(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        container::deserialize(bytes)
    }

    /// Finest maximum absolute error this artifact guarantees.
    pub fn stored_epsilon(&self) -> f64 {
        self.header.epsilon
    }

    pub fn knowledge_base(&self) -> Result<KnowledgeBase> {
        let raw = if self.header.base_entropy_coded {
            entropy::decode_stream(&self.base_bytes)?
                .into_iter()
                .map(|s| u8::try_from(s).map_err(|_| Error::Corrupt("base byte out of range".into())))
                .collect::<Result<Vec<u8>>>()?
        } else {
            self.base_bytes.clone()
        };
        container::decode_base(&raw, &self.header)
    }

    pub fn residual_stream(&self) -> Result<Option<ResidualStream>> {
        if !self.header.residuals_present {
            return Ok(None);
        }
        let h = &self.header;
        if !(h.eps_r.is_finite() && h.eps_r > 0.0 && h.r_min.is_finite() && h.r_max.is_finite() && h.r_min <= h.r_max) {
            return Err(Error::Corrupt("invalid residual quantizer in header".into()));
        }
        let alphabet = max_symbol(h.r_min, h.r_max, h.eps_r).saturating_add(1);
        let n = usize::try_from(h.n).map_err(|_| Error::Corrupt("n does not fit".into()))?;
        let symbols = entropy::decode(&self.residual_bytes, n, alphabet)?;
        Ok(Some(ResidualStream {
            symbols,
            r_min: h.r_min,
            r_max: h.r_max,
            eps_r: h.eps_r,
        }))
    }

    /// An artifact serving resolution `epsilon`, with residuals requantized
    /// from the stored stream (or dropped when the base alone suffices).
    pub fn at_resolution(&self, epsilon: f64) -> Result<CompressedArtifact> {
        let stored = self.stored_epsilon();
        if !(epsilon.is_finite() && epsilon >= stored) {
            return Err(Error::ResolutionTooFine {
                requested: epsilon,
                stored,
            });
        }
        let mut derived = self.clone();
        derived.header.epsilon = epsilon;
        if self.header.lossless && epsilon < lossless_step(self.header.decimals as u32) {
            return Ok(derived);
        }
        derived.header.lossless = false;
        derived.header.decimals = 0;
        let Some(stream) = self.residual_stream()? else {
            return Ok(derived);
        };
        let base_error = stream.r_min.abs().max(stream.r_max.abs());
        if epsilon >= base_error {
            derived.header.residuals_present = false;
            derived.header.eps_r = 0.0;
            derived.header.r_min = 0.0;
            derived.header.r_max = 0.0;
            derived.residual_bytes = Vec::new();
            return Ok(derived);
        }
        if epsilon <= stream.eps_r {
            return Ok(derived);
        }
        // Error stays within stored_step / 2 + epsilon / 2 <= epsilon.
        let coarse = requantize(&stream, epsilon)?;
        derived.header.eps_r = coarse.eps_r;
        derived.header.r_min = coarse.r_min;
        derived.header.r_max = coarse.r_max;
        derived.residual_bytes = entropy::encode(&coarse.symbols, coarse.alphabet_size())?;
        Ok(derived)
    }
}

pub fn decompress(artifact: &CompressedArtifact, at: Resolution) -> Result<TimeSeries> {
    let owned;
    let artifact = match at {
        Resolution::Stored => artifact,
        Resolution::Epsilon(e) => {
            owned = artifact.at_resolution(e)?;
            &owned
        }
    };
    let base = artifact.knowledge_base()?;
    let stream = artifact.residual_stream()?;

    let mut values = Vec::new();
    values
        .try_reserve_exact(base.n)
        .map_err(|_| Error::Corrupt(format!("cannot allocate {} samples", base.n)))?;
    values.resize(base.n, 0.0);
    for b in &base.sub_bases {
        for run in &b.runs {
            for (offset, slot) in values[run.start..run.end()].iter_mut().enumerate() {
                *slot = predict(b.origin, b.slope, offset);
            }
        }
    }
    if let Some(stream) = &stream {
        for (v, &q) in values.iter_mut().zip(&stream.symbols) {
            *v += dequantize_one(stream, q);
        }
    }
    if artifact.header.lossless {
        let scale = 10f64.powi(artifact.header.decimals as i32);
        for v in &mut values {
            *v = (*v * scale).round() / scale;
        }
    }
    TimeSeries::new("decompressed", values)
        .map_err(|e| Error::Corrupt(format!("reconstruction failed: {e}")))
}

/// Compresses each column independently into one multi-column container.
pub fn compress_columns(
    columns: &[TimeSeries],
    epsilon: f64,
    eps_b_pct: f64,
    lambda: f64,
) -> Result<Vec<u8>> {
    let artifacts = columns
        .iter()
        .map(|c| compress(c, ErrorThresholds::from_range_pct(c, epsilon, eps_b_pct)?, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(container::serialize_multi(&artifacts))
}

pub fn decompress_columns(bytes: &[u8], at: Resolution) -> Result<Vec<TimeSeries>> {
    container::deserialize_multi(bytes)?
        .iter()
        .map(|a| decompress(a, at))
        .collect()
}

/// Whether `v` is the double nearest to some number with `decimals` places.
pub fn is_exact_at(v: f64, decimals: u32) -> bool {
    let scale = 10f64.powi(decimals as i32);
    let scaled = v * scale;
    scaled.abs() < 9.0e15 && (scaled.round() / scale) == v
}

/// Smallest decimal precision (up to `max`) at which every value is exact.
pub fn detect_decimals(values: &[f64], max: u32) -> Option<u32> {
    (0..=max).find(|&d| values.iter().all(|&v| is_exact_at(v, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::max_abs_error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_walk(n: usize, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = 0.0;
        let values = (0..n)
            .map(|_| {
                v += rng.random_range(-1.0..1.0);
                v
            })
            .collect();
        TimeSeries::new("walk", values).unwrap()
    }

    #[test]
    fn loose_target_drops_residuals() {
        let x = random_walk(2000, 1);
        let t = ErrorThresholds::from_range_pct(&x, 1000.0, 5.0).unwrap();
        let a = compress(&x, t, 0.01).unwrap();
        assert!(!a.header.residuals_present);
        assert!(a.residual_bytes.is_empty());
        let y = decompress(&a, Resolution::Stored).unwrap();
        let err = max_abs_error(x.values(), y.values()).unwrap();
        assert!(err <= a.header.eps_hat_max * (1.0 + 1e-9));
    }

    #[test]
    fn linear_series_has_one_sub_base() {
        let values: Vec<f64> = (0..500).map(|i| 3.0 + 0.25 * i as f64).collect();
        let x = TimeSeries::new("line", values).unwrap();
        let t = ErrorThresholds::with_target(1e-3, 1.0).unwrap();
        let (a, report) = compress_with(&x, t, 1.0, CodecOptions { detect_precision: false, ..Default::default() }).unwrap();
        assert_eq!(report.sub_bases, 1);
        let stream = a.residual_stream().unwrap().unwrap();
        assert!(stream.symbols.iter().all(|&q| q == stream.symbols[0]));
    }

    #[test]
    fn random_walk_round_trip_meets_target() {
        let x = random_walk(10_000, 2);
        let t = ErrorThresholds::from_range_pct(&x, 1e-3, 5.0).unwrap();
        let a = compress(&x, t, 0.001).unwrap();
        let y = decompress(&a, Resolution::Stored).unwrap();
        assert!(max_abs_error(x.values(), y.values()).unwrap() <= 1e-3);
        let bytes = a.to_bytes();
        assert_eq!(bytes.len(), a.sizes().total());
        assert_eq!(CompressedArtifact::from_bytes(&bytes).unwrap(), a);
    }

    #[test]
    fn constant_series_is_exact() {
        let x = TimeSeries::new("c", vec![4.2; 300]).unwrap();
        let t = ErrorThresholds::from_range_pct(&x, 1e-4, 5.0).unwrap();
        let a = compress(&x, t, 0.5).unwrap();
        let y = decompress(&a, Resolution::Stored).unwrap();
        assert_eq!(y.values(), x.values());
    }

    #[test]
    fn coarser_resolutions_hold_their_bound() {
        let x = random_walk(5000, 3);
        let t = ErrorThresholds::from_range_pct(&x, 1e-4, 5.0).unwrap();
        let a = compress(&x, t, 0.01).unwrap();
        let mut last = usize::MAX;
        for e in [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 100.0] {
            let derived = a.at_resolution(e).unwrap();
            let y = decompress(&a, Resolution::Epsilon(e)).unwrap();
            assert!(max_abs_error(x.values(), y.values()).unwrap() <= e, "e = {e}");
            let size = derived.sizes().total();
            assert!(size <= last);
            last = size;
        }
        assert!(matches!(
            decompress(&a, Resolution::Epsilon(1e-5)),
            Err(Error::ResolutionTooFine { .. })
        ));
    }

    #[test]
    fn lossless_two_decimals() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let values: Vec<f64> = (0..3000)
            .map(|i| ((5.0 + (i as f64 / 50.0).sin() * 3.0 + rng.random_range(-0.5..0.5)) * 100.0).round() / 100.0)
            .collect();
        let x = TimeSeries::new("wind", values).unwrap();
        let a = compress_lossless(&x, 0.5, 0.01, 2).unwrap();
        assert!(a.header.lossless);
        let y = decompress(&a, Resolution::Stored).unwrap();
        assert_eq!(y.values(), x.values());
        let err = compress_lossless(&x, 0.5, 0.01, 1).unwrap_err();
        assert!(matches!(err, Error::PrecisionExceeded { decimals: 1, .. }));
    }

    #[test]
    fn lossless_integers() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 31) % 97) as f64).collect();
        let x = TimeSeries::new("ints", values).unwrap();
        let a = compress_lossless(&x, 5.0, 0.1, 0).unwrap();
        assert_eq!(a.header.eps_r, 0.5);
        assert_eq!(decompress(&a, Resolution::Stored).unwrap().values(), x.values());
    }

    #[test]
    fn integer_ramp_is_tiny() {
        let values: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        let x = TimeSeries::new("ramp", values).unwrap();
        let a = compress_lossless(&x, 100.0, 1.0, 0).unwrap();
        assert!(a.sizes().total() < 400, "{:?}", a.sizes());
        assert_eq!(decompress(&a, Resolution::Stored).unwrap().values(), x.values());
    }

    #[test]
    fn fine_target_on_fixed_precision_switches_to_exact() {
        let values: Vec<f64> = (0..400).map(|i| ((i * 13) % 50) as f64 / 100.0).collect();
        let x = TimeSeries::new("p", values).unwrap();
        let t = ErrorThresholds::from_range_pct(&x, 1e-4, 5.0).unwrap();
        let (a, report) = compress_with(&x, t, 0.1, CodecOptions::default()).unwrap();
        assert!(report.lossless);
        assert_eq!(report.decimals, Some(2));
        assert_eq!(decompress(&a, Resolution::Stored).unwrap().values(), x.values());
        assert!(decompress(&a, Resolution::Epsilon(1e-5)).is_err());
        let y = decompress(&a, Resolution::Epsilon(0.02)).unwrap();
        assert!(max_abs_error(x.values(), y.values()).unwrap() <= 0.02);
    }

    #[test]
    fn zero_target_without_fixed_precision_is_rejected() {
        let x = random_walk(100, 5);
        let t = ErrorThresholds::new(0.0, 1.0, 0.0).unwrap();
        assert!(compress(&x, t, 0.5).is_err());
    }

    #[test]
    fn decimal_detection() {
        assert_eq!(detect_decimals(&[1.0, 2.0, -3.0], 8), Some(0));
        assert_eq!(detect_decimals(&[1.25, 0.1], 8), Some(2));
        assert_eq!(detect_decimals(&[std::f64::consts::PI], 8), None);
    }

    #[test]
    fn multi_column_round_trip() {
        let cols = vec![random_walk(300, 6), random_walk(500, 7)];
        let bytes = compress_columns(&cols, 1e-3, 5.0, 0.01).unwrap();
        let back = decompress_columns(&bytes, Resolution::Stored).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in cols.iter().zip(&back) {
            assert!(max_abs_error(a.values(), b.values()).unwrap() <= 1e-3);
        }
    }
}
