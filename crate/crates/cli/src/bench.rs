//! Desk-scale experiment drivers.
//!
//! Every driver is deterministic under its seed. Independent cells run on the
//! global rayon pool and are gathered in input order.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use shrink_core::codec::{compress_lossless_with, detect_decimals, MAX_DECIMALS};
use shrink_core::{
    compress_with, decompress, max_abs_error, worst_error, CodecOptions, CompressedArtifact,
    CompressionReport, ErrorThresholds, Resolution, TimeSeries,
};

use crate::error::{config, Result};

/// The nine target errors of the compression-ratio sweep.
pub const DEFAULT_GRID: [f64; 9] = [0.01, 0.0075, 0.005, 0.0025, 0.001, 0.00075, 0.0005, 0.00025, 0.0001];

/// The ten resolutions served in the edge simulation.
pub const EDGE_RESOLUTIONS: [f64; 10] = [
    0.01, 0.0075, 0.005, 0.0025, 0.001, 0.00075, 0.0005, 0.00025, 0.0001, 0.00001,
];

pub const LAMBDA_GRID: [f64; 4] = [1e-5, 1e-3, 1e-1, 1.0];

pub const EPS_B_GRID: [f64; 3] = [5.0, 8.0, 10.0];

/// Base threshold as a percentage of the data range.
pub const DEFAULT_EPS_B_PCT: f64 = 5.0;

/// The general-purpose base threshold.
pub const GENERAL_EPS_B_PCT: f64 = 15.0;

pub const DEFAULT_LAMBDA: f64 = 1e-3;

/// Drops targets finer than a tenth of the last decimal place: all of them
/// are served by the same exact encoding.
pub fn grid_for(grid: &[f64], decimals: Option<u32>) -> Vec<f64> {
    match decimals {
        Some(d) if d <= 2 => {
            let floor = 10f64.powi(-(d as i32) - 1) * (1.0 - 1e-9);
            grid.iter().copied().filter(|&e| e >= floor).collect()
        }
        _ => grid.to_vec(),
    }
}

/// Shared compression parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub eps_b_pct: f64,
    pub lambda: f64,
    /// Residual step; the target error when `None`.
    pub epsilon_r: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            eps_b_pct: DEFAULT_EPS_B_PCT,
            lambda: DEFAULT_LAMBDA,
            epsilon_r: None,
        }
    }
}

impl Params {
    pub fn thresholds(&self, x: &TimeSeries, epsilon: f64) -> Result<ErrorThresholds> {
        let base = ErrorThresholds::from_range_pct(x, epsilon, self.eps_b_pct)?;
        Ok(match self.epsilon_r {
            Some(r) => ErrorThresholds::new(epsilon, base.epsilon_b(), r)?,
            None => base,
        })
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn throughput(raw_bytes: usize, secs: f64) -> f64 {
    if secs > 0.0 {
        raw_bytes as f64 / 1e6 / secs
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub dataset: String,
    /// `target` for grid rows, `lossless` for the exact row.
    pub mode: &'static str,
    /// Requested error; 0 for the lossless row.
    pub epsilon: f64,
    pub n: usize,
    pub cr: f64,
    pub base_bytes: usize,
    pub residual_bytes: usize,
    pub max_error: f64,
    /// Whether fixed-precision exact coding was used.
    pub exact: bool,
    pub compress_ms: f64,
    pub throughput_mb_s: f64,
}

fn ratio_row(
    x: &TimeSeries,
    mode: &'static str,
    epsilon: f64,
    result: (CompressedArtifact, CompressionReport),
    secs: f64,
) -> Result<RatioRow> {
    let (artifact, report) = result;
    let restored = decompress(&artifact, Resolution::Stored)?;
    Ok(RatioRow {
        dataset: x.name().to_string(),
        mode,
        epsilon,
        n: x.len(),
        cr: x.raw_bytes() as f64 / artifact.to_bytes().len() as f64,
        base_bytes: report.sizes.base,
        residual_bytes: report.sizes.residual,
        max_error: max_abs_error(x.values(), restored.values())?,
        exact: report.lossless,
        compress_ms: secs * 1e3,
        throughput_mb_s: throughput(x.raw_bytes(), secs),
    })
}

/// CR per target error, plus an exact row when the input has fixed precision.
pub fn bench_ratio(x: &TimeSeries, grid: &[f64], params: &Params) -> Result<Vec<RatioRow>> {
    let options = CodecOptions::default();
    let mut rows = grid
        .par_iter()
        .map(|&e| {
            let t = params.thresholds(x, e)?;
            let (result, secs) = timed(|| compress_with(x, t, params.lambda, options));
            ratio_row(x, "target", e, result?, secs)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(d) = detect_decimals(x.values(), MAX_DECIMALS) {
        let eps_b = params.thresholds(x, grid.first().copied().unwrap_or(0.01))?.epsilon_b();
        let (result, secs) = timed(|| compress_lossless_with(x, eps_b, params.lambda, d, options));
        rows.push(ratio_row(x, "lossless", 0.0, result?, secs)?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub copies: usize,
    pub points: usize,
    pub raw_bytes: usize,
    pub base_bytes: usize,
    pub residual_bytes: usize,
    pub total_bytes: usize,
    pub sub_bases: usize,
    pub cones: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// `S_b` of the last prefix over `S_b` of the first.
    pub base_growth: f64,
    /// `S_r` of the last prefix over `S_r` of the first.
    pub residual_growth: f64,
    /// Least-squares fit of `S_r` against the prefix length.
    pub residual_fit: LinearFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    }
}

/// Parameters of the growth experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub copies: usize,
    pub sigma: f64,
    pub epsilon: f64,
    pub seed: u64,
}

/// Replicates `base` with fresh Gaussian noise per copy and compresses every
/// cumulative prefix of whole copies.
///
/// The base threshold is fixed from the noise-free range so every prefix is
/// segmented on the same grid.
pub fn bench_growth(base: &TimeSeries, growth: &Growth, params: &Params) -> Result<GrowthReport> {
    if growth.copies == 0 {
        return Err(config("copies", "must be >= 1"));
    }
    let noise = Normal::new(0.0, growth.sigma).map_err(|e| config("sigma", e.to_string()))?;
    let eps_b = params.thresholds(base, growth.epsilon)?.epsilon_b();
    let copies: Vec<Vec<f64>> = (0..growth.copies)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(growth.seed);
            rng.set_stream(c as u64);
            base.values().iter().map(|v| v + noise.sample(&mut rng)).collect()
        })
        .collect();
    let thresholds = match params.epsilon_r {
        Some(r) => ErrorThresholds::new(growth.epsilon, eps_b, r)?,
        None => ErrorThresholds::with_target(growth.epsilon, eps_b)?,
    };

    let rows = (1..=growth.copies)
        .into_par_iter()
        .map(|k| {
            let prefix = TimeSeries::new(base.name(), copies[..k].concat())?;
            let (_, report) = compress_with(&prefix, thresholds, params.lambda, CodecOptions::default())?;
            Ok(GrowthRow {
                copies: k,
                points: prefix.len(),
                raw_bytes: prefix.raw_bytes(),
                base_bytes: report.sizes.base,
                residual_bytes: report.sizes.residual,
                total_bytes: report.sizes.total(),
                sub_bases: report.sub_bases,
                cones: report.cones,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let xs: Vec<f64> = rows.iter().map(|r| r.points as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.residual_bytes as f64).collect();
    Ok(GrowthReport {
        base_growth: last.base_bytes as f64 / first.base_bytes as f64,
        residual_growth: last.residual_bytes as f64 / first.residual_bytes.max(1) as f64,
        residual_fit: linear_fit(&xs, &ys),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub dataset: String,
    /// `lambda` or `eps_b_pct`.
    pub parameter: &'static str,
    pub value: f64,
    pub epsilon: f64,
    pub cr: f64,
    pub intervals: usize,
    pub default_interval_len: usize,
    pub cones: usize,
    pub sub_bases: usize,
    pub base_bytes: usize,
    pub residual_bytes: usize,
    pub compress_ms: f64,
}

fn sweep(
    x: &TimeSeries,
    epsilon: f64,
    parameter: &'static str,
    values: &[f64],
    params_at: impl Fn(f64) -> Params + Sync,
) -> Result<Vec<SweepRow>> {
    values
        .par_iter()
        .map(|&value| {
            let p = params_at(value);
            let t = p.thresholds(x, epsilon)?;
            let (result, secs) = timed(|| compress_with(x, t, p.lambda, CodecOptions::default()));
            let (artifact, report) = result?;
            Ok(SweepRow {
                dataset: x.name().to_string(),
                parameter,
                value,
                epsilon,
                cr: x.raw_bytes() as f64 / artifact.to_bytes().len() as f64,
                intervals: report.intervals,
                default_interval_len: report.default_interval_len,
                cones: report.cones,
                sub_bases: report.sub_bases,
                base_bytes: report.sizes.base,
                residual_bytes: report.sizes.residual,
                compress_ms: secs * 1e3,
            })
        })
        .collect()
}

pub fn bench_lambda(x: &TimeSeries, epsilon: f64, lambdas: &[f64], params: &Params) -> Result<Vec<SweepRow>> {
    sweep(x, epsilon, "lambda", lambdas, |lambda| Params { lambda, ..*params })
}

pub fn bench_eps_b(x: &TimeSeries, epsilon: f64, pcts: &[f64], params: &Params) -> Result<Vec<SweepRow>> {
    sweep(x, epsilon, "eps_b_pct", pcts, |eps_b_pct| Params { eps_b_pct, ..*params })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRequest {
    pub order: usize,
    pub epsilon: f64,
    pub transferred_bytes: usize,
    pub latency_ms: f64,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub dataset: String,
    /// Max local storage: the one stored artifact.
    pub mls: usize,
    /// Average transferred size per request.
    pub ats: f64,
    /// Average processing latency per request, milliseconds.
    pub apl_ms: f64,
    /// Size of shipping the raw series once.
    pub raw_transfer: usize,
    pub base_bytes: usize,
    pub finest_residual_bytes: usize,
    pub requests: Vec<EdgeRequest>,
}

/// Bytes describing a residual quantizer sent alongside a requantized stream.
pub const STREAM_PARAMS_BYTES: usize = 24;

/// Serves `requests` random-order resolution requests from one artifact
/// stored at the finest resolution.
///
/// The first transfer ships the base; each request ships the residual
/// stream requantized for its resolution.
pub fn bench_edge(
    x: &TimeSeries,
    resolutions: &[f64],
    requests: usize,
    seed: u64,
    params: &Params,
) -> Result<EdgeReport> {
    let finest = resolutions
        .iter()
        .copied()
        .min_by(f64::total_cmp)
        .ok_or_else(|| config("resolutions", "empty list"))?;
    let t = params.thresholds(x, finest)?;
    let (stored, _) = compress_with(x, t, params.lambda, CodecOptions::default())?;
    let mls = stored.to_bytes().len();
    let sizes = stored.sizes();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(requests);
    while order.len() < requests {
        let mut round = resolutions.to_vec();
        round.shuffle(&mut rng);
        order.extend(round);
    }
    order.truncate(requests);

    let mut log = Vec::with_capacity(order.len());
    for (i, &epsilon) in order.iter().enumerate() {
        let start = Instant::now();
        let served = stored.at_resolution(epsilon)?;
        let restored = decompress(&served, Resolution::Stored)?;
        let latency_ms = start.elapsed().as_secs_f64() * 1e3;
        let residual = if served.header.residuals_present {
            served.residual_bytes.len() + STREAM_PARAMS_BYTES
        } else {
            0
        };
        let base = if i == 0 { sizes.base } else { 0 };
        let (_, max_error) = worst_error(x.values(), restored.values())?;
        log.push(EdgeRequest {
            order: i,
            epsilon,
            transferred_bytes: base + residual,
            latency_ms,
            max_error,
        });
    }
    let count = log.len().max(1) as f64;
    Ok(EdgeReport {
        dataset: x.name().to_string(),
        mls,
        ats: log.iter().map(|r| r.transferred_bytes as f64).sum::<f64>() / count,
        apl_ms: log.iter().map(|r| r.latency_ms).sum::<f64>() / count,
        raw_transfer: x.raw_bytes(),
        base_bytes: sizes.base,
        finest_residual_bytes: sizes.residual,
        requests: log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub epsilon: f64,
    pub max_error: f64,
    pub worst_index: usize,
    pub n: usize,
}

/// Checks a stored artifact against the original series.
pub fn verify(original: &TimeSeries, artifact: &CompressedArtifact, epsilon: f64) -> Result<VerifyReport> {
    let restored = decompress(artifact, Resolution::Stored)?;
    let (worst_index, max_error) = worst_error(original.values(), restored.values())?;
    Ok(VerifyReport {
        pass: max_error <= epsilon,
        epsilon,
        max_error,
        worst_index,
        n: original.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_truncation() {
        assert_eq!(grid_for(&DEFAULT_GRID, Some(2)), &DEFAULT_GRID[..5]);
        assert_eq!(grid_for(&DEFAULT_GRID, Some(4)), DEFAULT_GRID.to_vec());
        assert_eq!(grid_for(&DEFAULT_GRID, None), DEFAULT_GRID.to_vec());
        assert_eq!(grid_for(&DEFAULT_GRID, Some(1)), &DEFAULT_GRID[..1]);
    }

    #[test]
    fn fit_of_a_line_is_perfect() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&xs, &ys);
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }
}
