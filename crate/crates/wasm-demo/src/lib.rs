//! Browser bindings for the codec demo page in `www/`.
//!
//! Each binding is a thin wrapper over a plain function, so that the logic
//! can be exercised natively.

use shrink_core::codec::{compress_with, CodecOptions};
use shrink_core::datasets::{generate, Kind};
use shrink_core::{compression_ratio, decompress, max_abs_error, ErrorThresholds, Resolution, TimeSeries};
use wasm_bindgen::prelude::*;

/// Outcome of compressing one series.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Compressed {
    reconstruction: Vec<f64>,
    base: Vec<f64>,
    ratio: f64,
    max_error: f64,
    base_bytes: usize,
    residual_bytes: usize,
    cones: usize,
    sub_bases: usize,
    intervals: usize,
    lossless: bool,
}

#[wasm_bindgen]
impl Compressed {
    /// Values decoded at the stored resolution.
    #[wasm_bindgen(getter)]
    pub fn reconstruction(&self) -> Vec<f64> {
        self.reconstruction.clone()
    }

    /// Values predicted by the knowledge base alone.
    #[wasm_bindgen(getter)]
    pub fn base(&self) -> Vec<f64> {
        self.base.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    #[wasm_bindgen(getter = maxError)]
    pub fn max_error(&self) -> f64 {
        self.max_error
    }

    #[wasm_bindgen(getter = baseBytes)]
    pub fn base_bytes(&self) -> usize {
        self.base_bytes
    }

    #[wasm_bindgen(getter = residualBytes)]
    pub fn residual_bytes(&self) -> usize {
        self.residual_bytes
    }

    #[wasm_bindgen(getter)]
    pub fn cones(&self) -> usize {
        self.cones
    }

    #[wasm_bindgen(getter = subBases)]
    pub fn sub_bases(&self) -> usize {
        self.sub_bases
    }

    #[wasm_bindgen(getter)]
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    #[wasm_bindgen(getter)]
    pub fn lossless(&self) -> bool {
        self.lossless
    }
}

/// A synthetic series by dataset name, e.g. `windspeed` or `power`.
pub fn dataset_values(name: &str, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    let kind = Kind::from_name(name).ok_or_else(|| format!("unknown dataset {name:?}"))?;
    Ok(generate(kind, n, seed).into_values())
}

/// Compress `values` to maximum error `epsilon`, with the base threshold
/// given as a percentage of the value range.
pub fn compress_values(values: &[f64], epsilon: f64, eps_b_pct: f64, lambda: f64) -> Result<Compressed, String> {
    let series = TimeSeries::new("input", values.to_vec()).map_err(|e| e.to_string())?;
    let thresholds = ErrorThresholds::from_range_pct(&series, epsilon, eps_b_pct).map_err(|e| e.to_string())?;
    let (artifact, report) =
        compress_with(&series, thresholds, lambda, CodecOptions::default()).map_err(|e| e.to_string())?;
    let restored = decompress(&artifact, Resolution::Stored).map_err(|e| e.to_string())?;
    let base = artifact.knowledge_base().map_err(|e| e.to_string())?.reconstruct();
    let sizes = artifact.sizes();
    Ok(Compressed {
        max_error: max_abs_error(values, restored.values()).map_err(|e| e.to_string())?,
        reconstruction: restored.into_values(),
        base,
        ratio: compression_ratio(series.raw_bytes(), sizes).map_err(|e| e.to_string())?,
        base_bytes: sizes.base,
        residual_bytes: sizes.residual,
        cones: report.cones,
        sub_bases: report.sub_bases,
        intervals: report.intervals,
        lossless: report.lossless,
    })
}

/// Store once at `finest`, then serve each of `resolutions` from the stored
/// artifact. Returns flattened `(epsilon, bytes, max_error)` triples.
pub fn sweep_values(
    values: &[f64],
    finest: f64,
    eps_b_pct: f64,
    lambda: f64,
    resolutions: &[f64],
) -> Result<Vec<f64>, String> {
    let series = TimeSeries::new("input", values.to_vec()).map_err(|e| e.to_string())?;
    let thresholds = ErrorThresholds::from_range_pct(&series, finest, eps_b_pct).map_err(|e| e.to_string())?;
    let (artifact, _) =
        compress_with(&series, thresholds, lambda, CodecOptions::default()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(resolutions.len() * 3);
    for &eps in resolutions {
        let coarse = artifact.at_resolution(eps).map_err(|e| e.to_string())?;
        let restored = decompress(&coarse, Resolution::Stored).map_err(|e| e.to_string())?;
        out.push(eps);
        out.push(coarse.sizes().total() as f64);
        out.push(max_abs_error(values, restored.values()).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn dataset(name: &str, n: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    dataset_values(name, n, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compress(values: &[f64], epsilon: f64, eps_b_pct: f64, lambda: f64) -> Result<Compressed, JsError> {
    compress_values(values, epsilon, eps_b_pct, lambda).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = resolutionSweep)]
pub fn resolution_sweep(
    values: &[f64],
    finest: f64,
    eps_b_pct: f64,
    lambda: f64,
    resolutions: &[f64],
) -> Result<Vec<f64>, JsError> {
    sweep_values(values, finest, eps_b_pct, lambda, resolutions).map_err(|e| JsError::new(&e))
}
