//! Residuals against the base lines and their uniform quantization.

use crate::error::{invalid, Error, Result};
use crate::model::{max_symbol, predict, value_bounds, KnowledgeBase, ResidualStream};

/// `v_t - (origin + slope * (t - start))` for every sample.
pub fn compute_residuals(values: &[f64], base: &KnowledgeBase) -> Result<Vec<f64>> {
    if base.n != values.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            actual: base.n,
        });
    }
    base.check_coverage()?;
    let mut residuals = vec![0.0; values.len()];
    for b in &base.sub_bases {
        for run in &b.runs {
            let (seg, out) = (&values[run.start..run.end()], &mut residuals[run.start..run.end()]);
            for (offset, (r, v)) in out.iter_mut().zip(seg).enumerate() {
                *r = v - predict(b.origin, b.slope, offset);
            }
        }
    }
    Ok(residuals)
}

/// `floor((r - r_min) / eps_r)` per residual.
pub fn quantize(residuals: &[f64], eps_r: f64) -> Result<ResidualStream> {
    if !(eps_r.is_finite() && eps_r > 0.0) {
        return Err(invalid("eps_r", format!("{eps_r} must be finite and > 0")));
    }
    if residuals.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (r_min, r_max) = value_bounds(residuals);
    if !(r_min.is_finite() && r_max.is_finite()) {
        return Err(invalid("residuals", "must be finite"));
    }
    let span = ((r_max - r_min) / eps_r).floor();
    if span >= u32::MAX as f64 - 1.0 {
        return Err(invalid(
            "eps_r",
            format!("step {eps_r} is too fine for a residual range of {}", r_max - r_min),
        ));
    }
    let top = max_symbol(r_min, r_max, eps_r);
    let symbols = residuals
        .iter()
        .map(|&r| {
            let q = ((r - r_min) / eps_r).floor();
            if q <= 0.0 {
                0
            } else {
                (q as u32).min(top)
            }
        })
        .collect();
    Ok(ResidualStream {
        symbols,
        r_min,
        r_max,
        eps_r,
    })
}

/// Bin midpoints `r_min + (q + 0.5) * eps_r`, clamped to `[r_min, r_max]`.
pub fn dequantize(stream: &ResidualStream) -> Vec<f64> {
    stream
        .symbols
        .iter()
        .map(|&q| dequantize_one(stream, q))
        .collect()
}

#[inline]
pub(crate) fn dequantize_one(stream: &ResidualStream, q: u32) -> f64 {
    (stream.r_min + (q as f64 + 0.5) * stream.eps_r).clamp(stream.r_min, stream.r_max)
}

/// Re-expresses a stream at a coarser step by quantizing its midpoints.
pub fn requantize(stream: &ResidualStream, coarser_eps_r: f64) -> Result<ResidualStream> {
    if !(coarser_eps_r.is_finite() && coarser_eps_r >= stream.eps_r) {
        return Err(Error::ResolutionTooFine {
            requested: coarser_eps_r,
            stored: stream.eps_r,
        });
    }
    if coarser_eps_r == stream.eps_r {
        return Ok(stream.clone());
    }
    quantize(&dequantize(stream), coarser_eps_r)
}
