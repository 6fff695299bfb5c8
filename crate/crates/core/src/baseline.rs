//! Reference coder without any semantic modelling: values are uniformly
//! quantized at the target step and range-coded directly.

use crate::entropy;
use crate::error::{Error, Result};
use crate::model::TimeSeries;
use crate::residual::{dequantize, quantize};

/// Encodes `x` with error at most `epsilon / 2`.
///
/// Layout: f64 min, f64 max, f64 step, then the entropy stream.
pub fn uniform_quantization(x: &TimeSeries, epsilon: f64) -> Result<Vec<u8>> {
    let stream = quantize(x.values(), epsilon)?;
    let mut out = Vec::new();
    for v in [stream.r_min, stream.r_max, stream.eps_r] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend(entropy::encode(&stream.symbols, stream.alphabet_size())?);
    Ok(out)
}

pub fn uniform_dequantization(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < 24 {
        return Err(Error::Corrupt("baseline stream truncated".into()));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[i * 8..i * 8 + 8].try_into().unwrap());
    let symbols = entropy::decode_stream(&bytes[24..])?;
    Ok(dequantize(&crate::model::ResidualStream {
        symbols,
        r_min: f(0),
        r_max: f(1),
        eps_r: f(2),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::max_abs_error;

    #[test]
    fn baseline_round_trip_is_bounded() {
        let values: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.01).sin() * 5.0).collect();
        let x = TimeSeries::new("s", values).unwrap();
        let bytes = uniform_quantization(&x, 1e-3).unwrap();
        let y = uniform_dequantization(&bytes).unwrap();
        assert!(max_abs_error(x.values(), &y).unwrap() <= 0.5e-3 + 1e-12);
        assert!(uniform_dequantization(&bytes[..10]).is_err());
    }
}
