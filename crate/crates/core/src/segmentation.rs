//! Fluctuation-scored interval planning and shrinking-cone extraction.
//!
//! The series is cut into windows of a default length. Each window gets a
//! fluctuation level `beta = local_range / global_range` and an adaptive
//! threshold `eps_b * exp(2/3 - beta)`: calm windows tolerate a looser base,
//! busy ones a tighter one. A greedy left-to-right scan then grows cones under
//! the threshold of the window each cone starts in.

use std::f64::consts::E;

use crate::error::{invalid, Error, Result};
use crate::model::{value_bounds, Cone};

/// Exponent offset of the adaptive threshold.
const ADAPTIVE_OFFSET: f64 = 2.0 / 3.0;

/// Largest value the adaptive threshold can take relative to `eps_b`.
pub fn max_adaptive_factor() -> f64 {
    E.powf(ADAPTIVE_OFFSET)
}

/// `eps_b * exp(2/3 - beta)`.
pub fn adaptive_step(eps_b: f64, beta: f64) -> Result<f64> {
    if !(eps_b.is_finite() && eps_b > 0.0) {
        return Err(invalid("eps_b", format!("{eps_b} must be finite and > 0")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid("beta", format!("{beta} must be finite and >= 0")));
    }
    Ok(eps_b * (ADAPTIVE_OFFSET - beta).exp())
}

/// Snaps `v` down onto the grid of step `eps_hat`.
#[inline]
pub fn quantize_origin(v: f64, eps_hat: f64) -> f64 {
    debug_assert!(eps_hat > 0.0);
    (v / eps_hat).floor() * eps_hat
}

/// One window of the plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
    /// Local value range.
    pub delta: f64,
    /// Fluctuation level `delta / global_range`.
    pub beta: f64,
    pub eps_hat: f64,
}

/// The windows covering a series with their adaptive thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPlan {
    pub default_len: usize,
    pub global_range: f64,
    pub intervals: Vec<Interval>,
}

impl IntervalPlan {
    /// Number of samples covered.
    pub fn len(&self) -> usize {
        self.intervals.last().map_or(0, |i| i.start + i.len)
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Threshold in effect at sample `index`.
    pub fn eps_hat_at(&self, index: usize) -> f64 {
        let i = (index / self.default_len).min(self.intervals.len() - 1);
        self.intervals[i].eps_hat
    }

    pub fn max_eps_hat(&self) -> f64 {
        self.intervals
            .iter()
            .map(|i| i.eps_hat)
            .fold(0.0, f64::max)
    }

    /// A single window with a constant threshold: adaptivity switched off.
    pub fn fixed(n: usize, eps_hat: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        if !(eps_hat.is_finite() && eps_hat > 0.0) {
            return Err(invalid("eps_hat", format!("{eps_hat} must be finite and > 0")));
        }
        Ok(Self {
            default_len: n,
            global_range: f64::NAN,
            intervals: vec![Interval {
                start: 0,
                len: n,
                delta: f64::NAN,
                beta: f64::NAN,
                eps_hat,
            }],
        })
    }
}

/// Default window length `clamp(floor(lambda * n * range / eps_b), 2, n)`.
///
/// A zero-range series gets a single window.
pub fn default_interval_len(n: usize, global_range: f64, eps_b: f64, lambda: f64) -> usize {
    if global_range <= 0.0 {
        return n.max(2);
    }
    let relative = eps_b / global_range;
    let raw = (lambda * n as f64 / relative).floor();
    let raw = if raw.is_finite() { raw.min(n as f64) as usize } else { n };
    raw.max(2)
}

pub fn plan_intervals(values: &[f64], eps_b: f64, lambda: f64) -> Result<IntervalPlan> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(eps_b.is_finite() && eps_b > 0.0) {
        return Err(invalid("eps_b", format!("{eps_b} must be finite and > 0")));
    }
    if !(lambda.is_finite() && lambda > 0.0 && lambda <= 1.0) {
        return Err(invalid("lambda", format!("{lambda} must lie in (0, 1]")));
    }
    let n = values.len();
    let (lo, hi) = value_bounds(values);
    let global_range = hi - lo;
    let default_len = default_interval_len(n, global_range, eps_b, lambda);

    let intervals = values
        .chunks(default_len)
        .enumerate()
        .map(|(i, window)| {
            let (wlo, whi) = value_bounds(window);
            let delta = whi - wlo;
            let beta = if global_range > 0.0 { delta / global_range } else { 0.0 };
            Ok(Interval {
                start: i * default_len,
                len: window.len(),
                delta,
                beta,
                eps_hat: adaptive_step(eps_b, beta)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(IntervalPlan {
        default_len,
        global_range,
        intervals,
    })
}

/// Greedy shrinking-cone scan.
///
/// A cone starting at `s` takes the threshold `e` of the window containing
/// `s` and the origin `quantize_origin(v_s, e)`. Each later point narrows the
/// slope span to the slopes keeping it within `e`; once the span would become
/// empty the cone closes and the point opens the next one. Window boundaries
/// do not close cones.
pub fn extract_semantics(values: &[f64], plan: &IntervalPlan) -> Result<Vec<Cone>> {
    if plan.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            actual: plan.len(),
        });
    }
    let mut cones = Vec::new();
    let mut cone = open_cone(values, plan, 0);
    for (t, &v) in values.iter().enumerate().skip(1) {
        let dt = (t - cone.start) as f64;
        let lo = (v - cone.eps_hat - cone.origin) / dt;
        let hi = (v + cone.eps_hat - cone.origin) / dt;
        let (next_lo, next_hi) = if cone.length == 1 {
            (lo, hi)
        } else {
            (cone.span_lo.max(lo), cone.span_hi.min(hi))
        };
        if next_lo > next_hi {
            cones.push(cone);
            cone = open_cone(values, plan, t);
        } else {
            cone.span_lo = next_lo;
            cone.span_hi = next_hi;
            cone.length += 1;
        }
    }
    cones.push(cone);
    Ok(cones)
}

fn open_cone(values: &[f64], plan: &IntervalPlan, start: usize) -> Cone {
    let eps_hat = plan.eps_hat_at(start);
    Cone {
        origin: quantize_origin(values[start], eps_hat),
        span_lo: 0.0,
        span_hi: 0.0,
        start,
        length: 1,
        eps_hat,
    }
}
