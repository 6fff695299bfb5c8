//! Constant-threshold piecewise-linear reference segmenter.
//!
//! Brute force: every candidate extension re-derives the feasible slope
//! interval from all covered points, with no incremental state.

/// Start index of every segment of `values` under threshold `eps`.
pub fn segment_starts(values: &[f64], eps: f64) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut start = 0;
    while start < values.len() {
        starts.push(start);
        let origin = (values[start] / eps).floor() * eps;
        let mut end = start + 1;
        while end < values.len() && feasible(&values[start..=end], origin, eps) {
            end += 1;
        }
        start = end;
    }
    starts
}

/// Whether one line through `(0, origin)` stays within `eps` of every
/// sample after the first.
pub fn feasible(window: &[f64], origin: f64, eps: f64) -> bool {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (dt, &v) in window.iter().enumerate().skip(1) {
        let dt = dt as f64;
        lo = lo.max((v - eps - origin) / dt);
        hi = hi.min((v + eps - origin) / dt);
    }
    lo <= hi
}
