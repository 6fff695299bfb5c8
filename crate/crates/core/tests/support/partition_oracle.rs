//! Exhaustive minimum grouping of slope spans.
//!
//! Enumerates every set partition (restricted growth strings) and keeps the
//! smallest one whose blocks each have a common slope.

pub fn min_groups(spans: &[(f64, f64)]) -> usize {
    if spans.is_empty() {
        return 0;
    }
    let mut labels = vec![0usize; spans.len()];
    let mut best = spans.len();
    search(spans, &mut labels, 1, 1, &mut best);
    best
}

fn search(spans: &[(f64, f64)], labels: &mut [usize], i: usize, blocks: usize, best: &mut usize) {
    if blocks >= *best {
        return;
    }
    if i == spans.len() {
        if (0..blocks).all(|b| common_slope(spans, labels, b)) {
            *best = blocks;
        }
        return;
    }
    for b in 0..=blocks {
        labels[i] = b;
        search(spans, labels, i + 1, blocks.max(b + 1), best);
    }
}

fn common_slope(spans: &[(f64, f64)], labels: &[usize], block: usize) -> bool {
    let members = spans.iter().zip(labels).filter(|(_, &l)| l == block).map(|(s, _)| s);
    let (lo, hi) = members.fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), s| (lo.max(s.0), hi.min(s.1)));
    lo <= hi
}

