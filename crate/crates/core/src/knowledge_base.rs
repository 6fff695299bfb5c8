//! Knowledge-base construction: cones sharing a quantized origin are merged
//! when their slope spans intersect, and every merged group gets one compact
//! slope.

use crate::error::{invalid, Error, Result};
use crate::model::{Cone, KnowledgeBase, Run, SubBase};

/// Merges cones into sub-bases.
///
/// Cones are grouped by bitwise-equal origin. Inside a group, spans are taken
/// in ascending order of lower slope, and a run of spans joins one sub-base as
/// long as each new span intersects the running intersection. Sorting by lower
/// slope makes this greedy pass produce the minimum number of sub-bases per
/// origin.
pub fn build_base(cones: &[Cone], n: usize, eps_b: f64, lambda: f64) -> Result<KnowledgeBase> {
    check_tiling(cones, n)?;

    let mut order: Vec<&Cone> = cones.iter().collect();
    order.sort_by(|a, b| {
        origin_key(a.origin)
            .cmp(&origin_key(b.origin))
            .then(a.span_lo.total_cmp(&b.span_lo))
            .then(a.start.cmp(&b.start))
    });

    let mut sub_bases: Vec<SubBase> = Vec::new();
    let mut current: Option<Group> = None;
    for cone in order {
        match current.as_mut() {
            Some(g) if g.accepts(cone) => g.absorb(cone),
            _ => {
                if let Some(g) = current.take() {
                    sub_bases.push(g.finish()?);
                }
                current = Some(Group::new(cone));
            }
        }
    }
    if let Some(g) = current {
        sub_bases.push(g.finish()?);
    }

    sub_bases.sort_by(|a, b| {
        origin_key(a.origin)
            .cmp(&origin_key(b.origin))
            .then(a.span_lo.total_cmp(&b.span_lo))
            .then(a.runs[0].start.cmp(&b.runs[0].start))
    });

    let eps_hat_max = cones.iter().map(|c| c.eps_hat).fold(0.0, f64::max);
    Ok(KnowledgeBase {
        sub_bases,
        n,
        eps_b,
        lambda,
        eps_hat_max,
    })
}

/// Total order on origins where `-0.0 == 0.0`.
fn origin_key(origin: f64) -> i64 {
    let o = if origin == 0.0 { 0.0 } else { origin };
    let bits = o.to_bits() as i64;
    // Flip the magnitude bits of negatives so integer order matches float order.
    bits ^ (((bits >> 63) as u64) >> 1) as i64
}

struct Group {
    origin: f64,
    lo: f64,
    hi: f64,
    runs: Vec<Run>,
}

impl Group {
    fn new(cone: &Cone) -> Self {
        Self {
            origin: cone.origin,
            lo: cone.span_lo,
            hi: cone.span_hi,
            runs: vec![Run {
                start: cone.start,
                length: cone.length,
            }],
        }
    }

    fn accepts(&self, cone: &Cone) -> bool {
        origin_key(cone.origin) == origin_key(self.origin) && cone.span_lo <= self.hi
    }

    fn absorb(&mut self, cone: &Cone) {
        self.lo = self.lo.max(cone.span_lo);
        self.hi = self.hi.min(cone.span_hi);
        self.runs.push(Run {
            start: cone.start,
            length: cone.length,
        });
    }

    fn finish(mut self) -> Result<SubBase> {
        self.runs.sort_unstable();
        Ok(SubBase {
            origin: self.origin,
            span_lo: self.lo,
            span_hi: self.hi,
            slope: choose_slope(self.lo, self.hi)?,
            runs: self.runs,
        })
    }
}

fn check_tiling(cones: &[Cone], n: usize) -> Result<()> {
    let mut runs: Vec<Run> = cones
        .iter()
        .map(|c| Run {
            start: c.start,
            length: c.length,
        })
        .collect();
    runs.sort_unstable();
    let mut next = 0;
    for r in runs {
        if r.length == 0 {
            return Err(Error::Coverage(format!("empty cone at {}", r.start)));
        }
        if r.start != next {
            return Err(Error::Coverage(if r.start < next {
                format!("cone at {} overlaps the previous cone", r.start)
            } else {
                format!("gap between {next} and {}", r.start)
            }));
        }
        next = r.end();
    }
    if next != n {
        return Err(Error::Coverage(format!("cones end at {next}, expected {n}")));
    }
    Ok(())
}

/// Picks a short decimal slope inside `[lo, hi]`.
pub fn choose_slope(lo: f64, hi: f64) -> Result<f64> {
    choose_slope_checked(lo, hi).map(|(s, _)| s)
}

/// Like [`choose_slope`], also reporting whether the digit rule left the span
/// and a fallback value was used.
pub fn choose_slope_checked(lo: f64, hi: f64) -> Result<(f64, bool)> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(invalid("span", format!("[{lo}, {hi}] is not an interval")));
    }
    if lo == hi {
        return Ok((lo, false));
    }
    let candidate = if hi <= 0.0 {
        -digit_slope(-hi, -lo)
    } else if lo < 0.0 {
        round_tenth(0.5 * (lo + hi))
    } else {
        digit_slope(lo, hi)
    };
    Ok(snap(candidate, lo, hi))
}

/// Keeps an in-span candidate. Otherwise falls back to the shortest decimal
/// inside the span, then to the nearest endpoint.
fn snap(candidate: f64, lo: f64, hi: f64) -> (f64, bool) {
    if candidate >= lo && candidate <= hi {
        return (candidate, false);
    }
    let mid = 0.5 * (lo + hi);
    for digits in 0..=17 {
        let scale = 10f64.powi(digits);
        let rounded = (mid * scale).round() / scale;
        if rounded >= lo && rounded <= hi {
            return (rounded, true);
        }
    }
    if candidate.is_nan() || candidate < lo {
        (lo, true)
    } else {
        (hi, true)
    }
}

fn round_tenth(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Digit rule for `0 <= lo < hi`.
///
/// Different integer parts keep the mean at one decimal. Otherwise the result
/// is the shared integer part, the shared leading fraction digits and one
/// more digit, the floor of the mean of the first digits that differ.
fn digit_slope(lo: f64, hi: f64) -> f64 {
    if !(lo.is_finite() && hi.is_finite()) || lo.trunc() != hi.trunc() {
        return round_tenth(0.5 * (lo + hi));
    }
    let lo_text = lo.to_string();
    let hi_text = hi.to_string();
    let (int_part, lo_frac) = lo_text.split_once('.').unwrap_or((&lo_text, ""));
    let hi_frac = hi_text.split_once('.').map_or("", |(_, f)| f);

    let width = lo_frac.len().max(hi_frac.len());
    let lo_digits = lo_frac.bytes().chain(std::iter::repeat(b'0')).take(width);
    let hi_digits = hi_frac.bytes().chain(std::iter::repeat(b'0')).take(width);

    let mut kept = String::with_capacity(width + 1);
    for (a, b) in lo_digits.zip(hi_digits) {
        if a == b {
            kept.push(a as char);
        } else {
            let mean = ((a - b'0') + (b - b'0')) / 2;
            kept.push((b'0' + mean) as char);
            break;
        }
    }
    format!("{int_part}.{kept}")
        .parse()
        .unwrap_or(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cone(origin: f64, lo: f64, hi: f64, start: usize, length: usize) -> Cone {
        Cone {
            origin,
            span_lo: lo,
            span_hi: hi,
            start,
            length,
            eps_hat: 0.1,
        }
    }

    #[test]
    fn slope_from_averaging_figure() {
        let s = choose_slope(0.12385382076923077, 0.1238955472222222).unwrap();
        assert_eq!(s, 0.12387);
    }

    #[test]
    fn slope_examples() {
        assert_eq!(choose_slope(0.9, 1.3).unwrap(), 1.1);
        assert_eq!(choose_slope(0.5, 0.5).unwrap(), 0.5);
        assert_eq!(choose_slope(-1.3, -0.9).unwrap(), -1.1);
        assert_eq!(choose_slope(-0.1238955472222222, -0.12385382076923077).unwrap(), -0.12387);
        assert_eq!(choose_slope(2.31, 2.38).unwrap(), 2.34);
        assert_eq!(choose_slope(-0.04, 0.02).unwrap(), 0.0);
        assert!(choose_slope(1.0, 0.5).is_err());
        assert!(choose_slope(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn slope_falls_back_when_digit_rule_leaves_span() {
        // Divergent digits 3 and 4 average to 3, giving 0.123 < lo.
        let (s, fallback) = choose_slope_checked(0.1235, 0.124).unwrap();
        assert!(fallback);
        assert_eq!(s, 0.124);
        // 0.4 falls outside, the one-digit 0.5 does not.
        let (s, fallback) = choose_slope_checked(0.4962, 0.5038).unwrap();
        assert!(fallback);
        assert_eq!(s, 0.5);
        let (s, _) = choose_slope_checked(1.0, 1.0 + f64::EPSILON).unwrap();
        assert!((1.0..=1.0 + f64::EPSILON).contains(&s));
    }

    #[test]
    fn merge_intersecting_spans() {
        let cones = [cone(0.0, 1.0, 2.0, 0, 3), cone(0.0, 1.5, 3.0, 3, 2)];
        let kb = build_base(&cones, 5, 0.1, 1.0).unwrap();
        assert_eq!(kb.sub_bases.len(), 1);
        let b = &kb.sub_bases[0];
        assert_eq!((b.span_lo, b.span_hi), (1.5, 2.0));
        assert_eq!(b.runs.len(), 2);
        assert!(b.slope >= 1.5 && b.slope <= 2.0);
    }

    #[test]
    fn disjoint_spans_split() {
        let cones = [cone(0.0, 1.0, 2.0, 0, 3), cone(0.0, 2.5, 3.0, 3, 2)];
        let kb = build_base(&cones, 5, 0.1, 1.0).unwrap();
        assert_eq!(kb.sub_bases.len(), 2);
    }

    #[test]
    fn different_origins_never_merge() {
        let cones = [cone(0.0, 1.0, 2.0, 0, 3), cone(0.5, 1.0, 2.0, 3, 2)];
        let kb = build_base(&cones, 5, 0.1, 1.0).unwrap();
        assert_eq!(kb.sub_bases.len(), 2);
    }

    #[test]
    fn single_cone_identity() {
        let kb = build_base(&[cone(1.0, 0.2, 0.4, 0, 7)], 7, 0.1, 1.0).unwrap();
        assert_eq!(kb.sub_bases.len(), 1);
        assert_eq!((kb.sub_bases[0].span_lo, kb.sub_bases[0].span_hi), (0.2, 0.4));
        assert_eq!(kb.covered(), 7);
    }

    #[test]
    fn rejects_bad_tiling() {
        let gap = [cone(0.0, 0.0, 0.0, 0, 2), cone(0.0, 0.0, 0.0, 3, 2)];
        assert!(matches!(build_base(&gap, 5, 0.1, 1.0), Err(Error::Coverage(_))));
        let overlap = [cone(0.0, 0.0, 0.0, 0, 3), cone(0.0, 0.0, 0.0, 2, 3)];
        assert!(build_base(&overlap, 5, 0.1, 1.0).is_err());
        let short = [cone(0.0, 0.0, 0.0, 0, 3)];
        assert!(build_base(&short, 5, 0.1, 1.0).is_err());
    }

    #[test]
    fn negative_zero_origin_groups_with_zero() {
        let cones = [cone(-0.0, 0.0, 1.0, 0, 2), cone(0.0, 0.5, 1.0, 2, 2)];
        let kb = build_base(&cones, 4, 0.1, 1.0).unwrap();
        assert_eq!(kb.sub_bases.len(), 1);
    }

    #[test]
    fn origin_key_is_monotone() {
        let xs = [-5.0, -1.5, -1e-300, 0.0, 1e-300, 2.0, 7.5];
        for w in xs.windows(2) {
            assert!(origin_key(w[0]) < origin_key(w[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn chosen_slope_stays_in_span(a in -50.0f64..50.0, w in 0.0f64..1.0, scale in -8i32..3) {
            let width = w * 10f64.powi(scale);
            let (lo, hi) = (a, a + width);
            let s = choose_slope(lo, hi).unwrap();
            prop_assert!(lo <= s && s <= hi, "{} not in [{}, {}]", s, lo, hi);
        }
    }

    proptest! {
        #[test]
        fn base_output_is_deterministic(spans in prop::collection::vec((0u8..3, -2.0f64..2.0, 0.0f64..1.0), 1..30)) {
            let cones: Vec<Cone> = spans
                .iter()
                .enumerate()
                .map(|(i, &(o, lo, w))| cone(o as f64, lo, lo + w, i * 2, 2))
                .collect();
            let n = cones.len() * 2;
            let a = build_base(&cones, n, 0.1, 1.0).unwrap();
            let mut shuffled = cones.clone();
            shuffled.reverse();
            let b = build_base(&shuffled, n, 0.1, 1.0).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.covered(), n);
            for sb in &a.sub_bases {
                prop_assert!(sb.span_lo <= sb.slope && sb.slope <= sb.span_hi);
                for run in &sb.runs {
                    let member = cones.iter().find(|c| c.start == run.start).unwrap();
                    prop_assert!(member.span_lo <= sb.span_lo && sb.span_hi <= member.span_hi);
                }
            }
        }
    }
}
