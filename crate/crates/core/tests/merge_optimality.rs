#[path = "support/partition_oracle.rs"]
mod partition_oracle;

use proptest::prelude::*;
use shrink_core::knowledge_base::build_base;
use shrink_core::Cone;

fn cones(origins: &[u8], spans: &[(f64, f64)]) -> Vec<Cone> {
    spans
        .iter()
        .zip(origins)
        .enumerate()
        .map(|(i, (&(lo, hi), &o))| Cone {
            origin: o as f64 * 0.5,
            span_lo: lo,
            span_hi: hi,
            start: i,
            length: 1,
            eps_hat: 0.5,
        })
        .collect()
}

fn span() -> impl Strategy<Value = (f64, f64)> {
    (-20i32..20, 0i32..15).prop_map(|(lo, w)| (lo as f64 / 4.0, (lo + w) as f64 / 4.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn greedy_merge_is_minimal(spans in prop::collection::vec(span(), 1..=8)) {
        let origins = vec![0u8; spans.len()];
        let base = build_base(&cones(&origins, &spans), spans.len(), 0.5, 1.0).unwrap();
        prop_assert_eq!(base.sub_bases.len(), partition_oracle::min_groups(&spans));
    }

    #[test]
    fn greedy_merge_is_minimal_per_origin(
        pairs in prop::collection::vec((0u8..3, span()), 1..=8),
    ) {
        let (origins, spans): (Vec<u8>, Vec<(f64, f64)>) = pairs.into_iter().unzip();
        let base = build_base(&cones(&origins, &spans), spans.len(), 0.5, 1.0).unwrap();
        let expected: usize = (0..3u8)
            .map(|o| {
                let group: Vec<_> = spans.iter().zip(&origins).filter(|(_, &g)| g == o).map(|(s, _)| *s).collect();
                partition_oracle::min_groups(&group)
            })
            .sum();
        prop_assert_eq!(base.sub_bases.len(), expected);
        for b in &base.sub_bases {
            prop_assert!(b.span_lo <= b.slope && b.slope <= b.span_hi);
        }
    }
}

#[test]
fn oracle_examples() {
    assert_eq!(partition_oracle::min_groups(&[]), 0);
    assert_eq!(partition_oracle::min_groups(&[(1.0, 2.0), (1.5, 3.0)]), 1);
    assert_eq!(partition_oracle::min_groups(&[(0.0, 1.0), (2.0, 3.0)]), 2);
    // Chain: neighbours overlap but the ends do not.
    assert_eq!(partition_oracle::min_groups(&[(0.0, 2.0), (1.0, 3.0), (2.5, 4.0)]), 2);
}
