use shrink_cli::bench::{
    bench_edge, bench_eps_b, bench_growth, bench_lambda, bench_ratio, grid_for, Growth, Params, DEFAULT_GRID,
    EDGE_RESOLUTIONS, EPS_B_GRID, LAMBDA_GRID,
};
use shrink_core::datasets::{generate, Kind};

const N: usize = 100_000;

#[test]
fn ratio_grid_is_monotone_on_every_dataset() {
    for kind in Kind::BENCHMARK {
        let x = generate(kind, 20_000, 42);
        let grid = grid_for(&DEFAULT_GRID, kind.decimals());
        let rows = bench_ratio(&x, &grid, &Params::default()).unwrap();
        let cr = |eps: f64| rows.iter().find(|r| r.mode == "target" && r.epsilon == eps).map(|r| r.cr);
        let coarse = cr(0.01).unwrap();
        let fine = cr(0.0001).or(cr(0.001)).unwrap();
        assert!(coarse >= fine, "{}: CR(0.01)={coarse} < {fine}", kind.name());
        assert!(rows.iter().any(|r| r.mode == "lossless"), "{}", kind.name());
        for r in rows.iter().filter(|r| r.mode == "target") {
            assert!(r.max_error <= r.epsilon, "{}: {r:?}", kind.name());
        }
    }
}

#[test]
fn two_decimal_grid_stops_at_a_thousandth() {
    let grid = grid_for(&DEFAULT_GRID, Kind::WindSpeed.decimals());
    assert_eq!(grid.last(), Some(&0.001));
    assert_eq!(grid_for(&DEFAULT_GRID, None), DEFAULT_GRID.to_vec());
}

#[test]
fn ratio_falls_as_lambda_grows_on_noisy_pla() {
    let x = generate(Kind::PlaNoise, N, 42);
    let rows = bench_lambda(&x, 1e-3, &LAMBDA_GRID, &Params::default()).unwrap();
    let cr: Vec<f64> = rows.iter().map(|r| r.cr).collect();
    assert!(cr.windows(2).all(|w| w[1] <= w[0]), "CR over lambda {LAMBDA_GRID:?}: {cr:?}");
}

#[test]
fn unit_lambda_gives_at_most_two_intervals() {
    for kind in [Kind::PlaNoise, Kind::WindSpeed, Kind::Power] {
        let x = generate(kind, 20_000, 42);
        let rows = bench_lambda(&x, 1e-3, &[1.0], &Params::default()).unwrap();
        assert!(rows[0].intervals <= 2, "{}: {} intervals", kind.name(), rows[0].intervals);
    }
}

#[test]
fn ratio_rises_as_base_threshold_relaxes_on_windspeed() {
    let x = generate(Kind::WindSpeed, N, 42);
    let rows = bench_eps_b(&x, 1e-3, &EPS_B_GRID, &Params::default()).unwrap();
    let cr: Vec<f64> = rows.iter().map(|r| r.cr).collect();
    assert!(cr.windows(2).all(|w| w[1] >= w[0]), "CR over eps_b {EPS_B_GRID:?}%: {cr:?}");
}

fn noise_free_growth(lambda: f64) -> shrink_cli::bench::GrowthReport {
    let x = generate(Kind::Power, 20_000, 42);
    let growth = Growth {
        copies: 5,
        sigma: 0.0,
        epsilon: 1e-3,
        seed: 1,
    };
    let params = Params {
        lambda,
        ..Params::default()
    };
    bench_growth(&x, &growth, &params).unwrap()
}

#[test]
fn identical_copies_remerge_into_the_same_sub_bases() {
    let report = noise_free_growth(1.0);
    let first = &report.rows[0];
    for row in &report.rows {
        assert_eq!(row.sub_bases, first.sub_bases, "{row:?}");
    }
}

#[test]
fn identical_copies_barely_grow_the_base() {
    let report = noise_free_growth(Params::default().lambda);
    assert!(report.base_growth <= 1.1, "S_b final/first {:.3}: {:?}", report.base_growth, report.rows);
}

#[test]
fn noisy_copies_grow_residuals_linearly() {
    let x = generate(Kind::Power, 20_000, 42);
    let growth = Growth {
        copies: 10,
        sigma: 0.1,
        epsilon: 1e-3,
        seed: 2,
    };
    let report = bench_growth(&x, &growth, &Params::default()).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert!(report.residual_fit.r2 >= 0.98, "{:?}", report.residual_fit);
}

#[test]
fn edge_serving_beats_raw_transfer_and_is_seeded() {
    let x = generate(Kind::WindSpeed, 20_000, 42);
    let a = bench_edge(&x, &EDGE_RESOLUTIONS, 10, 9, &Params::default()).unwrap();
    let b = bench_edge(&x, &EDGE_RESOLUTIONS, 10, 9, &Params::default()).unwrap();
    assert_eq!(a.mls, a.base_bytes + a.finest_residual_bytes);
    assert!(a.ats < a.raw_transfer as f64);
    let order = |r: &shrink_cli::bench::EdgeReport| r.requests.iter().map(|q| (q.epsilon, q.transferred_bytes)).collect::<Vec<_>>();
    assert_eq!(order(&a), order(&b));
    for q in &a.requests {
        assert!(q.max_error <= q.epsilon, "{q:?}");
    }
}
