use shrink_wasm_demo::{compress_values, dataset_values, sweep_values};

#[test]
fn compress_honours_the_target() {
    let values = dataset_values("windspeed", 2000, 7).unwrap();
    for eps in [1e-3, 1e-2, 0.1] {
        let out = compress_values(&values, eps, 5.0, 1e-3).unwrap();
        assert!(out.max_error() <= eps, "eps {eps}: error {}", out.max_error());
        assert_eq!(out.reconstruction().len(), values.len());
        assert_eq!(out.base().len(), values.len());
        assert!(out.ratio() > 1.0);
        assert!(out.cones() >= out.sub_bases());
    }
}

#[test]
fn fine_target_on_rounded_data_is_exact() {
    let values = dataset_values("windspeed", 1000, 1).unwrap();
    let out = compress_values(&values, 1e-4, 5.0, 1e-3).unwrap();
    assert!(out.lossless());
    assert_eq!(out.reconstruction(), values);
}

#[test]
fn sweep_serves_every_coarser_resolution() {
    let values = dataset_values("power", 3000, 3).unwrap();
    let resolutions = [1e-3, 1e-2, 0.1, 1.0];
    let rows = sweep_values(&values, 1e-3, 5.0, 1e-3, &resolutions).unwrap();
    assert_eq!(rows.len(), 12);
    let mut previous = f64::INFINITY;
    for row in rows.chunks(3) {
        assert!(row[2] <= row[0], "{row:?}");
        assert!(row[1] <= previous, "{row:?}");
        previous = row[1];
    }
}

#[test]
fn bad_input_is_an_error() {
    assert!(dataset_values("nope", 10, 0).is_err());
    assert!(compress_values(&[], 0.1, 5.0, 1e-3).is_err());
    assert!(compress_values(&[1.0, 2.0], -1.0, 5.0, 1e-3).is_err());
    let values = dataset_values("ecg", 500, 0).unwrap();
    assert!(sweep_values(&values, 0.1, 5.0, 1e-3, &[0.01]).is_err());
}
