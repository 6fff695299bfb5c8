use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn shrink(args: &[&str]) -> Output {
    shrink_env(args, &[])
}

fn shrink_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shrink"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn shrink")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_series(dir: &Path, name: &str, values: &[f64]) -> String {
    let path = dir.join(name);
    let mut text = String::from("time,value\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn wave(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i as f64 / 30.0).sin() * 40.0 + i as f64 * 0.01).round() / 100.0).collect()
}

fn read_values(path: &str) -> Vec<f64> {
    fs::read_to_string(path).unwrap().lines().map(|l| l.parse().unwrap()).collect()
}

#[test]
fn compress_decompress_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let values: Vec<f64> = (0..3000).map(|i| (i as f64 / 25.0).sin() * 3.0 + (i as f64 * 0.37).cos() * 0.05).collect();
    let input = write_series(dir.path(), "x.csv", &values);
    let artifact = dir.path().join("x.shrk").to_string_lossy().into_owned();
    let restored = dir.path().join("x.txt").to_string_lossy().into_owned();

    stdout(&shrink(&["compress", &input, "--column", "1", "--epsilon", "0.001", "--out", &artifact]));
    stdout(&shrink(&["decompress", &artifact, "--out", &restored]));
    let got = read_values(&restored);
    assert_eq!(got.len(), values.len());
    assert!(values.iter().zip(&got).all(|(a, b)| (a - b).abs() <= 0.001));

    let report = stdout(&shrink(&["verify", &input, &artifact, "--column", "1"]));
    assert!(report.starts_with("PASS"), "{report}");

    // A coarser resolution served from the same artifact.
    stdout(&shrink(&["decompress", &artifact, "--epsilon", "0.05", "--out", &restored]));
    let coarse = read_values(&restored);
    assert!(values.iter().zip(&coarse).all(|(a, b)| (a - b).abs() <= 0.05));

    let strict = shrink(&["verify", &input, &artifact, "--column", "1", "--epsilon", "1e-9"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&strict.stdout).starts_with("FAIL"));
}

#[test]
fn lossless_flag_restores_rounded_values_exactly() {
    let dir = TempDir::new().unwrap();
    let values = wave(2000);
    let input = write_series(dir.path(), "w.csv", &values);
    let artifact = dir.path().join("w.shrk").to_string_lossy().into_owned();
    let restored = dir.path().join("w.txt").to_string_lossy().into_owned();
    stdout(&shrink(&["compress", &input, "--column", "1", "--lossless", "--out", &artifact]));
    stdout(&shrink(&["decompress", &artifact, "--out", &restored]));
    assert_eq!(read_values(&restored), values);
}

#[test]
fn nan_cell_is_rejected_with_its_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "value\n1.0\n2.0\nNaN\n").unwrap();
    let out = shrink(&["compress", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 4"), "{err}");
}

#[test]
fn ucr_row_is_selected_by_column() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("train.tsv");
    let row = |label: u32, offset: f64| {
        let cells: Vec<String> = (0..500).map(|i| format!("{:.3}", (i as f64 / 20.0).sin() + offset)).collect();
        format!("{label}\t{}\n", cells.join("\t"))
    };
    fs::write(&path, format!("{}{}", row(1, 0.0), row(2, 10.0))).unwrap();
    let artifact = dir.path().join("r.shrk").to_string_lossy().into_owned();
    let restored = dir.path().join("r.txt").to_string_lossy().into_owned();
    let input = path.to_string_lossy();
    stdout(&shrink(&["compress", &input, "--format", "ucr-tsv", "--column", "1", "--epsilon", "0.01", "--out", &artifact]));
    stdout(&shrink(&["decompress", &artifact, "--out", &restored]));
    let got = read_values(&restored);
    assert_eq!(got.len(), 500);
    assert!(got.iter().all(|v| *v > 8.0));
    let missing = shrink(&["compress", &input, "--format", "ucr-tsv", "--column", "5"]);
    assert!(!missing.status.success());
}

#[test]
fn bench_tables_parse_as_csv_and_json() {
    let csv_out = stdout(&shrink(&["bench-ratio", "--dataset", "windspeed", "--n", "5000"]));
    let mut reader = csv::Reader::from_reader(csv_out.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "dataset");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    // Two-decimal data: grid truncated to five levels plus the lossless row.
    assert_eq!(rows.len(), 6);

    let json_out = stdout(&shrink(&["bench-edge", "--dataset", "facefour", "--n", "5000", "--table", "json"]));
    let report: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    assert!(report[0]["mls"].as_u64().unwrap() > 0);
    assert_eq!(report[0]["requests"].as_array().unwrap().len(), 10);

    let json_out = stdout(&shrink(&["bench-growth", "--n", "5000", "--copies", "3", "--table", "json"]));
    let report: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    assert!(report["residual_fit"]["r2"].is_number());
}

#[test]
fn bench_writes_table_and_plot_files() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("lambda.csv");
    let plot = dir.path().join("lambda.svg");
    stdout(&shrink(&[
        "bench-lambda",
        "--n",
        "5000",
        "--out",
        table.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn output_is_deterministic_under_seed_and_thread_count() {
    let args = ["bench-edge", "--dataset", "windspeed", "--n", "5000", "--seed", "3"];
    let strip = |s: String| -> Vec<String> {
        // Drop the timing column; everything else must match.
        s.lines().map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 3).map(|(_, c)| c).collect::<Vec<_>>().join(",")).collect()
    };
    let one = strip(stdout(&shrink_env(&args, &[("SHRINK_THREADS", "1")])));
    let four = strip(stdout(&shrink_env(&args, &[("SHRINK_THREADS", "4")])));
    assert_eq!(one, four);
    let other = strip(stdout(&shrink(&["bench-edge", "--dataset", "windspeed", "--n", "5000", "--seed", "4"])));
    assert_ne!(one, other);

    let bad = shrink_env(&args, &[("SHRINK_THREADS", "zero")]);
    assert!(!bad.status.success());
}

#[test]
fn unit_lambda_reports_at_most_two_intervals() {
    let out = stdout(&shrink(&["bench-lambda", "--dataset", "pla-noise", "--n", "20000"]));
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let value = headers.iter().position(|h| h == "value").unwrap();
    let intervals = headers.iter().position(|h| h == "intervals").unwrap();
    let row = reader.records().map(Result::unwrap).find(|r| r[value].parse::<f64>().unwrap() == 1.0).unwrap();
    assert!(row[intervals].parse::<usize>().unwrap() <= 2);
}
