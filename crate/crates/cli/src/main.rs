use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use shrink_cli::bench::{self, Growth, Params};
use shrink_cli::output::{sink, write_json, write_rows, TableFormat};
use shrink_cli::plot::{line_chart, Line};
use shrink_cli::{ingest, pool, Format};
use shrink_core::codec::{compress_lossless_with, compress_with, detect_decimals, MAX_DECIMALS};
use shrink_core::datasets::{self, Kind};
use shrink_core::{decompress, CodecOptions, CompressedArtifact, Resolution, TimeSeries};

const RATIO_SCHEMA: &str = "CSV columns: dataset,mode,epsilon,n,cr,base_bytes,residual_bytes,max_error,exact,compress_ms,throughput_mb_s. \
mode is target or lossless (epsilon 0); exact marks fixed-precision coding.";
const GROWTH_SCHEMA: &str = "CSV columns: copies,points,raw_bytes,base_bytes,residual_bytes,total_bytes,sub_bases,cones. \
The JSON mirror adds base_growth, residual_growth and residual_fit {slope,intercept,r2}.";
const SWEEP_SCHEMA: &str = "CSV columns: dataset,parameter,value,epsilon,cr,intervals,default_interval_len,cones,sub_bases,base_bytes,residual_bytes,compress_ms.";
const EDGE_SCHEMA: &str = "CSV columns: order,epsilon,transferred_bytes,latency_ms,max_error, one row per request. \
The JSON mirror adds dataset,mls,ats,apl_ms,raw_transfer,base_bytes,finest_residual_bytes.";

#[derive(Parser)]
#[command(name = "shrink", version, about = "Error-bounded compression of numeric series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress one column of a file into a container.
    Compress {
        input: PathBuf,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        codec: CodecArgs,
        /// Target maximum absolute error.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Exact coding at the detected decimal precision.
        #[arg(long)]
        lossless: bool,
        /// Output container, defaults to INPUT.shrk.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a container back out as one value per line.
    Decompress {
        artifact: PathBuf,
        /// Serve a coarser resolution than the stored one.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a container against the original series; exits 1 on FAIL.
    Verify {
        original: PathBuf,
        artifact: PathBuf,
        #[command(flatten)]
        source: SourceArgs,
        /// Bound to check, defaults to the stored target.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Compression ratio across the target-error grid.
    #[command(after_help = RATIO_SCHEMA)]
    BenchRatio {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        /// Targets to sweep; defaults to the nine-level grid.
        #[arg(long = "epsilon", value_delimiter = ',')]
        grid: Vec<f64>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Base and residual sizes as noisy copies accumulate.
    #[command(after_help = GROWTH_SCHEMA)]
    BenchGrowth {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        copies: usize,
        /// Deviation of the per-copy Gaussian noise.
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Compression ratio across interval-length factors.
    #[command(after_help = SWEEP_SCHEMA)]
    BenchLambda {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long = "lambdas", value_delimiter = ',')]
        values: Vec<f64>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Compression ratio across base thresholds.
    #[command(after_help = SWEEP_SCHEMA)]
    BenchEpsb {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Base thresholds as percent of range.
        #[arg(long = "pcts", value_delimiter = ',')]
        values: Vec<f64>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Multiresolution serving from one stored artifact.
    #[command(after_help = EDGE_SCHEMA)]
    BenchEdge {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long = "resolutions", value_delimiter = ',')]
        resolutions: Vec<f64>,
        /// Number of requests; defaults to one per resolution.
        #[arg(long)]
        requests: Option<usize>,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Args, Clone)]
struct SourceArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// CSV column, or row for ucr-tsv files.
    #[arg(long, default_value_t = 0)]
    column: usize,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input file; a synthetic dataset is used when absent.
    input: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    /// Synthetic dataset name, or `all` for the benchmark set.
    #[arg(long)]
    dataset: Option<String>,
    /// Length of synthetic series.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Clone)]
struct CodecArgs {
    /// Base threshold as percent of the data range.
    #[arg(long, default_value_t = bench::DEFAULT_EPS_B_PCT)]
    epsilon_b_pct: f64,
    /// Residual quantization step, defaults to the target error.
    #[arg(long)]
    epsilon_r: Option<f64>,
    #[arg(long, default_value_t = bench::DEFAULT_LAMBDA)]
    lambda: f64,
}

impl CodecArgs {
    fn params(&self) -> Params {
        Params {
            eps_b_pct: self.epsilon_b_pct,
            lambda: self.lambda,
            epsilon_r: self.epsilon_r,
        }
    }
}

#[derive(Args, Clone)]
struct ReportArgs {
    /// Table destination, stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    table: TableFormat,
    /// Also write an SVG chart here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self, default: Kind) -> anyhow::Result<Vec<TimeSeries>> {
        if let Some(path) = &self.input {
            let got = ingest(path, self.source.format, self.source.column)
                .with_context(|| format!("loading {}", path.display()))?;
            eprintln!(
                "loaded {}: n={} range={} decimals={}",
                path.display(),
                got.n(),
                got.range(),
                got.decimals.map_or("full".to_string(), |d| d.to_string())
            );
            return Ok(vec![got.series]);
        }
        let kinds = match self.dataset.as_deref() {
            None => vec![default],
            Some("all") => Kind::BENCHMARK.to_vec(),
            Some(name) => vec![Kind::from_name(name).with_context(|| {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown dataset {name:?}; choose from {}", names.join(", "))
            })?],
        };
        Ok(kinds.into_iter().map(|k| datasets::generate(k, self.n, self.seed)).collect())
    }
}

fn write_plot(path: Option<&Path>, svg: impl FnOnce() -> String) -> anyhow::Result<()> {
    if let Some(p) = path {
        fs::write(p, svg()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compress {
            input,
            source,
            codec,
            epsilon,
            lossless,
            out,
        } => {
            let got = ingest(&input, source.format, source.column)?;
            let params = codec.params();
            let t = params.thresholds(&got.series, epsilon)?;
            let (artifact, report) = if lossless {
                let Some(d) = got.decimals else {
                    bail!("--lossless needs fixed-precision input of at most {MAX_DECIMALS} decimals");
                };
                compress_lossless_with(&got.series, t.epsilon_b(), params.lambda, d, CodecOptions::default())?
            } else {
                compress_with(&got.series, t, params.lambda, CodecOptions::default())?
            };
            let out = out.unwrap_or_else(|| input.with_extension("shrk"));
            let bytes = artifact.to_bytes();
            fs::write(&out, &bytes).with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "{} -> {}: n={} cr={:.3} base={} residual={} sub_bases={} exact={}",
                input.display(),
                out.display(),
                report.n,
                got.series.raw_bytes() as f64 / bytes.len() as f64,
                report.sizes.base,
                report.sizes.residual,
                report.sub_bases,
                report.lossless
            );
        }
        Command::Decompress { artifact, epsilon, out } => {
            let a = read_artifact(&artifact)?;
            let at = epsilon.map_or(Resolution::Stored, Resolution::Epsilon);
            let series = decompress(&a, at)?;
            let mut w = sink(out.as_deref())?;
            let mut text = String::with_capacity(series.len() * 12);
            for v in series.values() {
                text.push_str(&v.to_string());
                text.push('\n');
            }
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        Command::Verify {
            original,
            artifact,
            source,
            epsilon,
        } => {
            let got = ingest(&original, source.format, source.column)?;
            let a = read_artifact(&artifact)?;
            let epsilon = epsilon.unwrap_or(a.stored_epsilon());
            let report = bench::verify(&got.series, &a, epsilon)?;
            println!(
                "{} max_error={} worst_index={} epsilon={} n={}",
                if report.pass { "PASS" } else { "FAIL" },
                report.max_error,
                report.worst_index,
                report.epsilon,
                report.n
            );
            if !report.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::BenchRatio {
            data,
            codec,
            grid,
            report,
        } => {
            let params = codec.params();
            let mut rows = Vec::new();
            for x in data.load(Kind::PlaNoise)? {
                let base = if grid.is_empty() { bench::DEFAULT_GRID.to_vec() } else { grid.clone() };
                let g = bench::grid_for(&base, detect_decimals(x.values(), MAX_DECIMALS));
                rows.extend(bench::bench_ratio(&x, &g, &params)?);
            }
            write_rows(sink(report.out.as_deref())?, &rows, report.table)?;
            write_plot(report.plot.as_deref(), || {
                let mut names: Vec<&str> = rows.iter().map(|r| r.dataset.as_str()).collect();
                names.dedup();
                let lines: Vec<Line> = names
                    .iter()
                    .map(|&name| Line {
                        label: name,
                        points: rows
                            .iter()
                            .filter(|r| r.dataset == name && r.mode == "target")
                            .map(|r| (r.epsilon, r.cr))
                            .collect(),
                    })
                    .collect();
                line_chart("compression ratio", "epsilon", "CR", &lines, true)
            })?;
        }
        Command::BenchGrowth {
            data,
            codec,
            epsilon,
            copies,
            sigma,
            report,
        } => {
            let x = data.load(Kind::Power)?.remove(0);
            let growth = Growth {
                copies,
                sigma,
                epsilon,
                seed: data.seed,
            };
            let result = bench::bench_growth(&x, &growth, &codec.params())?;
            eprintln!(
                "base_growth={:.3} residual_growth={:.3} residual_r2={:.4}",
                result.base_growth, result.residual_growth, result.residual_fit.r2
            );
            match report.table {
                TableFormat::Csv => write_rows(sink(report.out.as_deref())?, &result.rows, TableFormat::Csv)?,
                TableFormat::Json => write_json(sink(report.out.as_deref())?, &result)?,
            }
            write_plot(report.plot.as_deref(), || {
                let series = |f: fn(&bench::GrowthRow) -> usize| {
                    result.rows.iter().map(|r| (r.points as f64, f(r) as f64)).collect()
                };
                let lines = [
                    Line {
                        label: "base",
                        points: series(|r| r.base_bytes),
                    },
                    Line {
                        label: "residual",
                        points: series(|r| r.residual_bytes),
                    },
                ];
                line_chart("size growth", "points", "bytes", &lines, false)
            })?;
        }
        Command::BenchLambda {
            data,
            codec,
            epsilon,
            values,
            report,
        } => {
            let values = if values.is_empty() { bench::LAMBDA_GRID.to_vec() } else { values };
            let mut rows = Vec::new();
            for x in data.load(Kind::PlaNoise)? {
                rows.extend(bench::bench_lambda(&x, epsilon, &values, &codec.params())?);
            }
            emit_sweep(&rows, &report, "lambda", true)?;
        }
        Command::BenchEpsb {
            data,
            codec,
            epsilon,
            values,
            report,
        } => {
            let values = if values.is_empty() { bench::EPS_B_GRID.to_vec() } else { values };
            let mut rows = Vec::new();
            for x in data.load(Kind::WindSpeed)? {
                rows.extend(bench::bench_eps_b(&x, epsilon, &values, &codec.params())?);
            }
            emit_sweep(&rows, &report, "eps_b (% of range)", false)?;
        }
        Command::BenchEdge {
            data,
            codec,
            resolutions,
            requests,
            report,
        } => {
            let resolutions = if resolutions.is_empty() {
                bench::EDGE_RESOLUTIONS.to_vec()
            } else {
                resolutions
            };
            let requests = requests.unwrap_or(resolutions.len());
            let mut reports = Vec::new();
            for x in data.load(Kind::WindSpeed)? {
                let r = bench::bench_edge(&x, &resolutions, requests, data.seed, &codec.params())?;
                eprintln!(
                    "{}: MLS={} ATS={:.1} APL={:.3}ms raw={}",
                    r.dataset, r.mls, r.ats, r.apl_ms, r.raw_transfer
                );
                reports.push(r);
            }
            match report.table {
                TableFormat::Csv => {
                    let rows: Vec<_> = reports.iter().flat_map(|r| r.requests.iter().cloned()).collect();
                    write_rows(sink(report.out.as_deref())?, &rows, TableFormat::Csv)?;
                }
                TableFormat::Json => write_json(sink(report.out.as_deref())?, &reports)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_sweep(rows: &[bench::SweepRow], report: &ReportArgs, x_label: &str, log_x: bool) -> anyhow::Result<()> {
    write_rows(sink(report.out.as_deref())?, rows, report.table)?;
    write_plot(report.plot.as_deref(), || {
        let mut names: Vec<&str> = rows.iter().map(|r| r.dataset.as_str()).collect();
        names.dedup();
        let lines: Vec<Line> = names
            .iter()
            .map(|&name| Line {
                label: name,
                points: rows.iter().filter(|r| r.dataset == name).map(|r| (r.value, r.cr)).collect(),
            })
            .collect();
        line_chart("compression ratio", x_label, "CR", &lines, log_x)
    })
}

fn read_artifact(path: &Path) -> anyhow::Result<CompressedArtifact> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    CompressedArtifact::from_bytes(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = pool::configure_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
