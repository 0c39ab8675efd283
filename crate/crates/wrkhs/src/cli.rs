//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wrkhs_core::channel::EqualizationConfig;
use wrkhs_core::regression::{fit, FitPath};
use wrkhs_core::synthetic::SyntheticConfig;
use wrkhs_core::{Complex64, RidgeConfig};

use crate::bench::{self, Benchmark};
use crate::dataset::{self, header};
use crate::error::{CliError, Result};
use crate::model;
use crate::output::{config_hash, write_json, CsvOut};
use crate::surface::{kernel_surface, SurfaceRequest, SURFACE_HEADER};

#[derive(Debug, Parser)]
#[command(name = "wrkhs", version, about = "Widely complex-valued kernel regression")]
pub struct Cli {
    /// Seed for every random stream (benchmarks default to their config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for output files without an explicit path.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a batch model to a CSV dataset and write it as JSON.
    Fit(FitArgs),
    /// Predict with a saved model on the inputs of a CSV file.
    Predict(PredictArgs),
    /// Dump kernel and pseudo-kernel values over a grid of scalar inputs.
    KernelSurface(SurfaceArgs),
    /// Run a benchmark and write its curve or grid plus a JSON summary.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Route {
    Augmented,
    Schur,
    Composite,
}

impl From<Route> for FitPath {
    fn from(r: Route) -> Self {
        match r {
            Route::Augmented => FitPath::Augmented,
            Route::Schur => FitPath::Schur,
            Route::Composite => FitPath::Composite,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Kernel as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub kernel: String,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "augmented")]
    pub route: Route,
    /// Defaults to `<out-dir>/model.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV with input columns; target columns are ignored.
    #[arg(long)]
    pub data: PathBuf,
    /// Defaults to `<out-dir>/predictions.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub kernel: String,
    /// Fixed first argument as `re,im`.
    #[arg(long, default_value = "0,0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub center: Complex64,
    /// Half width of the grid around the center.
    #[arg(long)]
    pub range: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
    /// Dump k(x, x) instead of k(center, x).
    #[arg(long)]
    pub diagonal: bool,
    /// Defaults to `<out-dir>/kernel_surface.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub benchmark: Benchmark,
    /// JSON config; the benchmark defaults are used when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Synthetic benchmarks: number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// Print the effective config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected `re,im`")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(cli, a),
        Command::Predict(a) => cmd_predict(cli, a),
        Command::KernelSurface(a) => cmd_kernel_surface(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
    }
}

fn out_path(cli: &Cli, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
    explicit.clone().unwrap_or_else(|| cli.out_dir.join(default))
}

fn cmd_fit(cli: &Cli, a: &FitArgs) -> Result<()> {
    let spec = model::parse_kernel(&a.kernel)?;
    let ridge = RidgeConfig::new(a.lambda)?;
    let data = dataset::read_dataset(&a.data)?;
    let m = fit(&data, &spec, ridge, a.route.into())?;
    let mse = m.training_mse_db(data.targets())?;
    let out = out_path(cli, &a.out, "model.json");
    model::save(&m, &out)?;
    println!("n={} d={} training_mse_db={mse:.4} model={}", data.len(), data.dim(), out.display());
    Ok(())
}

fn cmd_predict(cli: &Cli, a: &PredictArgs) -> Result<()> {
    let text = fs::read_to_string(&a.model).map_err(|e| CliError::io(&a.model, e))?;
    let m = model::from_json(&text)?;
    let table = dataset::read_table(&a.data)?;
    let pred = m.predict(&table.inputs)?;
    let d = table.inputs.ncols();
    let mut cols = header(d, false);
    cols.extend(["pred_re".into(), "pred_im".into()]);
    let mut csv = CsvOut::new(&config_hash(&text), cli.seed.unwrap_or(0), &cols);
    for (x, p) in table.inputs.rows_iter().zip(&pred) {
        let row: Vec<f64> = x
            .iter()
            .map(|v| v.re)
            .chain(x.iter().map(|v| v.im))
            .chain([p.re, p.im])
            .collect();
        csv.row(&row);
    }
    let out = out_path(cli, &a.out, "predictions.csv");
    csv.write(&out)?;
    if let Some(y) = &table.targets {
        println!("n={} mse_db={:.4}", pred.len(), wrkhs_core::mse_db(&pred, y)?);
    } else {
        println!("n={}", pred.len());
    }
    Ok(())
}

fn cmd_kernel_surface(cli: &Cli, a: &SurfaceArgs) -> Result<()> {
    let req = SurfaceRequest {
        kernel: model::parse_kernel(&a.kernel)?,
        center: a.center,
        range: a.range,
        resolution: a.resolution,
        diagonal: a.diagonal,
    };
    let pts = kernel_surface(&req)?;
    let mut csv = CsvOut::new(&config_hash(&req), cli.seed.unwrap_or(0), &SURFACE_HEADER);
    for p in &pts {
        csv.row(&[p.x.re, p.x.im, p.k.re, p.k.im, p.pk.re, p.pk.im]);
    }
    csv.write(&out_path(cli, &a.out, "kernel_surface.csv"))?;
    println!("points={}", pts.len());
    Ok(())
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Hashed<'a, T> {
    benchmark: Benchmark,
    seeds: usize,
    config: &'a T,
}

#[derive(Serialize)]
struct SeedRow {
    seed: u64,
    wrkhs_mse_db: f64,
    ablation_mse_db: f64,
    gap_db: f64,
}

#[derive(Serialize)]
struct SyntheticSummary<'a> {
    benchmark: Benchmark,
    config_hash: String,
    seed: u64,
    config: &'a SyntheticConfig,
    runs: Vec<SeedRow>,
    mean_wrkhs_mse_db: f64,
    mean_ablation_mse_db: f64,
}

#[derive(Serialize)]
struct EqualizationSummary<'a> {
    benchmark: Benchmark,
    config_hash: String,
    seed: u64,
    config: &'a EqualizationConfig,
    curve_len: usize,
    final_mse_db: f64,
}

fn print_json<T: Serialize>(v: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("config serializes");
    // a closed pipe (e.g. `| head`) is not an error here
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    match a.benchmark {
        Benchmark::Synthetic1 | Benchmark::Synthetic2 => {
            let mut cfg: SyntheticConfig = match &a.config {
                Some(p) => read_config(p)?,
                None if a.benchmark == Benchmark::Synthetic1 => SyntheticConfig::exp1(),
                None => SyntheticConfig::exp2(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if a.dump_config {
                print_json(&cfg);
                return Ok(());
            }
            bench_synthetic(cli, a, &cfg)
        }
        Benchmark::Equalization => {
            let mut cfg: EqualizationConfig = match &a.config {
                Some(p) => read_config(p)?,
                None => EqualizationConfig::circular(),
            };
            if let Some(s) = cli.seed {
                cfg.base_seed = s;
            }
            if a.dump_config {
                print_json(&cfg);
                return Ok(());
            }
            bench_equalization(cli, a, &cfg)
        }
    }
}

fn bench_synthetic(cli: &Cli, a: &BenchArgs, cfg: &SyntheticConfig) -> Result<()> {
    let hash = config_hash(&Hashed {
        benchmark: a.benchmark,
        seeds: a.seeds,
        config: cfg,
    });
    let runs = bench::synthetic_sweep(cfg, a.seeds)?;
    let name = a.benchmark.name();

    let first = &runs[0];
    let mut csv = CsvOut::new(
        &hash,
        cfg.seed,
        &["x_r", "x_j", "pred_r", "pred_j", "true_r", "true_j", "ablation_r", "ablation_j"],
    );
    for i in 0..first.grid.len() {
        let (x, p, t, b) = (first.grid[i], first.wrkhs_pred[i], first.truth[i], first.ablation_pred[i]);
        csv.row(&[x.re, x.im, p.re, p.im, t.re, t.im, b.re, b.im]);
    }
    csv.write(&cli.out_dir.join(format!("{name}_grid.csv")))?;

    let rows: Vec<SeedRow> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| SeedRow {
            seed: cfg.seed.wrapping_add(i as u64),
            wrkhs_mse_db: r.wrkhs_mse_db,
            ablation_mse_db: r.ablation_mse_db,
            gap_db: r.gap_db(),
        })
        .collect();
    let k = runs.len() as f64;
    let summary = SyntheticSummary {
        benchmark: a.benchmark,
        config_hash: hash,
        seed: cfg.seed,
        config: cfg,
        mean_wrkhs_mse_db: rows.iter().map(|r| r.wrkhs_mse_db).sum::<f64>() / k,
        mean_ablation_mse_db: rows.iter().map(|r| r.ablation_mse_db).sum::<f64>() / k,
        runs: rows,
    };
    write_json(&cli.out_dir.join(format!("{name}_summary.json")), &summary)?;
    for r in &summary.runs {
        println!(
            "seed={} wrkhs_mse_db={:.2} ablation_mse_db={:.2} gap_db={:.2}",
            r.seed, r.wrkhs_mse_db, r.ablation_mse_db, r.gap_db
        );
    }
    Ok(())
}

fn bench_equalization(cli: &Cli, a: &BenchArgs, cfg: &EqualizationConfig) -> Result<()> {
    let hash = config_hash(&Hashed {
        benchmark: a.benchmark,
        seeds: 1,
        config: cfg,
    });
    let res = bench::equalization(cfg)?;
    let mut csv = CsvOut::new(&hash, cfg.base_seed, &["sample_index", "avg_mse_db"]);
    for (i, v) in res.mse_db.iter().enumerate() {
        csv.indexed_row(i, &[*v]);
    }
    csv.write(&cli.out_dir.join("equalization_curve.csv"))?;
    let summary = EqualizationSummary {
        benchmark: a.benchmark,
        config_hash: hash,
        seed: cfg.base_seed,
        config: cfg,
        curve_len: res.mse_db.len(),
        final_mse_db: res.final_mse_db(),
    };
    write_json(&cli.out_dir.join("equalization_summary.json"), &summary)?;
    println!("trials={} final_mse_db={:.3}", res.trials, summary.final_mse_db);
    Ok(())
}
