//! `fracdyn` batch front end.
//!
//! Every subcommand prints one JSON report on stdout. The report carries the
//! effective configuration under `config`, so a report alone is enough to
//! rerun the command. Files (PGM rasters, CSV tables, model JSON) are written
//! below `--out-dir` when given a relative path.
//!
//! Failures print a single-line `{"error": "..."}` object on stderr and exit
//! with status 1 (status 2 for command-line usage errors).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Seed used by `fit-diff` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_220_000;

#[derive(Debug, Parser)]
#[command(name = "fracdyn", version, about = "Fractal dimension estimation and dimension-trend modelling")]
struct Cli {
    /// Directory that relative output paths resolve against; created on demand.
    #[arg(long, global = true, env = "FRACDYN_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Threshold a grayscale image into a 0/255 PGM.
    Binarize(BinarizeArgs),
    /// Cut a rectangle out of a grayscale image.
    Crop(CropArgs),
    /// Render a synthetic raster with known dimension.
    Synth(SynthArgs),
    /// Box-counting dimension of an image.
    Boxdim(BoxdimArgs),
    /// Radial (mass) dimension of an image.
    Radialdim(RadialdimArgs),
    /// Dimension time series from a manifest of yearly images.
    Series(SeriesArgs),
    /// Fit the short-term difference model to a dimension series.
    FitDiff(FitDiffArgs),
    /// Fit the long-term logistic model to a dimension series.
    FitLogistic(FitLogisticArgs),
    /// Stability band of the logistic map coefficient.
    Stability(StabilityArgs),
    /// Simulate the logistic map and classify its long-run behaviour.
    Orbit(OrbitArgs),
    /// Fit a piecewise exponential/linear population model.
    FitPop(FitPopArgs),
    /// Compare two population models by average-curvature ratios.
    ComparePop(ComparePopArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarityArg {
    /// Pixels at or above the threshold are occupied.
    Light,
    /// Pixels below the threshold are occupied.
    Dark,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Threshold {
    /// Gray level separating occupied from empty pixels. May be omitted only
    /// for images whose samples are all 0 or 255.
    #[arg(long)]
    pub threshold: Option<u8>,

    #[arg(long, value_enum, default_value_t = PolarityArg::Light)]
    pub polarity: PolarityArg,
}

#[derive(Debug, Args, Serialize)]
pub struct BinarizeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub threshold: Threshold,
    /// Output PGM.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write ASCII `P2` instead of binary `P5`.
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CropArgs {
    pub input: PathBuf,
    /// Region as `WxH+X+Y`.
    #[arg(long)]
    pub rect: String,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    SierpinskiTriangle,
    SierpinskiCarpet,
    FilledRect,
    Line,
    Disk,
    RandomDensity,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Side of the Sierpinski triangle (a power of two).
    #[arg(long)]
    pub n: Option<usize>,
    /// Recursion depth of the Sierpinski carpet (side `3^depth`).
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Length of the line (the frame is square).
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub radius: Option<usize>,
    /// Occupation probability for `random-density`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BoxdimArgs {
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub threshold: Threshold,
    /// Box sizes in pixels, strictly decreasing (default: powers of two).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Write the count table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterArg {
    Geometric,
    Centroid,
}

#[derive(Debug, Args, Serialize)]
pub struct RadialdimArgs {
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub threshold: Threshold,
    #[arg(long, value_enum, default_value_t = CenterArg::Geometric)]
    pub center: CenterArg,
    /// Radii in pixels, strictly increasing (default: `4 * sqrt(2)^k`).
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Box,
    Radial,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// CSV with header `year,path`; paths are relative to the manifest.
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = Estimator::Box)]
    pub estimator: Estimator,
    #[command(flatten)]
    #[serde(flatten)]
    pub threshold: Threshold,
    #[arg(long, value_enum, default_value_t = CenterArg::Geometric)]
    pub center: CenterArg,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output CSV with columns `t,d`.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FitDiffArgs {
    /// CSV with columns `t,d`.
    pub series: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random starts on top of the fixed grid.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FitLogisticArgs {
    /// CSV with columns `t,d`.
    pub series: PathBuf,
    /// Fixed lower bound of the curve.
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct StabilityArgs {
    /// Map coefficient.
    #[arg(long)]
    pub b: Option<f64>,
    /// Logistic growth rate; `b = r + 1`.
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Agreement tolerance for fixed points and cycles.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Write the orbit as CSV with columns `step,x`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitPopArgs {
    /// CSV with columns `year,population`.
    pub population: PathBuf,
    /// JSON array of `{t_start, t_end, kind}`.
    #[arg(long)]
    pub periods: PathBuf,
    /// Write the fitted model JSON here as well.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ComparePopArgs {
    /// Model JSON, or population CSV together with `--periods-a`.
    pub a: PathBuf,
    /// Model JSON, or population CSV together with `--periods-b`.
    pub b: PathBuf,
    #[arg(long)]
    pub periods_a: Option<PathBuf>,
    #[arg(long)]
    pub periods_b: Option<PathBuf>,
    /// Relative tolerance for calling two ratios similar.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

fn report_error(message: &str) {
    eprintln!("{}", serde_json::json!({ "error": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let detail: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            report_error(detail.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli.command, &cli.out_dir) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("reports are plain JSON")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(&format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}
