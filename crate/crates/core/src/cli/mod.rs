//! Command-line driver: point clouds in, diagrams, landscapes, reports and
//! plots out.
//!
//! Every command validates its flags, computes all outputs in memory and
//! only then writes them, each through a temporary file renamed into place.
//! The resolved configuration is echoed next to the outputs as
//! `<command>.run_config.json`.

mod commands;
mod files;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::TdaError;
use crate::inference::Permutations;
use crate::metric::Metric;

pub use files::RunConfig;

/// Exit status for invalid flags or arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for unreadable or inconsistent input data.
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] TdaError),
    #[error("{path}: {source}")]
    InFile { path: String, source: TdaError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) | CliError::InFile { .. } => EXIT_DATA,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(TdaError::Io(e))
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "tdakit",
    version,
    about = "Persistent homology summaries and inference for point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rips persistence of CSV point clouds: writes diagram and barcode CSVs.
    Persist(PersistArgs),
    /// Persistence landscapes of diagram CSVs.
    Landscape(LandscapeArgs),
    /// Wasserstein or bottleneck distance between two diagram CSVs.
    Distance(DistanceArgs),
    /// Fréchet mean of a sample of diagram CSVs.
    Mean(MeanArgs),
    /// Bootstrap confidence band for the diagram of a point cloud.
    Band(BandArgs),
    /// Two-sample test between two directories of summaries.
    Test(TestArgs),
    /// SVG plots of diagram, barcode and landscape files.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CloudArgs {
    /// Distance between points: p1, p2, pN (any N >= 1) or max.
    #[arg(long, default_value = "p2", value_parser = parse_metric)]
    pub metric: Metric,
    /// Largest homology dimension reported; simplices up to one higher are built.
    #[arg(long, default_value_t = 1)]
    pub max_dim: usize,
    /// Filtration cutoff, or `auto` for the cloud diameter.
    #[arg(long, default_value = "auto", value_parser = parse_scale)]
    pub max_scale: Scale,
    /// Skip the first row of each CSV.
    #[arg(long)]
    pub skip_header: bool,
    /// Field separator of the point CSVs.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Args)]
pub struct DiagramArgs {
    /// Homology dimension; repeat for several.
    #[arg(long = "dim", value_name = "H")]
    pub dims: Vec<usize>,
    /// Truncation cap for infinite deaths. Defaults to the max_scale recorded
    /// by `persist` next to the diagram, else the largest finite value.
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PersistArgs {
    /// Point cloud CSV files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub cloud: CloudArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LandscapeArgs {
    /// Diagram CSV files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub diagram: DiagramArgs,
    /// Also write each landscape sampled at this many points of [0, cap].
    #[arg(long)]
    pub grid_resolution: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub diagram: DiagramArgs,
    /// Wasserstein exponent, or `inf` for the bottleneck distance.
    #[arg(long, default_value = "2", value_parser = parse_exponent)]
    pub p: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MeanArgs {
    /// Diagram CSV files forming the sample.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub diagram: DiagramArgs,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BandArgs {
    /// Point cloud CSV file.
    pub input: PathBuf,
    #[command(flatten)]
    pub cloud: CloudArgs,
    /// Homology dimension; repeat for several.
    #[arg(long = "dim", value_name = "H", default_value = "1")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap rounds.
    #[arg(long, default_value_t = 200)]
    pub boot: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Permutation test on the joint Wasserstein loss of diagrams.
    Diagram,
    /// Permutation test on the landscape integral.
    Landscape,
    /// Welch t-test on the landscape integral.
    TTest,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Directory with the first group's summaries.
    pub group1: PathBuf,
    /// Directory with the second group's summaries.
    pub group2: PathBuf,
    #[arg(long, value_enum, default_value = "landscape")]
    pub method: MethodArg,
    #[command(flatten)]
    pub diagram: DiagramArgs,
    /// Random relabelings, or `exhaustive`.
    #[arg(long, default_value = "10000", value_parser = parse_perms)]
    pub perms: Permutations,
    /// Wasserstein exponent of the diagram test.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Diagram,
    Barcode,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// `.diagram.csv`, `.barcode.csv` or `.landscape.json` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// How to draw diagram CSVs.
    #[arg(long, value_enum, default_value = "diagram")]
    pub kind: PlotKind,
    #[command(flatten)]
    pub out: OutArgs,
}

/// A fixed filtration cutoff or the cloud diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Auto,
    Fixed(f64),
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    Metric::from_str(s).map_err(|e| e.to_string())
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Scale::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Scale::Fixed(v)),
        _ => Err(format!("expected `auto` or a positive number, got {s:?}")),
    }
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(p) if p >= 1.0 => Ok(p),
        _ => Err(format!("expected a number >= 1 or `inf`, got {s:?}")),
    }
}

fn parse_perms(s: &str) -> Result<Permutations, String> {
    if s.eq_ignore_ascii_case("exhaustive") {
        return Ok(Permutations::Exhaustive);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Permutations::Sampled(n)),
        _ => Err(format!(
            "expected a positive count or `exhaustive`, got {s:?}"
        )),
    }
}

/// Runs one parsed command and returns its summary lines.
pub fn execute(cli: Cli) -> Result<Vec<String>, CliError> {
    match cli.command {
        Command::Persist(a) => commands::persist(&a),
        Command::Landscape(a) => commands::landscape(&a),
        Command::Distance(a) => commands::distance(&a),
        Command::Mean(a) => commands::mean(&a),
        Command::Band(a) => commands::band(&a),
        Command::Test(a) => commands::test(&a),
        Command::Plot(a) => commands::plot(&a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
