//! `topocube` command-line tool.
//!
//! Exit codes: 0 success, 2 I/O or format error (including bad arguments),
//! 3 semantic or shape error.

mod commands;
mod inputs;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topocube::persistence::EssentialDeath;
use topocube::volume::Dims;

/// Environment variable bounding the worker pool.
pub const THREADS_ENV: &str = "TOPOCUBE_THREADS";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

impl From<topocube::Error> for Failure {
    fn from(e: topocube::Error) -> Self {
        if e.is_input_error() {
            Failure::io(e.to_string())
        } else {
            Failure::semantic(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "topocube",
    version,
    about = "Cubical persistent homology and topological losses for 3D volumes"
)]
#[command(after_help = "The worker pool size can be bounded with TOPOCUBE_THREADS.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistence diagrams (dimensions 0, 1, 2) of a volume, as JSON.
    Diagram(DiagramArgs),
    /// Wasserstein or bottleneck distance between two volumes or diagram files.
    Distance(DistanceArgs),
    /// Topological loss of a prediction against a ground truth, as JSON.
    Loss(LossArgs),
    /// Shape reconstruction errors for prediction/truth pairs, as CSV.
    Metrics(MetricsArgs),
    /// Wasserstein error introduced by trilinear downsampling, as CSV.
    InterpAnalysis(InterpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Extents `N1,N2,N3` for headerless little-endian f32 inputs.
    #[arg(long, value_parser = parse_dims)]
    pub raw_dims: Option<Dims>,
    /// Death assigned to essential classes: a number, or `global-min`.
    #[arg(long, default_value = "0", value_parser = parse_essential)]
    pub essential_death: EssentialDeath,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    pub volume: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Wasserstein,
    Bottleneck,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// A volume, or a diagram JSON file (one diagram or an array of them).
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, value_enum, default_value = "wasserstein")]
    pub metric: Metric,
    /// Order of the Wasserstein distance.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Only compare this homology dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    pub truth: PathBuf,
    pub pred: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Weight of the topological term in the total loss.
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Homology dimensions, comma separated.
    #[arg(long, default_value = "0,1,2", value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Side of the cubic grid both volumes are resampled to.
    #[arg(long = "M", visible_alias = "downsample", default_value_t = 16)]
    pub m: usize,
    /// Compute on the full-resolution grid.
    #[arg(long, conflicts_with = "m")]
    pub no_downsample: bool,
    /// Geometric loss added to the weighted topological term.
    #[arg(long, default_value = "dice", value_parser = parse_geom)]
    pub geom: topocube::GeometricLoss,
    /// Writes the gradient of the total loss with respect to the prediction (NPY).
    #[arg(long)]
    pub grad_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Glob of prediction volumes.
    #[arg(required_unless_present = "manifest")]
    pub pred_glob: Option<String>,
    /// Glob of binary ground-truth volumes.
    #[arg(required_unless_present = "manifest")]
    pub truth_glob: Option<String>,
    /// CSV of `pred,truth[,id]` rows, used instead of glob pairing.
    #[arg(long, conflicts_with_all = ["pred_glob", "truth_glob"])]
    pub manifest: Option<PathBuf>,
    /// Gaussian width, in voxels, of the roughness smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Kernel radius in units of sigma.
    #[arg(long, default_value_t = 4.0)]
    pub truncate: f64,
    /// Level at which the smoothed mask is re-thresholded.
    #[arg(long, default_value_t = 0.5)]
    pub smooth_threshold: f64,
    /// Extents `N1,N2,N3` for headerless little-endian f32 inputs.
    #[arg(long, value_parser = parse_dims)]
    pub raw_dims: Option<Dims>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    /// Glob of volumes.
    pub volumes: String,
    /// Downsampled side lengths, comma separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub sides: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value = "0,1,2", value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let v = parse_usize_list(s)?;
    <[usize; 3]>::try_from(v).map_err(|_| "expected three extents N1,N2,N3".to_string())
}

fn parse_essential(s: &str) -> Result<EssentialDeath, String> {
    if s.eq_ignore_ascii_case("global-min") {
        return Ok(EssentialDeath::GlobalMin);
    }
    s.parse::<f64>()
        .map(EssentialDeath::Fixed)
        .map_err(|_| format!("{s:?} is neither a number nor `global-min`"))
}

fn parse_geom(s: &str) -> Result<topocube::GeometricLoss, String> {
    s.parse().map_err(|e: topocube::Error| e.to_string())
}

fn configure_pool() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            topocube::par::configure_threads(n);
            Ok(())
        }
        _ => Err(Failure::semantic(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_pool()?;
    match cli.command {
        Command::Diagram(a) => commands::diagram(&a),
        Command::Distance(a) => commands::distance(&a),
        Command::Loss(a) => commands::loss(&a),
        Command::Metrics(a) => commands::metrics(&a),
        Command::InterpAnalysis(a) => commands::interp_analysis(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print and succeed; usage errors exit 2.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("topocube: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
