//! Command-line frontend. Every command writes its artifacts plus a
//! `manifest.json` into `--out`, or prints the artifact to stdout and the
//! manifest to stderr when `--out` is absent.

mod commands;
mod format;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg::HeisError;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "heisenberg", version, about = "Geodesics, contractions and energies of maps into the Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Carnot-Caratheodory and gauge distance between two points.
    Distance(DistanceArgs),
    /// CSV of points along the geodesic between two points.
    Geodesic(GeodesicArgs),
    /// Measure-contraction scan of the geodesic contraction Jacobian in H^1.
    Mcp(McpArgs),
    /// Energy of a sampled map.
    Energy(EnergyArgs),
    /// Isotropically constrained Dirichlet minimisation with lifting.
    Minimize(MinimizeArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory; created if missing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Target dimension; inferred from the points when omitted.
    #[arg(long)]
    pub m: Option<usize>,
    /// First point: `x1,..,xm,y1,..,ym,t` or a JSON array.
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    /// Second point.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Number of equispaced samples in s, endpoints included.
    #[arg(long, default_value_t = 17)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct McpArgs {
    #[arg(long, default_value_t = 0.5)]
    pub sbar: f64,
    /// Base point of the contraction in H^1.
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    pub p0: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Comma-separated band half-widths.
    #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub thresholds: String,
    #[arg(long, default_value_t = 0.1)]
    pub radius_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius_max: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyKind {
    Ks,
    Pansu,
    Horizontal,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    /// Sampled map JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: EnergyKind,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Ball radius of the approximate energy (required for `ks`).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value = "gauge")]
    pub metric: String,
    /// Seed of the quasi-Monte-Carlo shift.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 16)]
    pub qmc_points: usize,
    /// `bump`, `one`, or a JSON file with one weight per node. Defaults to
    /// `bump` for `ks` and `one` otherwise.
    #[arg(long)]
    pub weight: Option<String>,
    /// Distance from the boundary at which the bump weight vanishes;
    /// defaults to epsilon (or 0).
    #[arg(long)]
    pub margin: Option<f64>,
    /// Largest admissible cell Legendrian residual for `pansu`.
    #[arg(long, default_value_t = 1e-3)]
    pub legendrian_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Boundary data JSON `{"m", "values", "anchor_t"}`.
    #[arg(long)]
    pub boundary: PathBuf,
    /// Grid size `NX,NY`.
    #[arg(long)]
    pub grid: String,
    /// Domain rectangle `X0,Y0,X1,Y1`.
    #[arg(long, default_value = "0,0,1,1", allow_hyphen_values = true)]
    pub extent: String,
    /// Solver settings JSON; the flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub inner_tol: Option<f64>,
    #[arg(long)]
    pub constraint_tol: Option<f64>,
    #[arg(long)]
    pub max_inner_iters: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Successful termination states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Done => 0,
            Status::NotConverged => 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] HeisError),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_input_error() => 2,
            CliError::Lib(_) => 3,
            CliError::Input(_) | CliError::Io { .. } => 2,
        }
    }
}
