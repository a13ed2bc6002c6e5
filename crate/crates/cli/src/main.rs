//! `dscatter`: grids, transforms, scattering sweeps, checks and the exact
//! matroid verification from one entry point.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "dscatter", version, about = "Two-dimensional d-bar scattering transform toolkit")]
pub struct Cli {
    /// `key = value` parameter file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the run manifest here instead of stdout.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Worker threads for k-sweeps.
    #[arg(long, global = true, env = "DSCATTER_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a sample potential.
    Gen(GenArgs),
    /// Fourier transform onto the dual window.
    Fft(TransformArgs),
    /// Cauchy transform, its conjugate partner, the fractional integral or a spectral derivative.
    Cauchy(CauchyArgs),
    /// Sample R(q) on a k-lattice.
    Scatter(ScatterArgs),
    /// Apply the inverse map to scattering data.
    Inverse(InverseArgs),
    /// Terms and remainder of the expansion of R(q).
    Expand(ExpandArgs),
    /// Numerical identity checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Exact basis-pair and polytope verification for E1 or E2.
    Matroid(MatroidArgs),
    /// Weighted Sobolev and Lebesgue norms of a grid.
    Norms(NormsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PotentialKind {
    Gaussian,
    Zero,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: PotentialKind,
    #[arg(long)]
    amp: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write `x1,x2,re,im` rows for plotting.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Map k-samples back to the x-window instead.
    #[arg(long)]
    inverse: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CauchyOp {
    Cauchy,
    ConjCauchy,
    Riesz,
    Dbar,
    Partial,
}

#[derive(Debug, Args)]
pub struct CauchyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "cauchy")]
    op: CauchyOp,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    NeumannThenKrylov,
    NeumannOnly,
    KrylovOnly,
}

impl std::str::FromStr for MethodArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long)]
    kn: Option<usize>,
    #[arg(long = "kL")]
    k_half_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long)]
    q: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    #[arg(long)]
    r: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Points per side of the output x-grid.
    #[arg(long)]
    n: Option<usize>,
    /// Half-width of the output x-grid.
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    q: PathBuf,
    /// Number of expansion terms.
    #[arg(long = "N")]
    order: usize,
    #[arg(long = "out-prefix")]
    out_prefix: String,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Relative defect between ‖q‖² and ‖R(q)‖².
    Plancherel(CheckArgs),
    /// Relative L² error of I(R(q)) against q.
    Roundtrip(CheckArgs),
    /// Finite-difference residual of the k̄-derivative equation.
    DbarK(CheckArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    q: PathBuf,
    #[command(flatten)]
    lattice: LatticeArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Pass threshold; each check has its own default.
    #[arg(long)]
    limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "E1")]
    E1,
    #[value(name = "E2")]
    E2,
}

#[derive(Debug, Args)]
pub struct MatroidArgs {
    #[arg(long, value_enum, ignore_case = true)]
    family: FamilyArg,
    #[arg(long = "N")]
    order: usize,
    /// Put the full per-pair table in the manifest.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: dscatter::grids::FormatError },
    #[error("{0}")]
    Numeric(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numeric(_) => 4,
            CliError::CheckFailed(_) => 5,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dscatter: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
