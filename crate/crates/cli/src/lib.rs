//! Batch front-end for `rpifs-core`: reads a system description, runs one
//! experiment and renders a CSV or JSON artifact.

mod commands;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rpifs_core::Error;

pub use commands::{cmd_attractor, cmd_dimension, cmd_quantize, cmd_sample, cmd_verify, load_spec, SpecSource};

#[derive(Debug, Parser)]
#[command(name = "rpifs", version, about = "Attractors, dimension and quantization of projective IFS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponent of the zeta function and a hyperbolicity certificate (JSON).
    Dimension(DimensionArgs),
    /// Cylinder cones at a fixed depth (CSV).
    Attractor(AttractorArgs),
    /// Chaos-game samples from the invariant measure (CSV).
    Sample(SampleArgs),
    /// Quantization error table over a range of n (CSV).
    Quantize(QuantizeArgs),
    /// Run the invariant checks and report each one (JSON).
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// System JSON file; the bundled Cantor system when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BaseArgs {
    /// Lower end of the base cone (chart coordinate).
    #[arg(long, requires = "base_hi", allow_hyphen_values = true)]
    pub base_lo: Option<f64>,
    /// Upper end of the base cone (chart coordinate).
    #[arg(long, requires = "base_lo", allow_hyphen_values = true)]
    pub base_hi: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Product length used for the level ratio and the certificate.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Bisection tolerance on the critical exponent.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AttractorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chaos-game iterates discarded before output.
    #[arg(long, default_value_t = 64)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, Args)]
pub struct QuantizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Order of the error; exact tables exist for r = 2 only.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Discretization depth of the oracle.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Lloyd stops once an iteration lowers the error by less than this.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub base: BaseArgs,
    /// Largest n used by the quantization checks.
    #[arg(long, default_value_t = 32)]
    pub n_max: usize,
    /// Discretization depth of the oracle.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Lloyd stopping tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure of a subcommand, mapped to the process exit status.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Resource(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Rendered output of a subcommand and the exit status it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub text: String,
    pub exit_code: i32,
    /// Message for stderr, e.g. the names of failed checks.
    pub notice: Option<String>,
}

/// Exit status of `verify` when at least one check fails.
pub const EXIT_CHECK_FAILED: i32 = 4;

pub fn run(cli: &Cli) -> Result<Artifact, CliError> {
    match &cli.command {
        Command::Dimension(a) => cmd_dimension(a),
        Command::Attractor(a) => cmd_attractor(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Quantize(a) => cmd_quantize(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Where the artifact of `cli` should be written.
pub fn output_path(cli: &Cli) -> Option<&PathBuf> {
    let common = match &cli.command {
        Command::Dimension(a) => &a.common,
        Command::Attractor(a) => &a.common,
        Command::Sample(a) => &a.common,
        Command::Quantize(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    common.out.as_ref()
}
