//! Batch front end for the `qmeasure` crate: hypothesis checks, measure
//! reconstruction, expansion experiments and verification suites, written
//! as JSON/CSV artifacts.

pub mod commands;
pub mod config;
pub mod suite;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qmeasure::Beta0Mode;

pub use config::{FamilySpec, FunctionSelection, Overrides, RunConfig, Suite};

pub const EXIT_OK: i32 = 0;
/// A checked condition or verdict does not hold.
pub const EXIT_FAIL: i32 = 1;
/// Bad flags, seed file or coefficient table.
pub const EXIT_USAGE: i32 = 2;
/// Some hypothesis could not be decided on the checked range.
pub const EXIT_INCONCLUSIVE: i32 = 3;
/// The measure did not stabilize within `nmax`.
pub const EXIT_CONVERGENCE: i32 = 4;
/// Any other numerical or I/O failure.
pub const EXIT_ERROR: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("coefficient input: {0}")]
    Ingest(qmeasure::Error),

    #[error(transparent)]
    Compute(#[from] qmeasure::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Ingest(_) => EXIT_USAGE,
            CliError::Compute(qmeasure::Error::Convergence { .. }) => EXIT_CONVERGENCE,
            CliError::Compute(_) | CliError::Io { .. } => EXIT_ERROR,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qmeasure",
    version,
    about = "Orthogonality measures of compact Jacobi matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural hypotheses and the admissible c-interval.
    Check(Flags),
    /// Reconstruct the top-K support points and masses.
    Measure(Flags),
    /// Sup errors of Fourier partial sums of test functions.
    Expand(Flags),
    /// Lebesgue constants over the resolved support.
    Lebesgue(Flags),
    /// Product linearization coefficients g(n, m, k).
    Linearize(Flags),
    /// Run a verification suite; exit 0 iff every verdict holds.
    Verify(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Example family parameter a in (0, 1).
    #[arg(long)]
    pub a: Option<f64>,
    /// Example family parameter q in (0, 1).
    #[arg(long)]
    pub q: Option<f64>,
    /// gamma-only or alpha-plus-gamma.
    #[arg(long)]
    pub beta0_mode: Option<Beta0Mode>,
    /// CSV coefficient table with header n,alpha,gamma.
    #[arg(long, conflicts_with_all = ["a", "q"])]
    pub table: Option<PathBuf>,
    /// Extension past the end of the table: none or geometric.
    #[arg(long, value_parser = config::parse_tail)]
    pub tail: Option<qmeasure::TailExtension>,
    /// Number of resolved support points (and checked hypothesis range).
    #[arg(long)]
    pub k: Option<usize>,
    /// Largest truncation size.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Relative stabilization tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Resolution of the c grid.
    #[arg(long)]
    pub c_grid: Option<f64>,
    /// Largest expansion degree / Lebesgue index.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Largest n and m for linearization.
    #[arg(long)]
    pub lin_max: Option<usize>,
    /// Test function name, or `all`.
    #[arg(long)]
    pub function: Option<FunctionSelection>,
    /// Verification suite.
    #[arg(long)]
    pub suite: Option<Suite>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value seed file; flags override it.
    #[arg(long)]
    pub seed_config: Option<PathBuf>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            a: self.a,
            q: self.q,
            table: self.table.clone(),
            tail: self.tail,
            beta0_mode: self.beta0_mode,
            k: self.k,
            n_max: self.nmax,
            rel_tol: self.rel_tol,
            c_grid: self.c_grid,
            degree: self.degree,
            lin_max: self.lin_max,
            function: self.function,
            suite: self.suite,
            out: self.out.clone(),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let flags = match &cli.command {
        Command::Check(f)
        | Command::Measure(f)
        | Command::Expand(f)
        | Command::Lebesgue(f)
        | Command::Linearize(f)
        | Command::Verify(f) => f,
    };
    let result =
        RunConfig::resolve(flags.seed_config.as_deref(), &flags.overrides()).and_then(|config| match cli.command {
            Command::Check(_) => commands::cmd_check(&config),
            Command::Measure(_) => commands::cmd_measure(&config),
            Command::Expand(_) => commands::cmd_expand(&config),
            Command::Lebesgue(_) => commands::cmd_lebesgue(&config),
            Command::Linearize(_) => commands::cmd_linearize(&config),
            Command::Verify(_) => suite::cmd_verify(&config),
        });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
