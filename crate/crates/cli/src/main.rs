//! `tfscreen` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tfscreen",
    version,
    about = "Thomas-Fermi screening functions: reference solution, fits and comparisons"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the primary output to this file instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Tolerance override: ODE tolerance for the reference solution, simplex
    /// diameter for fits.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Neither read nor write the fitted-parameter cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Sommerfeld,
    Mueller1,
    Mueller2,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::Sommerfeld, ModelName::Mueller1, ModelName::Mueller2];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Sommerfeld => "sommerfeld",
            ModelName::Mueller1 => "mueller1",
            ModelName::Mueller2 => "mueller2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    Normalized,
    Slope,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Args)]
pub struct GridOpts {
    #[arg(long, default_value_t = 1e-3)]
    pub xmin: f64,
    #[arg(long, default_value_t = 1e3)]
    pub xmax: f64,
    #[arg(long, default_value_t = 400)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the neutral-atom screening function and tabulate it.
    Solve {
        /// Number of log-spaced table points.
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Largest tabulated radius.
        #[arg(long, default_value_t = 1000.0)]
        xmax: f64,
    },
    /// Fix the parameters of an approximant.
    Fit {
        #[arg(value_enum)]
        model: ModelName,
        /// Condition used for Müller-1.
        #[arg(long, value_enum, default_value_t = FitMode::Normalized)]
        mode: FitMode,
    },
    /// Evaluate an approximant at given radii.
    Eval {
        #[arg(value_enum)]
        model: ModelName,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        x: Vec<f64>,
        /// JSON parameter record to use instead of the defaults.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Compare approximants with the reference solution.
    Compare {
        /// Models to compare; all of them when empty.
        #[arg(value_enum)]
        models: Vec<ModelName>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        grid: GridOpts,
        /// Also write the plot dataset (radius, reference, one column per model).
        #[arg(long)]
        emit_fig1: Option<PathBuf>,
    },
    /// Unit conversion factors for nuclear charge Z.
    Units {
        #[arg(allow_hyphen_values = true)]
        z: i64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<tfscreen::Error> for CliError {
    fn from(e: tfscreen::Error) -> Self {
        match e {
            tfscreen::Error::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
