//! Command-line driver: dispersion tables, simulations, parameter
//! conversion and the elliptic oracle battery.

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod dispersion;
pub mod nondim;
pub mod oracle;
pub mod params_file;
pub mod simulate;

pub use viscwave::integrate::FORMAT_VERSION;

#[derive(Parser, Debug)]
#[command(name = "viscwave", version, about = "Viscous deep-water wave models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the complex dispersion relation for k = 0..=k_max.
    Dispersion {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 32)]
        k_max: i64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulation config, or every `*.toml` config in a directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Concurrent runs when `--config` is a directory.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Convert physical parameters (SI) to dimensionless model parameters.
    Nondim {
        #[arg(long)]
        params: PathBuf,
        /// TOML by default, reusable as a params file.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the first-order Dirichlet–Neumann expansion against the
    /// half-plane Poisson solver on a fixed battery of cases.
    OracleCheck {
        #[arg(long, default_value_t = viscwave::elliptic::DEFAULT_DEPTH)]
        depth: f64,
        #[arg(long, default_value_t = viscwave::elliptic::DEFAULT_LAYERS)]
        layers: usize,
        #[arg(long, default_value_t = 64)]
        n_points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input (exit 2).
    Validation(String),
    /// Non-finite state during a run (exit 3).
    BlowUp(String),
    /// Oracle residual above tolerance (exit 4).
    Oracle(String),
    /// Anything else, such as I/O (exit 1).
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Validation(_) => 2,
            CliError::BlowUp(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::BlowUp(m) => write!(f, "numerical blow-up: {m}"),
            CliError::Oracle(m) => write!(f, "oracle check failed: {m}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<viscwave::Error> for CliError {
    fn from(e: viscwave::Error) -> Self {
        use viscwave::Error as E;
        match e {
            E::BlowUp { .. } => CliError::BlowUp(e.to_string()),
            E::Io(_) => CliError::Other(anyhow::Error::new(e)),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Writes `text` to `out`, or to stdout when no path is given.
pub(crate) fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Dispersion {
            params,
            k_max,
            format,
            out,
        } => {
            let text = dispersion::render(&params_file::load_model_params(params)?, *k_max, *format)?;
            emit(out.as_ref(), &text)
        }
        Command::Simulate { config, out, jobs } => simulate::simulate_path(config, out, *jobs),
        Command::Nondim { params, format, out } => {
            let text = nondim::render(&params_file::load_physical(params)?, *format)?;
            emit(out.as_ref(), &text)
        }
        Command::OracleCheck {
            depth,
            layers,
            n_points,
            tolerance,
            format,
            jobs,
        } => oracle::oracle_check(*depth, *layers, *n_points, *tolerance, *format, *jobs),
    }
}
