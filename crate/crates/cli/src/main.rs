//! `spintomo` — reproducible spin-correlation runs from the command line.
//!
//! Four commands cover the full analysis chain:
//!
//! * `demo` — walk through the closed-form CHSH example and self-check
//!   every number against its analytic value.
//! * `generate` — produce a seeded decay-event ensemble as a plain-text
//!   event file.
//! * `tomograph` — reconstruct the spin density matrix from an event file,
//!   with bootstrap uncertainties and witness significances.
//! * `scan` — tabulate entanglement and non-locality across the production
//!   angle, optionally with Monte Carlo closure columns.
//!
//! Every command is deterministic given its full flag set. Flags can also be
//! given through `--config FILE` (flat `key=value` lines); explicit flags
//! take precedence over file values.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 physics self-check
//! failure.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "spintomo",
    version,
    about = "Two-qubit spin correlations: event generation, tomography, and Bell tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walk through the closed-form CHSH example and self-check the numbers
    Demo {
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a decay-event ensemble and write it as an event file
    Generate(SharedArgs),
    /// Reconstruct the spin state from an event file, with uncertainties
    Tomograph {
        /// Event file produced by `generate`
        file: PathBuf,
        #[command(flatten)]
        args: SharedArgs,
    },
    /// Tabulate entanglement and non-locality across the production angle
    Scan(SharedArgs),
}

/// Flags shared across the data commands; each command reads the subset it
/// needs and applies its own defaults.
#[derive(Args, Clone, Default)]
struct SharedArgs {
    /// Master RNG seed; for `tomograph` this seeds the bootstrap and
    /// defaults to the seed recorded in the event file
    #[arg(long)]
    seed: Option<u64>,
    /// Number of events; for `scan` this switches the Monte Carlo columns on
    #[arg(long)]
    events: Option<u64>,
    /// Fix the production angle Θ in radians; omit to sample it from the
    /// production law
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Direction basis: `helicity` or `fixed-lab`
    #[arg(long)]
    frame: Option<String>,
    /// Spin-analyzing power of the first decay, in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    alpha_plus: Option<f64>,
    /// Spin-analyzing power of the second decay, in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    alpha_minus: Option<f64>,
    /// Bootstrap resamples, at least 100 (default 1000)
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Keep a decay pair only when both daughters satisfy |n_z| ≤ CUT
    #[arg(long, allow_negative_numbers = true)]
    acceptance_cut: Option<f64>,
    /// Positivity tolerance when gating reconstructed states
    #[arg(long, allow_negative_numbers = true)]
    tol_psd: Option<f64>,
    /// Scan grid start in radians (scan only, default 0)
    #[arg(long, allow_negative_numbers = true)]
    theta_start: Option<f64>,
    /// Scan grid stop in radians (scan only, default π)
    #[arg(long, allow_negative_numbers = true)]
    theta_stop: Option<f64>,
    /// Scan grid size, at least 2 (scan only, default 25)
    #[arg(long)]
    theta_points: Option<usize>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

/// CLI failure classes, each tied to one exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config values — exit 2.
    Usage(String),
    /// Unreadable or malformed input data — exit 3.
    Data(String),
    /// A physics self-check failed — exit 4.
    Physics(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Physics(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Physics(m) => m,
        }
    }
}

impl From<spintomo::Error> for CliError {
    fn from(e: spintomo::Error) -> Self {
        use spintomo::Error as E;
        match &e {
            E::Io(_) | E::Parse { .. } | E::TooFewEvents { .. } => CliError::Data(e.to_string()),
            E::Unphysical { .. }
            | E::NegativeDensity { .. }
            | E::BootstrapUnstable { .. }
            | E::NotHermitian { .. }
            | E::WrongTrace { .. }
            | E::NotNormalized { .. } => CliError::Physics(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demo { out } => commands::demo(out.as_deref()),
        Command::Generate(args) => RunConfig::resolve(&args).and_then(|rc| commands::generate(&rc)),
        Command::Tomograph { file, args } => {
            RunConfig::resolve(&args).and_then(|rc| commands::tomograph(&file, &rc))
        }
        Command::Scan(args) => RunConfig::resolve(&args).and_then(|rc| commands::scan(&rc)),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
