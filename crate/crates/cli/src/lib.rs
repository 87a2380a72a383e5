//! Command-line scenario runner for the Liouville-space time operator.
//!
//! `timeop <subcommand> --config <path> [--out <dir>] [--seed <u64>]` reads an
//! INI-style scenario, runs one of `verify`, `survival`, `resonance`,
//! `decay-window` or `uncertainty`, prints a check table and writes
//! `<subcommand>.json` (plus `<subcommand>.csv` for time series) into the
//! output directory. Exit status is 0 when every check passes, 1 when a
//! check fails and 2 for usage or configuration errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sampling;
pub mod scenario;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ScenarioConfig;
pub use error::{CliError, CliResult};
pub use output::{Check, Summary};

#[derive(Debug, Parser)]
#[command(name = "timeop", version, about = "Time operator, Hardy projections and decay semigroups in Liouville space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant suite and print a pass/fail table.
    Verify(RunArgs),
    /// Liouville survival probability, with the Hilbert-space curve for pure states.
    Survival(RunArgs),
    /// Resonance eigenvalue residual and exponential survival.
    Resonance(RunArgs),
    /// Decay probability P(]0, t]) over the time grid.
    DecayWindow(RunArgs),
    /// Time and energy spreads and the uncertainty bound margin.
    Uncertainty(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding [output] dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized states of the verification suite.
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Verify(a)
            | Command::Survival(a)
            | Command::Resonance(a)
            | Command::DecayWindow(a)
            | Command::Uncertainty(a) => a,
        }
    }
}

fn execute(command: &Command) -> CliResult<Summary> {
    let args = command.args();
    let config = ScenarioConfig::load(&args.config)?;
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    log::info!("running {:?} with output in {}", command, out.display());
    let summary = match command {
        Command::Verify(_) => {
            let mut summary = Summary::new("verify", &config.echo);
            summary.checks = verify::run_suite(&config, args.seed.unwrap_or(config.seed))?;
            output::write_summary(&out, "verify.json", &summary)?;
            summary
        }
        Command::Survival(_) => commands::survival_command(&config, &out)?,
        Command::Resonance(_) => commands::resonance_command(&config, &out)?,
        Command::DecayWindow(_) => commands::decay_window_command(&config, &out)?,
        Command::Uncertainty(_) => commands::uncertainty_command(&config, &out)?,
    };
    Ok(summary)
}

/// Runs the tool on `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            print!("{}", output::format_table(&summary.checks));
            if !summary.metrics.is_empty() {
                print!("{}", commands::format_metrics(&summary));
            }
            if summary.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
