//! `regsir`: simulate, analyze and fit the regulated SIR model from the
//! command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{analyze, assign, fit, simulate, sweep};
use crate::config::RunConfig;
use crate::error::{CliError, EXIT_INVALID};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "regsir",
    version,
    about = "Regulated SIR epidemics with contact-rate feedback"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON parameter file.
    #[arg(long, global = true, value_name = "JSON")]
    params: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Simulated days.
    #[arg(long, global = true, default_value_t = 200.0)]
    horizon: f64,
    /// Output file (a directory for `sweep`); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one of the model variants and print daily samples.
    Simulate(simulate::SimulateArgs),
    /// Steady states, assumptions, Lyapunov check and phase-plane samples.
    Analyze,
    /// Fit the normalized model to a daily-incidence series.
    Fit(fit::FitArgs),
    /// Run the full model over several population sizes at fixed `c S(0)`.
    Sweep(sweep::SweepArgs),
    /// Perception gain that places the endemic state at a target level.
    Assign(assign::AssignArgs),
}

/// Settings every command sees.
pub struct Context {
    pub config: RunConfig,
    pub format: Format,
    pub horizon: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let CommonArgs {
        params,
        format,
        horizon,
        out,
        seed,
    } = cli.common;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(CliError::Invalid(format!(
            "--horizon must be a nonnegative number of days, got {horizon}"
        )));
    }
    let ctx = Context {
        config: RunConfig::load(params.as_deref())?,
        format,
        horizon,
        out,
        seed,
    };
    // every command computes all of its outputs before anything is written
    let outputs = match &cli.command {
        Command::Simulate(args) => simulate::run(&ctx, args)?,
        Command::Analyze => analyze::run(&ctx)?,
        Command::Fit(args) => fit::run(&ctx, args)?,
        Command::Sweep(args) => sweep::run(&ctx, args)?,
        Command::Assign(args) => assign::run(&ctx, args)?,
    };
    for (path, bytes) in &outputs {
        output::emit(path.as_deref(), bytes)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INVALID as u8
            } else {
                0
            });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
