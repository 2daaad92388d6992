//! Command-line front end for the job-shop scheduling toolkit: instance
//! generation, rule evaluation, benchmark sweeps, and rule evolution.

mod commands;
mod config;
mod io;
mod provider;
mod rundir;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit code for run-level failures: an aborted evolution run or a sweep
/// with failed cells.
pub const EXIT_RUN_FAILURE: u8 = 1;
/// Exit code for input and configuration errors.
pub const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "shopevo",
    version,
    about = "Dynamic job-shop scheduling: dispatching rules, benchmarks, and rule evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded scheduling instances
    Generate(commands::generate::Args),
    /// Evaluate one rule on instance files
    Evaluate(commands::evaluate::Args),
    /// Evolve dispatching rules with a text-generation provider
    Evolve(commands::evolve::Args),
    /// Adapt a trained run to new cases with one evolution iteration
    Apply(commands::apply::Args),
    /// Sweep rules over an instance set and report makespans and gaps
    Bench(commands::bench::Args),
    /// Re-render a saved bench report
    Report(commands::report::Args),
    /// Check that instance and rule files parse
    Validate(commands::validate::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Evolve(args) => commands::evolve::run(args),
        Command::Apply(args) => commands::apply::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Report(args) => commands::report::run(args),
        Command::Validate(args) => commands::validate::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
