//! `windbid`: ingest market data, settle the three bidding scenarios,
//! size reserves and grade producers from the command line.

mod commands;
mod config;
mod data;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{RunConfig, Settings};
use error::CliResult;

#[derive(Parser)]
#[command(
    name = "windbid",
    version,
    about = "Two-settlement wind bidding simulator"
)]
struct Cli {
    /// TOML file supplying defaults for the shared flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert raw price and wind CSV files into canonical day files
    Ingest(commands::ingest::IngestArgs),
    /// Settle each scenario per day: profit and day-ahead quantity
    Simulate(commands::simulate::SimulateArgs),
    /// Per-hour optimal day-ahead bids
    Optimize(commands::optimize::OptimizeArgs),
    /// Quantile reserve per scenario and the producer's break-even margin
    Reserve(commands::reserve::ReserveArgs),
    /// Schedule adherence, grades and capacity factors per producer
    Monitor(commands::monitor::MonitorArgs),
    /// Write seeded synthetic canonical day files
    Synth(commands::synth::SynthArgs),
    /// Long-format plot data
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let cfg = RunConfig::resolve(cli.settings.over(file))?;
    match cli.command {
        Command::Ingest(args) => commands::ingest::run(&args, &cfg),
        Command::Simulate(args) => commands::simulate::run(&args, &cfg),
        Command::Optimize(args) => commands::optimize::run(&args, &cfg),
        Command::Reserve(args) => commands::reserve::run(&args, &cfg),
        Command::Monitor(args) => commands::monitor::run(&args, &cfg),
        Command::Synth(args) => commands::synth::run(&args, &cfg),
        Command::Report(args) => commands::report::run(&args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
