use std::path::PathBuf;

use chrono::NaiveDate;
use clap::Args;
use windbid::ingest::write_canonical_file;
use windbid::synth::{synth_days, SynthConfig};

use crate::config::RunConfig;
use crate::data::day_file;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    /// First day to generate
    #[arg(long, default_value = "2021-11-01")]
    pub start: NaiveDate,
    /// Number of consecutive days
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 2000.0)]
    pub capacity_mw: f64,
}

pub fn run(args: &SynthArgs, cfg: &RunConfig) -> CliResult<()> {
    let synth = SynthConfig {
        intervals_per_hour: cfg.intervals_per_hour,
        capacity_mw: args.capacity_mw,
        ..SynthConfig::default()
    };
    let days = synth_days(args.start, args.count, &synth, cfg.seed).map_err(CliError::usage)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    for series in &days {
        let path = day_file(&args.out_dir, series.grid.day());
        write_canonical_file(series, &path).map_err(|e| CliError::ingest(&path, e))?;
    }
    println!(
        "synth: wrote {} day file(s) to {} (seed {}, {} intervals per hour)",
        days.len(),
        args.out_dir.display(),
        cfg.seed,
        cfg.intervals_per_hour
    );
    Ok(())
}
