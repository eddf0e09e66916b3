use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use windbid::ingest::{
    assemble_day, parse_csv_file, write_canonical_file, AssemblyMethods, ColumnMap, GapPolicy,
    IngestError, RawSeries, ResampleMethod, SeriesKind,
};
use windbid::TimeGrid;

use crate::config::RunConfig;
use crate::data::day_file;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Duration-weighted mean of the held values
    Mean,
    /// Last value at or before each interval start
    Last,
    /// Linear interpolation at interval midpoints
    Linear,
}

impl From<Method> for ResampleMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Mean => ResampleMethod::TimeWeightedMean,
            Method::Last => ResampleMethod::Last,
            Method::Linear => ResampleMethod::LinearToGrid,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Hourly day-ahead price file
    #[arg(long)]
    pub dam: PathBuf,
    /// Real-time price file
    #[arg(long)]
    pub rtm: PathBuf,
    /// Actual wind output file
    #[arg(long)]
    pub wind: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Only assemble this local day
    #[arg(long)]
    pub day: Option<NaiveDate>,
    #[arg(long, default_value = "Time Stamp")]
    pub timestamp_column: String,
    #[arg(long, default_value = "LBMP ($/MWHr)")]
    pub price_column: String,
    #[arg(long, default_value = "MW")]
    pub wind_column: String,
    /// Keep only price rows where COLUMN equals VALUE, e.g. Name=N.Y.C.
    #[arg(long, value_name = "COLUMN=VALUE")]
    pub price_filter: Option<String>,
    /// Keep only wind rows where COLUMN equals VALUE
    #[arg(long, value_name = "COLUMN=VALUE")]
    pub wind_filter: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Last)]
    pub dam_method: Method,
    #[arg(long, value_enum, default_value_t = Method::Mean)]
    pub rtm_method: Method,
    #[arg(long, value_enum, default_value_t = Method::Mean)]
    pub wind_method: Method,
}

fn columns(ts: &str, value: &str, filter: Option<&str>) -> CliResult<ColumnMap> {
    let map = ColumnMap::new(ts, value);
    match filter {
        None => Ok(map),
        Some(f) => match f.split_once('=') {
            Some((col, val)) if !col.is_empty() => Ok(map.with_filter(col, val)),
            _ => Err(CliError::Usage(format!(
                "filter expects COLUMN=VALUE, got {f:?}"
            ))),
        },
    }
}

struct Loaded {
    series: RawSeries,
    rows: usize,
    filled: usize,
}

/// Parses, puts holes in the timestamp sequence on the modal step and fills
/// short gaps.
fn load(
    path: &Path,
    kind: SeriesKind,
    cols: &ColumnMap,
    cfg: &RunConfig,
    policy: GapPolicy,
) -> CliResult<Loaded> {
    let mut raw =
        parse_csv_file(path, kind, cols, &cfg.timezone).map_err(|e| CliError::ingest(path, e))?;
    let rows = raw.points.len() + raw.duplicates_dropped;
    if let Some(step) = raw.modal_step() {
        raw.regularize(step);
    }
    let filled = raw.missing_count();
    let series = raw.filled(policy).map_err(|e| CliError::ingest(path, e))?;
    Ok(Loaded {
        series,
        rows,
        filled,
    })
}

pub fn run(args: &IngestArgs, cfg: &RunConfig) -> CliResult<()> {
    for path in [&args.dam, &args.rtm, &args.wind] {
        if !path.is_file() {
            return Err(CliError::MissingFile(path.display().to_string()));
        }
    }
    let price_cols = columns(
        &args.timestamp_column,
        &args.price_column,
        args.price_filter.as_deref(),
    )?;
    let wind_cols = columns(
        &args.timestamp_column,
        &args.wind_column,
        args.wind_filter.as_deref(),
    )?;
    let policy = cfg.gap_policy;
    let dam = load(&args.dam, SeriesKind::DamPrice, &price_cols, cfg, policy)?;
    let rtm = load(&args.rtm, SeriesKind::RtmPrice, &price_cols, cfg, policy)?;
    let wind = load(&args.wind, SeriesKind::WindMw, &wind_cols, cfg, policy)?;

    let methods = AssemblyMethods {
        dam: args.dam_method.into(),
        rtm: args.rtm_method.into(),
        wind: args.wind_method.into(),
    };
    let candidates: Vec<NaiveDate> = match args.day {
        Some(day) => vec![day],
        None => {
            let local =
                |p: &windbid::ingest::RawPoint| p.ts.with_timezone(&cfg.timezone).date_naive();
            let pts = &wind.series.points;
            let (first, last) = (local(&pts[0]), local(&pts[pts.len() - 1]));
            first.iter_days().take_while(|d| *d <= last).collect()
        }
    };

    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let mut written = 0;
    let mut skipped = 0;
    for day in candidates {
        let outcome = TimeGrid::for_local_day(day, cfg.intervals_per_hour, &cfg.timezone)
            .map_err(IngestError::from)
            .and_then(|grid| assemble_day(&dam.series, &rtm.series, &wind.series, &grid, methods));
        match outcome {
            Ok(series) => {
                let path = day_file(&args.out_dir, day);
                write_canonical_file(&series, &path).map_err(|e| CliError::ingest(&path, e))?;
                written += 1;
            }
            Err(e) if args.day.is_some() => return Err(CliError::Data(format!("{day}: {e}"))),
            Err(e) => {
                eprintln!("warning: skipped {day}: {e}");
                skipped += 1;
            }
        }
    }
    if written == 0 {
        return Err(CliError::Data("no complete day in the input files".into()));
    }
    println!(
        "ingest: wrote {written} day file(s) to {}; rows dam={} rtm={} wind={}; gaps filled {}; duplicates dropped {}; days skipped {skipped}",
        args.out_dir.display(),
        dam.rows,
        rtm.rows,
        wind.rows,
        dam.filled + rtm.filled + wind.filled,
        dam.series.duplicates_dropped + rtm.series.duplicates_dropped + wind.series.duplicates_dropped,
    );
    Ok(())
}
