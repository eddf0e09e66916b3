use std::path::PathBuf;

use chrono::NaiveDate;
use clap::Args;
use serde::Serialize;
use windbid::monitor::{
    adherence_index, capacity_factor, schedule_samples, CapacityFactorSummary, DateRange, Grade,
    GradeThresholds, PerformanceIndex, SeasonPartition,
};
use windbid::{settle_day, DayStrategy, MarketSeries, Scenario};

use crate::config::{Format, RunConfig, ScenarioSel};
use crate::data::DayStore;
use crate::error::{CliError, CliResult};
use crate::output::{emit, pretty, Table};

#[derive(Debug, Clone, Args)]
pub struct MonitorArgs {
    /// Producer as NAME=DIR of canonical day files; repeatable
    #[arg(long = "producer", value_name = "NAME=DIR")]
    pub producers: Vec<String>,
    /// Single producer directory, reported as "aggregate"
    #[arg(long, conflicts_with = "producers")]
    pub data_dir: Option<PathBuf>,
    /// Restrict to these days (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub days: Vec<NaiveDate>,
}

#[derive(Serialize)]
struct ProducerReport {
    producer: String,
    scenario: Scenario,
    index: PerformanceIndex,
    grade: Grade,
    capacity_factor: Option<CapacityFactorSummary>,
}

#[derive(Serialize)]
struct MonitorReport {
    thresholds: GradeThresholds,
    producers: Vec<ProducerReport>,
}

fn parse_producer(arg: &str) -> CliResult<(String, PathBuf)> {
    match arg.split_once('=') {
        Some((name, dir)) if !name.is_empty() && !dir.is_empty() => {
            Ok((name.to_string(), PathBuf::from(dir)))
        }
        _ => Err(CliError::Usage(format!(
            "--producer expects NAME=DIR, got {arg:?}"
        ))),
    }
}

fn commitments(
    series: &MarketSeries,
    scenario: Scenario,
    tie_tolerance: f64,
) -> CliResult<Vec<f64>> {
    let strategy = match scenario {
        Scenario::S1 => DayStrategy::S1,
        Scenario::S2 => DayStrategy::S2,
        Scenario::S3 => DayStrategy::S3ClosedForm { tie_tolerance },
    };
    Ok(settle_day(series, &strategy)
        .map_err(CliError::data)?
        .commitments())
}

pub fn run(args: &MonitorArgs, cfg: &RunConfig) -> CliResult<()> {
    let mut producers = args
        .producers
        .iter()
        .map(|p| parse_producer(p))
        .collect::<CliResult<Vec<_>>>()?;
    match (&args.data_dir, producers.is_empty()) {
        (Some(dir), _) => producers.push(("aggregate".to_string(), dir.clone())),
        (None, true) => {
            return Err(CliError::Usage(
                "monitor needs --data-dir or at least one --producer".into(),
            ))
        }
        (None, false) => {}
    }
    // commitments are graded against scenario 1 unless asked otherwise
    let scenarios = cfg
        .scenario
        .unwrap_or(ScenarioSel::One(Scenario::S1))
        .scenarios();

    let mut reports = Vec::new();
    for (name, dir) in &producers {
        let store = DayStore::open(dir, cfg)?;
        let days = store.select(&args.days)?;
        let series = days
            .iter()
            .map(|&d| store.load(d))
            .collect::<CliResult<Vec<_>>>()?;
        let window = DateRange {
            start: days[0],
            end: days[days.len() - 1],
        };
        let capacity = match cfg.installed_mw {
            Some(mw) => Some(
                capacity_factor(&series, mw, SeasonPartition::Meteorological)
                    .map_err(CliError::data)?,
            ),
            None => None,
        };
        for &scenario in &scenarios {
            let mut samples = Vec::new();
            for s in &series {
                let q = commitments(s, scenario, cfg.tie_tolerance)?;
                samples.extend(schedule_samples(s, &q).map_err(CliError::data)?);
            }
            let index = adherence_index(name, &samples, window).map_err(CliError::data)?;
            reports.push(ProducerReport {
                producer: name.clone(),
                scenario,
                grade: cfg.thresholds.grade(index.adherence),
                index,
                capacity_factor: capacity.clone(),
            });
        }
    }

    let text = match cfg.format_or(Format::Json) {
        Format::Json => pretty(&MonitorReport {
            thresholds: cfg.thresholds,
            producers: reports,
        }),
        Format::Csv => {
            let mut table = Table::new(&[
                "producer",
                "scenario",
                "adherence",
                "bias_mw",
                "sample_count",
                "window_start",
                "window_end",
                "grade",
                "capacity_factor",
            ]);
            for r in &reports {
                table.push(vec![
                    r.producer.clone().into(),
                    r.scenario.label().into(),
                    r.index.adherence.into(),
                    r.index.bias_mw.into(),
                    r.index.sample_count.into(),
                    r.index.window.start.to_string().into(),
                    r.index.window.end.to_string().into(),
                    format!("{:?}", r.grade).into(),
                    r.capacity_factor.as_ref().map(|c| c.overall).into(),
                ]);
            }
            table.to_csv()
        }
    };
    emit(cfg, &text)
}
