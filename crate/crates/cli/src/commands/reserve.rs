use chrono::NaiveDate;
use clap::Args;
use serde::Serialize;
use windbid::reserve::{scenario_reserve, ReserveReport};

use crate::config::{Format, RunConfig};
use crate::data::DayStore;
use crate::error::{CliError, CliResult};
use crate::output::{emit, pretty, Table};

#[derive(Debug, Clone, Args)]
pub struct ReserveArgs {
    /// Directory of canonical day files
    #[arg(long)]
    pub data_dir: std::path::PathBuf,
    /// Target days (comma separated); the latest day in the directory if omitted
    #[arg(long, value_delimiter = ',')]
    pub days: Vec<NaiveDate>,
}

#[derive(Serialize)]
struct DayReport<'a> {
    day: NaiveDate,
    #[serde(flatten)]
    report: &'a ReserveReport,
}

pub fn run(args: &ReserveArgs, cfg: &RunConfig) -> CliResult<()> {
    let store = DayStore::open(&args.data_dir, cfg)?;
    let targets = if args.days.is_empty() {
        let last = store.days().last().ok_or_else(|| {
            CliError::MissingDay(format!("no day files in {}", args.data_dir.display()))
        })?;
        vec![last]
    } else {
        store.select(&args.days)?
    };

    let mut reports = Vec::new();
    for day in targets {
        let series = store.load(day)?;
        let window = store.window_before(day, cfg.window_days)?;
        for scenario in cfg.scenarios() {
            let report = scenario_reserve(&series, &window, scenario, &cfg.reserve)
                .map_err(CliError::data)?;
            reports.push((day, report));
        }
    }

    let text = match cfg.format_or(Format::Csv) {
        Format::Json => pretty(
            &reports
                .iter()
                .map(|(day, report)| DayReport { day: *day, report })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut table = Table::new(&[
                "day",
                "scenario",
                "hour",
                "alpha",
                "reserve_mw",
                "reserve_price",
                "hour_reserve_cost",
                "reserve_cost",
                "wind_profit",
                "breakeven_margin",
                "deficit",
            ]);
            for (day, r) in &reports {
                for (hour, &mw) in r.profile.hourly_mw.iter().enumerate() {
                    table.push(vec![
                        day.to_string().into(),
                        r.scenario.label().into(),
                        hour.into(),
                        r.profile.alpha.into(),
                        mw.into(),
                        r.reserve_price.into(),
                        (mw * r.reserve_price).into(),
                        r.reserve_cost.into(),
                        r.wind_profit.into(),
                        r.breakeven_margin.into(),
                        r.deficit.to_string().into(),
                    ]);
                }
            }
            table.to_csv()
        }
    };
    emit(cfg, &text)
}
