use clap::{Args, ValueEnum};
use windbid::{compare_scenarios, settle_day};

use super::{Bidder, DaySelect, Mode, ModeArgs};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{emit, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Price, wind and forecast per interval
    Profiles,
    /// Per-hour settlement decomposition per scenario
    Hourly,
    /// Daily scenario totals and the scenario-3 gain over the better of 1 and 2
    Summary,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub select: DaySelect,
    #[arg(long, value_enum, default_value_t = Kind::Summary)]
    pub kind: Kind,
}

pub fn run(args: &ReportArgs, cfg: &RunConfig) -> CliResult<()> {
    let (store, days) = args.select.open(cfg)?;
    let table = match args.kind {
        Kind::Profiles => {
            let mut t = Table::new(&[
                "day",
                "interval",
                "interval_start_utc",
                "hour",
                "series",
                "value",
            ]);
            for day in days {
                let s = store.load(day)?;
                for i in 0..s.grid.interval_count() {
                    let h = s.grid.hour_of(i);
                    let start = s
                        .grid
                        .interval_start(i)
                        .format("%Y-%m-%dT%H:%M:%SZ")
                        .to_string();
                    for (name, v) in [
                        ("dam_price", s.dam_price(h)),
                        ("rtm_price", s.rtm.values()[i]),
                        ("wind_mw", s.wind.values()[i]),
                        ("forecast_mw", s.forecast_mw(h)),
                    ] {
                        t.push(vec![
                            day.to_string().into(),
                            i.into(),
                            start.clone().into(),
                            h.into(),
                            name.into(),
                            v.into(),
                        ]);
                    }
                }
            }
            t
        }
        Kind::Hourly => {
            let bidder = Bidder::new(
                &ModeArgs {
                    mode: Mode::Hindsight,
                    price_forecast_dir: None,
                },
                cfg,
            )?;
            let mut t = Table::new(&[
                "day",
                "scenario",
                "hour",
                "q_committed",
                "dam_revenue",
                "rtm_settlement",
                "profit",
            ]);
            for day in days {
                let s = store.load(day)?;
                for scenario in cfg.scenarios() {
                    let settled =
                        settle_day(&s, &bidder.strategy(&s, scenario)?).map_err(CliError::data)?;
                    for h in &settled.per_hour {
                        t.push(vec![
                            day.to_string().into(),
                            scenario.label().into(),
                            h.hour.into(),
                            h.q_committed.into(),
                            h.dam_revenue.into(),
                            h.rtm_settlement.into(),
                            h.profit.into(),
                        ]);
                    }
                }
            }
            t
        }
        Kind::Summary => {
            let mut t = Table::new(&[
                "day",
                "s1_profit",
                "s2_profit",
                "s3_profit",
                "best_s1_s2",
                "s3_uplift_pct",
                "lowest",
            ]);
            for day in days {
                let c = compare_scenarios(&store.load(day)?, cfg.tie_tolerance)
                    .map_err(CliError::data)?;
                t.push(vec![
                    day.to_string().into(),
                    c.profit[0].into(),
                    c.profit[1].into(),
                    c.profit[2].into(),
                    c.best_of_s1_s2().into(),
                    c.s3_uplift_pct().into(),
                    c.lowest().label().into(),
                ]);
            }
            t
        }
    };
    emit(cfg, &table.render(cfg.format_or(Format::Csv)))
}
