use clap::Args;
use windbid::settle_day;

use super::{Bidder, DaySelect, ModeArgs};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{emit, Table};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub select: DaySelect,
    #[command(flatten)]
    pub mode: ModeArgs,
}

pub fn run(args: &SimulateArgs, cfg: &RunConfig) -> CliResult<()> {
    let (store, days) = args.select.open(cfg)?;
    let bidder = Bidder::new(&args.mode, cfg)?;
    let mut table = Table::new(&["day", "scenario", "mode", "metric", "value"]);
    for day in days {
        let series = store.load(day)?;
        for scenario in cfg.scenarios() {
            let settled = settle_day(&series, &bidder.strategy(&series, scenario)?)
                .map_err(CliError::data)?;
            let mode = bidder.mode().label();
            for (metric, value) in [
                ("profit", settled.total_profit),
                ("bid_quantity_mwh", settled.total_q),
            ] {
                table.push(vec![
                    day.to_string().into(),
                    scenario.label().into(),
                    mode.into(),
                    metric.into(),
                    value.into(),
                ]);
            }
        }
    }
    emit(cfg, &table.render(cfg.format_or(Format::Csv)))
}
