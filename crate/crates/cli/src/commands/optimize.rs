use clap::Args;
use windbid::settlement::settle_scenario3_given_q;

use super::{Bidder, DaySelect, ModeArgs};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{emit, Table};

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub select: DaySelect,
    #[command(flatten)]
    pub mode: ModeArgs,
}

pub fn run(args: &OptimizeArgs, cfg: &RunConfig) -> CliResult<()> {
    let (store, days) = args.select.open(cfg)?;
    let bidder = Bidder::new(&args.mode, cfg)?;
    let mut table = Table::new(&[
        "day",
        "hour",
        "mode",
        "dam_price",
        "rtm_hour_sum",
        "forecast_mw",
        "regime",
        "q_star",
        "realized_profit",
    ]);
    for day in days {
        let series = store.load(day)?;
        for bid in bidder.decisions(&series)? {
            // realized outcome of the decision, whatever prices it was made on
            let settled =
                settle_scenario3_given_q(&series, bid.hour, bid.q_star).map_err(CliError::data)?;
            table.push(vec![
                day.to_string().into(),
                bid.hour.into(),
                bidder.mode().label().into(),
                bid.dam_price.into(),
                bid.rtm_hour_sum.into(),
                series.forecast_mw(bid.hour).into(),
                bid.regime.label().into(),
                bid.q_star.into(),
                settled.profit.into(),
            ]);
        }
    }
    emit(cfg, &table.render(cfg.format_or(Format::Csv)))
}
