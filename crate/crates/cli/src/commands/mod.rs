pub mod ingest;
pub mod monitor;
pub mod optimize;
pub mod report;
pub mod reserve;
pub mod simulate;
pub mod synth;

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use windbid::bid_optimizer::{optimal_bid_expected, optimal_bids};
use windbid::{BidDecision, DayStrategy, MarketSeries, Scenario};

use crate::config::RunConfig;
use crate::data::DayStore;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct DaySelect {
    /// Directory of canonical day files
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Days to process (comma separated); all days in the directory if omitted
    #[arg(long, value_delimiter = ',')]
    pub days: Vec<NaiveDate>,
}

impl DaySelect {
    pub fn open(&self, cfg: &RunConfig) -> CliResult<(DayStore, Vec<NaiveDate>)> {
        let store = DayStore::open(&self.data_dir, cfg)?;
        let days = store.select(&self.days)?;
        Ok((store, days))
    }
}

/// Which real-time prices the scenario-3 bid is optimized against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Realized prices of the day itself
    Hindsight,
    /// Real-time prices from day files in `--price-forecast-dir`
    Forecast,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Hindsight => "hindsight",
            Mode::Forecast => "forecast",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value_t = Mode::Hindsight)]
    pub mode: Mode,
    /// Canonical day files whose rtm_price column is the price forecast
    #[arg(long, required_if_eq("mode", "forecast"))]
    pub price_forecast_dir: Option<PathBuf>,
}

pub struct Bidder {
    mode: Mode,
    forecasts: Option<DayStore>,
    tie_tolerance: f64,
}

impl Bidder {
    pub fn new(args: &ModeArgs, cfg: &RunConfig) -> CliResult<Bidder> {
        let forecasts = match (args.mode, &args.price_forecast_dir) {
            (Mode::Forecast, Some(dir)) => Some(DayStore::open(dir, cfg)?),
            (Mode::Forecast, None) => {
                return Err(CliError::Usage(
                    "--mode forecast needs --price-forecast-dir".into(),
                ))
            }
            (Mode::Hindsight, _) => None,
        };
        Ok(Bidder {
            mode: args.mode,
            forecasts,
            tie_tolerance: cfg.tie_tolerance,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn decisions(&self, series: &MarketSeries) -> CliResult<Vec<BidDecision>> {
        match &self.forecasts {
            None => optimal_bids(series, self.tie_tolerance).map_err(CliError::data),
            Some(store) => {
                let forecast = store.load(series.grid.day())?;
                series
                    .grid
                    .hours()
                    .map(|h| optimal_bid_expected(series, &forecast.rtm, h, self.tie_tolerance))
                    .collect::<Result<_, _>>()
                    .map_err(CliError::data)
            }
        }
    }

    pub fn strategy(&self, series: &MarketSeries, scenario: Scenario) -> CliResult<DayStrategy> {
        Ok(match (scenario, self.mode) {
            (Scenario::S1, _) => DayStrategy::S1,
            (Scenario::S2, _) => DayStrategy::S2,
            (Scenario::S3, Mode::Hindsight) => DayStrategy::S3ClosedForm {
                tie_tolerance: self.tie_tolerance,
            },
            (Scenario::S3, Mode::Forecast) => {
                DayStrategy::S3Profile(self.decisions(series)?.iter().map(|d| d.q_star).collect())
            }
        })
    }
}
