//! Dynamic reserve sized from recent schedule deviations.
//!
//! A deviation is `committed - actual` per interval; positive values are
//! shortfalls the system has to cover. The reserve for an hour is the lower
//! empirical `alpha`-quantile of the shortfalls pooled over a rolling window
//! of past days, plus an optional constant floor standing in for the
//! equipment-contingency component. Surpluses (negative deviations) never
//! require upward reserve and enter the pool as zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bid_optimizer::optimal_bids;
use crate::market_model::{MarketSeries, HOURS_PER_DAY};
use crate::settlement::{settle_day, DaySettlement, DayStrategy, Scenario, SettlementError};

pub const DEFAULT_ALPHA: f64 = 0.975;
pub const DEFAULT_WINDOW_DAYS: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReserveError {
    #[error(transparent)]
    Settlement(#[from] SettlementError),
    #[error("commitment profile has {0} entries, expected 24")]
    CommitmentLength(usize),
    #[error("commitment {q} MW in hour {hour} is outside [0, {max}]")]
    Commitment { hour: usize, q: f64, max: f64 },
    #[error("data error: {0}")]
    Data(String),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// One quantile per hour of day, pooling that hour across the window.
    HourOfDay,
    /// One quantile over every interval of the window, applied to all hours.
    WholeWindow,
}

/// What a deviation is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationBaseline {
    /// The producer's day-ahead commitment.
    Commitment,
    /// The day-ahead wind forecast the operator schedules around,
    /// independent of what the producer committed.
    Forecast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSeries {
    pub scenario: Scenario,
    pub intervals_per_hour: u32,
    /// `committed(hour) - actual`, MW, one per interval.
    pub values: Vec<f64>,
}

impl DeviationSeries {
    fn hour_of(&self, interval: usize) -> usize {
        interval / self.intervals_per_hour as usize
    }
}

/// Per-interval deviation of the actual output from hourly commitments.
pub fn deviation_series(
    series: &MarketSeries,
    scenario: Scenario,
    commitments: &[f64],
) -> Result<DeviationSeries, ReserveError> {
    series.validate().map_err(SettlementError::from)?;
    if commitments.len() != HOURS_PER_DAY {
        return Err(ReserveError::CommitmentLength(commitments.len()));
    }
    for (hour, &q) in commitments.iter().enumerate() {
        let max = series.forecast_mw(hour);
        if !(q >= 0.0 && q <= max) {
            return Err(ReserveError::Commitment { hour, q, max });
        }
    }
    let grid = &series.grid;
    let values = series
        .wind
        .values()
        .iter()
        .enumerate()
        .map(|(i, &actual)| commitments[grid.hour_of(i)] - actual)
        .collect();
    Ok(DeviationSeries {
        scenario,
        intervals_per_hour: grid.intervals_per_hour(),
        values,
    })
}

/// Deviations of `scenario` on one day, measured against `baseline`.
pub fn scenario_deviations(
    series: &MarketSeries,
    scenario: Scenario,
    baseline: DeviationBaseline,
    tie_tolerance: f64,
) -> Result<DeviationSeries, ReserveError> {
    let commitments = match (baseline, scenario) {
        (DeviationBaseline::Forecast, _) | (DeviationBaseline::Commitment, Scenario::S1) => {
            series.forecast.values().to_vec()
        }
        (DeviationBaseline::Commitment, Scenario::S2) => vec![0.0; HOURS_PER_DAY],
        (DeviationBaseline::Commitment, Scenario::S3) => optimal_bids(series, tie_tolerance)?
            .iter()
            .map(|b| b.q_star)
            .collect(),
    };
    deviation_series(series, scenario, &commitments)
}

/// Lower empirical quantile: the order statistic at 1-based index
/// `ceil(alpha * n)`. Products within 1e-9 of an integer are taken as that
/// integer so that e.g. `0.28 * 25` (7.000000000000001 in f64) selects the
/// 7th value, not the 8th.
pub fn lower_quantile(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let x = alpha * n as f64;
    let k = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x.ceil()
    };
    let k = (k as usize).clamp(1, n);
    sorted[k - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveProfile {
    /// Reserve requirement per hour of day, MW.
    pub hourly_mw: Vec<f64>,
    pub alpha: f64,
    pub window_days: usize,
    pub pooling: Pooling,
    pub floor_mw: f64,
}

/// Quantile reserve over a window of deviation histories (one entry per
/// day), plus `floor_mw`.
pub fn dynamic_reserve_quantile(
    history: &[DeviationSeries],
    alpha: f64,
    pooling: Pooling,
    floor_mw: f64,
) -> Result<ReserveProfile, ReserveError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ReserveError::Config(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    if !(floor_mw >= 0.0 && floor_mw.is_finite()) {
        return Err(ReserveError::Config(format!(
            "reserve floor must be a non-negative number, got {floor_mw}"
        )));
    }
    let mut pools: Vec<Vec<f64>> = match pooling {
        Pooling::HourOfDay => vec![Vec::new(); HOURS_PER_DAY],
        Pooling::WholeWindow => vec![Vec::new()],
    };
    for day in history {
        for (i, &d) in day.values.iter().enumerate() {
            let slot = match pooling {
                Pooling::HourOfDay => day.hour_of(i),
                Pooling::WholeWindow => 0,
            };
            pools[slot].push(d.max(0.0));
        }
    }
    let quantiles = pools
        .iter_mut()
        .enumerate()
        .map(|(slot, pool)| {
            if pool.is_empty() {
                return Err(ReserveError::Data(format!(
                    "no deviation samples for pool {slot}"
                )));
            }
            pool.sort_by(f64::total_cmp);
            Ok(lower_quantile(pool, alpha) + floor_mw)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hourly_mw = match pooling {
        Pooling::HourOfDay => quantiles,
        Pooling::WholeWindow => vec![quantiles[0]; HOURS_PER_DAY],
    };
    Ok(ReserveProfile {
        hourly_mw,
        alpha,
        window_days: history.len(),
        pooling,
        floor_mw,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveReport {
    pub scenario: Scenario,
    pub profile: ReserveProfile,
    /// Currency per MW per hour.
    pub reserve_price: f64,
    pub reserve_cost: f64,
    pub wind_profit: f64,
    pub breakeven_margin: f64,
    /// Reserve cost exceeds the producer's profit.
    pub deficit: bool,
}

/// Producer profit against the cost of holding `reserve` for a day.
pub fn break_even(
    day: &DaySettlement,
    reserve: &ReserveProfile,
    reserve_price: f64,
) -> Result<ReserveReport, ReserveError> {
    if !(reserve_price >= 0.0 && reserve_price.is_finite()) {
        return Err(ReserveError::Config(format!(
            "reserve price must be a non-negative number, got {reserve_price}"
        )));
    }
    if reserve.hourly_mw.len() != HOURS_PER_DAY {
        return Err(ReserveError::Data(format!(
            "reserve profile has {} hours, expected 24",
            reserve.hourly_mw.len()
        )));
    }
    let reserve_cost: f64 = reserve.hourly_mw.iter().map(|mw| mw * reserve_price).sum();
    let breakeven_margin = day.total_profit - reserve_cost;
    Ok(ReserveReport {
        scenario: day.scenario,
        profile: reserve.clone(),
        reserve_price,
        reserve_cost,
        wind_profit: day.total_profit,
        breakeven_margin,
        deficit: breakeven_margin < 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveConfig {
    pub alpha: f64,
    pub pooling: Pooling,
    pub floor_mw: f64,
    pub reserve_price: f64,
    pub baseline: DeviationBaseline,
    pub tie_tolerance: f64,
}

impl Default for ReserveConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            pooling: Pooling::HourOfDay,
            floor_mw: 0.0,
            reserve_price: 0.0,
            baseline: DeviationBaseline::Commitment,
            tie_tolerance: crate::bid_optimizer::DEFAULT_TIE_TOLERANCE,
        }
    }
}

fn strategy_for(scenario: Scenario, tie_tolerance: f64) -> DayStrategy {
    match scenario {
        Scenario::S1 => DayStrategy::S1,
        Scenario::S2 => DayStrategy::S2,
        Scenario::S3 => DayStrategy::S3ClosedForm { tie_tolerance },
    }
}

/// Reserve report of one scenario for `day`, sized from `window` (the
/// preceding days).
pub fn scenario_reserve(
    day: &MarketSeries,
    window: &[MarketSeries],
    scenario: Scenario,
    config: &ReserveConfig,
) -> Result<ReserveReport, ReserveError> {
    let history = window
        .iter()
        .map(|d| scenario_deviations(d, scenario, config.baseline, config.tie_tolerance))
        .collect::<Result<Vec<_>, _>>()?;
    let profile =
        dynamic_reserve_quantile(&history, config.alpha, config.pooling, config.floor_mw)?;
    let settled = settle_day(day, &strategy_for(scenario, config.tie_tolerance))?;
    break_even(&settled, &profile, config.reserve_price)
}

/// One [`ReserveReport`] per scenario, in S1, S2, S3 order.
pub fn scenario_reserve_comparison(
    day: &MarketSeries,
    window: &[MarketSeries],
    config: &ReserveConfig,
) -> Result<Vec<ReserveReport>, ReserveError> {
    Scenario::ALL
        .iter()
        .map(|&s| scenario_reserve(day, window, s, config))
        .collect()
}
