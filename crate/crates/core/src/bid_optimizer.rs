//! Optimal day-ahead quantity for scenario 3.
//!
//! The hourly objective is affine in the commitment `q`, with slope
//! `dam_price - dt * sum_t rtm_price_t`, so the optimum over `[0, forecast]`
//! sits at a corner: bid nothing when the day-ahead price does not exceed
//! the hour's real-time price sum, otherwise bid the full forecast. Ties go
//! to zero.

use serde::{Deserialize, Serialize};

use crate::market_model::{MarketSeries, RtmPriceSeries, HOURS_PER_DAY};
use crate::settlement::{settle_at, Scenario, SettlementError};

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    BidZero,
    BidFull,
    /// Slope within tolerance of zero: every feasible `q` earns the same.
    Indifferent,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::BidZero => "BID_ZERO",
            Regime::BidFull => "BID_FULL",
            Regime::Indifferent => "INDIFFERENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidDecision {
    pub hour: usize,
    pub q_star: f64,
    pub regime: Regime,
    pub dam_price: f64,
    /// `dt * sum_t rtm_price_t` over the hour's intervals.
    pub rtm_hour_sum: f64,
}

fn decide(
    hour: usize,
    dam_price: f64,
    rtm_prices: &[f64],
    dt: f64,
    forecast: f64,
    tie_tolerance: f64,
) -> BidDecision {
    let rtm_hour_sum = dt * rtm_prices.iter().sum::<f64>();
    let (q_star, regime) = if dam_price <= rtm_hour_sum {
        if rtm_hour_sum - dam_price <= tie_tolerance {
            (0.0, Regime::Indifferent)
        } else {
            (0.0, Regime::BidZero)
        }
    } else {
        (forecast, Regime::BidFull)
    };
    BidDecision {
        hour,
        q_star,
        regime,
        dam_price,
        rtm_hour_sum,
    }
}

fn check(series: &MarketSeries, hour: usize, tie_tolerance: f64) -> Result<(), SettlementError> {
    series.validate()?;
    if hour >= HOURS_PER_DAY {
        return Err(SettlementError::Hour(hour));
    }
    if tie_tolerance.is_nan() || tie_tolerance < 0.0 {
        return Err(SettlementError::Config(format!(
            "tie tolerance must be non-negative, got {tie_tolerance}"
        )));
    }
    Ok(())
}

/// Corner rule against the realized real-time prices of `hour`.
pub fn optimal_bid_closed_form(
    series: &MarketSeries,
    hour: usize,
    tie_tolerance: f64,
) -> Result<BidDecision, SettlementError> {
    check(series, hour, tie_tolerance)?;
    Ok(decide(
        hour,
        series.dam_price(hour),
        series.rtm_in_hour(hour),
        series.grid.delta_t_hours(),
        series.forecast_mw(hour),
        tie_tolerance,
    ))
}

/// Closed-form decisions for all 24 hours.
pub fn optimal_bids(
    series: &MarketSeries,
    tie_tolerance: f64,
) -> Result<Vec<BidDecision>, SettlementError> {
    series
        .grid
        .hours()
        .map(|h| optimal_bid_closed_form(series, h, tie_tolerance))
        .collect()
}

/// Grid search over `q = forecast * k / (grid_points - 1)`; returns the
/// best `(q, profit)`, smallest `q` on ties.
pub fn optimal_bid_bruteforce(
    series: &MarketSeries,
    hour: usize,
    grid_points: usize,
) -> Result<(f64, f64), SettlementError> {
    check(series, hour, 0.0)?;
    if grid_points < 2 {
        return Err(SettlementError::Config(format!(
            "grid search needs at least 2 points, got {grid_points}"
        )));
    }
    let forecast = series.forecast_mw(hour);
    let last = (grid_points - 1) as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..grid_points {
        let q = forecast * (k as f64 / last);
        let profit = settle_at(series, hour, q, Scenario::S3).profit;
        if profit > best.1 {
            best = (q, profit);
        }
    }
    Ok(best)
}

/// Corner rule against a real-time price forecast instead of realized
/// prices. The returned decision is meant to be settled against the
/// realized series.
pub fn optimal_bid_expected(
    series: &MarketSeries,
    rtm_forecast: &RtmPriceSeries,
    hour: usize,
    tie_tolerance: f64,
) -> Result<BidDecision, SettlementError> {
    check(series, hour, tie_tolerance)?;
    let n = series.grid.interval_count();
    if rtm_forecast.len() != n {
        return Err(SettlementError::Config(format!(
            "real-time price forecast has {} values, expected {n}",
            rtm_forecast.len()
        )));
    }
    if let Some(i) = rtm_forecast.values().iter().position(|p| !p.is_finite()) {
        return Err(SettlementError::Config(format!(
            "real-time price forecast is non-finite at interval {i}"
        )));
    }
    Ok(decide(
        hour,
        series.dam_price(hour),
        &rtm_forecast.values()[series.grid.intervals_of(hour)],
        series.grid.delta_t_hours(),
        series.forecast_mw(hour),
        tie_tolerance,
    ))
}
