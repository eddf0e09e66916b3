//! Two-settlement profit of a wind producer for the three bidding
//! scenarios.
//!
//! All three scenarios share one hourly expression: a day-ahead commitment
//! `q` is paid `dam_price * q` (MW held for one hour = MWh), and every
//! real-time interval settles the gap `q - actual` at the interval price:
//!
//! ```text
//! profit = dam_price * q - sum_t dt * rtm_price_t * (q - actual_t)
//! ```
//!
//! Scenario 1 commits the forecast, scenario 2 commits nothing and sells
//! everything in real time, scenario 3 commits a chosen `q` in
//! `[0, forecast]`. Because the first two are the same expression at
//! `q = forecast` and `q = 0`, they are computed by the same code path and
//! agree bit-for-bit with scenario 3 at those points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bid_optimizer::optimal_bid_closed_form;
use crate::market_model::{MarketError, MarketSeries, HOURS_PER_DAY};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettlementError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("hour {0} is outside 0..24")]
    Hour(usize),
    #[error("bid {q} MW in hour {hour} is outside the feasible range [0, {max}]")]
    Domain { hour: usize, q: f64, max: f64 },
    #[error("bid profile has {0} entries, expected 24")]
    ProfileLength(usize),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::S1, Scenario::S2, Scenario::S3];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourSettlement {
    pub hour: usize,
    pub scenario: Scenario,
    pub q_committed: f64,
    pub dam_revenue: f64,
    /// Positive when the producer pays the real-time market.
    pub rtm_settlement: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaySettlement {
    pub scenario: Scenario,
    pub per_hour: Vec<HourSettlement>,
    pub total_profit: f64,
    /// Sum of hourly commitments, MWh.
    pub total_q: f64,
}

impl DaySettlement {
    pub fn commitments(&self) -> Vec<f64> {
        self.per_hour.iter().map(|h| h.q_committed).collect()
    }
}

/// How the day-ahead quantity of each hour is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum DayStrategy {
    S1,
    S2,
    /// Per-hour optimum against realized prices.
    S3ClosedForm {
        tie_tolerance: f64,
    },
    /// Caller-supplied commitments, one per hour.
    S3Profile(Vec<f64>),
}

impl DayStrategy {
    pub fn scenario(&self) -> Scenario {
        match self {
            DayStrategy::S1 => Scenario::S1,
            DayStrategy::S2 => Scenario::S2,
            DayStrategy::S3ClosedForm { .. } | DayStrategy::S3Profile(_) => Scenario::S3,
        }
    }
}

fn check_hour(hour: usize) -> Result<(), SettlementError> {
    if hour >= HOURS_PER_DAY {
        return Err(SettlementError::Hour(hour));
    }
    Ok(())
}

/// Settlement of one hour at commitment `q`; no feasibility check.
pub(crate) fn settle_at(
    series: &MarketSeries,
    hour: usize,
    q: f64,
    scenario: Scenario,
) -> HourSettlement {
    let dt = series.grid.delta_t_hours();
    let dam_revenue = if q == 0.0 {
        0.0
    } else {
        series.dam_price(hour) * q
    };
    let rtm_settlement: f64 = series
        .rtm_in_hour(hour)
        .iter()
        .zip(series.wind_in_hour(hour))
        .map(|(&price, &actual)| dt * price * (q - actual))
        .sum();
    HourSettlement {
        hour,
        scenario,
        q_committed: q,
        dam_revenue,
        rtm_settlement,
        profit: dam_revenue - rtm_settlement,
    }
}

/// Scenario 1: the hourly forecast is sold day-ahead and the deviation is
/// settled in real time.
pub fn settle_scenario1(
    series: &MarketSeries,
    hour: usize,
) -> Result<HourSettlement, SettlementError> {
    series.validate()?;
    check_hour(hour)?;
    Ok(settle_at(
        series,
        hour,
        series.forecast_mw(hour),
        Scenario::S1,
    ))
}

/// Scenario 2: real-time only, paid `sum_t dt * rtm_price_t * actual_t`.
pub fn settle_scenario2(
    series: &MarketSeries,
    hour: usize,
) -> Result<HourSettlement, SettlementError> {
    series.validate()?;
    check_hour(hour)?;
    Ok(settle_at(series, hour, 0.0, Scenario::S2))
}

/// Scenario 3 objective at a fixed commitment `q` in `[0, forecast]`.
pub fn settle_scenario3_given_q(
    series: &MarketSeries,
    hour: usize,
    q: f64,
) -> Result<HourSettlement, SettlementError> {
    series.validate()?;
    check_hour(hour)?;
    let max = series.forecast_mw(hour);
    if !(q >= 0.0 && q <= max) {
        return Err(SettlementError::Domain { hour, q, max });
    }
    Ok(settle_at(series, hour, q, Scenario::S3))
}

pub fn settle_day(
    series: &MarketSeries,
    strategy: &DayStrategy,
) -> Result<DaySettlement, SettlementError> {
    series.validate()?;
    let scenario = strategy.scenario();
    let per_hour = match strategy {
        DayStrategy::S1 => series
            .grid
            .hours()
            .map(|h| settle_at(series, h, series.forecast_mw(h), scenario))
            .collect(),
        DayStrategy::S2 => series
            .grid
            .hours()
            .map(|h| settle_at(series, h, 0.0, scenario))
            .collect(),
        DayStrategy::S3ClosedForm { tie_tolerance } => series
            .grid
            .hours()
            .map(|h| {
                let bid = optimal_bid_closed_form(series, h, *tie_tolerance)?;
                Ok(settle_at(series, h, bid.q_star, scenario))
            })
            .collect::<Result<Vec<_>, SettlementError>>()?,
        DayStrategy::S3Profile(q) => {
            if q.len() != HOURS_PER_DAY {
                return Err(SettlementError::ProfileLength(q.len()));
            }
            q.iter()
                .enumerate()
                .map(|(h, &qh)| settle_scenario3_given_q(series, h, qh))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok(aggregate(scenario, per_hour))
}

fn aggregate(scenario: Scenario, per_hour: Vec<HourSettlement>) -> DaySettlement {
    let total_profit = per_hour.iter().map(|h| h.profit).sum();
    let total_q = per_hour.iter().map(|h| h.q_committed).sum();
    DaySettlement {
        scenario,
        per_hour,
        total_profit,
        total_q,
    }
}

/// Daily totals of the three scenarios side by side, S3 at the hindsight
/// optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayComparison {
    pub day: chrono::NaiveDate,
    /// Indexed S1, S2, S3.
    pub profit: [f64; 3],
    pub bid_quantity_mwh: [f64; 3],
}

impl DayComparison {
    pub fn best_of_s1_s2(&self) -> f64 {
        self.profit[0].max(self.profit[1])
    }

    /// Relative gain of S3 over the better of S1 and S2, in percent;
    /// `None` when that reference profit is not positive.
    pub fn s3_uplift_pct(&self) -> Option<f64> {
        let best = self.best_of_s1_s2();
        (best > 0.0).then(|| 100.0 * (self.profit[2] - best) / best)
    }

    pub fn lowest(&self) -> Scenario {
        let mut lowest = 0;
        for i in 1..3 {
            if self.profit[i] < self.profit[lowest] {
                lowest = i;
            }
        }
        Scenario::ALL[lowest]
    }
}

pub fn compare_scenarios(
    series: &MarketSeries,
    tie_tolerance: f64,
) -> Result<DayComparison, SettlementError> {
    let days = [
        settle_day(series, &DayStrategy::S1)?,
        settle_day(series, &DayStrategy::S2)?,
        settle_day(series, &DayStrategy::S3ClosedForm { tie_tolerance })?,
    ];
    Ok(DayComparison {
        day: series.grid.day(),
        profit: days.each_ref().map(|d| d.total_profit),
        bid_quantity_mwh: days.each_ref().map(|d| d.total_q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_model::*;
    use chrono::NaiveDate;

    /// Day whose every hour repeats the given four-interval pattern.
    fn day_of(dam: f64, rtm: [f64; 4], wind: [f64; 4], forecast: f64) -> MarketSeries {
        let grid = build_time_grid(NaiveDate::from_ymd_opt(2022, 1, 15).unwrap(), 4).unwrap();
        align_horizon(
            DamPriceSeries(vec![dam; 24]),
            RtmPriceSeries(rtm.iter().copied().cycle().take(96).collect()),
            WindActualSeries(wind.iter().copied().cycle().take(96).collect()),
            WindForecast(vec![forecast; 24]),
            grid,
        )
        .unwrap()
    }

    // Hand oracle, term by term.
    fn oracle_profit(dam: f64, dt: f64, rtm: &[f64], wind: &[f64], q: f64) -> f64 {
        let mut rt = 0.0;
        for i in 0..rtm.len() {
            rt += dt * rtm[i] * (q - wind[i]);
        }
        dam * q - rt
    }

    const RTM: [f64; 4] = [40.0, 60.0, 40.0, 60.0];
    const WIND: [f64; 4] = [90.0, 110.0, 90.0, 110.0];

    #[test]
    fn scenario1_zero_deviation() {
        let s = day_of(50.0, RTM, [100.0; 4], 100.0);
        let h = settle_scenario1(&s, 3).unwrap();
        assert_eq!(h.profit, 5000.0);
        assert_eq!(h.rtm_settlement, 0.0);
    }

    #[test]
    fn scenario1_worked_hour() {
        let s = day_of(50.0, RTM, WIND, 100.0);
        // 5000 - 0.25 * (400 - 600 + 400 - 600)
        let expected = oracle_profit(50.0, 0.25, &RTM, &WIND, 100.0);
        assert_eq!(expected, 5100.0);
        let h = settle_scenario1(&s, 0).unwrap();
        assert_eq!(h.profit, expected);
        assert_eq!(h.q_committed, 100.0);
        assert_eq!(h.dam_revenue, 5000.0);
        assert_eq!(h.rtm_settlement, -100.0);
    }

    #[test]
    fn scenario1_without_forecast_is_scenario2() {
        let s = day_of(50.0, RTM, WIND, 0.0);
        let a = settle_scenario1(&s, 5).unwrap();
        let b = settle_scenario2(&s, 5).unwrap();
        assert_eq!(a.profit, b.profit);
    }

    #[test]
    fn scenario2_examples() {
        let s = day_of(50.0, RTM, [0.0; 4], 100.0);
        assert_eq!(settle_scenario2(&s, 0).unwrap().profit, 0.0);

        let s = day_of(50.0, RTM, WIND, 100.0);
        let h = settle_scenario2(&s, 0).unwrap();
        assert_eq!(h.profit, 0.25 * (3600.0 + 6600.0 + 3600.0 + 6600.0));
        assert_eq!(h.profit, 5100.0);
        assert_eq!(h.dam_revenue, 0.0);
        assert_eq!(h.q_committed, 0.0);

        let s = day_of(50.0, [37.0; 4], [120.0; 4], 100.0);
        assert_eq!(settle_scenario2(&s, 0).unwrap().profit, 37.0 * 120.0);
    }

    #[test]
    fn scenario2_negative_dam_price_has_zero_dam_revenue() {
        let s = day_of(-5.0, RTM, WIND, 100.0);
        let h = settle_scenario2(&s, 0).unwrap();
        assert!(h.dam_revenue == 0.0 && h.dam_revenue.is_sign_positive());
    }

    #[test]
    fn scenario3_endpoints_and_midpoint() {
        let s = day_of(50.0, RTM, WIND, 100.0);
        for hour in [0, 11, 23] {
            let full = settle_scenario3_given_q(&s, hour, 100.0).unwrap();
            let s1 = settle_scenario1(&s, hour).unwrap();
            assert_eq!(full.profit, s1.profit);
            assert_eq!(full.rtm_settlement, s1.rtm_settlement);
            let zero = settle_scenario3_given_q(&s, hour, 0.0).unwrap();
            assert_eq!(zero.profit, settle_scenario2(&s, hour).unwrap().profit);
        }
        let mid = settle_scenario3_given_q(&s, 0, 50.0).unwrap();
        let expected = oracle_profit(50.0, 0.25, &RTM, &WIND, 50.0);
        assert!((mid.profit - expected).abs() < 1e-9);
        // 2500 + 0.25 * (1600 + 3600 + 1600 + 3600)
        assert_eq!(expected, 5100.0);
    }

    #[test]
    fn scenario3_rejects_infeasible_q() {
        let s = day_of(50.0, RTM, WIND, 100.0);
        assert!(matches!(
            settle_scenario3_given_q(&s, 0, 100.5),
            Err(SettlementError::Domain { .. })
        ));
        assert!(settle_scenario3_given_q(&s, 0, -1.0).is_err());
        assert!(settle_scenario3_given_q(&s, 0, f64::NAN).is_err());
        assert!(matches!(
            settle_scenario1(&s, 24),
            Err(SettlementError::Hour(24))
        ));
    }

    #[test]
    fn day_constant_prices_all_equal() {
        let s = day_of(45.0, [45.0; 4], WIND, 100.0);
        let tol = crate::bid_optimizer::DEFAULT_TIE_TOLERANCE;
        let p1 = settle_day(&s, &DayStrategy::S1).unwrap().total_profit;
        let p2 = settle_day(&s, &DayStrategy::S2).unwrap().total_profit;
        let p3 = settle_day(&s, &DayStrategy::S3ClosedForm { tie_tolerance: tol }).unwrap();
        assert!((p1 - p2).abs() < 1e-9);
        assert!((p3.total_profit - p2).abs() < 1e-9);
    }

    #[test]
    fn day_without_wind_bids_nothing() {
        let s = day_of(80.0, [20.0; 4], [0.0; 4], 0.0);
        let d = settle_day(
            &s,
            &DayStrategy::S3ClosedForm {
                tie_tolerance: 1e-6,
            },
        )
        .unwrap();
        assert_eq!(d.total_q, 0.0);
        assert_eq!(d.total_profit, 0.0);
    }

    #[test]
    fn day_is_additive() {
        let s = day_of(50.0, RTM, WIND, 100.0);
        let d1 = settle_day(&s, &DayStrategy::S1).unwrap();
        let d2 = settle_day(&s, &DayStrategy::S2).unwrap();
        assert_eq!(d1.per_hour.len(), 24);
        assert_eq!(d1.total_profit, 24.0 * 5100.0);
        assert_eq!(d1.total_q, 2400.0);
        assert_eq!(d2.total_profit, 24.0 * 5100.0);
        assert_eq!(d2.total_q, 0.0);
    }

    #[test]
    fn comparison_summary() {
        let s = day_of(50.0, [30.0; 4], WIND, 100.0);
        let c = compare_scenarios(&s, 1e-6).unwrap();
        assert_eq!(c.profit[2], c.profit[0]);
        assert_eq!(c.bid_quantity_mwh, [2400.0, 0.0, 2400.0]);
        assert_eq!(c.lowest(), Scenario::S2);
        assert_eq!(c.s3_uplift_pct(), Some(0.0));
        let loss = DayComparison {
            day: c.day,
            profit: [-1.0, -2.0, 0.0],
            bid_quantity_mwh: [0.0; 3],
        };
        assert_eq!(loss.s3_uplift_pct(), None);
    }

    #[test]
    fn day_profile_checks() {
        let s = day_of(50.0, RTM, WIND, 100.0);
        assert!(matches!(
            settle_day(&s, &DayStrategy::S3Profile(vec![1.0; 23])),
            Err(SettlementError::ProfileLength(23))
        ));
        let d = settle_day(&s, &DayStrategy::S3Profile(vec![100.0; 24])).unwrap();
        assert_eq!(
            d.total_profit,
            settle_day(&s, &DayStrategy::S1).unwrap().total_profit
        );
        assert_eq!(d.scenario, Scenario::S3);
    }
}
