//! Browser bindings for the `www/` demo page. Every export takes plain
//! numbers and returns a JSON string; errors become JS exceptions.
//!
//! Days are synthetic and keyed by `(seed, date)`, so the three operations
//! see the same day for the same inputs.

use chrono::{Datelike, Duration, NaiveDate};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;
use windbid::bid_optimizer::{optimal_bid_closed_form, optimal_bids};
use windbid::reserve::{scenario_reserve, ReserveConfig};
use windbid::settlement::settle_scenario3_given_q;
use windbid::synth::{synth_day, SynthConfig};
use windbid::{compare_scenarios, MarketSeries, Scenario, DEFAULT_TIE_TOLERANCE};

fn parse_day(date: &str) -> Result<NaiveDate, String> {
    date.parse()
        .map_err(|e| format!("invalid date {date:?}: {e}"))
}

pub fn demo_day(seed: u32, day: NaiveDate) -> Result<MarketSeries, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(((seed as u64) << 32) | day.num_days_from_ce() as u64);
    synth_day(day, &SynthConfig::default(), &mut rng).map_err(|e| e.to_string())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

#[derive(Serialize)]
struct HourRow {
    hour: usize,
    dam_price: f64,
    rtm_hour_sum: f64,
    forecast_mw: f64,
    q_star: f64,
    regime: &'static str,
}

#[derive(Serialize)]
struct DaySummary {
    day: String,
    profit: [f64; 3],
    bid_quantity_mwh: [f64; 3],
    s3_uplift_pct: Option<f64>,
    hours: Vec<HourRow>,
    rtm_price: Vec<f64>,
    wind_mw: Vec<f64>,
}

pub fn day_summary(seed: u32, date: &str) -> Result<String, String> {
    let series = demo_day(seed, parse_day(date)?)?;
    let comparison =
        compare_scenarios(&series, DEFAULT_TIE_TOLERANCE).map_err(|e| e.to_string())?;
    let bids = optimal_bids(&series, DEFAULT_TIE_TOLERANCE).map_err(|e| e.to_string())?;
    Ok(to_json(&DaySummary {
        day: series.grid.day().to_string(),
        profit: comparison.profit,
        bid_quantity_mwh: comparison.bid_quantity_mwh,
        s3_uplift_pct: comparison.s3_uplift_pct(),
        hours: bids
            .iter()
            .map(|b| HourRow {
                hour: b.hour,
                dam_price: b.dam_price,
                rtm_hour_sum: b.rtm_hour_sum,
                forecast_mw: series.forecast_mw(b.hour),
                q_star: b.q_star,
                regime: b.regime.label(),
            })
            .collect(),
        rtm_price: series.rtm.values().to_vec(),
        wind_mw: series.wind.values().to_vec(),
    }))
}

#[derive(Serialize)]
struct ProfitCurve {
    hour: usize,
    dam_price: f64,
    rtm_hour_sum: f64,
    forecast_mw: f64,
    q: Vec<f64>,
    profit: Vec<f64>,
    q_star: f64,
    regime: &'static str,
}

/// Scenario-3 profit of one hour over `q` in `[0, forecast]`, with the
/// day-ahead price moved by `dam_shift`.
pub fn profit_curve(
    seed: u32,
    date: &str,
    hour: usize,
    dam_shift: f64,
    points: usize,
) -> Result<String, String> {
    if !(2..=10_001).contains(&points) {
        return Err("points must be in 2..=10001".into());
    }
    if !dam_shift.is_finite() {
        return Err("price shift must be finite".into());
    }
    let mut series = demo_day(seed, parse_day(date)?)?;
    if hour >= 24 {
        return Err(format!("hour {hour} is outside 0..24"));
    }
    series.dam.0[hour] += dam_shift;
    let wf = series.forecast_mw(hour);
    let q: Vec<f64> = (0..points)
        .map(|k| wf * (k as f64 / (points - 1) as f64))
        .collect();
    let profit = q
        .iter()
        .map(|&qk| settle_scenario3_given_q(&series, hour, qk).map(|s| s.profit))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let bid =
        optimal_bid_closed_form(&series, hour, DEFAULT_TIE_TOLERANCE).map_err(|e| e.to_string())?;
    Ok(to_json(&ProfitCurve {
        hour,
        dam_price: bid.dam_price,
        rtm_hour_sum: bid.rtm_hour_sum,
        forecast_mw: wf,
        q,
        profit,
        q_star: bid.q_star,
        regime: bid.regime.label(),
    }))
}

#[derive(Serialize)]
struct ReservePoint {
    alpha: f64,
    mean_reserve_mw: f64,
    reserve_cost: f64,
    breakeven_margin: f64,
}

#[derive(Serialize)]
struct ReserveCurve {
    scenario: Scenario,
    window_days: usize,
    wind_profit: f64,
    points: Vec<ReservePoint>,
}

/// Reserve requirement and break-even margin of `date` as the quantile
/// level sweeps `[alpha_min, alpha_max]`, sized from the preceding days.
#[allow(clippy::too_many_arguments)]
pub fn reserve_curve(
    seed: u32,
    date: &str,
    scenario: u8,
    window_days: usize,
    reserve_price: f64,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> Result<String, String> {
    let scenario = match scenario {
        1 => Scenario::S1,
        2 => Scenario::S2,
        3 => Scenario::S3,
        s => return Err(format!("scenario must be 1, 2 or 3, got {s}")),
    };
    if !(1..=366).contains(&window_days) {
        return Err("window must be 1..=366 days".into());
    }
    if !(0.0 < alpha_min && alpha_min <= alpha_max && alpha_max < 1.0)
        || !(2..=1000).contains(&points)
    {
        return Err("need 0 < alpha_min <= alpha_max < 1 and 2..=1000 points".into());
    }
    let day = parse_day(date)?;
    let target = demo_day(seed, day)?;
    let window = (1..=window_days as i64)
        .rev()
        .map(|k| demo_day(seed, day - Duration::days(k)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut curve = ReserveCurve {
        scenario,
        window_days,
        wind_profit: 0.0,
        points: Vec::with_capacity(points),
    };
    for k in 0..points {
        let alpha = alpha_min + (alpha_max - alpha_min) * k as f64 / (points - 1) as f64;
        let cfg = ReserveConfig {
            alpha,
            reserve_price,
            ..ReserveConfig::default()
        };
        let report =
            scenario_reserve(&target, &window, scenario, &cfg).map_err(|e| e.to_string())?;
        curve.wind_profit = report.wind_profit;
        curve.points.push(ReservePoint {
            alpha,
            mean_reserve_mw: report.profile.hourly_mw.iter().sum::<f64>() / 24.0,
            reserve_cost: report.reserve_cost,
            breakeven_margin: report.breakeven_margin,
        });
    }
    Ok(to_json(&curve))
}

#[wasm_bindgen(js_name = daySummary)]
pub fn day_summary_js(seed: u32, date: &str) -> Result<String, JsError> {
    day_summary(seed, date).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = profitCurve)]
pub fn profit_curve_js(
    seed: u32,
    date: &str,
    hour: usize,
    dam_shift: f64,
    points: usize,
) -> Result<String, JsError> {
    profit_curve(seed, date, hour, dam_shift, points).map_err(|e| JsError::new(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = reserveCurve)]
pub fn reserve_curve_js(
    seed: u32,
    date: &str,
    scenario: u8,
    window_days: usize,
    reserve_price: f64,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> Result<String, JsError> {
    reserve_curve(
        seed,
        date,
        scenario,
        window_days,
        reserve_price,
        alpha_min,
        alpha_max,
        points,
    )
    .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn summary_is_consistent() {
        let v: Value = serde_json::from_str(&day_summary(7, "2022-04-15").unwrap()).unwrap();
        let p: Vec<f64> = v["profit"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!(p[2] >= p[0].max(p[1]));
        assert_eq!(v["hours"].as_array().unwrap().len(), 24);
        assert_eq!(v["rtm_price"].as_array().unwrap().len(), 96);
        assert_eq!(
            day_summary(7, "2022-04-15").unwrap(),
            day_summary(7, "2022-04-15").unwrap()
        );
        assert!(day_summary(7, "15/04/2022").is_err());
    }

    #[test]
    fn curve_peaks_at_closed_form() {
        for shift in [-40.0, 0.0, 40.0] {
            let v: Value =
                serde_json::from_str(&profit_curve(3, "2022-01-15", 17, shift, 51).unwrap())
                    .unwrap();
            let profit: Vec<f64> = v["profit"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect();
            let q: Vec<f64> = v["q"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect();
            let best = profit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let at_star = profit[q
                .iter()
                .position(|&x| x == v["q_star"].as_f64().unwrap())
                .unwrap()];
            assert!(at_star >= best - 1e-9 * best.abs().max(1.0));
        }
        assert!(profit_curve(3, "2022-01-15", 24, 0.0, 51).is_err());
        assert!(profit_curve(3, "2022-01-15", 1, 0.0, 1).is_err());
    }

    #[test]
    fn reserve_grows_with_alpha() {
        let v: Value = serde_json::from_str(
            &reserve_curve(5, "2022-02-01", 1, 20, 3.0, 0.5, 0.99, 8).unwrap(),
        )
        .unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 8);
        for w in pts.windows(2) {
            assert!(w[0]["mean_reserve_mw"].as_f64() <= w[1]["mean_reserve_mw"].as_f64());
            assert!(w[0]["breakeven_margin"].as_f64() >= w[1]["breakeven_margin"].as_f64());
        }
        assert!(reserve_curve(5, "2022-02-01", 4, 20, 3.0, 0.5, 0.99, 8).is_err());
        assert!(reserve_curve(5, "2022-02-01", 1, 20, 3.0, 0.9, 0.5, 8).is_err());
    }
}
