//! Seeded synthetic market days for tests and demos.
//!
//! Wind follows a seasonal level with a diurnal sinusoid and AR(1) noise.
//! Day-ahead prices follow a two-peak daily load shape; real-time prices
//! scatter around them with a per-day bias, occasional spikes, and
//! negative excursions when wind is high. The flat daily-mean forecast is
//! attached to every day.

use chrono::NaiveDate;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::market_model::{
    align_horizon, build_time_grid, mean_daily_forecast, DamPriceSeries, MarketError, MarketSeries,
    RtmPriceSeries, WindActualSeries, HOURS_PER_DAY,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub intervals_per_hour: u32,
    pub capacity_mw: f64,
    /// Base day-ahead price level, currency per MWh.
    pub base_price: f64,
    /// Relative scatter of real-time around day-ahead prices.
    pub rtm_noise: f64,
    /// Probability that a real-time interval spikes.
    pub spike_probability: f64,
    pub spike_max: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            intervals_per_hour: 4,
            capacity_mw: 2000.0,
            base_price: 45.0,
            rtm_noise: 0.2,
            spike_probability: 0.01,
            spike_max: 600.0,
        }
    }
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

/// Mean capacity factor by month, loosely winter/fall windy and summer calm.
fn seasonal_cf(day: NaiveDate) -> f64 {
    use chrono::Datelike;
    const CF: [f64; 12] = [
        0.38, 0.36, 0.40, 0.42, 0.33, 0.18, 0.10, 0.12, 0.22, 0.35, 0.40, 0.40,
    ];
    CF[day.month0() as usize]
}

fn load_shape(hour: f64) -> f64 {
    let morning = (-((hour - 8.0) / 2.5).powi(2)).exp();
    let evening = (-((hour - 18.5) / 3.0).powi(2)).exp();
    0.75 + 0.35 * morning + 0.6 * evening
}

pub fn synth_day(
    day: NaiveDate,
    config: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Result<MarketSeries, MarketError> {
    if config.capacity_mw.is_nan()
        || config.capacity_mw <= 0.0
        || !(0.0..=1.0).contains(&config.spike_probability)
    {
        return Err(MarketError::Config(
            "capacity must be positive and spike probability in [0, 1]".into(),
        ));
    }
    let grid = build_time_grid(day, config.intervals_per_hour)?;
    let n = grid.interval_count();
    let unit = Normal::new(0.0, 1.0).expect("valid normal");

    let cap = config.capacity_mw;
    let level = cap * seasonal_cf(day) * rng.random_range(0.4..1.6);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let rho: f64 = 0.97;
    let mut ar = 0.0;
    let wind: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * grid.delta_t_hours();
            ar = rho * ar + (1.0 - rho * rho).sqrt() * unit.sample(rng);
            let w = level * (1.0 + 0.3 * (std::f64::consts::TAU * t / 24.0 + phase).sin())
                + 0.25 * level * ar;
            round_to(w.clamp(0.0, cap), 1)
        })
        .collect();

    let day_level = config.base_price * rng.random_range(0.7..1.5);
    let dam: Vec<f64> = (0..HOURS_PER_DAY)
        .map(|h| {
            let p = day_level * load_shape(h as f64 + 0.5) * (1.0 + 0.05 * unit.sample(rng));
            round_to(p, 2)
        })
        .collect();

    // Day-level bias makes real-time systematically cheaper or dearer.
    let bias = 1.0 + 0.12 * unit.sample(rng);
    let rtm: Vec<f64> = (0..n)
        .map(|i| {
            let h = grid.hour_of(i);
            let mut p = dam[h] * bias * (1.0 + config.rtm_noise * unit.sample(rng));
            if rng.random::<f64>() < config.spike_probability {
                p += rng.random::<f64>() * config.spike_max;
            }
            if wind[i] > 0.8 * cap && rng.random::<f64>() < 0.3 {
                p = -30.0 * rng.random::<f64>();
            }
            round_to(p, 2)
        })
        .collect();

    let wind = WindActualSeries(wind);
    let forecast = mean_daily_forecast(&wind, &grid)?;
    align_horizon(
        DamPriceSeries(dam),
        RtmPriceSeries(rtm),
        wind,
        forecast,
        grid,
    )
}

/// `count` consecutive days starting at `start`, reproducible from `seed`.
pub fn synth_days(
    start: NaiveDate,
    count: usize,
    config: &SynthConfig,
    seed: u64,
) -> Result<Vec<MarketSeries>, MarketError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    start
        .iter_days()
        .take(count)
        .map(|d| synth_day(d, config, &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_valid() {
        let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
        let a = synth_days(start, 5, &SynthConfig::default(), 7).unwrap();
        let b = synth_days(start, 5, &SynthConfig::default(), 7).unwrap();
        assert_eq!(a, b);
        let c = synth_days(start, 5, &SynthConfig::default(), 8).unwrap();
        assert_ne!(a, c);
        for d in &a {
            d.validate().unwrap();
            assert!(d.wind.values().iter().all(|&w| (0.0..=2000.0).contains(&w)));
        }
        assert_eq!(
            a[4].grid.day(),
            NaiveDate::from_ymd_opt(2022, 1, 5).unwrap()
        );
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SynthConfig {
            capacity_mw: 0.0,
            ..SynthConfig::default()
        };
        assert!(synth_days(NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(), 1, &cfg, 1).is_err());
    }
}
