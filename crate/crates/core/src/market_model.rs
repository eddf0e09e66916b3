//! Settlement horizon and the aligned price/wind series shared by every
//! other module.
//!
//! A [`TimeGrid`] is one delivery day of exactly 24 hours, split into
//! `intervals_per_hour` real-time intervals of `delta_t_hours` each. The day
//! is a local calendar day anchored at a fixed UTC instant; days whose local
//! length is not 24 hours (DST transitions) cannot be represented.

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HOURS_PER_DAY: usize = 24;
pub const MAX_INTERVALS_PER_HOUR: u32 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("alignment error: {series} has {found} values, expected {expected}")]
    Alignment {
        series: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("data error in {series} at interval {index}: {reason}")]
    Data {
        series: &'static str,
        index: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    day: NaiveDate,
    start: DateTime<Utc>,
    intervals_per_hour: u32,
    delta_t_hours: f64,
}

/// Builds a grid for `day` starting at midnight UTC.
pub fn build_time_grid(day: NaiveDate, intervals_per_hour: u32) -> Result<TimeGrid, MarketError> {
    let start = Utc.from_utc_datetime(&day.and_hms_opt(0, 0, 0).expect("midnight exists"));
    TimeGrid::with_start(day, start, intervals_per_hour)
}

impl TimeGrid {
    /// Grid whose first interval begins at `start`. `day` is the local
    /// calendar label of the delivery day.
    pub fn with_start(
        day: NaiveDate,
        start: DateTime<Utc>,
        intervals_per_hour: u32,
    ) -> Result<Self, MarketError> {
        if !(1..=MAX_INTERVALS_PER_HOUR).contains(&intervals_per_hour) {
            return Err(MarketError::Config(format!(
                "intervals_per_hour must be in [1, {MAX_INTERVALS_PER_HOUR}], got {intervals_per_hour}"
            )));
        }
        Ok(Self {
            day,
            start,
            intervals_per_hour,
            delta_t_hours: 1.0 / f64::from(intervals_per_hour),
        })
    }

    /// Grid for the local calendar day `day` in `tz`. Rejects days whose
    /// local length is not 24 hours.
    pub fn for_local_day<Tz: TimeZone>(
        day: NaiveDate,
        intervals_per_hour: u32,
        tz: &Tz,
    ) -> Result<Self, MarketError> {
        let local_midnight = |d: NaiveDate| {
            tz.from_local_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight exists"))
                .earliest()
                .map(|t| t.with_timezone(&Utc))
        };
        let next = day
            .succ_opt()
            .ok_or_else(|| MarketError::Config(format!("no day after {day}")))?;
        let (Some(start), Some(end)) = (local_midnight(day), local_midnight(next)) else {
            return Err(MarketError::Config(format!(
                "local midnight of {day} does not exist in the source timezone"
            )));
        };
        let hours = (end - start).num_minutes() as f64 / 60.0;
        if end - start != Duration::hours(24) {
            return Err(MarketError::Config(format!(
                "{day} has {hours} local hours; only 24-hour days are supported"
            )));
        }
        Self::with_start(day, start, intervals_per_hour)
    }

    pub fn day(&self) -> NaiveDate {
        self.day
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.start + Duration::hours(HOURS_PER_DAY as i64)
    }

    pub fn intervals_per_hour(&self) -> u32 {
        self.intervals_per_hour
    }

    pub fn delta_t_hours(&self) -> f64 {
        self.delta_t_hours
    }

    pub fn hours(&self) -> std::ops::Range<usize> {
        0..HOURS_PER_DAY
    }

    pub fn interval_count(&self) -> usize {
        HOURS_PER_DAY * self.intervals_per_hour as usize
    }

    pub fn hour_of(&self, interval: usize) -> usize {
        interval / self.intervals_per_hour as usize
    }

    /// Interval indices belonging to `hour`.
    pub fn intervals_of(&self, hour: usize) -> std::ops::Range<usize> {
        let n = self.intervals_per_hour as usize;
        hour * n..(hour + 1) * n
    }

    pub fn interval_start(&self, interval: usize) -> DateTime<Utc> {
        // millisecond resolution, floored when 3_600_000 is not divisible
        let ms = 3_600_000 * interval as i64 / i64::from(self.intervals_per_hour);
        self.start + Duration::milliseconds(ms)
    }
}

macro_rules! series_newtype {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name(pub Vec<f64>);

        impl $name {
            pub fn values(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }
    };
}

series_newtype!(
    /// Hourly day-ahead prices, currency per MWh. Negative prices allowed.
    DamPriceSeries
);
series_newtype!(
    /// Real-time prices per interval, currency per MWh.
    RtmPriceSeries
);
series_newtype!(
    /// Realized average wind output per interval, MW.
    WindActualSeries
);
series_newtype!(
    /// Day-ahead wind forecast, one MW level per hour.
    WindForecast
);

/// One validated delivery day. Construct through [`align_horizon`]; the
/// public fields exist for read access and test fixtures, and every
/// consumer that writes the series out re-validates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSeries {
    pub grid: TimeGrid,
    pub dam: DamPriceSeries,
    pub rtm: RtmPriceSeries,
    pub wind: WindActualSeries,
    pub forecast: WindForecast,
}

impl MarketSeries {
    pub fn validate(&self) -> Result<(), MarketError> {
        let n = self.grid.interval_count();
        check_len("dam", self.dam.values(), HOURS_PER_DAY)?;
        check_len("rtm", self.rtm.values(), n)?;
        check_len("wind", self.wind.values(), n)?;
        check_len("forecast", self.forecast.values(), HOURS_PER_DAY)?;
        check_finite("dam", self.dam.values(), false)?;
        check_finite("rtm", self.rtm.values(), false)?;
        check_finite("wind", self.wind.values(), true)?;
        check_finite("forecast", self.forecast.values(), true)?;
        Ok(())
    }

    pub fn dam_price(&self, hour: usize) -> f64 {
        self.dam.0[hour]
    }

    pub fn forecast_mw(&self, hour: usize) -> f64 {
        self.forecast.0[hour]
    }

    /// Real-time prices of the intervals inside `hour`.
    pub fn rtm_in_hour(&self, hour: usize) -> &[f64] {
        &self.rtm.0[self.grid.intervals_of(hour)]
    }

    pub fn wind_in_hour(&self, hour: usize) -> &[f64] {
        &self.wind.0[self.grid.intervals_of(hour)]
    }
}

fn check_len(series: &'static str, v: &[f64], expected: usize) -> Result<(), MarketError> {
    if v.len() != expected {
        return Err(MarketError::Alignment {
            series,
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

fn check_finite(series: &'static str, v: &[f64], non_negative: bool) -> Result<(), MarketError> {
    for (index, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(MarketError::Data {
                series,
                index,
                reason: format!("non-finite value {x}"),
            });
        }
        if non_negative && x < 0.0 {
            return Err(MarketError::Data {
                series,
                index,
                reason: format!("negative power {x}"),
            });
        }
    }
    Ok(())
}

/// Flat forecast: every hour gets the mean of all interval actuals of the
/// day. The summation is order-independent (values are summed in sorted
/// order), so the result is exactly invariant under permutation.
pub fn mean_daily_forecast(
    wind: &WindActualSeries,
    grid: &TimeGrid,
) -> Result<WindForecast, MarketError> {
    if wind.is_empty() {
        return Err(MarketError::Data {
            series: "wind",
            index: 0,
            reason: "empty series".into(),
        });
    }
    check_len("wind", wind.values(), grid.interval_count())?;
    check_finite("wind", wind.values(), true)?;
    let mut sorted = wind.0.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    Ok(WindForecast(vec![mean; HOURS_PER_DAY]))
}

/// Validates component lengths and values against `grid` and bundles them.
pub fn align_horizon(
    dam: DamPriceSeries,
    rtm: RtmPriceSeries,
    wind: WindActualSeries,
    forecast: WindForecast,
    grid: TimeGrid,
) -> Result<MarketSeries, MarketError> {
    let series = MarketSeries {
        grid,
        dam,
        rtm,
        wind,
        forecast,
    };
    series.validate()?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 1, 15).unwrap()
    }

    #[test]
    fn fifteen_minute_grid() {
        let g = build_time_grid(day(), 4).unwrap();
        assert_eq!(g.interval_count(), 96);
        assert_eq!(g.delta_t_hours(), 0.25);
    }

    #[test]
    fn hourly_grid() {
        let g = build_time_grid(day(), 1).unwrap();
        assert_eq!(g.interval_count(), 24);
        assert_eq!(g.delta_t_hours(), 1.0);
    }

    #[test]
    fn five_minute_grid_covers_day() {
        let g = build_time_grid(day(), 12).unwrap();
        assert_eq!(g.interval_count(), 288);
        // 288 * (1/12) = 24
        let total: f64 = (0..g.interval_count()).map(|_| g.delta_t_hours()).sum();
        assert!((total - 24.0).abs() < 1e-9);
        assert!((g.delta_t_hours() * 12.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(matches!(
            build_time_grid(day(), 0),
            Err(MarketError::Config(_))
        ));
        assert!(matches!(
            build_time_grid(day(), 61),
            Err(MarketError::Config(_))
        ));
    }

    #[test]
    fn local_day_rejects_dst() {
        let tz = chrono_tz::America::New_York;
        let spring = NaiveDate::from_ymd_opt(2022, 3, 13).unwrap();
        let fall = NaiveDate::from_ymd_opt(2022, 11, 6).unwrap();
        assert!(TimeGrid::for_local_day(spring, 4, &tz).is_err());
        assert!(TimeGrid::for_local_day(fall, 4, &tz).is_err());
        let g = TimeGrid::for_local_day(day(), 4, &tz).unwrap();
        assert_eq!(g.start().to_rfc3339(), "2022-01-15T05:00:00+00:00");
    }

    #[test]
    fn interval_bookkeeping() {
        let g = build_time_grid(day(), 4).unwrap();
        assert_eq!(g.hour_of(95), 23);
        assert_eq!(g.intervals_of(2), 8..12);
        assert_eq!(g.interval_start(5) - g.start(), Duration::minutes(75));
        let g7 = build_time_grid(day(), 7).unwrap();
        assert_eq!(g7.interval_start(7) - g7.start(), Duration::hours(1));
    }

    #[test]
    fn forecast_of_constant_and_alternating() {
        let g = build_time_grid(day(), 4).unwrap();
        let f = mean_daily_forecast(&WindActualSeries(vec![500.0; 96]), &g).unwrap();
        assert!(f.values().iter().all(|&x| x == 500.0));
        let alt: Vec<f64> = (0..96)
            .map(|i| if i % 2 == 0 { 0.0 } else { 100.0 })
            .collect();
        let f = mean_daily_forecast(&WindActualSeries(alt), &g).unwrap();
        assert_eq!(f.len(), 24);
        assert!(f.values().iter().all(|&x| x == 50.0));
    }

    #[test]
    fn forecast_of_ramp() {
        let g = build_time_grid(day(), 4).unwrap();
        let ramp: Vec<f64> = (0..96).map(|i| 10.0 * i as f64).collect();
        // oracle: integer summation, 10 * (0 + ... + 95) / 96
        let expected = (10 * (0..96).sum::<i64>()) as f64 / 96.0;
        assert_eq!(expected, 475.0);
        let f = mean_daily_forecast(&WindActualSeries(ramp), &g).unwrap();
        assert!(f.values().iter().all(|&x| (x - expected).abs() < 1e-12));
    }

    #[test]
    fn forecast_rejects_empty() {
        let g = build_time_grid(day(), 4).unwrap();
        assert!(mean_daily_forecast(&WindActualSeries(vec![]), &g).is_err());
    }

    fn valid_parts() -> (
        DamPriceSeries,
        RtmPriceSeries,
        WindActualSeries,
        WindForecast,
        TimeGrid,
    ) {
        let g = build_time_grid(day(), 4).unwrap();
        (
            DamPriceSeries(vec![40.0; 24]),
            RtmPriceSeries((0..96).map(|i| i as f64 - 10.0).collect()),
            WindActualSeries(vec![100.0; 96]),
            WindForecast(vec![100.0; 24]),
            g,
        )
    }

    #[test]
    fn align_identity() {
        let (d, r, w, f, g) = valid_parts();
        let s = align_horizon(d.clone(), r.clone(), w.clone(), f.clone(), g.clone()).unwrap();
        assert_eq!((s.dam, s.rtm, s.wind, s.forecast, s.grid), (d, r, w, f, g));
    }

    #[test]
    fn align_length_mismatch() {
        let (d, mut r, w, f, g) = valid_parts();
        r.0.pop();
        let err = align_horizon(d, r, w, f, g).unwrap_err();
        assert_eq!(
            err,
            MarketError::Alignment {
                series: "rtm",
                expected: 96,
                found: 95
            }
        );
    }

    #[test]
    fn align_nan_names_interval() {
        let (d, r, mut w, f, g) = valid_parts();
        w.0[13] = f64::NAN;
        match align_horizon(d, r, w, f, g).unwrap_err() {
            MarketError::Data { series, index, .. } => {
                assert_eq!(series, "wind");
                assert_eq!(index, 13);
            }
            e => panic!("unexpected {e}"),
        }
    }
}
