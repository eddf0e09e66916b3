//! Market-monitor statistics: how closely producers deliver what they
//! commit, a letter grade on top of that, and seasonal capacity factors.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_model::{MarketSeries, HOURS_PER_DAY};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("data error: {0}")]
    Data(String),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSample {
    pub committed_mw: f64,
    pub actual_mw: f64,
    pub dt_hours: f64,
}

/// Interval samples of one day given hourly commitments.
pub fn schedule_samples(
    series: &MarketSeries,
    commitments: &[f64],
) -> Result<Vec<ScheduleSample>, MonitorError> {
    if commitments.len() != HOURS_PER_DAY {
        return Err(MonitorError::Data(format!(
            "commitment profile has {} entries, expected 24",
            commitments.len()
        )));
    }
    let grid = &series.grid;
    let dt = grid.delta_t_hours();
    Ok(series
        .wind
        .values()
        .iter()
        .enumerate()
        .map(|(i, &actual_mw)| ScheduleSample {
            committed_mw: commitments[grid.hour_of(i)],
            actual_mw,
            dt_hours: dt,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceIndex {
    pub producer: String,
    /// `None` when nothing was committed but output deviated anyway.
    pub adherence: Option<f64>,
    pub bias_mw: f64,
    pub sample_count: usize,
    pub window: DateRange,
}

/// `adherence = max(0, 1 - sum |q - actual| dt / sum q dt)`,
/// `bias = mean(q - actual)`.
pub fn adherence_index(
    producer: &str,
    samples: &[ScheduleSample],
    window: DateRange,
) -> Result<PerformanceIndex, MonitorError> {
    if samples.is_empty() {
        return Err(MonitorError::Data(format!(
            "no schedule samples for {producer}"
        )));
    }
    let committed: f64 = samples.iter().map(|s| s.committed_mw * s.dt_hours).sum();
    let deviation: f64 = samples
        .iter()
        .map(|s| (s.committed_mw - s.actual_mw).abs() * s.dt_hours)
        .sum();
    let adherence = if committed > 0.0 {
        Some((1.0 - deviation / committed).max(0.0))
    } else if deviation == 0.0 {
        Some(1.0)
    } else {
        None
    };
    let bias_mw = samples
        .iter()
        .map(|s| s.committed_mw - s.actual_mw)
        .sum::<f64>()
        / samples.len() as f64;
    Ok(PerformanceIndex {
        producer: producer.to_string(),
        adherence,
        bias_mw,
        sample_count: samples.len(),
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Grade {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradeThresholds {
    pub a: f64,
    pub b: f64,
}

impl Default for GradeThresholds {
    fn default() -> Self {
        Self { a: 0.95, b: 0.85 }
    }
}

impl GradeThresholds {
    pub fn validate(&self) -> Result<(), MonitorError> {
        if !(self.a <= 1.0 && self.b >= 0.0 && self.a > self.b) {
            return Err(MonitorError::Config(format!(
                "grade cutoffs must satisfy 1 >= A > B >= 0, got A={} B={}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    /// Undefined adherence grades as C.
    pub fn grade(&self, adherence: Option<f64>) -> Grade {
        match adherence {
            Some(x) if x >= self.a => Grade::A,
            Some(x) if x >= self.b => Grade::B,
            _ => Grade::C,
        }
    }
}

pub fn classify(
    indices: &[PerformanceIndex],
    thresholds: GradeThresholds,
) -> Result<Vec<(String, Grade)>, MonitorError> {
    thresholds.validate()?;
    Ok(indices
        .iter()
        .map(|ix| (ix.producer.clone(), thresholds.grade(ix.adherence)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Fall,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonPartition {
    /// DJF / MAM / JJA / SON.
    Meteorological,
    Single,
}

impl SeasonPartition {
    pub fn season_of(self, day: NaiveDate) -> Season {
        match self {
            SeasonPartition::Single => Season::All,
            SeasonPartition::Meteorological => match day.month() {
                12 | 1 | 2 => Season::Winter,
                3..=5 => Season::Spring,
                6..=8 => Season::Summer,
                _ => Season::Fall,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityFactorReport {
    pub season: Season,
    pub mean: f64,
    /// Capacity factor by hour of day.
    pub hourly_profile: Vec<f64>,
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityFactorSummary {
    pub installed_capacity_mw: f64,
    pub seasons: Vec<CapacityFactorReport>,
    pub overall: f64,
    pub sample_count: usize,
    /// Intervals whose output exceeded installed capacity (clipped).
    pub over_capacity_count: usize,
}

#[derive(Default)]
struct Acc {
    sum: f64,
    n: usize,
    hourly: [(f64, usize); HOURS_PER_DAY],
}

/// Mean output over installed capacity, per season and hour of day.
/// Output above capacity is clipped and counted.
pub fn capacity_factor(
    days: &[MarketSeries],
    installed_capacity_mw: f64,
    partition: SeasonPartition,
) -> Result<CapacityFactorSummary, MonitorError> {
    if !(installed_capacity_mw > 0.0 && installed_capacity_mw.is_finite()) {
        return Err(MonitorError::Config(format!(
            "installed capacity must be positive, got {installed_capacity_mw}"
        )));
    }
    if days.is_empty() {
        return Err(MonitorError::Data("no wind history".into()));
    }
    let mut seasons: std::collections::BTreeMap<Season, Acc> = Default::default();
    let mut total = (0.0, 0usize);
    let mut over = 0;
    for day in days {
        let acc = seasons
            .entry(partition.season_of(day.grid.day()))
            .or_default();
        for (i, &w) in day.wind.values().iter().enumerate() {
            if w > installed_capacity_mw {
                over += 1;
            }
            let cf = w.min(installed_capacity_mw) / installed_capacity_mw;
            acc.sum += cf;
            acc.n += 1;
            let slot = &mut acc.hourly[day.grid.hour_of(i)];
            slot.0 += cf;
            slot.1 += 1;
            total.0 += cf;
            total.1 += 1;
        }
    }
    let seasons = seasons
        .into_iter()
        .map(|(season, acc)| CapacityFactorReport {
            season,
            mean: acc.sum / acc.n as f64,
            hourly_profile: acc
                .hourly
                .iter()
                .map(|&(s, n)| if n == 0 { 0.0 } else { s / n as f64 })
                .collect(),
            sample_count: acc.n,
        })
        .collect();
    Ok(CapacityFactorSummary {
        installed_capacity_mw,
        seasons,
        overall: total.0 / total.1 as f64,
        sample_count: total.1,
        over_capacity_count: over,
    })
}
