//! Canonical day files on disk, one `<YYYY-MM-DD>.csv` per day.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use windbid::ingest::read_canonical_file;
use windbid::MarketSeries;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub fn day_file(dir: &Path, day: NaiveDate) -> PathBuf {
    dir.join(format!("{day}.csv"))
}

pub struct DayStore {
    dir: PathBuf,
    days: BTreeSet<NaiveDate>,
    intervals_per_hour: Option<u32>,
}

impl DayStore {
    pub fn open(dir: &Path, cfg: &RunConfig) -> CliResult<DayStore> {
        let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
        let mut days = BTreeSet::new();
        for entry in entries {
            let name = entry.map_err(|e| CliError::io(dir, e))?.file_name();
            let name = name.to_string_lossy();
            if let Some(stem) = name.strip_suffix(".csv") {
                if let Ok(day) = stem.parse::<NaiveDate>() {
                    days.insert(day);
                }
            }
        }
        Ok(DayStore {
            dir: dir.to_path_buf(),
            days,
            intervals_per_hour: cfg.intervals_explicit.then_some(cfg.intervals_per_hour),
        })
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days.iter().copied()
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.days.contains(&day)
    }

    /// Requested days in ascending order, or every stored day when none
    /// are requested.
    pub fn select(&self, requested: &[NaiveDate]) -> CliResult<Vec<NaiveDate>> {
        if requested.is_empty() {
            if self.days.is_empty() {
                return Err(CliError::MissingDay(format!(
                    "no day files in {}",
                    self.dir.display()
                )));
            }
            return Ok(self.days().collect());
        }
        let wanted: BTreeSet<NaiveDate> = requested.iter().copied().collect();
        for &day in &wanted {
            if !self.contains(day) {
                return Err(CliError::MissingDay(format!(
                    "{} not found",
                    day_file(&self.dir, day).display()
                )));
            }
        }
        Ok(wanted.into_iter().collect())
    }

    pub fn load(&self, day: NaiveDate) -> CliResult<MarketSeries> {
        let path = day_file(&self.dir, day);
        if !self.contains(day) {
            return Err(CliError::MissingDay(format!(
                "{} not found",
                path.display()
            )));
        }
        let series = read_canonical_file(&path).map_err(|e| CliError::ingest(&path, e))?;
        if series.grid.day() != day {
            return Err(CliError::Data(format!(
                "{}: file holds day {}",
                path.display(),
                series.grid.day()
            )));
        }
        if let Some(n) = self.intervals_per_hour {
            if series.grid.intervals_per_hour() != n {
                return Err(CliError::Data(format!(
                    "{}: {} intervals per hour, configured {n}",
                    path.display(),
                    series.grid.intervals_per_hour()
                )));
            }
        }
        Ok(series)
    }

    /// The `window` calendar days before `day`, all of which must exist.
    pub fn window_before(&self, day: NaiveDate, window: usize) -> CliResult<Vec<MarketSeries>> {
        let first = day - Duration::days(window as i64);
        let wanted: Vec<NaiveDate> = first.iter_days().take(window).collect();
        let available = wanted.iter().filter(|d| self.contains(**d)).count();
        if available < window {
            let missing: Vec<String> = wanted
                .iter()
                .filter(|d| !self.contains(**d))
                .take(3)
                .map(|d| d.to_string())
                .collect();
            return Err(CliError::InsufficientHistory(format!(
                "{day} needs {window} days of history ({first} .. {}), {available} available; missing {}{}",
                day - Duration::days(1),
                missing.join(", "),
                if window - available > missing.len() { ", ..." } else { "" }
            )));
        }
        wanted.into_iter().map(|d| self.load(d)).collect()
    }
}
