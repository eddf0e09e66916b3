//! ISO-style CSV ingestion: parse time-stamped values, regularize and fill
//! short gaps, resample onto a [`TimeGrid`], and read/write the canonical
//! one-file-per-day format.
//!
//! Canonical CSV columns are
//! `interval_start_utc,dam_price,rtm_price,wind_mw,forecast_mw`, one row per
//! real-time interval, with the hourly day-ahead price and forecast repeated
//! across the intervals of their hour. Numbers are written in their
//! shortest round-trip decimal form, so reading a file back reproduces the
//! series exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, LocalResult, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_model::{
    align_horizon, mean_daily_forecast, DamPriceSeries, MarketError, MarketSeries, RtmPriceSeries,
    TimeGrid, WindActualSeries, WindForecast, HOURS_PER_DAY, MAX_INTERVALS_PER_HOUR,
};

pub const CANONICAL_HEADER: [&str; 5] = [
    "interval_start_utc",
    "dam_price",
    "rtm_price",
    "wind_mw",
    "forecast_mw",
];

const MISSING_MARKERS: [&str; 7] = ["", "N/A", "NA", "NaN", "nan", "null", "-"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("data error: {0}")]
    Data(String),
    #[error("insufficient coverage: no data for {from} .. {to}")]
    Coverage {
        from: DateTime<Utc>,
        to: DateTime<Utc>,
    },
    #[error("gap of {length} missing points starting at index {index}{span}")]
    Gap {
        index: usize,
        length: usize,
        span: String,
    },
    #[error(transparent)]
    Market(#[from] MarketError),
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    DamPrice,
    RtmPrice,
    WindMw,
    LoadMw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPoint {
    pub ts: DateTime<Utc>,
    /// `None` marks an explicitly missing value.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub kind: SeriesKind,
    pub points: Vec<RawPoint>,
    /// Rows dropped because a later row carried the same timestamp.
    pub duplicates_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub timestamp_column: String,
    pub value_column: String,
    /// Keep only rows whose `(column, value)` matches, e.g. one zone of a
    /// multi-zone price file.
    pub row_filter: Option<(String, String)>,
}

impl ColumnMap {
    pub fn new(timestamp_column: impl Into<String>, value_column: impl Into<String>) -> Self {
        Self {
            timestamp_column: timestamp_column.into(),
            value_column: value_column.into(),
            row_filter: None,
        }
    }

    pub fn with_filter(mut self, column: impl Into<String>, value: impl Into<String>) -> Self {
        self.row_filter = Some((column.into(), value.into()));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapPolicy {
    /// Longest run of consecutive missing points that may be filled.
    pub max_fill_run: usize,
}

impl Default for GapPolicy {
    fn default() -> Self {
        Self { max_fill_run: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    /// Step function held until the next point, averaged by overlap.
    TimeWeightedMean,
    /// Value of the last point at or before each interval start.
    Last,
    /// Linear interpolation of the points at each interval start.
    LinearToGrid,
}

/// Parses `s` as RFC 3339 (explicit offset), or as a local time in `tz`
/// written `YYYY-MM-DD[T ]HH:MM[:SS]` or `MM/DD/YYYY HH:MM[:SS]`.
/// Ambiguous local times (DST fall-back) resolve to the earlier instant.
pub fn parse_timestamp(s: &str, tz: &Tz) -> Result<DateTime<Utc>, String> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    const LOCAL_FORMATS: [&str; 6] = [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
        "%m/%d/%Y %H:%M:%S",
        "%m/%d/%Y %H:%M",
    ];
    let naive = LOCAL_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .ok_or_else(|| format!("unrecognized timestamp {s:?}"))?;
    match tz.from_local_datetime(&naive) {
        LocalResult::Single(t) => Ok(t.with_timezone(&Utc)),
        LocalResult::Ambiguous(early, _) => Ok(early.with_timezone(&Utc)),
        LocalResult::None => Err(format!("local time {s:?} does not exist in {tz}")),
    }
}

fn parse_value(s: &str) -> Result<Option<f64>, String> {
    let s = s.trim();
    if MISSING_MARKERS.contains(&s) {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("invalid number {s:?}")),
    }
}

/// Reads a headered CSV with one timestamp column and one value column.
/// Rows are sorted by time; for duplicate timestamps the last row wins.
pub fn parse_csv<R: Read>(
    reader: R,
    kind: SeriesKind,
    columns: &ColumnMap,
    tz: &Tz,
) -> Result<RawSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| IngestError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::Parse {
                line: 1,
                message: format!("column {name:?} not found in header"),
            })
    };
    let ts_col = find(&columns.timestamp_column)?;
    let val_col = find(&columns.value_column)?;
    let filter = match &columns.row_filter {
        Some((col, want)) => Some((find(col)?, want.as_str())),
        None => None,
    };

    let mut rows: Vec<RawPoint> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| IngestError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record.get(i).ok_or_else(|| IngestError::Parse {
                line,
                message: format!("row has no column {i}"),
            })
        };
        if let Some((col, want)) = filter {
            if field(col)?.trim() != want {
                continue;
            }
        }
        let ts = parse_timestamp(field(ts_col)?, tz)
            .map_err(|message| IngestError::Parse { line, message })?;
        let value =
            parse_value(field(val_col)?).map_err(|message| IngestError::Parse { line, message })?;
        rows.push(RawPoint { ts, value });
    }
    if rows.is_empty() {
        return Err(IngestError::Data(match &columns.row_filter {
            Some((col, want)) => format!("no data rows with {col} = {want:?}"),
            None => "file has no data rows".into(),
        }));
    }

    rows.sort_by_key(|p| p.ts);
    let before = rows.len();
    let mut points: Vec<RawPoint> = Vec::with_capacity(before);
    for p in rows {
        match points.last_mut() {
            Some(last) if last.ts == p.ts => *last = p,
            _ => points.push(p),
        }
    }
    Ok(RawSeries {
        kind,
        duplicates_dropped: before - points.len(),
        points,
    })
}

pub fn parse_csv_file(
    path: &Path,
    kind: SeriesKind,
    columns: &ColumnMap,
    tz: &Tz,
) -> Result<RawSeries, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    parse_csv(file, kind, columns, tz)
}

/// Linearly interpolates missing runs of at most `max_fill_run` points
/// between their present neighbours; runs touching either end take the
/// nearest present value.
pub fn fill_gaps(values: &[Option<f64>], policy: GapPolicy) -> Result<Vec<f64>, IngestError> {
    if values.iter().all(Option::is_none) {
        return Err(IngestError::Data("no present values to fill from".into()));
    }
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    let mut i = 0;
    while i < values.len() {
        if let Some(v) = values[i] {
            out.push(v);
            i += 1;
            continue;
        }
        let start = i;
        while i < values.len() && values[i].is_none() {
            i += 1;
        }
        let length = i - start;
        if length > policy.max_fill_run {
            return Err(IngestError::Gap {
                index: start,
                length,
                span: String::new(),
            });
        }
        let left = start.checked_sub(1).and_then(|j| values[j]);
        let right = values.get(i).copied().flatten();
        match (left, right) {
            (Some(l), Some(r)) => {
                let steps = (length + 1) as f64;
                out.extend((1..=length).map(|k| l + (r - l) * (k as f64 / steps)));
            }
            (Some(v), None) | (None, Some(v)) => out.extend(std::iter::repeat_n(v, length)),
            (None, None) => unreachable!("at least one value is present"),
        }
    }
    Ok(out)
}

impl RawSeries {
    /// Most frequent spacing between consecutive points.
    pub fn modal_step(&self) -> Option<Duration> {
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for w in self.points.windows(2) {
            *counts
                .entry((w[1].ts - w[0].ts).num_milliseconds())
                .or_default() += 1;
        }
        counts
            .into_iter()
            .max_by_key(|&(step, n)| (n, std::cmp::Reverse(step)))
            .map(|(step, _)| Duration::milliseconds(step))
    }

    /// Inserts missing points wherever consecutive timestamps are an exact
    /// multiple (> 1) of `step` apart. Returns the number inserted.
    pub fn regularize(&mut self, step: Duration) -> usize {
        let step_ms = step.num_milliseconds();
        if step_ms <= 0 || self.points.len() < 2 {
            return 0;
        }
        let mut out = Vec::with_capacity(self.points.len());
        let mut inserted = 0;
        for w in self.points.windows(2) {
            out.push(w[0]);
            let gap = (w[1].ts - w[0].ts).num_milliseconds();
            if gap > step_ms && gap % step_ms == 0 {
                for k in 1..gap / step_ms {
                    out.push(RawPoint {
                        ts: w[0].ts + Duration::milliseconds(k * step_ms),
                        value: None,
                    });
                    inserted += 1;
                }
            }
        }
        out.push(*self.points.last().expect("at least two points"));
        self.points = out;
        inserted
    }

    pub fn missing_count(&self) -> usize {
        self.points.iter().filter(|p| p.value.is_none()).count()
    }

    /// [`fill_gaps`] over the point values; errors name the time span.
    pub fn filled(&self, policy: GapPolicy) -> Result<RawSeries, IngestError> {
        let values: Vec<Option<f64>> = self.points.iter().map(|p| p.value).collect();
        let filled = fill_gaps(&values, policy).map_err(|e| match e {
            IngestError::Gap { index, length, .. } => IngestError::Gap {
                index,
                length,
                span: format!(
                    " ({} .. {})",
                    fmt_ts(self.points[index].ts),
                    fmt_ts(self.points[index + length - 1].ts)
                ),
            },
            e => e,
        })?;
        Ok(RawSeries {
            kind: self.kind,
            points: self
                .points
                .iter()
                .zip(filled)
                .map(|(p, v)| RawPoint {
                    ts: p.ts,
                    value: Some(v),
                })
                .collect(),
            duplicates_dropped: self.duplicates_dropped,
        })
    }
}

/// One value per grid interval. The raw series must be gap-free over the
/// day: its first point at or before the grid start and its last point at
/// or after the last interval start.
pub fn resample(
    raw: &RawSeries,
    grid: &TimeGrid,
    method: ResampleMethod,
) -> Result<Vec<f64>, IngestError> {
    let n = grid.interval_count();
    let last_start = grid.interval_start(n - 1);
    let (Some(first), Some(last)) = (raw.points.first(), raw.points.last()) else {
        return Err(IngestError::Coverage {
            from: grid.start(),
            to: grid.end(),
        });
    };
    if first.ts > grid.start() {
        return Err(IngestError::Coverage {
            from: grid.start(),
            to: first.ts,
        });
    }
    if last.ts < last_start {
        return Err(IngestError::Coverage {
            from: last.ts,
            to: last_start,
        });
    }

    // milliseconds relative to grid start
    let origin = grid.start();
    let rel = |t: DateTime<Utc>| (t - origin).num_milliseconds();
    let day_ms = rel(grid.end());
    let lo = raw.points.partition_point(|p| rel(p.ts) <= 0) - 1;
    // one point past the day end is kept as the right anchor for interpolation
    let hi = (raw.points.partition_point(|p| rel(p.ts) < day_ms) + 1).min(raw.points.len());
    let pts: Vec<(i64, f64)> = raw.points[lo..hi]
        .iter()
        .map(|p| {
            p.value.map(|v| (rel(p.ts), v)).ok_or_else(|| {
                IngestError::Data(format!("missing value at {} not filled", p.ts.to_rfc3339()))
            })
        })
        .collect::<Result<_, _>>()?;

    let bounds: Vec<i64> = (0..=n)
        .map(|i| {
            if i == n {
                day_ms
            } else {
                rel(grid.interval_start(i))
            }
        })
        .collect();

    let out = match method {
        ResampleMethod::TimeWeightedMean => {
            let mut out = Vec::with_capacity(n);
            let mut j = 0;
            for i in 0..n {
                let (a, b) = (bounds[i], bounds[i + 1]);
                while j + 1 < pts.len() && pts[j + 1].0 <= a {
                    j += 1;
                }
                let mut acc = 0.0;
                let mut k = j;
                loop {
                    let seg_start = pts[k].0.max(a);
                    let seg_end = pts.get(k + 1).map_or(b, |p| p.0.min(b));
                    if seg_end > seg_start {
                        acc += pts[k].1 * (seg_end - seg_start) as f64;
                    }
                    if k + 1 >= pts.len() || pts[k + 1].0 >= b {
                        break;
                    }
                    k += 1;
                }
                out.push(acc / (b - a) as f64);
            }
            out
        }
        ResampleMethod::Last => (0..n)
            .map(|i| {
                let j = pts.partition_point(|p| p.0 <= bounds[i]) - 1;
                pts[j].1
            })
            .collect(),
        ResampleMethod::LinearToGrid => (0..n)
            .map(|i| {
                let t = bounds[i];
                let j = pts.partition_point(|p| p.0 <= t) - 1;
                match pts.get(j + 1) {
                    Some(&(t1, v1)) => {
                        let (t0, v0) = pts[j];
                        v0 + (v1 - v0) * ((t - t0) as f64 / (t1 - t0) as f64)
                    }
                    None => pts[j].1,
                }
            })
            .collect(),
    };
    Ok(out)
}

/// Resampling choices used when assembling a day from raw series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyMethods {
    pub dam: ResampleMethod,
    pub rtm: ResampleMethod,
    pub wind: ResampleMethod,
}

impl Default for AssemblyMethods {
    fn default() -> Self {
        Self {
            dam: ResampleMethod::Last,
            rtm: ResampleMethod::TimeWeightedMean,
            wind: ResampleMethod::TimeWeightedMean,
        }
    }
}

/// Builds a [`MarketSeries`] for `grid` from gap-free raw series, using the
/// daily mean of actual wind as the flat forecast.
pub fn assemble_day(
    dam: &RawSeries,
    rtm: &RawSeries,
    wind: &RawSeries,
    grid: &TimeGrid,
    methods: AssemblyMethods,
) -> Result<MarketSeries, IngestError> {
    let hourly = TimeGrid::with_start(grid.day(), grid.start(), 1)?;
    let dam = DamPriceSeries(resample(dam, &hourly, methods.dam)?);
    let rtm = RtmPriceSeries(resample(rtm, grid, methods.rtm)?);
    let wind = WindActualSeries(resample(wind, grid, methods.wind)?);
    let forecast = mean_daily_forecast(&wind, grid)?;
    Ok(align_horizon(dam, rtm, wind, forecast, grid.clone())?)
}

fn fmt_num(v: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{v}")
}

fn fmt_ts(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn write_canonical<W: Write>(series: &MarketSeries, mut out: W) -> Result<(), IngestError> {
    series.validate()?;
    let io_err = |e| IngestError::Io {
        path: "<canonical output>".into(),
        source: e,
    };
    writeln!(out, "{}", CANONICAL_HEADER.join(",")).map_err(io_err)?;
    let grid = &series.grid;
    for i in 0..grid.interval_count() {
        let h = grid.hour_of(i);
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_ts(grid.interval_start(i)),
            fmt_num(series.dam.0[h]),
            fmt_num(series.rtm.0[i]),
            fmt_num(series.wind.0[i]),
            fmt_num(series.forecast.0[h]),
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_canonical_file(series: &MarketSeries, path: &Path) -> Result<(), IngestError> {
    series.validate()?;
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_canonical(series, BufWriter::new(file)).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::io(path, source),
        e => e,
    })
}

/// Reads a canonical day file. The delivery-day label is the UTC date at
/// twelve hours past the first interval start, which recovers the local
/// date for any UTC offset within ±12 h.
pub fn read_canonical<R: Read>(reader: R) -> Result<MarketSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| IngestError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().map(str::trim).ne(CANONICAL_HEADER) {
        return Err(IngestError::Parse {
            line: 1,
            message: format!("expected header {}", CANONICAL_HEADER.join(",")),
        });
    }
    let mut ts = Vec::new();
    let mut cols: [Vec<f64>; 4] = Default::default();
    for record in rdr.records() {
        let record = record.map_err(|e| IngestError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let t = DateTime::parse_from_rfc3339(record[0].trim()).map_err(|e| IngestError::Parse {
            line,
            message: format!("timestamp {:?}: {e}", &record[0]),
        })?;
        ts.push(t.with_timezone(&Utc));
        for (c, col) in cols.iter_mut().enumerate() {
            let v = record[c + 1]
                .trim()
                .parse::<f64>()
                .map_err(|_| IngestError::Parse {
                    line,
                    message: format!(
                        "invalid {} value {:?}",
                        CANONICAL_HEADER[c + 1],
                        &record[c + 1]
                    ),
                })?;
            col.push(v);
        }
    }
    if ts.is_empty() {
        return Err(IngestError::Data("canonical file has no rows".into()));
    }
    let n = ts.len();
    let per_hour = n / HOURS_PER_DAY;
    if n % HOURS_PER_DAY != 0 || per_hour == 0 || per_hour > MAX_INTERVALS_PER_HOUR as usize {
        return Err(IngestError::Data(format!(
            "{n} rows is not a whole day at 1..=60 intervals per hour"
        )));
    }
    let day = (ts[0] + Duration::hours(12)).date_naive();
    let grid = TimeGrid::with_start(day, ts[0], per_hour as u32)?;
    for (i, t) in ts.iter().enumerate() {
        if *t != grid.interval_start(i) {
            return Err(IngestError::Parse {
                line: i as u64 + 2,
                message: format!(
                    "timestamp {} is off the {per_hour}-per-hour grid",
                    t.to_rfc3339()
                ),
            });
        }
    }
    let [dam_rows, rtm, wind, forecast_rows] = cols;
    let hourly = |rows: &[f64], name: &str| -> Result<Vec<f64>, IngestError> {
        grid.hours()
            .map(|h| {
                let r = grid.intervals_of(h);
                let v = rows[r.start];
                if rows[r.clone()].iter().any(|x| x.to_bits() != v.to_bits()) {
                    return Err(IngestError::Data(format!("{name} varies within hour {h}")));
                }
                Ok(v)
            })
            .collect()
    };
    let dam = hourly(&dam_rows, "dam_price")?;
    let forecast = hourly(&forecast_rows, "forecast_mw")?;
    Ok(align_horizon(
        DamPriceSeries(dam),
        RtmPriceSeries(rtm),
        WindActualSeries(wind),
        WindForecast(forecast),
        grid,
    )?)
}

pub fn read_canonical_file(path: &Path) -> Result<MarketSeries, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_canonical(file).map_err(|e| match e {
        IngestError::Parse { line, message } => IngestError::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        IngestError::Data(m) => IngestError::Data(format!("{}: {m}", path.display())),
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_model::build_time_grid;
    use chrono::NaiveDate;

    fn utc() -> Tz {
        chrono_tz::UTC
    }

    fn cols() -> ColumnMap {
        ColumnMap::new("ts", "mw")
    }

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 1, 15).unwrap()
    }

    fn raw_every(step_min: i64, values: &[f64]) -> RawSeries {
        let start = build_time_grid(day(), 1).unwrap().start();
        RawSeries {
            kind: SeriesKind::WindMw,
            points: values
                .iter()
                .enumerate()
                .map(|(i, &v)| RawPoint {
                    ts: start + Duration::minutes(step_min * i as i64),
                    value: Some(v),
                })
                .collect(),
            duplicates_dropped: 0,
        }
    }

    #[test]
    fn parses_two_rows() {
        let text = "ts,mw\n2022-01-15T00:00:00Z,100\n2022-01-15T00:05:00Z,110\n";
        let r = parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.points[1].value, Some(110.0));
        assert_eq!(r.duplicates_dropped, 0);
    }

    #[test]
    fn duplicate_keeps_last() {
        let text = "ts,mw\n2022-01-15T00:00:00Z,100\n2022-01-15T00:00:00Z,120\n";
        let r = parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].value, Some(120.0));
        assert_eq!(r.duplicates_dropped, 1);
    }

    #[test]
    fn na_value_is_missing_and_filled_downstream() {
        // line 7 carries N/A
        let mut text = String::from("ts,mw\n");
        for i in 0..8 {
            let v = if i == 5 {
                "N/A".to_string()
            } else {
                format!("{}", 100 + 10 * i)
            };
            text.push_str(&format!("2022-01-15T00:{:02}:00Z,{v}\n", 5 * i));
        }
        let r = parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()).unwrap();
        assert_eq!(r.points[5].value, None);
        assert_eq!(r.missing_count(), 1);
        let f = r.filled(GapPolicy { max_fill_run: 1 }).unwrap();
        assert_eq!(f.points[5].value, Some(150.0));
    }

    #[test]
    fn bad_value_reports_line() {
        let text = "ts,mw\n2022-01-15T00:00:00Z,100\n2022-01-15T00:05:00Z,abc\n";
        match parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()).unwrap_err() {
            IngestError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        let text = "ts,mw\nyesterday,100\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()),
            Err(IngestError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn row_filter_selects_zone() {
        let text = "ts,Name,mw\n\
            2022-01-15T00:00:00Z,WEST,10\n\
            2022-01-15T00:00:00Z,N.Y.C.,50\n\
            2022-01-15T00:05:00Z,WEST,11\n\
            2022-01-15T00:05:00Z,N.Y.C.,51\n";
        let nyc = cols().with_filter("Name", "N.Y.C.");
        let r = parse_csv(text.as_bytes(), SeriesKind::RtmPrice, &nyc, &utc()).unwrap();
        assert_eq!(r.duplicates_dropped, 0);
        assert_eq!(
            r.points
                .iter()
                .map(|p| p.value.unwrap())
                .collect::<Vec<_>>(),
            [50.0, 51.0]
        );
        let other = cols().with_filter("Name", "LONGIL");
        assert!(matches!(
            parse_csv(text.as_bytes(), SeriesKind::RtmPrice, &other, &utc()),
            Err(IngestError::Data(_))
        ));
    }

    #[test]
    fn empty_file_is_data_error() {
        assert!(matches!(
            parse_csv("ts,mw\n".as_bytes(), SeriesKind::WindMw, &cols(), &utc()),
            Err(IngestError::Data(_))
        ));
        assert!(parse_csv("".as_bytes(), SeriesKind::WindMw, &cols(), &utc()).is_err());
    }

    #[test]
    fn missing_column_rejected() {
        let text = "time,mw\n2022-01-15T00:00:00Z,100\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()),
            Err(IngestError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn local_formats_convert_to_utc() {
        let ny = chrono_tz::America::New_York;
        let a = parse_timestamp("01/15/2022 00:05", &ny).unwrap();
        let b = parse_timestamp("2022-01-15 00:05:00", &ny).unwrap();
        let c = parse_timestamp("2022-01-15T05:05:00Z", &ny).unwrap();
        assert_eq!(a, c);
        assert_eq!(b, c);
        assert!(parse_timestamp("03/13/2022 02:30", &ny).is_err());
        // fall-back hour resolves to the first (EDT) occurrence
        let amb = parse_timestamp("11/06/2022 01:30", &ny).unwrap();
        assert_eq!(amb, parse_timestamp("2022-11-06T05:30:00Z", &ny).unwrap());
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let text = "ts,mw\n2022-01-15T00:05:00Z,2\n2022-01-15T00:00:00Z,1\n";
        let r = parse_csv(text.as_bytes(), SeriesKind::WindMw, &cols(), &utc()).unwrap();
        assert_eq!(r.points[0].value, Some(1.0));
    }

    #[test]
    fn fill_examples() {
        let p1 = GapPolicy { max_fill_run: 1 };
        assert_eq!(
            fill_gaps(&[Some(100.0), None, Some(120.0)], p1).unwrap(),
            vec![100.0, 110.0, 120.0]
        );
        assert_eq!(
            fill_gaps(&[None, Some(50.0), Some(60.0)], p1).unwrap(),
            vec![50.0, 50.0, 60.0]
        );
        assert_eq!(
            fill_gaps(&[Some(60.0), None], p1).unwrap(),
            vec![60.0, 60.0]
        );
        match fill_gaps(&[Some(100.0), None, None, Some(130.0)], p1).unwrap_err() {
            IngestError::Gap { index, length, .. } => assert_eq!((index, length), (1, 2)),
            e => panic!("{e}"),
        }
        assert_eq!(
            fill_gaps(
                &[Some(100.0), None, None, Some(130.0)],
                GapPolicy { max_fill_run: 2 }
            )
            .unwrap(),
            vec![100.0, 110.0, 120.0, 130.0]
        );
        assert!(fill_gaps(&[None, None], GapPolicy { max_fill_run: 5 }).is_err());
        assert_eq!(GapPolicy::default().max_fill_run, 3);
    }

    #[test]
    fn regularize_inserts_missing_rows() {
        let mut r = raw_every(5, &[1.0, 2.0, 3.0]);
        r.points.remove(1);
        assert_eq!(r.modal_step(), Some(Duration::minutes(10)));
        assert_eq!(r.regularize(Duration::minutes(5)), 1);
        assert_eq!(r.points.len(), 3);
        assert_eq!(r.points[1].value, None);
        let f = r.filled(GapPolicy::default()).unwrap();
        assert_eq!(f.points[1].value, Some(2.0));
    }

    #[test]
    fn filled_gap_error_names_span() {
        let mut r = raw_every(5, &[1.0; 10]);
        for p in &mut r.points[2..7] {
            p.value = None;
        }
        let msg = r.filled(GapPolicy::default()).unwrap_err().to_string();
        assert!(
            msg.contains("(2022-01-15T00:10:00Z .. 2022-01-15T00:30:00Z)"),
            "{msg}"
        );
        assert!(msg.contains("of 5 missing"), "{msg}");
    }

    #[test]
    fn resample_constant_five_minute() {
        let g = build_time_grid(day(), 4).unwrap();
        let raw = raw_every(5, &[100.0; 288]);
        let out = resample(&raw, &g, ResampleMethod::TimeWeightedMean).unwrap();
        assert_eq!(out.len(), 96);
        assert!(out.iter().all(|&v| v == 100.0));
    }

    #[test]
    fn resample_three_values_average() {
        let g = build_time_grid(day(), 4).unwrap();
        let mut v = vec![100.0; 288];
        v[..3].copy_from_slice(&[90.0, 100.0, 110.0]);
        let out = resample(&raw_every(5, &v), &g, ResampleMethod::TimeWeightedMean).unwrap();
        assert!((out[0] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn resample_hourly_last_is_identity() {
        let g = build_time_grid(day(), 1).unwrap();
        let v: Vec<f64> = (0..24).map(|h| 20.0 + h as f64 * 1.5).collect();
        assert_eq!(
            resample(&raw_every(60, &v), &g, ResampleMethod::Last).unwrap(),
            v
        );
        assert_eq!(
            resample(&raw_every(60, &v), &g, ResampleMethod::TimeWeightedMean).unwrap(),
            v
        );
        assert_eq!(
            resample(&raw_every(60, &v), &g, ResampleMethod::LinearToGrid).unwrap(),
            v
        );
    }

    #[test]
    fn resample_linear_midpoints() {
        let g = build_time_grid(day(), 2).unwrap();
        // a point at 24:00 is needed to cover the last half-hour interval start
        let v: Vec<f64> = (0..25).map(|h| 10.0 * h as f64).collect();
        let out = resample(&raw_every(60, &v), &g, ResampleMethod::LinearToGrid).unwrap();
        assert_eq!(out[1], 5.0);
        assert_eq!(out[47], 235.0);
        assert!(resample(&raw_every(60, &v[..24]), &g, ResampleMethod::LinearToGrid).is_err());
    }

    #[test]
    fn resample_coverage_errors() {
        let g = build_time_grid(day(), 4).unwrap();
        let short = raw_every(5, &[1.0; 200]);
        match resample(&short, &g, ResampleMethod::TimeWeightedMean).unwrap_err() {
            IngestError::Coverage { to, .. } => assert_eq!(to, g.interval_start(95)),
            e => panic!("{e}"),
        }
        let mut late = raw_every(5, &[1.0; 288]);
        late.points.remove(0);
        assert!(matches!(
            resample(&late, &g, ResampleMethod::Last),
            Err(IngestError::Coverage { .. })
        ));
    }

    #[test]
    fn resample_rejects_unfilled() {
        let g = build_time_grid(day(), 4).unwrap();
        let mut r = raw_every(5, &[1.0; 288]);
        r.points[40].value = None;
        assert!(matches!(
            resample(&r, &g, ResampleMethod::TimeWeightedMean),
            Err(IngestError::Data(_))
        ));
    }

    fn sample_series() -> MarketSeries {
        let g = build_time_grid(day(), 4).unwrap();
        let wind = WindActualSeries(
            (0..96)
                .map(|i| 300.0 + (i as f64 * 0.37).sin() * 120.0)
                .collect(),
        );
        let forecast = mean_daily_forecast(&wind, &g).unwrap();
        align_horizon(
            DamPriceSeries((0..24).map(|h| 30.0 + h as f64 * 2.13).collect()),
            RtmPriceSeries(
                (0..96)
                    .map(|i| if i == 7 { -5.0 } else { 25.0 + i as f64 / 3.0 })
                    .collect(),
            ),
            wind,
            forecast,
            g,
        )
        .unwrap()
    }

    #[test]
    fn canonical_round_trip() {
        let s = sample_series();
        let mut buf = Vec::new();
        write_canonical(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("interval_start_utc,dam_price,rtm_price,wind_mw,forecast_mw\n"));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("2022-01-15T00:00:00Z,30,25,300,"));
        assert_eq!(text.lines().count(), 97);
        let back = read_canonical(buf.as_slice()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.rtm.0[7], -5.0);
    }

    #[test]
    fn canonical_rejects_empty_forecast() {
        let mut s = sample_series();
        s.forecast = WindForecast(vec![]);
        assert!(matches!(
            write_canonical(&s, Vec::new()),
            Err(IngestError::Market(_))
        ));
    }

    #[test]
    fn canonical_keeps_local_day_label() {
        let ny = chrono_tz::America::New_York;
        let g = TimeGrid::for_local_day(day(), 4, &ny).unwrap();
        let mut s = sample_series();
        s.grid = g;
        let mut buf = Vec::new();
        write_canonical(&s, &mut buf).unwrap();
        let back = read_canonical(buf.as_slice()).unwrap();
        assert_eq!(back.grid.day(), day());
        assert_eq!(back, s);
    }

    #[test]
    fn canonical_rejects_inconsistent_hour() {
        let s = sample_series();
        let mut buf = Vec::new();
        write_canonical(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replacen(
            ",30,25.333333333333332,",
            ",31,25.333333333333332,",
            1,
        );
        assert!(matches!(
            read_canonical(text.as_bytes()),
            Err(IngestError::Data(_))
        ));
    }

    #[test]
    fn assemble_from_raw() {
        let g = build_time_grid(day(), 4).unwrap();
        let dam = raw_every(60, &[50.0; 24]);
        let rtm = raw_every(
            5,
            &(0..288).map(|i| (i % 3) as f64 * 10.0).collect::<Vec<_>>(),
        );
        let wind = raw_every(5, &[200.0; 288]);
        let s = assemble_day(&dam, &rtm, &wind, &g, AssemblyMethods::default()).unwrap();
        assert!(s.rtm.values().iter().all(|&p| (p - 10.0).abs() < 1e-12));
        assert_eq!(s.forecast.0, vec![200.0; 24]);
        assert_eq!(s.dam.0, vec![50.0; 24]);
    }
}
