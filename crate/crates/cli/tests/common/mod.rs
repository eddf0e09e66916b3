#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use chrono::NaiveDate;
use windbid::ingest::write_canonical_file;
use windbid::market_model::{
    align_horizon, build_time_grid, DamPriceSeries, RtmPriceSeries, WindActualSeries, WindForecast,
};
use windbid::MarketSeries;

pub fn windbid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_windbid"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

/// Day with flat prices, per-interval wind and a fixed hourly forecast.
pub fn flat_day(
    day: NaiveDate,
    dam: f64,
    rtm: f64,
    wind: impl Fn(usize) -> f64,
    forecast: f64,
) -> MarketSeries {
    let grid = build_time_grid(day, 4).unwrap();
    let n = grid.interval_count();
    align_horizon(
        DamPriceSeries(vec![dam; 24]),
        RtmPriceSeries(vec![rtm; n]),
        WindActualSeries((0..n).map(wind).collect()),
        WindForecast(vec![forecast; 24]),
        grid,
    )
    .unwrap()
}

pub fn write_days(dir: &Path, days: &[MarketSeries]) {
    std::fs::create_dir_all(dir).unwrap();
    for d in days {
        write_canonical_file(d, &dir.join(format!("{}.csv", d.grid.day()))).unwrap();
    }
}

pub fn synth(dir: &Path, start: &str, count: usize, seed: u64) {
    let out = windbid(&[
        "synth",
        "--out-dir",
        dir.to_str().unwrap(),
        "--start",
        start,
        "--count",
        &count.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

/// Parses `day,scenario,mode,metric,value` rows of `simulate`.
pub fn simulate_rows(csv: &str) -> Vec<(String, String, String, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].into(), f[1].into(), f[3].into(), f[4].parse().unwrap())
        })
        .collect()
}
