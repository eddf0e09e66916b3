//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono_tz::Tz;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer};
use windbid::ingest::GapPolicy;
use windbid::monitor::GradeThresholds;
use windbid::reserve::{
    DeviationBaseline, Pooling, ReserveConfig, DEFAULT_ALPHA, DEFAULT_WINDOW_DAYS,
};
use windbid::{Scenario, DEFAULT_TIE_TOLERANCE};

use crate::error::{CliError, CliResult};

pub const DEFAULT_INTERVALS_PER_HOUR: u32 = 4;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TIMEZONE: &str = "America/New_York";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSel {
    One(Scenario),
    All,
}

impl ScenarioSel {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            ScenarioSel::One(s) => vec![s],
            ScenarioSel::All => Scenario::ALL.to_vec(),
        }
    }
}

impl FromStr for ScenarioSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "s1" => Ok(ScenarioSel::One(Scenario::S1)),
            "2" | "s2" => Ok(ScenarioSel::One(Scenario::S2)),
            "3" | "s3" => Ok(ScenarioSel::One(Scenario::S3)),
            "all" => Ok(ScenarioSel::All),
            other => Err(format!(
                "invalid scenario {other:?}, expected 1, 2, 3 or all"
            )),
        }
    }
}

impl<'de> Deserialize<'de> for ScenarioSel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineArg {
    Commitment,
    Forecast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolingArg {
    HourOfDay,
    WholeWindow,
}

/// Flags shared by every subcommand. Each is optional so that a config
/// file can fill what the command line leaves out.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Real-time intervals per hour (1..=60)
    #[arg(long, global = true)]
    pub intervals_per_hour: Option<u32>,
    /// Scenario selection: 1, 2, 3 or all
    #[arg(long, global = true)]
    pub scenario: Option<ScenarioSel>,
    /// Reserve quantile level in (0, 1)
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Days of history used to size reserve
    #[arg(long, global = true)]
    pub window_days: Option<usize>,
    /// Reserve price, currency per MW per hour
    #[arg(long, global = true)]
    pub reserve_price: Option<f64>,
    /// Constant added to every hourly reserve requirement, MW
    #[arg(long, global = true)]
    pub reserve_floor_mw: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub deviation_baseline: Option<BaselineArg>,
    #[arg(long, global = true, value_enum)]
    pub pooling: Option<PoolingArg>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Seed for synthetic data
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// IANA time zone of raw timestamps without an offset
    #[arg(long, global = true)]
    pub timezone: Option<String>,
    /// Longest run of missing raw points that is interpolated
    #[arg(long, global = true)]
    pub max_fill_run: Option<usize>,
    /// Profit band within which a bid is reported as indifferent
    #[arg(long, global = true)]
    pub tie_tolerance: Option<f64>,
    /// Adherence needed for grade A
    #[arg(long, global = true)]
    pub grade_a: Option<f64>,
    /// Adherence needed for grade B
    #[arg(long, global = true)]
    pub grade_b: Option<f64>,
    /// Installed capacity for capacity factors, MW
    #[arg(long, global = true)]
    pub installed_mw: Option<f64>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),* $(,)?) => {
        Settings { $($f: $top.$f.or($base.$f),)* }
    };
}

impl Settings {
    /// Fields of `self` win; `base` fills the rest.
    pub fn over(self, base: Settings) -> Settings {
        overlay!(
            self,
            base,
            intervals_per_hour,
            scenario,
            alpha,
            window_days,
            reserve_price,
            reserve_floor_mw,
            deviation_baseline,
            pooling,
            format,
            output,
            seed,
            timezone,
            max_fill_run,
            tie_tolerance,
            grade_a,
            grade_b,
            installed_mw,
        )
    }

    pub fn from_file(path: &Path) -> CliResult<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved and range-checked configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub intervals_per_hour: u32,
    /// Set when the interval count came from a flag or the config file,
    /// in which case loaded days must agree with it.
    pub intervals_explicit: bool,
    pub scenario: Option<ScenarioSel>,
    pub window_days: usize,
    pub reserve: ReserveConfig,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub timezone: Tz,
    pub gap_policy: GapPolicy,
    pub tie_tolerance: f64,
    pub thresholds: GradeThresholds,
    pub installed_mw: Option<f64>,
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

impl RunConfig {
    pub fn resolve(s: Settings) -> CliResult<RunConfig> {
        let intervals_per_hour = s.intervals_per_hour.unwrap_or(DEFAULT_INTERVALS_PER_HOUR);
        check((1..=60).contains(&intervals_per_hour), || {
            format!("--intervals-per-hour must be in 1..=60, got {intervals_per_hour}")
        })?;
        let alpha = s.alpha.unwrap_or(DEFAULT_ALPHA);
        check(alpha > 0.0 && alpha < 1.0, || {
            format!("--alpha must be in (0, 1), got {alpha}")
        })?;
        let window_days = s.window_days.unwrap_or(DEFAULT_WINDOW_DAYS);
        check(window_days >= 1, || {
            "--window-days must be at least 1".into()
        })?;
        let reserve_price = s.reserve_price.unwrap_or(0.0);
        check(reserve_price >= 0.0 && reserve_price.is_finite(), || {
            format!("--reserve-price must be non-negative, got {reserve_price}")
        })?;
        let floor_mw = s.reserve_floor_mw.unwrap_or(0.0);
        check(floor_mw >= 0.0 && floor_mw.is_finite(), || {
            format!("--reserve-floor-mw must be non-negative, got {floor_mw}")
        })?;
        let tie_tolerance = s.tie_tolerance.unwrap_or(DEFAULT_TIE_TOLERANCE);
        check(tie_tolerance >= 0.0 && tie_tolerance.is_finite(), || {
            format!("--tie-tolerance must be non-negative, got {tie_tolerance}")
        })?;
        let defaults = GradeThresholds::default();
        let thresholds = GradeThresholds {
            a: s.grade_a.unwrap_or(defaults.a),
            b: s.grade_b.unwrap_or(defaults.b),
        };
        thresholds.validate().map_err(CliError::usage)?;
        if let Some(mw) = s.installed_mw {
            check(mw > 0.0 && mw.is_finite(), || {
                format!("--installed-mw must be positive, got {mw}")
            })?;
        }
        let tz_name = s.timezone.as_deref().unwrap_or(DEFAULT_TIMEZONE);
        let timezone: Tz = tz_name
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown time zone {tz_name:?}")))?;

        let baseline = match s.deviation_baseline.unwrap_or(BaselineArg::Commitment) {
            BaselineArg::Commitment => DeviationBaseline::Commitment,
            BaselineArg::Forecast => DeviationBaseline::Forecast,
        };
        let pooling = match s.pooling.unwrap_or(PoolingArg::HourOfDay) {
            PoolingArg::HourOfDay => Pooling::HourOfDay,
            PoolingArg::WholeWindow => Pooling::WholeWindow,
        };
        Ok(RunConfig {
            intervals_per_hour,
            intervals_explicit: s.intervals_per_hour.is_some(),
            scenario: s.scenario,
            window_days,
            reserve: ReserveConfig {
                alpha,
                pooling,
                floor_mw,
                reserve_price,
                baseline,
                tie_tolerance,
            },
            format: s.format,
            output: s.output,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            timezone,
            gap_policy: GapPolicy {
                max_fill_run: s.max_fill_run.unwrap_or(GapPolicy::default().max_fill_run),
            },
            tie_tolerance,
            thresholds,
            installed_mw: s.installed_mw,
        })
    }

    pub fn scenarios(&self) -> Vec<Scenario> {
        self.scenario.unwrap_or(ScenarioSel::All).scenarios()
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file: Settings =
            toml::from_str("alpha = 0.9\nwindow-days = 10\nscenario = 3\n").unwrap();
        let flags = Settings {
            alpha: Some(0.5),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(flags.over(file)).unwrap();
        assert_eq!(cfg.reserve.alpha, 0.5);
        assert_eq!(cfg.window_days, 10);
        assert_eq!(cfg.scenarios(), vec![Scenario::S3]);
        assert_eq!(cfg.intervals_per_hour, 4);
        assert!(!cfg.intervals_explicit);
    }

    #[test]
    fn unknown_key_and_bad_ranges_are_usage_errors() {
        assert!(toml::from_str::<Settings>("alhpa = 0.9\n").is_err());
        for s in [
            Settings {
                alpha: Some(1.0),
                ..Default::default()
            },
            Settings {
                intervals_per_hour: Some(0),
                ..Default::default()
            },
            Settings {
                reserve_price: Some(-1.0),
                ..Default::default()
            },
            Settings {
                grade_a: Some(0.5),
                grade_b: Some(0.6),
                ..Default::default()
            },
            Settings {
                timezone: Some("Mars/Olympus".into()),
                ..Default::default()
            },
        ] {
            assert_eq!(RunConfig::resolve(s).unwrap_err().exit_code(), 1);
        }
    }

    #[test]
    fn scenario_spellings() {
        assert_eq!("all".parse::<ScenarioSel>().unwrap(), ScenarioSel::All);
        assert_eq!(
            "S2".parse::<ScenarioSel>().unwrap(),
            ScenarioSel::One(Scenario::S2)
        );
        assert!("4".parse::<ScenarioSel>().is_err());
        let s: Settings = toml::from_str("scenario = \"all\"\n").unwrap();
        assert_eq!(s.scenario, Some(ScenarioSel::All));
    }
}
