//! Wind producer participation in a sequential day-ahead / real-time
//! electricity market.
//!
//! - [`market_model`]: settlement horizon and aligned price/wind series
//! - [`ingest`]: ISO-style CSV parsing, resampling, gap filling, canonical files
//! - [`settlement`]: per-scenario two-settlement profit
//! - [`bid_optimizer`]: optimal day-ahead quantity, closed form and grid search
//! - [`reserve`]: schedule deviations, quantile reserve sizing, break-even
//! - [`monitor`]: schedule adherence indices, grades, capacity factors
//! - [`synth`]: seeded synthetic market days

pub mod bid_optimizer;
pub mod ingest;
pub mod market_model;
pub mod monitor;
pub mod reserve;
pub mod settlement;
pub mod synth;

pub use bid_optimizer::{BidDecision, Regime, DEFAULT_TIE_TOLERANCE};
pub use market_model::{MarketError, MarketSeries, TimeGrid};
pub use settlement::{
    compare_scenarios, settle_day, DayComparison, DaySettlement, DayStrategy, HourSettlement,
    Scenario, SettlementError,
};
