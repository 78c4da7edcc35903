//! Price response functions for spot FX tick data.
//!
//! The pipeline reads vendor quote files, keeps the Sunday 19:10 to Friday
//! 16:50 New York trading window, turns each week into a trade-time and a
//! one-second physical-time series, infers trade signs from midpoint moves
//! and estimates the average signed return `R(tau)` at lags `1..=tau_max`.
//! Pairs can then be grouped by their average pip spread.
//!
//! | module | purpose |
//! |---|---|
//! | [`ingest`] | line parsing, market weeks, streaming file scans |
//! | [`timescales`] | trade events and previous-tick sampled seconds |
//! | [`signs`] | trade-scale and per-second signs |
//! | [`response`] | the estimator, pip spreads, group averages |
//! | [`pairmeta`] | the pair registry, pip sizes, spread thresholds |
//! | [`synth`] | synthetic flow and a brute-force reference estimator |
//! | [`pipeline`] | week and pair-year orchestration |
//! | [`cli`] | batch commands behind the `fxresp` binary |
//!
//! ## Examples
//!
//! - **`parse_ticks`** - parse lines, scan a file, read ingest counters
//! - **`market_week`** - window bounds across daylight-saving changes
//! - **`sign_classification`** - trade signs and per-second net signs
//! - **`trade_response`** - trade-scale curve against a closed form
//! - **`physical_response`** - physical scale, zeros excluded vs included
//! - **`spread_groups`** - pip sizes and spread-group assignment
//! - **`synthetic_flow`** - transient impact, fast vs brute-force estimates
//!
//! ```bash
//! cargo run --example parse_ticks
//! cargo run --release --example synthetic_flow
//! ```

pub mod cli;
pub mod ingest;
pub mod pairmeta;
pub mod pipeline;
pub mod response;
pub mod signs;
mod sum;
pub mod synth;
pub mod timescales;

pub use sum::NeumaierSum;
