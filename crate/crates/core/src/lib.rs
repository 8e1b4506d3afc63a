//! Multi-objective model scoring built on learned Pareto trade-off curves.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//!
//! - [`domain`]: metric registry, metric vectors, per-model fold records.
//! - [`pareto`]: dominance and non-dominated set extraction.
//! - [`tradeoff`]: least-squares trade-off curves fitted on the Pareto front.
//! - [`scoring`]: the trade-off differential score, the legacy min-max score,
//!   and leaderboard ranking.
//! - [`rsmetrics`]: recommendation metrics (hit rate, MRR, MRED, diversity, ...).
//! - [`bncv`]: seeded bootstrapped cross-validation of recommenders.
//! - [`synth`]: synthetic populations around a known front and back-testing.
//!
//! File formats and the command line live in the `paretoscore` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bncv;
mod decimal;
pub mod domain;
mod error;
pub mod pareto;
pub mod rsmetrics;
pub mod scoring;
pub mod synth;
pub mod tradeoff;

pub use domain::{
    aggregate_folds, canonicalize, Direction, LegacyConfig, MetricRegistry, MetricSpec, MetricVector, ModelRecord,
    WeightConfig,
};
pub use error::{Error, Result};
pub use pareto::{dominates, pareto_front, pareto_front_2d, FrontResult};
pub use scoring::ScoreReport;
pub use tradeoff::{fit_tradeoff, update_tradeoff, CurveFamily, TradeoffCurve};
