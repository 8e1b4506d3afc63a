//! File formats, configuration and the `paretoscore` command line on top of
//! [`paretoscore_core`].
//!
//! Formats:
//! - metric table CSV ([`table`]),
//! - interaction log and item embeddings CSV ([`interactions`], [`embeddings`]),
//! - RunConfig JSON ([`config`]),
//! - front, curve and leaderboard JSON ([`report`]),
//! - back-test CSV ([`backtest`]).

pub mod backtest;
pub mod cli;
pub mod config;
pub mod embeddings;
mod error;
pub mod interactions;
pub mod output;
pub mod real;
pub mod report;
pub mod table;

pub use error::{Error, Result};
