//! JSON documents written by the commands: front report, fitted curves and
//! the leaderboard. Keys keep a fixed order and reals carry 9 significant
//! digits, so identical inputs give byte-identical documents.

use std::collections::BTreeMap;

use paretoscore_core::scoring::LegacyReport;
use paretoscore_core::{
    CurveFamily, FrontResult, MetricRegistry, ModelRecord, ScoreReport, TradeoffCurve, WeightConfig,
};
use serde::{Deserialize, Serialize};

use crate::config::{registry_entries, MetricEntry, WeightsEntry};
use crate::error::{Error, Result};
use crate::real::round_sig;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyEntry {
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub base_id: String,
    pub aux_id: String,
    pub family: FamilyEntry,
    pub slope: f64,
    pub intercept: f64,
    pub n_front_points: usize,
    pub r_squared: f64,
    pub aux_min: f64,
    pub aux_max: f64,
}

impl From<&TradeoffCurve> for CurveEntry {
    fn from(c: &TradeoffCurve) -> Self {
        Self {
            base_id: c.base_id.clone(),
            aux_id: c.aux_id.clone(),
            family: match c.family {
                CurveFamily::Linear => FamilyEntry::Linear,
            },
            slope: round_sig(c.slope),
            intercept: round_sig(c.intercept),
            n_front_points: c.n_front_points,
            r_squared: round_sig(c.r_squared),
            aux_min: round_sig(c.aux_min),
            aux_max: round_sig(c.aux_max),
        }
    }
}

impl From<&CurveEntry> for TradeoffCurve {
    fn from(c: &CurveEntry) -> Self {
        Self {
            base_id: c.base_id.clone(),
            aux_id: c.aux_id.clone(),
            slope: c.slope,
            intercept: c.intercept,
            n_front_points: c.n_front_points,
            r_squared: c.r_squared,
            family: match c.family {
                FamilyEntry::Linear => CurveFamily::Linear,
            },
            aux_min: c.aux_min,
            aux_max: c.aux_max,
        }
    }
}

fn curve_entries(curves: &BTreeMap<String, TradeoffCurve>) -> BTreeMap<String, CurveEntry> {
    curves.iter().map(|(id, c)| (id.clone(), c.into())).collect()
}

fn to_json<T: Serialize>(doc: &T, what: &str) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Error::json(what, e))?;
    text.push('\n');
    Ok(text)
}

/// Output of `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub toolkit_version: String,
    pub registry: Vec<MetricEntry>,
    pub curves: BTreeMap<String, CurveEntry>,
}

pub fn emit_curves(registry: &MetricRegistry, curves: &BTreeMap<String, TradeoffCurve>) -> Result<String> {
    to_json(
        &CurveDocument {
            toolkit_version: TOOLKIT_VERSION.into(),
            registry: registry_entries(registry),
            curves: curve_entries(curves),
        },
        "curve document",
    )
}

/// Reads the curves of a `fit` document, checking they share `base_id`.
pub fn parse_curves(text: &str, base_id: &str) -> Result<BTreeMap<String, TradeoffCurve>> {
    let doc: CurveDocument = serde_json::from_str(text).map_err(|e| Error::json("curve document", e))?;
    doc.curves
        .iter()
        .map(|(id, c)| {
            if c.base_id != base_id || &c.aux_id != id {
                return Err(Error::Format(format!(
                    "curve `{id}` is fitted for ({}, {}), expected base `{base_id}`",
                    c.base_id, c.aux_id
                )));
            }
            Ok((id.clone(), c.into()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct DominatedEntry {
    model_id: String,
    dominated_by: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct FrontDocument {
    toolkit_version: String,
    registry: Vec<MetricEntry>,
    n_models: usize,
    front: Vec<String>,
    dominated: Vec<DominatedEntry>,
}

/// Output of `pareto`: front members and, for the rest, one dominating model.
pub fn emit_front(records: &[ModelRecord], registry: &MetricRegistry, front: &FrontResult) -> Result<String> {
    to_json(
        &FrontDocument {
            toolkit_version: TOOLKIT_VERSION.into(),
            registry: registry_entries(registry),
            n_models: records.len(),
            front: front
                .front_indices
                .iter()
                .map(|&i| records[i].model_id.clone())
                .collect(),
            dominated: front
                .dominated_by
                .iter()
                .map(|(&loser, &winner)| DominatedEntry {
                    model_id: records[loser].model_id.clone(),
                    dominated_by: records[winner].model_id.clone(),
                })
                .collect(),
        },
        "front report",
    )
}

/// Which scores a leaderboard carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Legacy,
    Both,
}

/// One leaderboard row. Scores a method does not compute are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardRow {
    pub model_id: String,
    pub rank_p: Option<usize>,
    pub s_p: Option<f64>,
    pub deltas: Option<BTreeMap<String, f64>>,
    pub rank_o: Option<usize>,
    pub s_o: Option<f64>,
    pub thresholded: Option<bool>,
}

impl From<&ScoreReport> for LeaderboardRow {
    fn from(r: &ScoreReport) -> Self {
        Self {
            model_id: r.model_id.clone(),
            rank_p: Some(r.rank_p),
            s_p: Some(round_sig(r.s_p)),
            deltas: Some(r.deltas.iter().map(|(k, &v)| (k.clone(), round_sig(v))).collect()),
            rank_o: r.rank_o,
            s_o: r.s_o.map(round_sig),
            thresholded: r.s_o.map(|_| r.thresholded),
        }
    }
}

impl From<&LegacyReport> for LeaderboardRow {
    fn from(r: &LegacyReport) -> Self {
        Self {
            model_id: r.model_id.clone(),
            rank_p: None,
            s_p: None,
            deltas: None,
            rank_o: Some(r.rank_o),
            s_o: Some(round_sig(r.s_o)),
            thresholded: Some(r.thresholded),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct LeaderboardDocument<'a> {
    toolkit_version: &'a str,
    method: Method,
    registry: Vec<MetricEntry>,
    weights: WeightsEntry,
    curves: BTreeMap<String, CurveEntry>,
    rows: &'a [LeaderboardRow],
}

/// The leaderboard document; `rows` are written in the given order.
pub fn emit_leaderboard(
    method: Method,
    registry: &MetricRegistry,
    weights: &WeightConfig,
    curves: &BTreeMap<String, TradeoffCurve>,
    rows: &[LeaderboardRow],
) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Format("leaderboard has no rows".into()));
    }
    to_json(
        &LeaderboardDocument {
            toolkit_version: TOOLKIT_VERSION,
            method,
            registry: registry_entries(registry),
            weights: WeightsEntry {
                base_id: weights.base_id.clone(),
                weights: weights.weights.clone(),
            },
            curves: curve_entries(curves),
            rows,
        },
        "leaderboard",
    )
}
