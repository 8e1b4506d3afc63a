//! Model scores and leaderboard ranking.
//!
//! The proposed score converts every auxiliary metric into base-metric units
//! through its trade-off curve and sums the importance-weighted differentials
//!
//! ```text
//! delta_i = (1 - w_i) * base - w_i * EV_i(aux_i)
//! s_p     = sum_i delta_i
//! ```
//!
//! The legacy score min-max normalizes each metric between a baseline and a
//! best reference, takes a weighted mean, and zeroes models whose base metric
//! falls below a threshold.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::domain::{check_weight, Direction, LegacyConfig, MetricRegistry, MetricVector, ModelRecord, WeightConfig};
use crate::error::{Error, Result};
use crate::tradeoff::TradeoffCurve;

/// Slope implied by the legacy normalization for hit rate against
/// user-activity MRED on the 2022 challenge submissions.
pub const REFERENCE_LEGACY_SLOPE: f64 = 44.399;

/// Slope of the front regression for the same metric pair and data.
pub const REFERENCE_FITTED_SLOPE: f64 = -7.944;

/// Scores closer than this (relative to their magnitude, floor 1) share a
/// rank. Matches the parity tolerance for full-precision inputs.
pub const RANK_TIE_TOLERANCE: f64 = 1e-9;

/// One leaderboard row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub model_id: String,
    /// Differential per auxiliary metric, in base-metric units.
    pub deltas: BTreeMap<String, f64>,
    pub s_p: f64,
    /// Legacy score; `None` when no legacy configuration was supplied.
    pub s_o: Option<f64>,
    pub rank_p: usize,
    pub rank_o: Option<usize>,
    pub thresholded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposedScore {
    pub deltas: BTreeMap<String, f64>,
    pub s_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegacyScore {
    pub value: f64,
    pub thresholded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegacyReport {
    pub model_id: String,
    pub s_o: f64,
    pub rank_o: usize,
    pub thresholded: bool,
}

/// `(m - m_base) / (m_best - m_base)`, unclipped.
///
/// Evaluated exactly on the shortest decimal form of each input and rounded
/// once, so decimal fixtures such as `(0.5, 0.2, 0.8)` give exactly `0.5`.
/// Inputs whose exponents cannot be aligned in 128 bits use plain `f64`.
pub fn normalize_legacy(m: f64, m_base: f64, m_best: f64) -> Result<f64> {
    if !(m.is_finite() && m_base.is_finite() && m_best.is_finite()) {
        return Err(Error::NonFiniteInput("legacy normalization"));
    }
    if m_best == m_base {
        return Err(Error::ZeroDenominator("best reference equals baseline"));
    }
    Ok(crate::decimal::ratio_of_differences(m, m_base, m_best).unwrap_or_else(|| (m - m_base) / (m_best - m_base)))
}

/// Legacy weighted-mean score of a raw (not canonicalized) vector.
///
/// The base-metric threshold compares raw values: a maximized base must reach
/// at least the threshold, a minimized base must not exceed it.
pub fn score_legacy(v: &MetricVector, cfg: &LegacyConfig, registry: &MetricRegistry) -> Result<LegacyScore> {
    let base = registry.base();
    let base_value = v.value(&base.id)?;
    let below = match base.direction {
        Direction::Maximize => base_value < cfg.base_threshold,
        Direction::Minimize => base_value > cfg.base_threshold,
    };
    if below {
        return Ok(LegacyScore {
            value: 0.0,
            thresholded: true,
        });
    }
    let mut total = 0.0;
    for (id, &k) in &cfg.category_weights {
        let m = v.value(id)?;
        let normalized = normalize_legacy(m, cfg.baseline_ref.value(id)?, cfg.best_ref.value(id)?)
            .map_err(|_| Error::DegenerateNormalization(id.clone()))?;
        total += k * normalized;
    }
    Ok(LegacyScore {
        value: total,
        thresholded: false,
    })
}

/// `(1 - w) * base - w * EV(aux)` for canonical values.
pub fn delta(base_value: f64, aux_value: f64, curve: &TradeoffCurve, w: f64) -> Result<f64> {
    check_weight(&curve.aux_id, w)?;
    if !base_value.is_finite() {
        return Err(Error::NonFiniteInput("base value"));
    }
    let expected = curve.ev(aux_value)?.value;
    Ok((1.0 - w) * base_value - w * expected)
}

/// Proposed score of a canonical vector: one differential per weighted
/// auxiliary metric, summed in metric-id order.
pub fn score_proposed(
    v: &MetricVector,
    curves: &BTreeMap<String, TradeoffCurve>,
    weights: &WeightConfig,
) -> Result<ProposedScore> {
    let base_value = v.value(&weights.base_id)?;
    let mut deltas = BTreeMap::new();
    for (id, &w) in &weights.weights {
        let curve = curves.get(id).ok_or_else(|| Error::MissingCurve(id.clone()))?;
        let aux_value = v.value(id)?;
        deltas.insert(id.clone(), delta(base_value, aux_value, curve, w)?);
    }
    let s_p = deltas.values().sum();
    Ok(ProposedScore { deltas, s_p })
}

fn tied(a: f64, b: f64, tolerance: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tolerance * scale
}

/// Dense ranks (1 = best) for descending scores. Each tie group is anchored
/// at its highest score.
pub fn dense_ranks(scores: &[f64]) -> Vec<usize> {
    dense_ranks_within(scores, RANK_TIE_TOLERANCE)
}

/// [`dense_ranks`] with a caller-chosen relative tie tolerance, for scores
/// computed from inputs coarser than `f64`.
pub fn dense_ranks_within(scores: &[f64], tolerance: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    let mut ranks = alloc::vec![0; scores.len()];
    let mut rank = 0;
    let mut anchor = f64::NAN;
    for i in order {
        if rank == 0 || !tied(anchor, scores[i], tolerance) {
            rank += 1;
            anchor = scores[i];
        }
        ranks[i] = rank;
    }
    ranks
}

fn check_complete(record: &ModelRecord, registry: &MetricRegistry) -> Result<()> {
    for spec in registry.specs() {
        if record.aggregate.get(&spec.id).is_none() {
            return Err(Error::MissingMetric(alloc::format!(
                "{} (model `{}`)",
                spec.id,
                record.model_id
            )));
        }
    }
    Ok(())
}

/// Scores and ranks every record.
///
/// Rows are ordered by `rank_p`, ties by model id. `s_o`/`rank_o` are filled
/// only when a legacy configuration is given.
pub fn rank_models(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    curves: &BTreeMap<String, TradeoffCurve>,
    weights: &WeightConfig,
    legacy: Option<&LegacyConfig>,
) -> Result<Vec<ScoreReport>> {
    rank_models_within(records, registry, curves, weights, legacy, RANK_TIE_TOLERANCE)
}

/// [`rank_models`] with ties decided by [`dense_ranks_within`].
pub fn rank_models_within(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    curves: &BTreeMap<String, TradeoffCurve>,
    weights: &WeightConfig,
    legacy: Option<&LegacyConfig>,
    tie_tolerance: f64,
) -> Result<Vec<ScoreReport>> {
    weights.validate(registry)?;
    for aux in registry.auxiliary() {
        weights.weight(&aux.id)?;
    }
    if let Some(cfg) = legacy {
        cfg.validate(registry)?;
    }
    let mut reports = Vec::with_capacity(records.len());
    for record in records {
        check_complete(record, registry)?;
        let canonical = crate::domain::canonicalize(&record.aggregate, registry)?;
        let proposed = score_proposed(&canonical, curves, weights)?;
        let legacy_score = legacy
            .map(|cfg| score_legacy(&record.aggregate, cfg, registry))
            .transpose()?;
        reports.push(ScoreReport {
            model_id: record.model_id.clone(),
            deltas: proposed.deltas,
            s_p: proposed.s_p,
            s_o: legacy_score.map(|s| s.value),
            rank_p: 0,
            rank_o: None,
            thresholded: legacy_score.is_some_and(|s| s.thresholded),
        });
    }
    let sp: Vec<f64> = reports.iter().map(|r| r.s_p).collect();
    for (r, rank) in reports.iter_mut().zip(dense_ranks_within(&sp, tie_tolerance)) {
        r.rank_p = rank;
    }
    if legacy.is_some() {
        let so: Vec<f64> = reports.iter().map(|r| r.s_o.unwrap_or(0.0)).collect();
        for (r, rank) in reports.iter_mut().zip(dense_ranks_within(&so, tie_tolerance)) {
            r.rank_o = Some(rank);
        }
    }
    reports.sort_by(|a, b| a.rank_p.cmp(&b.rank_p).then_with(|| a.model_id.cmp(&b.model_id)));
    Ok(reports)
}

/// Legacy-only leaderboard, ordered by `rank_o` then model id.
pub fn rank_legacy(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    legacy: &LegacyConfig,
) -> Result<Vec<LegacyReport>> {
    rank_legacy_within(records, registry, legacy, RANK_TIE_TOLERANCE)
}

/// [`rank_legacy`] with ties decided by [`dense_ranks_within`].
pub fn rank_legacy_within(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    legacy: &LegacyConfig,
    tie_tolerance: f64,
) -> Result<Vec<LegacyReport>> {
    legacy.validate(registry)?;
    let mut rows = Vec::with_capacity(records.len());
    for record in records {
        check_complete(record, registry)?;
        let s = score_legacy(&record.aggregate, legacy, registry)?;
        rows.push(LegacyReport {
            model_id: record.model_id.clone(),
            s_o: s.value,
            rank_o: 0,
            thresholded: s.thresholded,
        });
    }
    let so: Vec<f64> = rows.iter().map(|r| r.s_o).collect();
    for (r, rank) in rows.iter_mut().zip(dense_ranks_within(&so, tie_tolerance)) {
        r.rank_o = rank;
    }
    rows.sort_by(|a, b| a.rank_o.cmp(&b.rank_o).then_with(|| a.model_id.cmp(&b.model_id)));
    Ok(rows)
}

/// Slope the legacy normalization implicitly assigns to the front, from the
/// best `(h1, mr1)` and baseline `(h2, mr2)` reference points.
pub fn implied_legacy_slope(h1: f64, h2: f64, mr1: f64, mr2: f64) -> Result<f64> {
    if mr1 == mr2 {
        return Err(Error::ZeroDenominator("reference aux values are equal"));
    }
    Ok((h1 - h2) / (mr1 - mr2))
}

/// Effective `w / (1 - w)` the legacy weighted mean gives the auxiliary
/// metric, measured against the fitted slope: `-k_ratio * c1_legacy / c1_fitted`,
/// where `k_ratio` is the aux-to-base legacy weight ratio.
pub fn implied_importance_ratio(c1_legacy: f64, c1_fitted: f64, k_ratio: f64) -> Result<f64> {
    if c1_fitted == 0.0 {
        return Err(Error::ZeroDenominator("fitted slope is zero"));
    }
    if !(k_ratio > 0.0 && k_ratio.is_finite()) {
        return Err(Error::InvalidConfig("k_ratio must be positive".to_string()));
    }
    Ok(-k_ratio * c1_legacy / c1_fitted)
}
