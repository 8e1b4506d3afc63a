//! Synthetic data with known ground truth, and the score back-test.
//!
//! [`generate_population`] places models on a known linear front
//! `base = slope * aux + intercept` or strictly below it, which makes the front
//! (and therefore the fitted curve) recoverable exactly. [`backtest`] compares
//! the proposed and legacy scores across uniform importance weights.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bncv::{Event, InteractionDataset};
use crate::domain::{LegacyConfig, MetricRegistry, MetricVector, ModelRecord, WeightConfig};
use crate::error::{Error, Result};
use crate::pareto::dominates_row;
use crate::rsmetrics::ItemEmbeddings;
use crate::scoring::rank_models_within;
use crate::tradeoff::{fit_curves, CurveFamily, TradeoffCurve};

/// Weight settings explored by default in the back-test.
pub const DEFAULT_WEIGHT_GRID: [f64; 4] = [0.3, 0.4, 0.5, 0.55];

/// Every `ON_FRONT_STRIDE`-th model is placed exactly on the front.
const ON_FRONT_STRIDE: usize = 5;

/// Redraws of a noisy model's aux value before it is pinned under a front model.
const MAX_REDRAWS: usize = 64;

/// Column spread (relative, floor 1) below which a score column is treated
/// as constant.
pub const DEGENERATE_SPREAD: f64 = crate::scoring::RANK_TIE_TOLERANCE;

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub base_id: String,
    pub aux_id: String,
    pub true_slope: f64,
    pub true_intercept: f64,
    pub n_models: usize,
    pub aux_range: (f64, f64),
    /// Largest downward displacement below the front, in base units.
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        Self {
            base_id: "hr".to_string(),
            aux_id: "aux".to_string(),
            true_slope: -2.0,
            true_intercept: 1.0,
            n_models: 100,
            aux_range: (0.0, 0.5),
            noise_scale: 0.0,
            seed: 0,
        }
    }
}

impl PopulationSpec {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.aux_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSpec("aux range must satisfy low < high".to_string()));
        }
        if self.n_models == 0 {
            return Err(Error::InvalidSpec("n_models must be positive".to_string()));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::InvalidSpec("noise_scale must be nonnegative".to_string()));
        }
        if !(self.true_slope.is_finite() && self.true_intercept.is_finite()) {
            return Err(Error::InvalidSpec("front coefficients must be finite".to_string()));
        }
        if self.base_id == self.aux_id {
            return Err(Error::InvalidSpec("base and aux ids must differ".to_string()));
        }
        Ok(())
    }

    fn front(&self, aux: f64) -> f64 {
        self.true_slope * aux + self.true_intercept
    }

    /// Whether model `index` is placed exactly on the front.
    pub fn is_on_front(&self, index: usize) -> bool {
        self.noise_scale == 0.0 || index.is_multiple_of(ON_FRONT_STRIDE)
    }
}

/// Models on or strictly below the line `base = slope * aux + intercept`.
///
/// Every fifth model (ids `synth-0001`, `synth-0006`, ...) lies on the line.
/// The others are displaced downward by `d` in `[0.1, 1] * noise_scale`, and
/// their aux value is redrawn until some on-front model dominates them; after
/// a bounded number of redraws the aux value of the largest-aux front model
/// is reused. Dominated noisy models keep the front equal to the on-line
/// subset. With `noise_scale = 0` every model is on the line.
pub fn generate_population(spec: &PopulationSpec) -> Result<Vec<ModelRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.aux_range;
    let aux: Vec<f64> = (0..spec.n_models).map(|_| rng.random_range(lo..hi)).collect();

    let front: Vec<[f64; 2]> = (0..spec.n_models)
        .filter(|&i| spec.is_on_front(i))
        .map(|i| [spec.front(aux[i]), aux[i]])
        .collect();
    let anchor_aux = front.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);

    let mut records = Vec::with_capacity(spec.n_models);
    for (i, &first_aux) in aux.iter().enumerate() {
        let (a, b) = if spec.is_on_front(i) {
            (first_aux, spec.front(first_aux))
        } else {
            let d = spec.noise_scale * (0.1 + 0.9 * rng.random::<f64>());
            let mut a = first_aux;
            let mut placed = None;
            for attempt in 0..MAX_REDRAWS {
                if attempt > 0 {
                    a = rng.random_range(lo..hi);
                }
                let b = spec.front(a) - d;
                if front.iter().any(|p| dominates_row(p, &[b, a])) {
                    placed = Some((a, b));
                    break;
                }
            }
            placed.unwrap_or((anchor_aux, spec.front(anchor_aux) - d))
        };
        let values = MetricVector::from_pairs([(spec.base_id.as_str(), b), (spec.aux_id.as_str(), a)])?;
        records.push(ModelRecord::single(alloc::format!("synth-{:04}", i + 1), values)?);
    }
    Ok(records)
}

/// Shape of a synthetic listening dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    pub n_users: usize,
    pub events_per_user: usize,
    pub n_items: usize,
    pub n_artists: usize,
    pub seed: u64,
}

impl Default for InteractionSpec {
    fn default() -> Self {
        Self {
            n_users: 500,
            events_per_user: 10,
            n_items: 400,
            n_artists: 50,
            seed: 0,
        }
    }
}

const COUNTRIES: [&str; 4] = ["br", "de", "uk", "us"];
const GENDERS: [&str; 3] = ["f", "m", "n"];

/// Long-tailed listening events: item index `floor(n_items * u^3)` so low ids
/// are far more popular. Item `t` belongs to artist `t mod n_artists`. Every
/// user gets a country and gender attribute.
pub fn synthetic_interactions(spec: &InteractionSpec) -> Result<InteractionDataset> {
    if spec.n_users == 0 || spec.n_items == 0 || spec.n_artists == 0 {
        return Err(Error::InvalidSpec("counts must be positive".to_string()));
    }
    if spec.events_per_user < 2 {
        return Err(Error::InvalidSpec("events_per_user must be at least 2".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut events = Vec::with_capacity(spec.n_users * spec.events_per_user);
    let mut attrs = BTreeMap::new();
    for u in 0..spec.n_users {
        let user = alloc::format!("u{u:05}");
        let mut t = rng.random_range(0..86_400i64);
        for _ in 0..spec.events_per_user {
            let x: f64 = rng.random();
            let item = ((spec.n_items as f64 * x * x * x) as usize).min(spec.n_items - 1);
            events.push(Event::new(
                user.clone(),
                alloc::format!("t{item:05}"),
                alloc::format!("a{:04}", item % spec.n_artists),
                t,
            ));
            t += rng.random_range(1..3_600i64);
        }
        let mut a = BTreeMap::new();
        a.insert(
            "country".to_string(),
            COUNTRIES[rng.random_range(0..COUNTRIES.len())].to_string(),
        );
        a.insert(
            "gender".to_string(),
            GENDERS[rng.random_range(0..GENDERS.len())].to_string(),
        );
        attrs.insert(user, a);
    }
    InteractionDataset::new(events, attrs)
}

/// Random unit vectors for every item of `dataset`.
pub fn synthetic_embeddings(dataset: &InteractionDataset, dim: usize, seed: u64) -> Result<ItemEmbeddings> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: BTreeMap<String, Vec<f64>> = dataset
        .item_to_artist()
        .keys()
        .map(|item| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            (item.clone(), v)
        })
        .collect();
    ItemEmbeddings::normalized(vectors).map(|(e, _)| e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestRow {
    pub model_id: String,
    pub w: f64,
    pub s_p: f64,
    pub s_o: f64,
    /// Min-max normalized score; `None` when the column is constant.
    pub s_p_norm: Option<f64>,
    pub s_o_norm: Option<f64>,
    pub rank_p: usize,
    pub rank_o: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestSummary {
    pub w: f64,
    /// Spearman correlation of `s_p` and `s_o`; `None` if either is constant.
    pub spearman: Option<f64>,
    pub s_p_degenerate: bool,
    pub s_o_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestTable {
    pub curves: BTreeMap<String, TradeoffCurve>,
    /// Grouped by weight in grid order, records in input order.
    pub rows: Vec<BacktestRow>,
    pub summaries: Vec<BacktestSummary>,
}

fn min_max(values: &[f64], tolerance: f64) -> Option<Vec<f64>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    if values.len() < 2 || hi - lo <= tolerance * scale {
        return None;
    }
    Some(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// Fractional ranks (1-based, ties averaged) in ascending value order.
fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation; `None` when either input has no rank variance.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rx = fractional_ranks(x);
    let ry = fractional_ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

/// Proposed vs legacy scores for each uniform weight in `weight_grid`.
///
/// Curves are fitted once on the record aggregates; each weight setting then
/// rescores every model, min-max normalizes both score columns and records
/// their Spearman correlation.
pub fn backtest(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    weight_grid: &[f64],
    legacy: &LegacyConfig,
) -> Result<BacktestTable> {
    if records.is_empty() {
        return Err(Error::EmptyInput("model records"));
    }
    let curves = fit_curves(records, registry, CurveFamily::Linear)?;
    backtest_with_curves(records, registry, curves, weight_grid, legacy)
}

/// [`backtest`] against curves fitted elsewhere, e.g. on a larger population.
pub fn backtest_with_curves(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    curves: BTreeMap<String, TradeoffCurve>,
    weight_grid: &[f64],
    legacy: &LegacyConfig,
) -> Result<BacktestTable> {
    backtest_with_curves_within(records, registry, curves, weight_grid, legacy, DEGENERATE_SPREAD)
}

/// [`backtest_with_curves`] where `tolerance` decides both rank ties and
/// degenerate columns, for inputs coarser than `f64`.
pub fn backtest_with_curves_within(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    curves: BTreeMap<String, TradeoffCurve>,
    weight_grid: &[f64],
    legacy: &LegacyConfig,
    tolerance: f64,
) -> Result<BacktestTable> {
    if weight_grid.is_empty() {
        return Err(Error::EmptyInput("weight grid"));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("model records"));
    }
    let position: BTreeMap<&str, usize> = records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.model_id.as_str(), i))
        .collect();
    if position.len() != records.len() {
        return Err(Error::InconsistentData("duplicate model ids".to_string()));
    }

    let mut rows = Vec::with_capacity(records.len() * weight_grid.len());
    let mut summaries = Vec::with_capacity(weight_grid.len());
    for &w in weight_grid {
        let weights = WeightConfig::uniform(registry, w)?;
        let mut reports = rank_models_within(records, registry, &curves, &weights, Some(legacy), tolerance)?;
        reports.sort_by_key(|r| position[r.model_id.as_str()]);
        let sp: Vec<f64> = reports.iter().map(|r| r.s_p).collect();
        let so: Vec<f64> = reports.iter().map(|r| r.s_o.unwrap_or(0.0)).collect();
        let sp_norm = min_max(&sp, tolerance);
        let so_norm = min_max(&so, tolerance);
        let rho = if sp_norm.is_some() && so_norm.is_some() {
            spearman(&sp, &so)
        } else {
            None
        };
        summaries.push(BacktestSummary {
            w,
            spearman: rho,
            s_p_degenerate: sp_norm.is_none(),
            s_o_degenerate: so_norm.is_none(),
        });
        for (i, r) in reports.into_iter().enumerate() {
            rows.push(BacktestRow {
                model_id: r.model_id,
                w,
                s_p: r.s_p,
                s_o: r.s_o.unwrap_or(0.0),
                s_p_norm: sp_norm.as_ref().map(|v| v[i]),
                s_o_norm: so_norm.as_ref().map(|v| v[i]),
                rank_p: r.rank_p,
                rank_o: r.rank_o.unwrap_or(0),
            });
        }
    }
    Ok(BacktestTable {
        curves,
        rows,
        summaries,
    })
}
