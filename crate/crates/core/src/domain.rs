//! Shared value types: metric registry, metric vectors and per-model records.
//!
//! All scoring math downstream assumes larger-is-better values. Vectors are
//! brought into that orientation once with [`canonicalize`]; `Minimize`
//! metrics are negated, `Maximize` metrics pass through unchanged.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tolerance used when checking that configured weights sum to one.
const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Sign that maps a raw value into larger-is-better orientation.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Maximize => 1.0,
            Direction::Minimize => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub id: String,
    pub direction: Direction,
    pub is_base: bool,
}

impl MetricSpec {
    pub fn new(id: impl Into<String>, direction: Direction, is_base: bool) -> Self {
        Self {
            id: id.into(),
            direction,
            is_base,
        }
    }
}

/// Ordered set of metric specs with unique ids and exactly one base metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRegistry {
    specs: Vec<MetricSpec>,
    base: usize,
}

impl MetricRegistry {
    pub fn new(specs: Vec<MetricSpec>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for spec in &specs {
            if spec.id.is_empty() {
                return Err(Error::EmptyMetricId);
            }
            if seen.insert(spec.id.as_str(), ()).is_some() {
                return Err(Error::DuplicateMetric(spec.id.clone()));
            }
        }
        let bases: Vec<usize> = specs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_base)
            .map(|(i, _)| i)
            .collect();
        if bases.len() != 1 {
            return Err(Error::BaseMetricCount(bases.len()));
        }
        Ok(Self { specs, base: bases[0] })
    }

    /// Registry where every metric is maximized and `base` is the base metric.
    pub fn all_maximize<I, S>(ids: I, base: &str) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let specs = ids
            .into_iter()
            .map(|id| {
                let id = id.into();
                let is_base = id == base;
                MetricSpec::new(id, Direction::Maximize, is_base)
            })
            .collect();
        Self::new(specs)
    }

    pub fn specs(&self) -> &[MetricSpec] {
        &self.specs
    }

    pub fn base(&self) -> &MetricSpec {
        &self.specs[self.base]
    }

    /// Every metric except the base, in registry order.
    pub fn auxiliary(&self) -> impl Iterator<Item = &MetricSpec> {
        let base = self.base;
        self.specs
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != base)
            .map(|(_, s)| s)
    }

    pub fn get(&self, id: &str) -> Option<&MetricSpec> {
        self.specs.iter().find(|s| s.id == id)
    }

    pub fn direction(&self, id: &str) -> Result<Direction> {
        self.get(id)
            .map(|s| s.direction)
            .ok_or_else(|| Error::UnknownMetric(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Canonical (larger-is-better) values of `v` in registry order.
    ///
    /// Fails unless `v` has exactly the registry's key set.
    pub(crate) fn canonical_row(&self, v: &MetricVector) -> Result<Vec<f64>> {
        if v.len() != self.specs.len() {
            for key in v.keys() {
                if !self.contains(key) {
                    return Err(Error::UnknownMetric(key.to_string()));
                }
            }
            return Err(Error::KeyMismatch);
        }
        self.specs
            .iter()
            .map(|s| v.get(&s.id).map(|x| x * s.direction.sign()).ok_or(Error::KeyMismatch))
            .collect()
    }
}

/// Map from metric id to a finite value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricVector {
    values: BTreeMap<String, f64>,
}

impl MetricVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut v = Self::new();
        for (id, value) in pairs {
            v.insert(id, value)?;
        }
        Ok(v)
    }

    /// Inserts or replaces a value. Rejects NaN and infinities.
    pub fn insert(&mut self, id: impl Into<String>, value: f64) -> Result<()> {
        let id = id.into();
        if !value.is_finite() {
            return Err(Error::NonFinite(id));
        }
        self.values.insert(id, value);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }

    /// Like [`get`](Self::get) but a missing id is an error.
    pub fn value(&self, id: &str) -> Result<f64> {
        self.get(id).ok_or_else(|| Error::MissingMetric(id.to_string()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_keys(&self, other: &MetricVector) -> bool {
        self.values.len() == other.values.len() && self.keys().eq(other.keys())
    }
}

/// Negates every `Minimize` metric so that larger is better everywhere.
pub fn canonicalize(v: &MetricVector, registry: &MetricRegistry) -> Result<MetricVector> {
    let mut out = MetricVector::new();
    for (id, value) in v.iter() {
        let direction = registry.direction(id)?;
        out.insert(id, value * direction.sign())?;
    }
    Ok(out)
}

/// Per-metric mean and sample standard deviation (n - 1 denominator) over folds.
///
/// Values are summed in sorted order, so the result does not depend on fold
/// order. A single fold yields a zero standard deviation.
pub fn aggregate_folds(folds: &[MetricVector]) -> Result<(MetricVector, MetricVector)> {
    let first = folds.first().ok_or(Error::EmptyInput("fold vectors"))?;
    if folds.iter().any(|f| !f.same_keys(first)) {
        return Err(Error::KeyMismatch);
    }
    let n = folds.len() as f64;
    let mut mean = MetricVector::new();
    let mut std = MetricVector::new();
    let mut column = Vec::with_capacity(folds.len());
    for id in first.keys() {
        column.clear();
        column.extend(folds.iter().map(|f| f.values[id]));
        column.sort_by(f64::total_cmp);
        let m = column.iter().sum::<f64>() / n;
        let s = if folds.len() < 2 {
            0.0
        } else {
            let ss: f64 = column.iter().map(|x| (x - m) * (x - m)).sum();
            libm::sqrt(ss / (n - 1.0))
        };
        mean.insert(id, m)?;
        std.insert(id, s)?;
    }
    Ok((mean, std))
}

/// A model's per-fold metric vectors with their mean and dispersion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRecord {
    pub model_id: String,
    pub fold_vectors: Vec<MetricVector>,
    pub aggregate: MetricVector,
    pub dispersion: MetricVector,
}

impl ModelRecord {
    pub fn from_folds(model_id: impl Into<String>, fold_vectors: Vec<MetricVector>) -> Result<Self> {
        let (aggregate, dispersion) = aggregate_folds(&fold_vectors)?;
        Ok(Self {
            model_id: model_id.into(),
            fold_vectors,
            aggregate,
            dispersion,
        })
    }

    /// Single-fold record, e.g. a pre-aggregated leaderboard row.
    pub fn single(model_id: impl Into<String>, values: MetricVector) -> Result<Self> {
        Self::from_folds(model_id, alloc::vec![values])
    }
}

/// Importance ratios for every auxiliary metric, relative to the base metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    pub base_id: String,
    pub weights: BTreeMap<String, f64>,
}

impl WeightConfig {
    /// Same weight `w` for every auxiliary metric of `registry`.
    pub fn uniform(registry: &MetricRegistry, w: f64) -> Result<Self> {
        let cfg = Self {
            base_id: registry.base().id.clone(),
            weights: registry.auxiliary().map(|s| (s.id.clone(), w)).collect(),
        };
        cfg.validate(registry)?;
        Ok(cfg)
    }

    pub fn validate(&self, registry: &MetricRegistry) -> Result<()> {
        if registry.base().id != self.base_id {
            return Err(Error::InvalidConfig(alloc::format!(
                "weights base `{}` differs from registry base `{}`",
                self.base_id,
                registry.base().id
            )));
        }
        for (id, &w) in &self.weights {
            if id == &self.base_id {
                return Err(Error::InvalidConfig(alloc::format!(
                    "base metric `{id}` must not carry a weight"
                )));
            }
            if !registry.contains(id) {
                return Err(Error::UnknownMetric(id.clone()));
            }
            check_weight(id, w)?;
        }
        Ok(())
    }

    pub fn weight(&self, id: &str) -> Result<f64> {
        self.weights
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("no weight for `{id}`")))
    }
}

pub(crate) fn check_weight(id: &str, w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight {
            metric: id.to_string(),
            value: w,
        })
    }
}

/// Configuration of the legacy baseline/best min-max weighted score.
#[derive(Debug, Clone, PartialEq)]
pub struct LegacyConfig {
    pub category_weights: BTreeMap<String, f64>,
    pub baseline_ref: MetricVector,
    pub best_ref: MetricVector,
    /// Minimum base-metric value; models below it score zero.
    pub base_threshold: f64,
}

impl LegacyConfig {
    pub fn validate(&self, registry: &MetricRegistry) -> Result<()> {
        if !(self.base_threshold >= 0.0 && self.base_threshold.is_finite()) {
            return Err(Error::InvalidConfig(
                "base_threshold must be a nonnegative finite number".to_string(),
            ));
        }
        let mut total = 0.0;
        for (id, &k) in &self.category_weights {
            if !registry.contains(id) {
                return Err(Error::UnknownMetric(id.clone()));
            }
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "category weight for `{id}` must be nonnegative"
                )));
            }
            let base = self.baseline_ref.value(id)?;
            let best = self.best_ref.value(id)?;
            if base == best {
                return Err(Error::DegenerateNormalization(id.clone()));
            }
            total += k;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidConfig(alloc::format!(
                "category weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}
