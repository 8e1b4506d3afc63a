//! RunConfig: the JSON document describing metrics, weights and settings.
//!
//! ```json
//! {
//!   "registry": [
//!     {"id": "hr", "direction": "maximize", "is_base": true},
//!     {"id": "mred", "direction": "maximize", "is_base": false}
//!   ],
//!   "weights": {"base_id": "hr", "weights": {"mred": 0.5}},
//!   "legacy": {
//!     "category_weights": {"hr": 0.5, "mred": 0.5},
//!     "baseline_ref": {"hr": 0.0, "mred": -1.0},
//!     "best_ref": {"hr": 1.0, "mred": 0.0},
//!     "base_threshold": 0.05
//!   },
//!   "bncv": {"n_folds": 4, "seed": 0, "k_top": 10},
//!   "paths": {"metric_table": "metrics.csv"}
//! }
//! ```
//!
//! `legacy`, `bncv` and `paths` are optional. Relative paths are resolved
//! against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use paretoscore_core::bncv::BncvSettings;
use paretoscore_core::{Direction, LegacyConfig, MetricRegistry, MetricSpec, MetricVector, WeightConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionEntry {
    Maximize,
    Minimize,
}

impl From<DirectionEntry> for Direction {
    fn from(d: DirectionEntry) -> Self {
        match d {
            DirectionEntry::Maximize => Direction::Maximize,
            DirectionEntry::Minimize => Direction::Minimize,
        }
    }
}

impl From<Direction> for DirectionEntry {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Maximize => DirectionEntry::Maximize,
            Direction::Minimize => DirectionEntry::Minimize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEntry {
    pub id: String,
    pub direction: DirectionEntry,
    pub is_base: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsEntry {
    pub base_id: String,
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegacyEntry {
    pub category_weights: BTreeMap<String, f64>,
    pub baseline_ref: BTreeMap<String, f64>,
    pub best_ref: BTreeMap<String, f64>,
    pub base_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BncvEntry {
    pub n_folds: usize,
    pub seed: u64,
    pub k_top: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsEntry {
    pub metric_table: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// The config document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub registry: Vec<MetricEntry>,
    pub weights: WeightsEntry,
    #[serde(default)]
    pub legacy: Option<LegacyEntry>,
    #[serde(default)]
    pub bncv: Option<BncvEntry>,
    #[serde(default)]
    pub paths: PathsEntry,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub registry: MetricRegistry,
    pub weights: WeightConfig,
    pub legacy: Option<LegacyConfig>,
    pub bncv: BncvSettings,
    pub paths: PathsEntry,
}

pub fn registry_entries(registry: &MetricRegistry) -> Vec<MetricEntry> {
    registry
        .specs()
        .iter()
        .map(|s| MetricEntry {
            id: s.id.clone(),
            direction: s.direction.into(),
            is_base: s.is_base,
        })
        .collect()
}

fn vector(map: &BTreeMap<String, f64>) -> Result<MetricVector> {
    Ok(MetricVector::from_pairs(map.iter().map(|(k, &v)| (k.as_str(), v)))?)
}

impl RunConfig {
    /// Validates a parsed document; relative paths are joined onto `base_dir`.
    pub fn from_file(file: RunConfigFile, base_dir: &Path) -> Result<Self> {
        let registry = MetricRegistry::new(
            file.registry
                .iter()
                .map(|m| MetricSpec::new(m.id.clone(), m.direction.into(), m.is_base))
                .collect(),
        )?;
        let weights = WeightConfig {
            base_id: file.weights.base_id,
            weights: file.weights.weights,
        };
        weights.validate(&registry)?;
        let legacy = file
            .legacy
            .map(|l| -> Result<LegacyConfig> {
                for spec in registry.specs() {
                    if !(l.baseline_ref.contains_key(&spec.id) && l.best_ref.contains_key(&spec.id)) {
                        return Err(Error::Format(format!(
                            "config: legacy references must cover registry metric `{}`",
                            spec.id
                        )));
                    }
                }
                let cfg = LegacyConfig {
                    category_weights: l.category_weights,
                    baseline_ref: vector(&l.baseline_ref)?,
                    best_ref: vector(&l.best_ref)?,
                    base_threshold: l.base_threshold,
                };
                cfg.validate(&registry)?;
                Ok(cfg)
            })
            .transpose()?;
        let bncv = file.bncv.map_or_else(BncvSettings::default, |b| BncvSettings {
            n_folds: b.n_folds,
            seed: b.seed,
            k_top: b.k_top,
        });
        if bncv.n_folds == 0 || bncv.k_top == 0 {
            return Err(Error::Format("config: bncv n_folds and k_top must be positive".into()));
        }
        let resolve = |p: Option<PathBuf>| p.map(|p| if p.is_relative() { base_dir.join(p) } else { p });
        let paths = PathsEntry {
            metric_table: resolve(file.paths.metric_table),
            dataset: resolve(file.paths.dataset),
            embeddings: resolve(file.paths.embeddings),
            output: resolve(file.paths.output),
        };
        Ok(Self {
            registry,
            weights,
            legacy,
            bncv,
            paths,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let file: RunConfigFile = serde_json::from_str(text).map_err(|e| Error::json("config", e))?;
        Self::from_file(file, base_dir)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, dir).map_err(|e| match e {
            Error::Io { .. } => e,
            other => Error::Format(format!("{}: {other}", path.display())),
        })
    }

    /// Legacy settings, or an error naming the command that needs them.
    pub fn require_legacy(&self, what: &str) -> Result<&LegacyConfig> {
        self.legacy
            .as_ref()
            .ok_or_else(|| Error::Format(format!("config has no `legacy` section, required by {what}")))
    }
}
