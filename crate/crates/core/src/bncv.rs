//! Bootstrapped cross-validation of recommendation algorithms.
//!
//! Each fold draws `|U|` users with replacement from a generator keyed by
//! `(seed, fold_index)`. For every distinct sampled user the chronologically
//! last event is held out as the test truth and the earlier events go to
//! training. The algorithm is trained on the fold's training events, asked for
//! `k_top` items per test user, and each metric of the suite is evaluated on
//! the resulting run. Fold vectors are then averaged into a [`ModelRecord`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{MetricVector, ModelRecord};
use crate::error::{Error, Result};
use crate::rsmetrics::{self, GroupPartition, ItemEmbeddings, RecommendationRun, UserRecommendation};

/// Number of folds used when none is configured.
pub const DEFAULT_FOLDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub user_id: String,
    pub item_id: String,
    pub artist_id: String,
    /// Seconds.
    pub timestamp: i64,
}

impl Event {
    pub fn new(
        user_id: impl Into<String>,
        item_id: impl Into<String>,
        artist_id: impl Into<String>,
        timestamp: i64,
    ) -> Self {
        Self {
            user_id: user_id.into(),
            item_id: item_id.into(),
            artist_id: artist_id.into(),
            timestamp,
        }
    }
}

/// Listening events grouped by user in chronological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionDataset {
    events: Vec<Event>,
    /// `user_id -> (start, end)` range into `events`.
    spans: BTreeMap<String, (usize, usize)>,
    user_attributes: BTreeMap<String, BTreeMap<String, String>>,
    item_to_artist: BTreeMap<String, String>,
}

impl InteractionDataset {
    /// Orders events by `(user_id, timestamp)`, keeping input order for ties,
    /// and requires at least two events per user.
    pub fn new(mut events: Vec<Event>, user_attributes: BTreeMap<String, BTreeMap<String, String>>) -> Result<Self> {
        events.sort_by(|a, b| a.user_id.cmp(&b.user_id).then(a.timestamp.cmp(&b.timestamp)));
        let mut spans = BTreeMap::new();
        let mut start = 0;
        for i in 1..=events.len() {
            if i == events.len() || events[i].user_id != events[start].user_id {
                let user = &events[start].user_id;
                if i - start < 2 {
                    return Err(Error::TooFewEvents {
                        user: user.clone(),
                        events: i - start,
                    });
                }
                spans.insert(user.clone(), (start, i));
                start = i;
            }
        }
        let mut item_to_artist: BTreeMap<String, String> = BTreeMap::new();
        for e in &events {
            match item_to_artist.get(&e.item_id) {
                Some(a) if *a != e.artist_id => {
                    return Err(Error::InconsistentData(alloc::format!(
                        "item `{}` mapped to artists `{a}` and `{}`",
                        e.item_id,
                        e.artist_id
                    )));
                }
                Some(_) => {}
                None => {
                    item_to_artist.insert(e.item_id.clone(), e.artist_id.clone());
                }
            }
        }
        Ok(Self {
            events,
            spans,
            user_attributes,
            item_to_artist,
        })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.spans.keys().map(String::as_str)
    }

    pub fn n_users(&self) -> usize {
        self.spans.len()
    }

    /// A user's events in chronological order.
    pub fn user_events(&self, user: &str) -> &[Event] {
        self.spans.get(user).map_or(&[], |&(s, e)| &self.events[s..e])
    }

    pub fn user_attributes(&self) -> &BTreeMap<String, BTreeMap<String, String>> {
        &self.user_attributes
    }

    /// Attribute names present on any user, sorted.
    pub fn attribute_names(&self) -> BTreeSet<&str> {
        self.user_attributes
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect()
    }

    pub fn item_to_artist(&self) -> &BTreeMap<String, String> {
        &self.item_to_artist
    }
}

/// One fold's training events and held-out `(user, truth item)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapSplit {
    pub fold_index: u64,
    /// Training events of every distinct sampled user, each user once.
    pub train_events: Vec<Event>,
    /// One pair per distinct sampled user, sorted by user id.
    pub test_pairs: Vec<(String, String)>,
    /// How many times each distinct user was drawn.
    pub multiplicity: BTreeMap<String, usize>,
}

fn keyed_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// User-stratified bootstrap sample with last-event holdout.
pub fn bootstrap_split(dataset: &InteractionDataset, seed: u64, fold_index: u64) -> Result<BootstrapSplit> {
    let users: Vec<&str> = dataset.users().collect();
    if users.is_empty() {
        return Err(Error::EmptyInput("interaction dataset"));
    }
    let mut rng = keyed_rng(seed, fold_index);
    let mut multiplicity: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..users.len() {
        let u = users[rng.random_range(0..users.len())];
        *multiplicity.entry(u.to_string()).or_default() += 1;
    }
    let mut train_events = Vec::new();
    let mut test_pairs = Vec::with_capacity(multiplicity.len());
    for user in multiplicity.keys() {
        let events = dataset.user_events(user);
        let (last, earlier) = events.split_last().ok_or_else(|| Error::TooFewEvents {
            user: user.clone(),
            events: 0,
        })?;
        if earlier.is_empty() {
            return Err(Error::TooFewEvents {
                user: user.clone(),
                events: 1,
            });
        }
        train_events.extend_from_slice(earlier);
        test_pairs.push((user.clone(), last.item_id.clone()));
    }
    Ok(BootstrapSplit {
        fold_index,
        train_events,
        test_pairs,
        multiplicity,
    })
}

/// Produces a trained recommender from training events.
pub trait LearningAlgorithm {
    type Model: Recommender;

    fn name(&self) -> String;

    fn train(&self, train_events: &[Event]) -> Result<Self::Model>;
}

pub trait Recommender {
    /// Up to `k_top` distinct item ids, best first. Deterministic for a
    /// trained state.
    fn predict(&self, user_id: &str, k_top: usize) -> Result<Vec<String>>;
}

/// Recommends the globally most frequent training items the user has not
/// interacted with, ties broken by item id.
#[derive(Debug, Clone, Copy, Default)]
pub struct PopularityBaseline;

pub fn popularity_baseline() -> PopularityBaseline {
    PopularityBaseline
}

#[derive(Debug, Clone)]
pub struct PopularityModel {
    ranked: Vec<String>,
    histories: BTreeMap<String, BTreeSet<String>>,
}

impl LearningAlgorithm for PopularityBaseline {
    type Model = PopularityModel;

    fn name(&self) -> String {
        "popularity".to_string()
    }

    fn train(&self, train_events: &[Event]) -> Result<PopularityModel> {
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        let mut histories: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for e in train_events {
            *counts.entry(&e.item_id).or_default() += 1;
            histories
                .entry(e.user_id.clone())
                .or_default()
                .insert(e.item_id.clone());
        }
        let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
        // BTreeMap iteration is id-ascending and the sort is stable
        ranked.sort_by_key(|&(_, count)| core::cmp::Reverse(count));
        Ok(PopularityModel {
            ranked: ranked.into_iter().map(|(id, _)| id.to_string()).collect(),
            histories,
        })
    }
}

impl Recommender for PopularityModel {
    fn predict(&self, user_id: &str, k_top: usize) -> Result<Vec<String>> {
        let seen = self.histories.get(user_id);
        Ok(self
            .ranked
            .iter()
            .filter(|item| seen.is_none_or(|s| !s.contains(*item)))
            .take(k_top)
            .cloned()
            .collect())
    }
}

/// Uniform sample of training-catalog items, deterministic per `(seed, user)`.
#[derive(Debug, Clone, Copy)]
pub struct RandomBaseline {
    seed: u64,
}

pub fn random_baseline(seed: u64) -> RandomBaseline {
    RandomBaseline { seed }
}

#[derive(Debug, Clone)]
pub struct RandomModel {
    seed: u64,
    catalog: Vec<String>,
}

impl LearningAlgorithm for RandomBaseline {
    type Model = RandomModel;

    fn name(&self) -> String {
        "random".to_string()
    }

    fn train(&self, train_events: &[Event]) -> Result<RandomModel> {
        let catalog: BTreeSet<&str> = train_events.iter().map(|e| e.item_id.as_str()).collect();
        Ok(RandomModel {
            seed: self.seed,
            catalog: catalog.into_iter().map(str::to_string).collect(),
        })
    }
}

/// 64-bit FNV-1a; stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Recommender for RandomModel {
    fn predict(&self, user_id: &str, k_top: usize) -> Result<Vec<String>> {
        let mut rng = keyed_rng(self.seed, fnv1a(user_id.as_bytes()));
        if self.catalog.len() <= k_top {
            let mut all = self.catalog.clone();
            all.shuffle(&mut rng);
            return Ok(all);
        }
        Ok(index::sample(&mut rng, self.catalog.len(), k_top)
            .into_iter()
            .map(|i| self.catalog[i].clone())
            .collect())
    }
}

/// Everything a metric may need about one evaluated fold.
pub struct FoldContext<'a> {
    pub run: &'a RecommendationRun,
    pub split: &'a BootstrapSplit,
    pub dataset: &'a InteractionDataset,
    pub embeddings: Option<&'a ItemEmbeddings>,
}

impl FoldContext<'_> {
    /// Training items per test user, in chronological order.
    pub fn histories(&self) -> BTreeMap<String, Vec<String>> {
        let mut h: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for e in &self.split.train_events {
            h.entry(e.user_id.clone()).or_default().push(e.item_id.clone());
        }
        h
    }

    fn embeddings(&self) -> Result<&ItemEmbeddings> {
        self.embeddings
            .ok_or(Error::InvalidConfig("metric requires item embeddings".to_string()))
    }
}

/// A metric computed on one fold.
pub trait FoldMetric {
    fn id(&self) -> String;

    fn compute(&self, ctx: &FoldContext<'_>) -> Result<f64>;
}

/// Metrics shipped with the harness. MRED variants slice users by a user
/// attribute, by training activity, or by the training popularity of their
/// truth track or its artist; counts are bucketed on a log2 scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuiteMetric {
    HitRate,
    MissRate,
    Mrr,
    BeingLessWrong,
    Diversity,
    VarianceAgreement,
    MredAttribute(String),
    MredActivity,
    MredTrackPopularity,
    MredArtistPopularity,
}

/// Label used for users without a value for a sliced attribute.
pub const UNKNOWN_LABEL: &str = "unknown";

fn log2_bucket(count: usize) -> String {
    alloc::format!("log2_{}", (count + 1).ilog2())
}

impl SuiteMetric {
    /// The standard suite for a dataset: accuracy, MRED over every user
    /// attribute plus activity and popularity slices, and, when embeddings are
    /// available, the latent-space behavioral metrics.
    pub fn standard_suite(dataset: &InteractionDataset, with_embeddings: bool) -> Vec<SuiteMetric> {
        let mut suite = alloc::vec![SuiteMetric::HitRate, SuiteMetric::Mrr];
        if with_embeddings {
            suite.push(SuiteMetric::BeingLessWrong);
            suite.push(SuiteMetric::Diversity);
        }
        suite.push(SuiteMetric::VarianceAgreement);
        suite.push(SuiteMetric::MredActivity);
        suite.push(SuiteMetric::MredTrackPopularity);
        suite.push(SuiteMetric::MredArtistPopularity);
        for attr in dataset.attribute_names() {
            suite.push(SuiteMetric::MredAttribute(attr.to_string()));
        }
        suite
    }

    fn partition(&self, ctx: &FoldContext<'_>) -> GroupPartition {
        let mut assignment = BTreeMap::new();
        match self {
            SuiteMetric::MredAttribute(attr) => {
                for (user, _) in &ctx.split.test_pairs {
                    let label = ctx
                        .dataset
                        .user_attributes()
                        .get(user)
                        .and_then(|a| a.get(attr))
                        .map_or(UNKNOWN_LABEL.to_string(), Clone::clone);
                    assignment.insert(user.clone(), label);
                }
            }
            SuiteMetric::MredActivity => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for e in &ctx.split.train_events {
                    *counts.entry(&e.user_id).or_default() += 1;
                }
                for (user, _) in &ctx.split.test_pairs {
                    let n = counts.get(user.as_str()).copied().unwrap_or(0);
                    assignment.insert(user.clone(), log2_bucket(n));
                }
            }
            SuiteMetric::MredTrackPopularity | SuiteMetric::MredArtistPopularity => {
                let by_artist = matches!(self, SuiteMetric::MredArtistPopularity);
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for e in &ctx.split.train_events {
                    let key = if by_artist { &e.artist_id } else { &e.item_id };
                    *counts.entry(key).or_default() += 1;
                }
                for (user, truth) in &ctx.split.test_pairs {
                    let key = if by_artist {
                        ctx.dataset.item_to_artist().get(truth).map_or("", String::as_str)
                    } else {
                        truth.as_str()
                    };
                    let n = counts.get(key).copied().unwrap_or(0);
                    assignment.insert(user.clone(), log2_bucket(n));
                }
            }
            _ => {}
        }
        GroupPartition::by_user(self.id(), assignment)
    }
}

impl FoldMetric for SuiteMetric {
    fn id(&self) -> String {
        match self {
            SuiteMetric::HitRate => "hit_rate".to_string(),
            SuiteMetric::MissRate => "miss_rate".to_string(),
            SuiteMetric::Mrr => "mrr".to_string(),
            SuiteMetric::BeingLessWrong => "being_less_wrong".to_string(),
            SuiteMetric::Diversity => "diversity".to_string(),
            SuiteMetric::VarianceAgreement => "variance_agreement".to_string(),
            SuiteMetric::MredAttribute(a) => alloc::format!("mred_{a}"),
            SuiteMetric::MredActivity => "mred_activity".to_string(),
            SuiteMetric::MredTrackPopularity => "mred_track_popularity".to_string(),
            SuiteMetric::MredArtistPopularity => "mred_artist_popularity".to_string(),
        }
    }

    fn compute(&self, ctx: &FoldContext<'_>) -> Result<f64> {
        match self {
            SuiteMetric::HitRate => rsmetrics::hit_rate(ctx.run),
            SuiteMetric::MissRate => rsmetrics::miss_rate(ctx.run),
            SuiteMetric::Mrr => rsmetrics::mrr(ctx.run),
            SuiteMetric::BeingLessWrong => rsmetrics::being_less_wrong(ctx.run, ctx.embeddings()?).map(|r| r.value),
            SuiteMetric::Diversity => rsmetrics::intra_list_diversity(ctx.run, ctx.embeddings()?),
            SuiteMetric::VarianceAgreement => {
                rsmetrics::variance_agreement(ctx.run, ctx.dataset.item_to_artist(), &ctx.histories())
            }
            SuiteMetric::MredAttribute(_)
            | SuiteMetric::MredActivity
            | SuiteMetric::MredTrackPopularity
            | SuiteMetric::MredArtistPopularity => rsmetrics::mred(ctx.run, &self.partition(ctx)),
        }
    }
}

/// Bootstrap settings for [`run_bncv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BncvSettings {
    pub n_folds: usize,
    pub seed: u64,
    pub k_top: usize,
}

impl Default for BncvSettings {
    fn default() -> Self {
        Self {
            n_folds: DEFAULT_FOLDS,
            seed: 0,
            k_top: 10,
        }
    }
}

/// Trains and evaluates one fold.
pub fn evaluate_fold<A, M>(
    algo: &A,
    dataset: &InteractionDataset,
    fold_index: u64,
    settings: &BncvSettings,
    suite: &[M],
    embeddings: Option<&ItemEmbeddings>,
) -> Result<MetricVector>
where
    A: LearningAlgorithm,
    M: FoldMetric,
{
    let split = bootstrap_split(dataset, settings.seed, fold_index)?;
    let model = algo.train(&split.train_events)?;
    let entries = split
        .test_pairs
        .iter()
        .map(|(user, truth)| {
            let predictions = model.predict(user, settings.k_top)?;
            Ok(UserRecommendation::new(user.clone(), predictions, truth.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let run = RecommendationRun::new(settings.k_top, entries)?;
    let ctx = FoldContext {
        run: &run,
        split: &split,
        dataset,
        embeddings,
    };
    let mut v = MetricVector::new();
    for metric in suite {
        v.insert(metric.id(), metric.compute(&ctx)?)?;
    }
    Ok(v)
}

/// Runs every fold in index order and aggregates the fold vectors.
pub fn run_bncv<A, M>(
    algo: &A,
    dataset: &InteractionDataset,
    settings: &BncvSettings,
    suite: &[M],
    embeddings: Option<&ItemEmbeddings>,
) -> Result<ModelRecord>
where
    A: LearningAlgorithm,
    M: FoldMetric,
{
    if settings.n_folds == 0 {
        return Err(Error::InvalidConfig("n_folds must be at least 1".to_string()));
    }
    let folds = (0..settings.n_folds as u64)
        .map(|i| {
            evaluate_fold(algo, dataset, i, settings, suite, embeddings).map_err(|e| Error::Fold {
                index: i as usize,
                source: alloc::boxed::Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ModelRecord::from_folds(algo.name(), folds)
}
