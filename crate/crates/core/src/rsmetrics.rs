//! Accuracy, behavioral and fairness metrics over a recommendation run.
//!
//! A run holds, per user, an ordered prediction list and one held-out truth
//! item. Entries are kept sorted by user id; every metric reduces per-user
//! terms in that order so results are bit-reproducible.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Allowed deviation of an embedding's Euclidean norm from one.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecommendation {
    pub user_id: String,
    pub predictions: Vec<String>,
    pub truth: String,
}

impl UserRecommendation {
    pub fn new(user_id: impl Into<String>, predictions: Vec<String>, truth: impl Into<String>) -> Self {
        Self {
            user_id: user_id.into(),
            predictions,
            truth: truth.into(),
        }
    }

    /// 1-based rank of the truth item, if predicted.
    pub fn truth_rank(&self) -> Option<usize> {
        self.predictions.iter().position(|p| *p == self.truth).map(|i| i + 1)
    }

    pub fn is_hit(&self) -> bool {
        self.truth_rank().is_some()
    }
}

/// Per-user predictions and held-out truth.
///
/// Lists hold at most `k_top` distinct items. Shorter lists are accepted
/// (a recommender may run out of candidates) and counted by
/// [`short_lists`](Self::short_lists).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationRun {
    k_top: usize,
    entries: Vec<UserRecommendation>,
}

impl RecommendationRun {
    pub fn new(k_top: usize, mut entries: Vec<UserRecommendation>) -> Result<Self> {
        if k_top == 0 {
            return Err(Error::InvalidRun("k_top must be positive".to_string()));
        }
        entries.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        for pair in entries.windows(2) {
            if pair[0].user_id == pair[1].user_id {
                return Err(Error::InvalidRun(alloc::format!(
                    "duplicate user `{}`",
                    pair[0].user_id
                )));
            }
        }
        for e in &entries {
            if e.predictions.len() > k_top {
                return Err(Error::InvalidRun(alloc::format!(
                    "user `{}` has {} predictions, k_top is {k_top}",
                    e.user_id,
                    e.predictions.len()
                )));
            }
            let distinct: BTreeSet<&str> = e.predictions.iter().map(String::as_str).collect();
            if distinct.len() != e.predictions.len() {
                return Err(Error::InvalidRun(alloc::format!(
                    "user `{}` has duplicate predictions",
                    e.user_id
                )));
            }
        }
        Ok(Self { k_top, entries })
    }

    pub fn k_top(&self) -> usize {
        self.k_top
    }

    pub fn entries(&self) -> &[UserRecommendation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn short_lists(&self) -> usize {
        self.entries.iter().filter(|e| e.predictions.len() < self.k_top).count()
    }

    fn non_empty(&self) -> Result<&[UserRecommendation]> {
        if self.entries.is_empty() {
            Err(Error::EmptyInput("recommendation run"))
        } else {
            Ok(&self.entries)
        }
    }
}

/// What a partition's labels are keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupKey {
    /// Labels assigned per user id.
    #[default]
    User,
    /// Labels assigned per item id; each user falls in the group of its truth item.
    TruthItem,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupPartition {
    pub criterion: String,
    pub keyed_by: GroupKey,
    pub assignment: BTreeMap<String, String>,
}

impl GroupPartition {
    pub fn by_user(criterion: impl Into<String>, assignment: BTreeMap<String, String>) -> Self {
        Self {
            criterion: criterion.into(),
            keyed_by: GroupKey::User,
            assignment,
        }
    }

    pub fn by_truth_item(criterion: impl Into<String>, assignment: BTreeMap<String, String>) -> Self {
        Self {
            criterion: criterion.into(),
            keyed_by: GroupKey::TruthItem,
            assignment,
        }
    }

    fn label_of<'a>(&'a self, entry: &UserRecommendation) -> Result<&'a str> {
        let key = match self.keyed_by {
            GroupKey::User => &entry.user_id,
            GroupKey::TruthItem => &entry.truth,
        };
        self.assignment
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::UnlabeledUser(entry.user_id.clone()))
    }
}

/// Unit-norm item vectors of one fixed dimension (at least 2).
#[derive(Debug, Clone, PartialEq)]
pub struct ItemEmbeddings {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

impl ItemEmbeddings {
    /// Validates already-normalized vectors.
    pub fn new(vectors: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let dim = Self::check_shape(&vectors)?;
        for (id, v) in &vectors {
            if (norm(v) - 1.0).abs() > UNIT_NORM_TOLERANCE {
                return Err(Error::InvalidEmbedding(alloc::format!("`{id}` is not unit norm")));
            }
        }
        Ok(Self { dim, vectors })
    }

    /// L2-normalizes every vector whose norm is off by more than the
    /// tolerance. Returns the embeddings and the ids that were rescaled.
    pub fn normalized(mut vectors: BTreeMap<String, Vec<f64>>) -> Result<(Self, Vec<String>)> {
        let dim = Self::check_shape(&vectors)?;
        let mut rescaled = Vec::new();
        for (id, v) in vectors.iter_mut() {
            let n = norm(v);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::InvalidEmbedding(alloc::format!(
                    "`{id}` has zero or non-finite norm"
                )));
            }
            if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
                v.iter_mut().for_each(|x| *x /= n);
                rescaled.push(id.clone());
            }
        }
        Ok((Self { dim, vectors }, rescaled))
    }

    fn check_shape(vectors: &BTreeMap<String, Vec<f64>>) -> Result<usize> {
        let dim = vectors
            .values()
            .next()
            .map(Vec::len)
            .ok_or(Error::EmptyInput("embeddings"))?;
        if dim < 2 {
            return Err(Error::InvalidEmbedding(alloc::format!("dimension {dim} is below 2")));
        }
        for (id, v) in vectors {
            if v.len() != dim {
                return Err(Error::InvalidEmbedding(alloc::format!(
                    "`{id}` has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEmbedding(alloc::format!(
                    "`{id}` has a non-finite component"
                )));
            }
        }
        Ok(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, item: &str) -> Option<&[f64]> {
        self.vectors.get(item).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn vector(&self, item: &str) -> Result<&[f64]> {
        self.get(item).ok_or_else(|| Error::MissingEmbedding(item.to_string()))
    }

    /// `1 - <a, b>` for two embedded items.
    pub fn cosine_distance(&self, a: &str, b: &str) -> Result<f64> {
        let va = self.vector(a)?;
        let vb = self.vector(b)?;
        let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
        Ok(1.0 - dot)
    }
}

/// Fraction of users whose truth item was recommended.
pub fn hit_rate(run: &RecommendationRun) -> Result<f64> {
    let entries = run.non_empty()?;
    let hits = entries.iter().filter(|e| e.is_hit()).count();
    Ok(hits as f64 / entries.len() as f64)
}

pub fn miss_rate(run: &RecommendationRun) -> Result<f64> {
    Ok(1.0 - hit_rate(run)?)
}

/// Mean reciprocal rank of the truth item; misses contribute zero.
pub fn mrr(run: &RecommendationRun) -> Result<f64> {
    let entries = run.non_empty()?;
    let total: f64 = entries
        .iter()
        .map(|e| e.truth_rank().map_or(0.0, |r| 1.0 / r as f64))
        .sum();
    Ok(total / entries.len() as f64)
}

/// Miss-rate equality difference: `-sum_g |MR_g - MR_all|`, unweighted over
/// the groups present in the run.
pub fn mred(run: &RecommendationRun, partition: &GroupPartition) -> Result<f64> {
    let entries = run.non_empty()?;
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut misses = 0usize;
    for e in entries {
        let label = partition.label_of(e)?;
        let g = groups.entry(label).or_default();
        g.1 += 1;
        if !e.is_hit() {
            g.0 += 1;
            misses += 1;
        }
    }
    let global = misses as f64 / entries.len() as f64;
    // summed in sorted order so relabeling groups cannot change the result
    let mut gaps: Vec<f64> = groups
        .values()
        .map(|&(m, n)| (m as f64 / n as f64 - global).abs())
        .collect();
    gaps.sort_by(f64::total_cmp);
    Ok(0.0 - gaps.iter().sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LessWrong {
    /// Negated mean cosine distance between top-1 prediction and truth over
    /// missed users; zero when there were no misses.
    pub value: f64,
    pub no_misses: bool,
}

/// Rewards misses whose top-1 prediction is close to the truth item.
pub fn being_less_wrong(run: &RecommendationRun, emb: &ItemEmbeddings) -> Result<LessWrong> {
    let entries = run.non_empty()?;
    let mut total = 0.0;
    let mut missed = 0usize;
    for e in entries.iter().filter(|e| !e.is_hit()) {
        let top = e.predictions.first().ok_or_else(|| Error::ListTooShort {
            user: e.user_id.clone(),
            len: 0,
            needed: 1,
        })?;
        total += emb.cosine_distance(top, &e.truth)?;
        missed += 1;
    }
    if missed == 0 {
        return Ok(LessWrong {
            value: 0.0,
            no_misses: true,
        });
    }
    Ok(LessWrong {
        value: 0.0 - total / missed as f64,
        no_misses: false,
    })
}

/// Mean over users of the mean pairwise cosine distance within each list.
pub fn intra_list_diversity(run: &RecommendationRun, emb: &ItemEmbeddings) -> Result<f64> {
    let entries = run.non_empty()?;
    if run.k_top() < 2 {
        return Err(Error::InvalidRun("diversity needs k_top >= 2".to_string()));
    }
    let mut total = 0.0;
    for e in entries {
        let n = e.predictions.len();
        if n < 2 {
            return Err(Error::ListTooShort {
                user: e.user_id.clone(),
                len: n,
                needed: 2,
            });
        }
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += emb.cosine_distance(&e.predictions[i], &e.predictions[j])?;
            }
        }
        total += sum / (n * (n - 1) / 2) as f64;
    }
    Ok(total / entries.len() as f64)
}

/// `1 - sum_j p_j^2` over class proportions.
pub fn gini_impurity(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::ZeroDenominator("gini impurity of zero total"));
    }
    let t = total as f64;
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let concentration: f64 = sorted
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum();
    Ok(1.0 - concentration)
}

fn artist_gini<'a, I>(items: I, item_to_artist: &BTreeMap<String, String>) -> Result<f64>
where
    I: IntoIterator<Item = &'a String>,
{
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for item in items {
        let artist = item_to_artist
            .get(item)
            .ok_or_else(|| Error::UnmappedItem(item.clone()))?;
        *counts.entry(artist.as_str()).or_default() += 1;
    }
    let counts: Vec<u64> = counts.into_values().collect();
    gini_impurity(&counts)
}

/// `-mean_u |G_rec(u) - G_hist(u)|` where each `G` is the Gini impurity of
/// artist counts; zero means every user's recommendations are exactly as
/// artist-diverse as their history.
pub fn variance_agreement(
    run: &RecommendationRun,
    item_to_artist: &BTreeMap<String, String>,
    user_histories: &BTreeMap<String, Vec<String>>,
) -> Result<f64> {
    let entries = run.non_empty()?;
    let mut total = 0.0;
    for e in entries {
        let history = user_histories
            .get(&e.user_id)
            .filter(|h| !h.is_empty())
            .ok_or_else(|| Error::EmptyHistory(e.user_id.clone()))?;
        if e.predictions.is_empty() {
            return Err(Error::ListTooShort {
                user: e.user_id.clone(),
                len: 0,
                needed: 1,
            });
        }
        let g_hist = artist_gini(history, item_to_artist)?;
        let g_rec = artist_gini(&e.predictions, item_to_artist)?;
        total += (g_rec - g_hist).abs();
    }
    Ok(0.0 - total / entries.len() as f64)
}
