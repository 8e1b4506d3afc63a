//! Pareto dominance and non-dominated set extraction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::domain::{MetricRegistry, MetricVector};
use crate::error::{Error, Result};

/// Partition of input indices into the non-dominated front and the rest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrontResult {
    /// Indices of non-dominated points, ascending.
    pub front_indices: Vec<usize>,
    /// Each dominated index mapped to one front index that dominates it.
    pub dominated_by: BTreeMap<usize, usize>,
}

impl FrontResult {
    pub fn is_on_front(&self, index: usize) -> bool {
        self.front_indices.binary_search(&index).is_ok()
    }
}

/// Dominance on canonical (larger-is-better) rows of equal length.
pub fn dominates_row(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (&x, &y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// `a` dominates `b` when it is at least as good on every registered metric
/// and strictly better on one, honoring each metric's direction.
pub fn dominates(a: &MetricVector, b: &MetricVector, registry: &MetricRegistry) -> Result<bool> {
    let ra = registry.canonical_row(a)?;
    let rb = registry.canonical_row(b)?;
    Ok(dominates_row(&ra, &rb))
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Non-dominated set of canonical rows.
///
/// Rows are visited in lexicographically descending order. Any dominator of a
/// row precedes it in that order, and dominance is transitive, so each row
/// only needs checking against the front accumulated so far. Exact duplicates
/// never dominate each other and all stay on the front.
pub fn front_of_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<FrontResult> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyInput("pareto points"));
    };
    let dim = first.as_ref().len();
    if rows.iter().any(|r| r.as_ref().len() != dim) {
        return Err(Error::KeyMismatch);
    }
    if rows.iter().flat_map(|r| r.as_ref()).any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput("pareto points"));
    }

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| lex_desc(rows[i].as_ref(), rows[j].as_ref()));

    let mut front: Vec<usize> = Vec::new();
    let mut dominated_by = BTreeMap::new();
    for i in order {
        let row = rows[i].as_ref();
        match front.iter().find(|&&f| dominates_row(rows[f].as_ref(), row)) {
            Some(&witness) => {
                dominated_by.insert(i, witness);
            }
            None => front.push(i),
        }
    }
    front.sort_unstable();
    Ok(FrontResult {
        front_indices: front,
        dominated_by,
    })
}

/// Non-dominated subset of `points` under `registry`'s directions.
pub fn pareto_front(points: &[MetricVector], registry: &MetricRegistry) -> Result<FrontResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput("pareto points"));
    }
    let rows = points
        .iter()
        .map(|p| registry.canonical_row(p))
        .collect::<Result<Vec<_>>>()?;
    front_of_rows(&rows)
}

/// Indices of the front of canonical `(base, aux)` pairs, in output order:
/// ascending aux, then descending base, then input order.
pub(crate) fn front_2d_indices(pairs: &[(f64, f64)]) -> Result<Vec<usize>> {
    let rows: Vec<[f64; 2]> = pairs.iter().map(|&(b, a)| [b, a]).collect();
    let mut idx = front_of_rows(&rows)?.front_indices;
    idx.sort_by(|&i, &j| {
        let (bi, ai) = pairs[i];
        let (bj, aj) = pairs[j];
        ai.total_cmp(&aj).then_with(|| bj.total_cmp(&bi)).then(i.cmp(&j))
    });
    Ok(idx)
}

/// Front of canonical `(base_value, aux_value)` pairs, sorted by ascending
/// aux value (ties: descending base, then input order).
pub fn pareto_front_2d(pairs: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    Ok(front_2d_indices(pairs)?.into_iter().map(|i| pairs[i]).collect())
}
