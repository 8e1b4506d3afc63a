//! Learned trade-off curves between the base metric and one auxiliary metric.
//!
//! A curve is fitted by ordinary least squares of the base value on the
//! auxiliary value, using only the Pareto non-dominated `(base, aux)` pairs.
//! It converts an auxiliary value into the base value an optimal model
//! should reach at that point.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::domain::{MetricRegistry, ModelRecord};
use crate::error::{Error, Result};
use crate::pareto::front_2d_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurveFamily {
    #[default]
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub base_id: String,
    pub aux_id: String,
    /// Base-metric units per auxiliary unit.
    pub slope: f64,
    /// Base-metric units.
    pub intercept: f64,
    pub n_front_points: usize,
    pub r_squared: f64,
    pub family: CurveFamily,
    /// Range of auxiliary values seen on the front.
    pub aux_min: f64,
    pub aux_max: f64,
}

/// Curve value with a flag for evaluations outside the fitted aux range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub extrapolated: bool,
}

impl TradeoffCurve {
    /// Expected base value of an optimal model with the given aux value.
    pub fn ev(&self, aux_value: f64) -> Result<Evaluation> {
        if !aux_value.is_finite() {
            return Err(Error::NonFiniteInput("aux value"));
        }
        let value = match self.family {
            CurveFamily::Linear => self.slope * aux_value + self.intercept,
        };
        Ok(Evaluation {
            value,
            extrapolated: aux_value < self.aux_min || aux_value > self.aux_max,
        })
    }
}

/// Fits a curve to the Pareto front of canonical `(base, aux)` pairs.
pub fn fit_tradeoff(base_id: &str, aux_id: &str, data: &[(f64, f64)], family: CurveFamily) -> Result<TradeoffCurve> {
    if data.iter().any(|(b, a)| !b.is_finite() || !a.is_finite()) {
        return Err(Error::NonFiniteInput("trade-off data"));
    }
    let front: Vec<(f64, f64)> = front_2d_indices(data)?.into_iter().map(|i| data[i]).collect();
    if front.len() < 2 {
        return Err(Error::TooFewFrontPoints(front.len()));
    }
    let fit = match family {
        CurveFamily::Linear => least_squares(&front)?,
    };
    // front is sorted by ascending aux
    let aux_min = front[0].1;
    let aux_max = front[front.len() - 1].1;
    Ok(TradeoffCurve {
        base_id: base_id.into(),
        aux_id: aux_id.into(),
        slope: fit.slope,
        intercept: fit.intercept,
        n_front_points: front.len(),
        r_squared: fit.r_squared,
        family,
        aux_min,
        aux_max,
    })
}

/// Stateless refit on the union of previously seen and newly submitted points.
pub fn update_tradeoff(
    base_id: &str,
    aux_id: &str,
    existing: &[(f64, f64)],
    new_points: &[(f64, f64)],
    family: CurveFamily,
) -> Result<TradeoffCurve> {
    let mut all = Vec::with_capacity(existing.len() + new_points.len());
    all.extend_from_slice(existing);
    all.extend_from_slice(new_points);
    fit_tradeoff(base_id, aux_id, &all, family)
}

/// Canonical `(base, aux)` pairs taken from each record's aggregate vector.
pub fn canonical_pairs(records: &[ModelRecord], registry: &MetricRegistry, aux_id: &str) -> Result<Vec<(f64, f64)>> {
    let base = registry.base();
    let aux_sign = registry.direction(aux_id)?.sign();
    records
        .iter()
        .map(|r| {
            let b = r.aggregate.value(&base.id)? * base.direction.sign();
            let a = r.aggregate.value(aux_id)? * aux_sign;
            Ok((b, a))
        })
        .collect()
}

/// One curve per auxiliary metric of `registry`, fitted on record aggregates.
pub fn fit_curves(
    records: &[ModelRecord],
    registry: &MetricRegistry,
    family: CurveFamily,
) -> Result<BTreeMap<String, TradeoffCurve>> {
    let base_id = &registry.base().id;
    let mut curves = BTreeMap::new();
    for aux in registry.auxiliary() {
        let pairs = canonical_pairs(records, registry, &aux.id)?;
        curves.insert(aux.id.clone(), fit_tradeoff(base_id, &aux.id, &pairs, family)?);
    }
    Ok(curves)
}

struct LinearFit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn least_squares(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(y, x) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::VerticalFront);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = points
            .iter()
            .map(|&(y, x)| {
                let e = y - (slope * x + intercept);
                e * e
            })
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
