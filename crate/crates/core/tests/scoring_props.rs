use std::collections::BTreeMap;

use paretoscore_core::scoring::{dense_ranks, rank_models, score_legacy, score_proposed};
use paretoscore_core::tradeoff::fit_curves;
use paretoscore_core::{
    fit_tradeoff, CurveFamily, Direction, LegacyConfig, MetricRegistry, MetricSpec, MetricVector, ModelRecord,
    WeightConfig,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn registry(order: [&str; 2]) -> MetricRegistry {
    let mut specs = vec![MetricSpec::new("hr", Direction::Maximize, true)];
    for id in order {
        let dir = if id == "pop" {
            Direction::Minimize
        } else {
            Direction::Maximize
        };
        specs.push(MetricSpec::new(id, dir, false));
    }
    MetricRegistry::new(specs).unwrap()
}

/// Models on `hr = s_fair * fair + 1` and `hr = s_pop * (-pop) + 0.5` (pop is
/// minimized, so its canonical value is `-pop`). Odd-indexed models are
/// pushed below by `drops`; even-indexed ones stay on both curves.
fn population(s_fair: f64, s_pop: f64, hrs: &[f64], drops: &[f64]) -> Vec<ModelRecord> {
    let mut records = Vec::new();
    for (i, &hr) in hrs.iter().enumerate() {
        let fair = (hr - 1.0) / s_fair;
        let pop = -((hr - 0.5) / s_pop);
        let drop = if i % 2 == 0 {
            0.0
        } else {
            drops.get(i).copied().unwrap_or(0.0)
        };
        let v = MetricVector::from_pairs([("hr", hr - drop), ("fair", fair), ("pop", pop)]).unwrap();
        records.push(ModelRecord::single(format!("m{i:03}"), v).unwrap());
    }
    records
}

fn distinct_hrs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..1000, 3..30).prop_map(|s| s.into_iter().map(|k| f64::from(k) / 1000.0).collect())
}

fn s_p_by_model(reports: &[paretoscore_core::ScoreReport]) -> BTreeMap<String, (f64, usize)> {
    reports
        .iter()
        .map(|r| (r.model_id.clone(), (r.s_p, r.rank_p)))
        .collect()
}

proptest! {
    #[test]
    fn on_curve_models_tie_at_half_weight(
        s_fair in -4.0f64..-0.1,
        s_pop in -4.0f64..-0.1,
        hrs in distinct_hrs(),
    ) {
        let reg = registry(["fair", "pop"]);
        let records = population(s_fair, s_pop, &hrs, &[]);
        let curves = fit_curves(&records, &reg, CurveFamily::Linear).unwrap();
        let weights = WeightConfig::uniform(&reg, 0.5).unwrap();
        let reports = rank_models(&records, &reg, &curves, &weights, None).unwrap();
        let first = reports[0].s_p;
        for r in &reports {
            prop_assert!((r.s_p - first).abs() <= TOL);
            prop_assert_eq!(r.rank_p, 1);
        }
    }

    #[test]
    fn score_rises_with_base_and_with_aux_on_descending_curve(
        base in 0.0f64..1.0,
        aux in 0.0f64..1.0,
        bump in 1e-6f64..0.5,
        w in 0.01f64..0.99,
    ) {
        let reg = MetricRegistry::all_maximize(["hr", "fair"], "hr").unwrap();
        let curve = fit_tradeoff("hr", "fair", &[(0.8, 0.1), (0.6, 0.2)], CurveFamily::Linear).unwrap();
        let curves = BTreeMap::from([("fair".to_string(), curve)]);
        let weights = WeightConfig::uniform(&reg, w).unwrap();
        let score = |b: f64, a: f64| {
            let v = MetricVector::from_pairs([("hr", b), ("fair", a)]).unwrap();
            score_proposed(&v, &curves, &weights).unwrap().s_p
        };
        prop_assert!(score(base + bump, aux) > score(base, aux));
        prop_assert!(score(base, aux + bump) > score(base, aux));
    }

    #[test]
    fn aux_rescaling_with_refit_keeps_scores_and_ranks(
        s_fair in -4.0f64..-0.1,
        s_pop in -4.0f64..-0.1,
        hrs in distinct_hrs(),
        drops in prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..0.3], 30),
        w in prop::sample::select(vec![0.3, 0.4, 0.5, 0.55]),
        p in prop::sample::select(vec![0.1, 3.0, 10.0]),
        q in prop::sample::select(vec![-1.0, 0.0, 2.0]),
        which in prop::sample::select(vec!["fair", "pop"]),
    ) {
        let reg = registry(["fair", "pop"]);
        let records = population(s_fair, s_pop, &hrs, &drops);
        let rescaled: Vec<ModelRecord> = records
            .iter()
            .map(|r| {
                let v = MetricVector::from_pairs(r.aggregate.iter().map(|(id, x)| {
                    (id.to_string(), if id == which { p * x + q } else { x })
                }))
                .unwrap();
                ModelRecord::single(r.model_id.clone(), v).unwrap()
            })
            .collect();
        let weights = WeightConfig::uniform(&reg, w).unwrap();
        let score = |recs: &[ModelRecord]| {
            let curves = fit_curves(recs, &reg, CurveFamily::Linear).unwrap();
            s_p_by_model(&rank_models(recs, &reg, &curves, &weights, None).unwrap())
        };
        let before = score(&records);
        let after = score(&rescaled);
        for (id, (s, rank)) in &before {
            let (s2, rank2) = after[id];
            prop_assert!((s - s2).abs() <= TOL, "{id}: {s} vs {s2}");
            prop_assert_eq!(*rank, rank2);
        }
    }

    #[test]
    fn legacy_splits_what_the_front_calls_equal(
        hr_hi in 0.5f64..0.95,
        gap in 0.05f64..0.4,
        slope in -3.0f64..-1.2,
    ) {
        // equal legacy weights on identical ranges tie exactly only on slope -1
        let reg = MetricRegistry::all_maximize(["hr", "fair"], "hr").unwrap();
        let hr_lo = hr_hi - gap;
        let fair = |hr: f64| (hr - 1.0) / slope;
        let a = MetricVector::from_pairs([("hr", hr_hi), ("fair", fair(hr_hi))]).unwrap();
        let b = MetricVector::from_pairs([("hr", hr_lo), ("fair", fair(hr_lo))]).unwrap();
        let legacy = LegacyConfig {
            category_weights: BTreeMap::from([("hr".into(), 0.5), ("fair".into(), 0.5)]),
            baseline_ref: MetricVector::from_pairs([("hr", 0.0), ("fair", 0.0)]).unwrap(),
            best_ref: MetricVector::from_pairs([("hr", 1.0), ("fair", 1.0)]).unwrap(),
            base_threshold: 0.0,
        };
        let so = [
            score_legacy(&a, &legacy, &reg).unwrap().value,
            score_legacy(&b, &legacy, &reg).unwrap().value,
        ];
        prop_assert_eq!(dense_ranks(&so), vec![1, 2]);

        let curve = fit_tradeoff("hr", "fair", &[(hr_hi, fair(hr_hi)), (hr_lo, fair(hr_lo))], CurveFamily::Linear).unwrap();
        let curves = BTreeMap::from([("fair".to_string(), curve)]);
        let weights = WeightConfig::uniform(&reg, 0.5).unwrap();
        let sp = [
            score_proposed(&a, &curves, &weights).unwrap().s_p,
            score_proposed(&b, &curves, &weights).unwrap().s_p,
        ];
        prop_assert!((sp[0] - sp[1]).abs() <= TOL);
        prop_assert_eq!(dense_ranks(&sp), vec![1, 1]);
    }

    #[test]
    fn aux_enumeration_order_is_irrelevant(
        s_fair in -4.0f64..-0.1,
        s_pop in -4.0f64..-0.1,
        hrs in distinct_hrs(),
        drops in prop::collection::vec(0.0f64..0.3, 30),
        w_fair in 0.05f64..0.95,
        w_pop in 0.05f64..0.95,
    ) {
        let records = population(s_fair, s_pop, &hrs, &drops);
        let run = |order: [&str; 2]| {
            let reg = registry(order);
            let weights = WeightConfig {
                base_id: "hr".into(),
                weights: order
                    .iter()
                    .map(|&id| (id.to_string(), if id == "fair" { w_fair } else { w_pop }))
                    .collect(),
            };
            let curves = fit_curves(&records, &reg, CurveFamily::Linear).unwrap();
            rank_models(&records, &reg, &curves, &weights, None).unwrap()
        };
        prop_assert_eq!(run(["fair", "pop"]), run(["pop", "fair"]));
    }
}
