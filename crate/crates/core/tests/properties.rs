use std::sync::Arc;

use approx::assert_relative_eq;
use oltr_core::clicks::ClickModelParams;
use oltr_core::engine::{mgd_step, EngineConfig, EngineState};
use oltr_core::letor::{normalize_per_query, parse_letor, write_letor, Dataset, Document, Fold, QueryGroup};
use oltr_core::multileaving::{team_draft_multileave, Comparison, RankingSlate};
use oltr_core::ranking::{LinearModel, RankerModel, ReferenceSet, SelectionMethod, SimilarityModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn feature() -> impl Strategy<Value = f64> {
    -1e3..1e3f64
}

fn query_groups(dim: usize) -> impl Strategy<Value = Vec<QueryGroup<f64>>> {
    prop::collection::vec(
        prop::collection::vec((0u32..5, prop::collection::vec(feature(), dim)), 1..8),
        1..6,
    )
    .prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .map(|(qi, docs)| QueryGroup {
                query_id: format!("q{qi}"),
                documents: docs
                    .into_iter()
                    .enumerate()
                    .map(|(di, (relevance, features))| Document {
                        doc_id: format!("d{qi}x{di}"),
                        relevance,
                        features,
                    })
                    .collect(),
            })
            .collect()
    })
}

fn dataset() -> impl Strategy<Value = Dataset<f64>> {
    (1usize..6).prop_flat_map(query_groups).prop_map(|queries| {
        let fold = Fold {
            train: queries.iter().map(|q| q.query_id.clone()).collect(),
            ..Fold::default()
        };
        Dataset::new(queries, vec![fold], None).unwrap()
    })
}

fn single_query(dim: usize) -> impl Strategy<Value = QueryGroup<f64>> {
    prop::collection::vec(prop::collection::vec(feature(), dim), 2..20).prop_map(|docs| QueryGroup {
        query_id: "1".into(),
        documents: docs
            .into_iter()
            .enumerate()
            .map(|(i, features)| Document {
                doc_id: i.to_string(),
                relevance: (i % 5) as u32,
                features,
            })
            .collect(),
    })
}

fn similarity_model(dim: usize) -> impl Strategy<Value = RankerModel<f64>> {
    (1usize..6).prop_flat_map(move |m| {
        (
            prop::collection::vec(prop::collection::vec(0.1..10.0f64, dim), m),
            prop::collection::vec(-5.0..5.0f64, m),
        )
            .prop_map(|(refs, weights)| {
                let refs = Arc::new(ReferenceSet::new(refs, SelectionMethod::Uniform).unwrap());
                RankerModel::Similarity(SimilarityModel::new(weights, refs).unwrap())
            })
    })
}

proptest! {
    #[test]
    fn letor_round_trip(ds in dataset()) {
        let mut buf = Vec::new();
        write_letor(&ds, &mut buf).unwrap();
        let back: Dataset<f64> = parse_letor(buf.as_slice()).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn normalization_is_idempotent_and_bounded(ds in dataset()) {
        let once = normalize_per_query(&ds);
        for q in once.queries() {
            for d in &q.documents {
                prop_assert!(d.features.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
        prop_assert_eq!(normalize_per_query(&once), once);
    }

    #[test]
    fn positive_scaling_keeps_linear_ranking(
        weights in prop::collection::vec(-5.0..5.0f64, 4),
        qg in single_query(4),
        beta in prop_oneof![1e-6..1e-3f64, 0.1..10.0f64, 1e3..1e6f64],
    ) {
        let model = RankerModel::Linear(LinearModel { weights });
        prop_assert_eq!(model.scaled(beta).rank(&qg), model.rank(&qg));
    }

    #[test]
    fn positive_scaling_keeps_similarity_ranking(
        model in similarity_model(5),
        qg in single_query(5),
        beta in 1e-3..1e3f64,
    ) {
        prop_assert_eq!(model.scaled(beta).rank(&qg), model.rank(&qg));
    }

    #[test]
    fn scores_are_linear_in_weights(
        model in similarity_model(3),
        doc in prop::collection::vec(feature(), 3),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        other in prop::collection::vec(-5.0..5.0f64, 1..6),
    ) {
        let m = model.dimensionality();
        let w2: Vec<f64> = other.iter().cycle().take(m).copied().collect();
        let w1 = model.weights().to_vec();
        let mixed: Vec<f64> = w1.iter().zip(&w2).map(|(x, y)| a * x + b * y).collect();
        let lhs = model.with_weights(mixed).score(&doc).unwrap();
        let rhs = a * model.score(&doc).unwrap() + b * model.with_weights(w2).score(&doc).unwrap();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-6, max_relative = 1e-9);
    }

    #[test]
    fn team_draft_shows_distinct_documents(
        (n_docs, lists) in (1usize..30).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), 1..8))
        }),
        k in 1usize..15,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = team_draft_multileave(&RankingSlate::new(lists), k, &mut rng);
        let mut seen = out.displayed.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), out.displayed.len());
        prop_assert_eq!(out.displayed.len(), k.min(n_docs));
    }
}

fn step_fixture() -> Vec<QueryGroup<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    (0..3)
        .map(|qi| QueryGroup {
            query_id: qi.to_string(),
            documents: (0..15)
                .map(|di| {
                    let features: Vec<f64> = (0..4).map(|_| rand::Rng::random(&mut rng)).collect();
                    Document {
                        doc_id: format!("{qi}-{di}"),
                        relevance: (features[0] * 4.0).round() as u32,
                        features,
                    }
                })
                .collect(),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn candidates_sit_at_radius_and_updates_stay_within_step(
        seed in any::<u64>(),
        radius in 0.1..5.0f64,
        step_size in 0.001..0.5f64,
        team_draft in any::<bool>(),
    ) {
        let queries = step_fixture();
        let cfg = EngineConfig {
            radius,
            step_size,
            comparison: if team_draft { Comparison::TeamDraft } else { Comparison::Probabilistic { samples: 200, tau: 3.0 } },
            ..EngineConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = EngineState::new(RankerModel::Linear(LinearModel::zeros(4)), cfg.history_window);
        let click = ClickModelParams::navigational();
        for t in 0..30 {
            let before = state.current_best.weights().to_vec();
            let out = mgd_step(&mut state, &queries[t % 3], &cfg, &click, &mut rng);
            prop_assert_eq!(out.directions.len(), cfg.candidates);
            for u in &out.directions {
                let candidate: Vec<f64> = before.iter().zip(u).map(|(w, x)| w + radius * x).collect();
                let dist = norm(&candidate.iter().zip(&before).map(|(c, w)| c - w).collect::<Vec<_>>());
                prop_assert!((dist - radius).abs() <= 1e-9);
            }
            let after = state.current_best.weights();
            let moved = norm(&after.iter().zip(&before).map(|(a, b)| a - b).collect::<Vec<_>>());
            prop_assert!(moved <= step_size + 1e-12);
            match out.winners.len() {
                0 => prop_assert_eq!(after, &before[..]),
                1 => prop_assert!((moved - step_size).abs() <= 1e-12),
                _ => {}
            }
        }
    }
}
