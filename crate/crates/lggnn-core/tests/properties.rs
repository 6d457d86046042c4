//! Property-based invariants.

use lggnn_core::embed::{embed, moment_estimates};
use lggnn_core::eval::{auc_roc, in_sample_split, probability_ratio_at_k};
use lggnn_core::graphon::{sample_graph, GraphonModel};
use lggnn_core::regress::{SearchSpace, SpaceMode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graphon_eval_is_symmetric(
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
        x in 0.0f64..=1.0,
        y in 0.0f64..=1.0,
        k in 1usize..=8,
    ) {
        let model = GraphonModel::ssbm(k, p, q).unwrap();
        prop_assert_eq!(model.eval(x, y).unwrap(), model.eval(y, x).unwrap());
    }

    #[test]
    fn auc_is_invariant_under_increasing_transforms(
        scores in prop::collection::vec(-10.0f64..10.0, 4..40),
        flips in prop::collection::vec(any::<bool>(), 4..40),
    ) {
        let n = scores.len().min(flips.len());
        let scores = &scores[..n];
        let mut labels = flips[..n].to_vec();
        // Force both classes.
        labels[0] = true;
        labels[1] = false;
        let base = auc_roc(scores, &labels).unwrap();
        let transformed: Vec<f64> = scores.iter().map(|s| (0.3 * s).exp() + 5.0).collect();
        let mapped = auc_roc(&transformed, &labels).unwrap();
        prop_assert!((base - mapped).abs() < 1e-12);
    }

    #[test]
    fn box_projection_is_feasible_and_idempotent(
        raw in prop::collection::vec(-100.0f64..100.0, 1..6),
        bounds in prop::collection::vec(0.1f64..10.0, 1..6),
    ) {
        let dim = raw.len().min(bounds.len());
        let space = SearchSpace::box_bounds(&bounds[..dim], 1.0).unwrap();
        let mut beta = raw[..dim].to_vec();
        space.project(&mut beta);
        prop_assert!(space.contains(&beta, 1e-12));
        let mut again = beta.clone();
        space.project(&mut again);
        prop_assert_eq!(beta, again);
    }

    #[test]
    fn l1_projection_is_feasible_and_idempotent(
        raw in prop::collection::vec(-100.0f64..100.0, 1..6),
        radius in 0.1f64..10.0,
    ) {
        let space = SearchSpace::l1_ball(raw.len(), radius).unwrap();
        let mut beta = raw.clone();
        space.project(&mut beta);
        prop_assert!(space.contains(&beta, 1e-9));
        let SpaceMode::L1Ball { .. } = space.mode() else { panic!() };
        let mut again = beta.clone();
        space.project(&mut again);
        for (a, b) in beta.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_ratio_ignores_tie_breaks_between_equal_probs(
        k in 1usize..=4,
    ) {
        // Two pairs share the same true probability; swapping their ranks
        // cannot change the ratio.
        let probs = [0.8, 0.5, 0.5, 0.1];
        let ranking_a = [4.0, 3.0, 2.0, 1.0];
        let ranking_b = [4.0, 2.0, 3.0, 1.0];
        let ra = probability_ratio_at_k(&ranking_a, &probs, k).unwrap();
        let rb = probability_ratio_at_k(&ranking_b, &probs, k).unwrap();
        prop_assert!((ra - rb).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn in_sample_masks_partition_their_universes(
        seed in 0u64..1000,
        p in 0.05f64..0.5,
    ) {
        let model = GraphonModel::ssbm(2, 0.8, 0.3).unwrap();
        let g = sample_graph(&model, 30, 1.0, seed).unwrap();
        prop_assume!(g.edge_count() > 0);
        let split = in_sample_split(&g, p, seed ^ 0x5eed).unwrap();
        let total = split.train_pos.len() + split.val_pos.len() + split.test_pos.len();
        prop_assert_eq!(total, g.edge_count());
        // Negative masks are pairwise disjoint.
        let mut all_neg: Vec<(u32, u32)> = split
            .train_neg
            .iter()
            .chain(&split.val_neg)
            .chain(&split.test_neg)
            .copied()
            .collect();
        let before = all_neg.len();
        all_neg.sort_unstable();
        all_neg.dedup();
        prop_assert_eq!(before, all_neg.len());
    }

    #[test]
    fn binomial_recursion_inverts_on_random_graphs(seed in 0u64..500) {
        let model = GraphonModel::ssbm(2, 0.9, 0.2).unwrap();
        let g = sample_graph(&model, 12, 1.0, seed).unwrap();
        let emb = embed(&g, 2, 6, seed + 1).unwrap();
        let est = moment_estimates(&emb);
        // q^(2) must reproduce the symmetrized layer-0 product.
        for i in 0..12 {
            for j in (i + 1)..12 {
                let d0 = lggnn_core::linalg::dot(emb.vector(0, i), emb.vector(0, j));
                prop_assert!((est.get(2, i, j) - d0).abs() < 1e-12);
            }
        }
    }
}
