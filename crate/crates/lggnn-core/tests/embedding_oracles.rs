//! Monte-Carlo and matrix-power oracles for the embedding pipeline.
//!
//! The embeddings admit a closed form over empirical moments: with identity
//! weights, `l_i^k = 1/sqrt(n-1) * sum_l (sum_q C(k,q) What^(q+1)_{il}) Z_l`,
//! and the conditional expectation of `q_ij^(k)` given the graph equals the
//! empirical moment `What^(k)_{ij}`. These tests pin both facts numerically.

use lggnn_core::embed::{
    embed, embed_with_features, expected_dotproduct_oracle, init_features, moment_estimates,
};
use lggnn_core::graphon::{sample_graph, GraphonModel};
use lggnn_core::linalg::dot;
use lggnn_core::moments::empirical_moments;
use lggnn_core::rng::PairIndexer;

fn binom(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for t in 0..k {
        out = out * (n - t) as f64 / (t + 1) as f64;
    }
    out
}

#[test]
fn embeddings_match_binomial_expansion_over_matrix_powers() {
    let model = GraphonModel::ssbm(3, 0.8, 0.3).unwrap();
    for trial in 0..50u64 {
        let n = 8 + (trial as usize % 18); // up to 25
        let g = sample_graph(&model, n, 1.0, 500 + trial).unwrap();
        let d = 7;
        let z = init_features(n, d, 900 + trial).unwrap();
        let table = embed_with_features(&g, 4, &z, d, 900 + trial).unwrap();
        let emp = empirical_moments(&g, 5).unwrap();
        let scale = 1.0 / ((n - 1) as f64).sqrt();
        for k in 0..=4usize {
            for i in 0..n {
                // Coefficient of Z_l: sum_q C(k, q) What^(q+1)_{il}, where
                // What^(1) is the adjacency indicator itself.
                let mut want = vec![0.0; d];
                for l in 0..n {
                    let mut coef = 0.0;
                    for q in 0..=k {
                        let moment = if q == 0 {
                            f64::from(g.has_edge(i, l))
                        } else {
                            emp.get(q + 1, i, l)
                        };
                        coef += binom(k, q) * moment;
                    }
                    for (w, zv) in want.iter_mut().zip(&z[l * d..(l + 1) * d]) {
                        *w += coef * zv;
                    }
                }
                let got = table.vector(k, i);
                let norm = want.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                for (a, b) in got.iter().zip(&want) {
                    assert!(
                        (scale * b - a).abs() <= 1e-9 * norm,
                        "trial {trial} layer {k} vertex {i}"
                    );
                }
            }
        }
    }
}

#[test]
fn moment_estimators_are_unbiased_for_empirical_moments() {
    // Fixed small graph; average q over feature seeds and compare with
    // (A^k)_ij / (n-1)^(k-1). Every pair must land within 4 standard errors;
    // the shared feature draws correlate pair deviations, so the aggregate
    // sanity check uses the median |z| rather than a tail count.
    let model = GraphonModel::ssbm(3, 0.8, 0.2).unwrap();
    let g = sample_graph(&model, 20, 1.0, 424).unwrap();
    let n = g.n();
    let runs = 500usize;
    let layers = 2usize;
    let emp = empirical_moments(&g, layers + 2).unwrap();
    let indexer = PairIndexer::new(n);
    let orders = layers + 1;
    let mut sums = vec![vec![0.0f64; indexer.len()]; orders];
    let mut sq_sums = vec![vec![0.0f64; indexer.len()]; orders];
    for run in 0..runs {
        let emb = embed(&g, layers, 64, 7000 + run as u64).unwrap();
        let est = moment_estimates(&emb);
        for m in 0..orders {
            for (p, &v) in est.order_slice(m + 2).iter().enumerate() {
                sums[m][p] += v;
                sq_sums[m][p] += v * v;
            }
        }
    }
    let mut z_scores = Vec::new();
    for m in 0..orders {
        for (i, j) in indexer.iter() {
            let p = indexer.index(i, j);
            let mean = sums[m][p] / runs as f64;
            let var = (sq_sums[m][p] / runs as f64 - mean * mean).max(0.0);
            let se = (var / runs as f64).sqrt().max(1e-12);
            let want = emp.get(m + 2, i, j);
            let dev = (mean - want).abs();
            assert!(
                dev <= 4.0 * se + 1e-9,
                "order {} pair ({i},{j}): mean {mean:.5} want {want:.5} se {se:.2e}",
                m + 2
            );
            z_scores.push(dev / se);
        }
    }
    // The shared drift component can push every pair's z together; 2.0
    // covers its 95% band while still catching systematic bias.
    z_scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = z_scores[z_scores.len() / 2];
    assert!(median <= 2.0, "median |z| = {median}");
}

#[test]
fn dot_products_are_unbiased_for_expected_dot_oracle() {
    let model = GraphonModel::ssbm(2, 0.7, 0.3).unwrap();
    let g = sample_graph(&model, 15, 1.0, 31).unwrap();
    let n = g.n();
    let runs = 500usize;
    let (k1, k2) = (1usize, 1usize);
    let oracle = expected_dotproduct_oracle(&g, k1, k2).unwrap();
    let indexer = PairIndexer::new(n);
    let mut sums = vec![0.0f64; indexer.len()];
    let mut sq_sums = vec![0.0f64; indexer.len()];
    for run in 0..runs {
        let emb = embed(&g, k1.max(k2), 48, 40_000 + run as u64).unwrap();
        for (i, j) in indexer.iter() {
            let v = dot(emb.vector(k1, i), emb.vector(k2, j));
            let p = indexer.index(i, j);
            sums[p] += v;
            sq_sums[p] += v * v;
        }
    }
    for (i, j) in indexer.iter() {
        let p = indexer.index(i, j);
        let mean = sums[p] / runs as f64;
        let var = (sq_sums[p] / runs as f64 - mean * mean).max(0.0);
        let band = 4.0 / (runs as f64).sqrt() * var.sqrt().max(1e-9);
        assert!(
            (mean - oracle[p]).abs() <= band + 1e-9,
            "pair ({i},{j}): mean {mean:.5} oracle {:.5}",
            oracle[p]
        );
    }
}
