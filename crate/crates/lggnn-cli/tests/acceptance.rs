//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them) and asserting its
//! stated tolerances and runtime budget.

use lggnn_cli::config::*;
use lggnn_cli::cora::{default_cora_path, run_cora, CoraConfig};
use lggnn_cli::runner::{qhat2_pair_variance, run_experiment, spread_report};
use lggnn_core::embed::{
    embed, embed_with_features, init_features, moment_estimates, moment_estimates_for_pairs,
};
use lggnn_core::eval::{
    auc_roc, cross_entropy, e_rank_check, hits_at_k, probability_ratio_at_k,
};
use lggnn_core::graphon::{
    beta_star, graphon_moment, sample_graph, sbm_spectrum, GraphonModel, LatentPoint, Latents,
    SampledGraph,
};
use lggnn_core::linalg::{cross_dots, dot};
use lggnn_core::moments::empirical_moments;
use lggnn_core::regress::{
    accumulate_stats_labeled, fit_box_constrained, fit_pls_design, kkt_report, predict_pairs,
    SearchSpace, SufficientStats,
};
use lggnn_core::rng::{domain, PairIndexer, SeedStreams};
use rand::Rng;
use std::time::{Duration, Instant};

fn finish(criterion: u32, budget: Duration, start: Instant, detail: &str) {
    let elapsed = start.elapsed();
    println!("criterion {criterion}: PASS — {detail} (elapsed {elapsed:?})");
    assert!(
        elapsed < budget,
        "criterion {criterion}: FAIL — runtime {elapsed:?} exceeded budget {budget:?}"
    );
}

macro_rules! check {
    ($criterion:expr, $cond:expr, $($msg:tt)+) => {
        assert!($cond, "criterion {}: FAIL — {}", $criterion, format!($($msg)+));
    };
}

#[test]
fn criterion_01_identifiability_second_moments() {
    let start = Instant::now();
    let model =
        GraphonModel::sbm_equal(vec![vec![0.5, 0.25], vec![0.25, 0.75]]).unwrap();
    let unit = LatentPoint::Unit;
    let m11 = graphon_moment(&model, 2, unit(0.1), unit(0.3), 1.0, 0, 0).unwrap().value;
    let m12 = graphon_moment(&model, 2, unit(0.1), unit(0.9), 1.0, 0, 0).unwrap().value;
    let m22 = graphon_moment(&model, 2, unit(0.7), unit(0.9), 1.0, 0, 0).unwrap().value;
    check!(1, (m11 - 5.0 / 32.0).abs() < 1e-12, "(1,1) moment {m11} != 5/32");
    check!(1, (m12 - 5.0 / 32.0).abs() < 1e-12, "(1,2) moment {m12} != 5/32");
    check!(1, (m22 - 5.0 / 16.0).abs() < 1e-12, "(2,2) moment {m22} != 5/16");
    check!(1, (m11 - m12).abs() < 1e-12, "pair types (1,1) and (1,2) must coincide");
    finish(1, Duration::from_secs(1), start, "second moments 5/32, 5/32, 5/16 exact");
}

#[test]
fn criterion_02_beta_star_identity() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
    let spec = sbm_spectrum(&model).unwrap();
    let beta = beta_star(&spec).unwrap();
    check!(2, (beta[0] - 40.0 / 3.0).abs() < 1e-8, "beta_1 {} != 40/3", beta[0]);
    check!(2, (beta[1] + 100.0 / 3.0).abs() < 1e-8, "beta_2 {} != -100/3", beta[1]);
    // beta_1 W^(2) + beta_2 W^(3) reproduces both block values.
    for (ci, cj, want) in [(0usize, 0usize, 0.8), (0, 1, 0.2)] {
        let recon = beta[0] * spec.moment(2, ci, cj) + beta[1] * spec.moment(3, ci, cj);
        check!(2, (recon - want).abs() < 1e-8, "block ({ci},{cj}) {recon} != {want}");
    }
    finish(2, Duration::from_secs(1), start, "beta* = (40/3, -100/3), kernel reconstructed");
}

#[test]
fn criterion_03_embedding_expansion_and_estimator_means() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(3, 0.8, 0.3).unwrap();

    // Part 1: closed-form expansion over matrix powers on 50 random graphs.
    let binom = |n: usize, k: usize| -> f64 {
        let mut out = 1.0;
        for t in 0..k {
            out = out * (n - t) as f64 / (t + 1) as f64;
        }
        out
    };
    for trial in 0..50u64 {
        let n = 8 + (trial as usize % 18);
        let g = sample_graph(&model, n, 1.0, 3000 + trial).unwrap();
        let d = 6;
        let z = init_features(n, d, 5000 + trial).unwrap();
        let table = embed_with_features(&g, 4, &z, d, 5000 + trial).unwrap();
        let emp = empirical_moments(&g, 5).unwrap();
        let scale = 1.0 / ((n - 1) as f64).sqrt();
        for k in 0..=4usize {
            for i in 0..n {
                let mut want = vec![0.0; d];
                for l in 0..n {
                    let mut coef = 0.0;
                    for q in 0..=k {
                        let m = if q == 0 {
                            f64::from(g.has_edge(i, l))
                        } else {
                            emp.get(q + 1, i, l)
                        };
                        coef += binom(k, q) * m;
                    }
                    for (w, zv) in want.iter_mut().zip(&z[l * d..(l + 1) * d]) {
                        *w += coef * zv;
                    }
                }
                let norm = want.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                for (got, w) in table.vector(k, i).iter().zip(&want) {
                    check!(
                        3,
                        (scale * w - got).abs() <= 1e-9 * norm,
                        "expansion mismatch at trial {trial}, layer {k}, vertex {i}"
                    );
                }
            }
        }
    }

    // Part 2: mean of q over 500 feature seeds vs the matrix-power oracle.
    let g = sample_graph(&model, 20, 1.0, 777).unwrap();
    let n = g.n();
    let layers = 2usize;
    let runs = 500usize;
    let emp = empirical_moments(&g, layers + 2).unwrap();
    let indexer = PairIndexer::new(n);
    let orders = layers + 1;
    let mut sums = vec![vec![0.0f64; indexer.len()]; orders];
    let mut sq_sums = vec![vec![0.0f64; indexer.len()]; orders];
    for run in 0..runs {
        let emb = embed(&g, layers, 64, 20_000 + run as u64).unwrap();
        let est = moment_estimates(&emb);
        for m in 0..orders {
            for (p, &v) in est.order_slice(m + 2).iter().enumerate() {
                sums[m][p] += v;
                sq_sums[m][p] += v * v;
            }
        }
    }
    for m in 0..orders {
        for (i, j) in indexer.iter() {
            let p = indexer.index(i, j);
            let mean = sums[m][p] / runs as f64;
            let var = (sq_sums[m][p] / runs as f64 - mean * mean).max(0.0);
            let se = (var / runs as f64).sqrt().max(1e-12);
            let want = emp.get(m + 2, i, j);
            check!(
                3,
                (mean - want).abs() <= 4.0 * se + 1e-9,
                "order {} pair ({i},{j}): mean {mean:.5} vs {want:.5} (se {se:.2e})",
                m + 2
            );
        }
    }

    // Raw dot products against the conditional-expectation oracle.
    let oracle = lggnn_core::embed::expected_dotproduct_oracle(&g, 1, 1).unwrap();
    let mut dot_sums = vec![0.0f64; indexer.len()];
    let mut dot_sq = vec![0.0f64; indexer.len()];
    for run in 0..runs {
        let emb = embed(&g, 1, 64, 60_000 + run as u64).unwrap();
        for (i, j) in indexer.iter() {
            let v = dot(emb.vector(1, i), emb.vector(1, j));
            let p = indexer.index(i, j);
            dot_sums[p] += v;
            dot_sq[p] += v * v;
        }
    }
    for (i, j) in indexer.iter() {
        let p = indexer.index(i, j);
        let mean = dot_sums[p] / runs as f64;
        let var = (dot_sq[p] / runs as f64 - mean * mean).max(0.0);
        let se = (var / runs as f64).sqrt().max(1e-12);
        check!(
            3,
            (mean - oracle[p]).abs() <= 4.0 * se + 1e-9,
            "dot-product mean at ({i},{j}): {mean:.5} vs oracle {:.5}",
            oracle[p]
        );
    }
    finish(
        3,
        Duration::from_secs(120),
        start,
        "closed-form expansion exact on 50 graphs; estimator and dot-product means within 4 SE",
    );
}

fn max_q2_deviation(model: &GraphonModel, n: usize, seed: u64) -> f64 {
    let g = sample_graph(model, n, 1.0, seed).unwrap();
    let emb = embed(&g, 0, n, seed).unwrap();
    let spec = sbm_spectrum(model).unwrap();
    let Latents::Unit(xs) = g.latents() else { panic!("unit latents expected") };
    let comm: Vec<usize> = xs.iter().map(|&x| model.community_of(x).unwrap()).collect();
    let mut dots = vec![0.0; n * n];
    cross_dots(emb.layer(0), emb.layer(0), n, n, &mut dots);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let q2 = 0.5 * (dots[i * n + j] + dots[j * n + i]);
            worst = worst.max((q2 - spec.moment(2, comm[i], comm[j])).abs());
        }
    }
    worst
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[test]
fn criterion_04_concentration_scaling() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
    let dev400 = median((1..=10u64).map(|s| max_q2_deviation(&model, 400, s)).collect());
    let dev1600 = median((1..=10u64).map(|s| max_q2_deviation(&model, 1600, s)).collect());
    let ratio = dev400 / dev1600;
    check!(
        4,
        ratio >= 1.5,
        "max-pair deviation ratio {ratio:.3} < 1.5 (400: {dev400:.5}, 1600: {dev1600:.5})"
    );
    finish(
        4,
        Duration::from_secs(300),
        start,
        &format!("median max |q2 - W2| shrinks {ratio:.2}x from n=400 to n=1600"),
    );
}

/// Held-out test risk of the Algorithm-2 fit against true probabilities:
/// fit on the kept-vertex subgraph, evaluate on fresh-vertex pairs with
/// full-graph embeddings.
fn consistency_rt(model: &GraphonModel, n: usize, seed: u64) -> f64 {
    let g = sample_graph(model, n, 1.0, seed).unwrap();
    let n_fit = n - n / 10;
    let fit_edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(i, j)| (i as usize) < n_fit && (j as usize) < n_fit)
        .collect();
    let sub = SampledGraph::from_edges(n_fit, fit_edges, 1.0).unwrap();
    let emb_fit = embed(&sub, 1, n_fit, seed).unwrap();
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n_fit {
        for j in (i + 1)..n_fit {
            pairs.push((i as u32, j as u32));
            labels.push(f64::from(sub.has_edge(i, j)));
        }
    }
    let pm = moment_estimates_for_pairs(&emb_fit, &pairs, true);
    let stats = accumulate_stats_labeled(&pm, &labels).unwrap();
    let space = SearchSpace::box_bounds(&[15.0, 40.0], 1.0).unwrap();
    let fit = fit_box_constrained(&stats, &space, 1e-8, 20_000).unwrap();

    let emb_full = embed(&g, 1, n, seed).unwrap();
    let mut test_pairs = Vec::new();
    for i in n_fit..n {
        for j in (i + 1)..n {
            test_pairs.push((i as u32, j as u32));
        }
    }
    let pm_test = moment_estimates_for_pairs(&emb_full, &test_pairs, true);
    let scores = predict_pairs(&fit, &pm_test).unwrap();
    let mut sse = 0.0;
    for (&(i, j), &p) in test_pairs.iter().zip(&scores) {
        let truth = g.true_prob(model, i as usize, j as usize).unwrap();
        sse += (p - truth) * (p - truth);
    }
    sse / test_pairs.len() as f64
}

#[test]
fn criterion_05_regression_consistency() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
    let rt400: Vec<f64> = (1..=10u64).map(|s| consistency_rt(&model, 400, s)).collect();
    let rt1600: Vec<f64> = (1..=10u64).map(|s| consistency_rt(&model, 1600, s)).collect();
    let wins = rt400.iter().zip(&rt1600).filter(|(a, b)| b < a).count();
    let med1600 = median(rt1600.clone());
    check!(5, med1600 < 0.01, "median R_T at n=1600 is {med1600:.5}, not < 0.01");
    check!(5, wins >= 8, "R_T decreased in only {wins}/10 seeds");
    finish(
        5,
        Duration::from_secs(600),
        start,
        &format!("median R_T(1600) = {med1600:.4}, decreased in {wins}/10 seeds"),
    );
}

#[test]
fn criterion_06_perfect_ranking_event() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
    let spec = sbm_spectrum(&model).unwrap();
    let mu1 = spec.eigenvalues()[0];
    let (n, d) = (600usize, 600usize);
    let mut hits = 0usize;
    let mut margins = Vec::new();
    for seed in 1..=10u64 {
        let g = sample_graph(&model, n, 1.0, seed).unwrap();
        let emb = embed(&g, 1, d, seed).unwrap();
        let mut rng = SeedStreams::new(seed).stream(domain::SUBSAMPLE);
        let mut held = std::collections::BTreeSet::new();
        while held.len() < 2000 {
            let i = rng.random_range(0..n as u32);
            let j = rng.random_range(0..n as u32);
            if i != j {
                held.insert((i.min(j), i.max(j)));
            }
        }
        let mut train_pairs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !held.contains(&(i as u32, j as u32)) {
                    train_pairs.push((i as u32, j as u32));
                    labels.push(f64::from(g.has_edge(i, j)));
                }
            }
        }
        let pm = moment_estimates_for_pairs(&emb, &train_pairs, true);
        let stats = accumulate_stats_labeled(&pm, &labels).unwrap();
        let space = SearchSpace::l1_from_spectrum(2, mu1, 1.0).unwrap();
        let fit = fit_box_constrained(&stats, &space, 1e-8, 20_000).unwrap();
        let held_vec: Vec<(u32, u32)> = held.into_iter().collect();
        let pm_test = moment_estimates_for_pairs(&emb, &held_vec, true);
        let scores = predict_pairs(&fit, &pm_test).unwrap();
        let classes: Vec<bool> = held_vec
            .iter()
            .map(|&(i, j)| {
                g.community(&model, i as usize).unwrap()
                    == g.community(&model, j as usize).unwrap()
            })
            .collect();
        let mut min_in = f64::INFINITY;
        let mut max_out = f64::NEG_INFINITY;
        for (&s, &inside) in scores.iter().zip(&classes) {
            if inside {
                min_in = min_in.min(s);
            } else {
                max_out = max_out.max(s);
            }
        }
        margins.push(min_in - max_out);
        if e_rank_check(&scores, &classes).unwrap() {
            hits += 1;
        }
    }
    let elapsed = start.elapsed();
    if hits >= 8 {
        println!("criterion 6: PASS — E_rank held in {hits}/10 seeds (elapsed {elapsed:?})");
    } else {
        println!(
            "criterion 6: FAIL — E_rank held in {hits}/10 seeds; margins {:?} (elapsed {elapsed:?})",
            margins.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>()
        );
    }
    assert!(elapsed < Duration::from_secs(300), "criterion 6 runtime budget exceeded");
    // Known-red at this n: the fitted beta sits on the predicted population
    // solution and the in/out median separation matches k*beta_1*mu_2^2, but
    // the per-pair graph-noise floor makes the min/max event unreachable at
    // n = 600 (see the decisions ledger for the measurements).
    check!(6, hits >= 8, "E_rank held in only {hits}/10 seeds");
}

#[test]
fn criterion_07_gcn_collapse_vs_lggnn() {
    let start = Instant::now();
    let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
    let seeds: Vec<u64> = (1..=10).collect();
    let s400 = spread_report(&model, 400, 1.0, 2, 64, &seeds).unwrap();
    let s1600 = spread_report(&model, 1600, 1.0, 2, 64, &seeds).unwrap();
    let ratio = s400.aggregation_spread[0] / s1600.aggregation_spread[0];
    check!(
        7,
        (1.4..=2.8).contains(&ratio),
        "layer-1 spread ratio {ratio:.3} outside [1.4, 2.8]"
    );
    let v400 = qhat2_pair_variance(&model, 400, 1.0, 400, 3, 20_000).unwrap();
    let v1600 = qhat2_pair_variance(&model, 1600, 1.0, 1600, 3, 20_000).unwrap();
    check!(7, v400 > 1e-4, "q2 cross-pair variance {v400:.2e} at n=400 not > 1e-4");
    check!(7, v1600 > 1e-4, "q2 cross-pair variance {v1600:.2e} at n=1600 not > 1e-4");
    finish(
        7,
        Duration::from_secs(300),
        start,
        &format!(
            "GCN layer-1 spread ratio {ratio:.2} (predicted 2.0); q2 variance {v400:.1e}/{v1600:.1e}"
        ),
    );
}

fn table_config(name: &str, preset: &str, split: SplitProtocol, dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model: ModelRef::Preset(preset.into()),
        n: 1000,
        rho_mode: RhoMode::One,
        layers: 2,
        d_policy: DimPolicy::Fixed(1024),
        method: MethodKind::LggnnBox,
        split,
        holdout_p: 0.2,
        metric_ks: vec![100, 500],
        seeds: vec![1, 2, 3],
        output_dir: dir.display().to_string(),
        bounds: BoundsPolicy::Default,
        pls_components: None,
        solver_tol: 1e-8,
        solver_max_iter: 20_000,
        store_scores: false,
    }
}

#[test]
fn criterion_08_table_reproduction() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    let sbm10 = run_experiment(&table_config(
        "acc8_sbm10",
        "sbm10",
        SplitProtocol::OutSample,
        dir.path(),
    ))
    .unwrap();
    let pr100 = sbm10.prob_ratio.iter().find(|(k, _)| *k == 100).unwrap().1.mean;
    let auc = sbm10.auc.unwrap().mean;
    check!(8, (0.83..=0.94).contains(&pr100), "sbm10 P-Ratio@100 {pr100:.4} outside [0.83, 0.94]");
    check!(8, (0.70..=0.77).contains(&auc), "sbm10 AUC {auc:.4} outside [0.70, 0.77]");

    let geo = run_experiment(&table_config(
        "acc8_geometric",
        "geometric_11_02",
        SplitProtocol::OutSample,
        dir.path(),
    ))
    .unwrap();
    let geo_auc = geo.auc.unwrap().mean;
    check!(8, (0.86..=0.96).contains(&geo_auc), "geometric AUC {geo_auc:.4} outside [0.86, 0.96]");

    let ssbm = run_experiment(&table_config(
        "acc8_ssbm",
        "ssbm_6_80_20",
        SplitProtocol::InSample,
        dir.path(),
    ))
    .unwrap();
    let ssbm_pr = ssbm.prob_ratio.iter().find(|(k, _)| *k == 100).unwrap().1.mean;
    check!(8, (ssbm_pr - 1.0).abs() < 1e-12, "ssbm P-Ratio@100 {ssbm_pr} != 1.000");

    finish(
        8,
        Duration::from_secs(900),
        start,
        &format!(
            "sbm10 PR@100 {pr100:.3} AUC {auc:.3}; geometric AUC {geo_auc:.3}; ssbm PR@100 = 1.000"
        ),
    );
}

#[test]
fn criterion_09_cora_topology() {
    let start = Instant::now();
    let path = default_cora_path();
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = CoraConfig::new(path.clone(), dir.path());
    cfg.seeds = vec![1, 2, 3];
    let rows = match run_cora(&cfg) {
        Ok(rows) => rows,
        Err(err) => {
            println!("criterion 9: FAIL — {err} (elapsed {:?})", start.elapsed());
            panic!(
                "criterion 9: FAIL — Cora edge list unavailable in this environment: {err}"
            );
        }
    };
    let mut detail = String::new();
    for row in &rows {
        let hits50 = row.hits.iter().find(|(k, _)| *k == 50).unwrap().1.mean;
        let band = if row.method == "lggnn_box" { 0.50..=0.63 } else { 0.53..=0.65 };
        check!(
            9,
            band.contains(&hits50),
            "{} Hits@50 {hits50:.4} outside {band:?}",
            row.method
        );
        detail.push_str(&format!("{} Hits@50 {hits50:.3}; ", row.method));
    }
    finish(9, Duration::from_secs(300), start, &detail);
}

#[test]
fn criterion_10_solver_and_metric_units() {
    let start = Instant::now();

    // KKT certificates on box fits: one interior, one bound-active.
    let mut interior = SufficientStats::new(2);
    interior.add_pair(&[1.0, 0.0], 0.8);
    interior.add_pair(&[0.0, 1.0], -0.4);
    interior.add_pair(&[1.0, 1.0], 0.4);
    let space = SearchSpace::box_bounds(&[2.0, 2.0], 1.0).unwrap();
    let tol = 1e-10;
    let fit = fit_box_constrained(&interior, &space, tol, 100_000).unwrap();
    let report = kkt_report(&interior, &space, &fit.beta).unwrap();
    check!(
        10,
        report.max_interior_grad <= 10.0 * tol,
        "interior gradient {:.2e} above 10*tol",
        report.max_interior_grad
    );

    let mut active = SufficientStats::new(1);
    active.add_pair(&[1.0], 5.0);
    let clamp_space = SearchSpace::box_bounds(&[1.0], 1.0).unwrap();
    let fit = fit_box_constrained(&active, &clamp_space, tol, 100_000).unwrap();
    check!(10, (fit.beta[0] - 1.0).abs() < 1e-9, "clamped fit {} != 1", fit.beta[0]);
    let report = kkt_report(&active, &clamp_space, &fit.beta).unwrap();
    check!(10, report.active_count == 1, "expected one active bound");
    check!(
        10,
        report.max_active_violation <= 10.0 * tol,
        "active-bound gradient sign violation {:.2e}",
        report.max_active_violation
    );

    // PLS with full components equals OLS on a full-rank design.
    let x = vec![
        1.0, 0.2, -0.5, 0.4, 1.1, 0.3, -0.7, 0.5, 0.9, 0.2, -0.3, 1.2, 1.5, 0.8, 0.1, -0.2,
        0.9, -0.8,
    ];
    let y: Vec<f64> = (0..6)
        .map(|r| {
            let row = &x[r * 3..(r + 1) * 3];
            1.3 * row[0] - 0.7 * row[1] + 0.2 * row[2] - 0.1
        })
        .collect();
    let pls = fit_pls_design(&x, &y, 6, 3, 3).unwrap();
    for (got, want) in pls.beta.iter().zip(&[1.3, -0.7, 0.2]) {
        check!(10, (got - want).abs() < 1e-8, "PLS-full coefficient {got} != OLS {want}");
    }

    // Metric unit examples.
    let auc = auc_roc(&[0.9, 0.4, 0.6], &[true, false, true]).unwrap();
    check!(10, auc == 1.0, "AUC unit example returned {auc}");
    let hits = hits_at_k(
        &[0.9, 0.3, 0.5, 0.4, 0.2],
        &[true, true, false, false, false],
        2,
    )
    .unwrap();
    check!(10, hits.value == 0.5, "Hits@2 unit example returned {}", hits.value);
    let ratio = probability_ratio_at_k(&[0.9, 0.1, 0.4], &[0.8, 0.5, 0.2], 2).unwrap();
    check!(
        10,
        (ratio - 1.0 / 1.3).abs() < 1e-12,
        "P-Ratio@2 unit example returned {ratio}"
    );
    let ce = cross_entropy(&[0.5, 0.5, 0.5], &[true, false, true]);
    check!(10, (ce - 2.0f64.ln()).abs() < 1e-12, "cross entropy {ce} != ln 2");

    // Dual-route risk check: the streamed quadratic equals the direct mean.
    let model = GraphonModel::ssbm(2, 0.9, 0.1).unwrap();
    let g = sample_graph(&model, 25, 1.0, 99).unwrap();
    let emb = embed(&g, 1, 16, 7).unwrap();
    let est = moment_estimates(&emb);
    let stats = lggnn_core::regress::accumulate_stats(&est, &g, |_, _| true).unwrap();
    let beta = [0.7, -0.1];
    let direct =
        lggnn_core::regress::empirical_risk(&beta, 0.0, &est, &g, |_, _| true).unwrap();
    check!(
        10,
        (stats.objective(&beta) - direct).abs() < 1e-10,
        "risk paths disagree"
    );
    let _ = dot(&beta, &beta);

    finish(
        10,
        Duration::from_secs(30),
        start,
        "KKT certificates, PLS=OLS, metric unit examples, ln-2 cross entropy",
    );
}
