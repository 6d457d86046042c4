//! Config-driven experiment execution: sample, split, embed, fit, predict,
//! score, and persist.

use crate::config::{
    BoundsPolicy, ExperimentConfig, MethodKind, SplitProtocol,
};
use crate::graph_io::atomic_write;
use crate::report::{FitRecord, ResultRow, SeedMetrics, SeedReport};
use crate::{CliError, Result};
use lggnn_core::embed::{embed, moment_estimates_for_pairs};
use lggnn_core::eval::{in_sample_split, out_sample_split, EvalReport, SplitSpec};
use lggnn_core::gcn::{gcn_forward, GcnConfig};
use lggnn_core::graphon::{sample_graph, sbm_spectrum, GraphonModel, SampledGraph};
use lggnn_core::linalg::dot;
use lggnn_core::regress::{
    accumulate_stats_labeled, fit_box_constrained, fit_pls_pairs, predict_pairs, RegressionFit,
    SearchSpace,
};
use lggnn_core::rng::{domain, SeedStreams};
use rand::Rng;
use std::path::{Path, PathBuf};

/// Synthetic test universes larger than this are subsampled (only applied
/// for n > 2000); the subsample is drawn from the seed's own stream.
pub const MAX_TEST_PAIRS: usize = 200_000;

/// Resolve the search space for a box fit.
pub fn resolve_space(
    bounds: &BoundsPolicy,
    model: &GraphonModel,
    layers: usize,
    rho: f64,
) -> Result<SearchSpace> {
    let coeffs = layers + 1;
    let space = match bounds {
        BoundsPolicy::Default => SearchSpace::box_bounds(&vec![2.0; coeffs], rho)?,
        BoundsPolicy::Box(b) => {
            if b.len() != coeffs {
                return Err(CliError::config(format!(
                    "box bounds need {coeffs} entries, got {}",
                    b.len()
                )));
            }
            SearchSpace::box_bounds(b, rho)?
        }
        BoundsPolicy::L1Radius(r) => SearchSpace::l1_ball(coeffs, *r)?,
        BoundsPolicy::L1FromSpectrum => {
            let spec = sbm_spectrum(model)?;
            let mu1 = spec.eigenvalues().first().copied().unwrap_or(0.0);
            SearchSpace::l1_from_spectrum(coeffs, mu1, rho)?
        }
        BoundsPolicy::FromSpectrum => {
            // Cover beta* with 20% margin when the spectrum determines it.
            match sbm_spectrum(model).and_then(|s| {
                let beta = lggnn_core::graphon::beta_star(&s)?;
                Ok((s, beta))
            }) {
                Ok((spec, beta)) if spec.distinct_rank() <= coeffs => {
                    let mut b = vec![2.0; coeffs];
                    for (i, bv) in beta.iter().enumerate() {
                        b[i] = (1.2 * bv.abs()).max(0.1);
                    }
                    SearchSpace::box_bounds(&b, rho)?
                }
                _ => SearchSpace::box_bounds(&vec![2.0; coeffs], rho)?,
            }
        }
    };
    Ok(space)
}

fn split_graph(
    graph: &SampledGraph,
    protocol: SplitProtocol,
    p: f64,
    seed: u64,
) -> lggnn_core::Result<SplitSpec> {
    match protocol {
        SplitProtocol::InSample => in_sample_split(graph, p, seed),
        SplitProtocol::OutSample => out_sample_split(graph, p, seed),
    }
}

/// Training pairs with their protocol labels.
fn training_pairs(split: &SplitSpec) -> (Vec<(u32, u32)>, Vec<f64>) {
    let mut pairs = Vec::with_capacity(split.train_pos.len() + split.train_neg.len());
    let mut labels = Vec::with_capacity(pairs.capacity());
    for &e in &split.train_pos {
        pairs.push(e);
        labels.push(1.0);
    }
    for &e in &split.train_neg {
        pairs.push(e);
        labels.push(0.0);
    }
    (pairs, labels)
}

fn subsample_test(
    pairs: Vec<(u32, u32)>,
    labels: Vec<bool>,
    n: usize,
    seed: u64,
) -> (Vec<(u32, u32)>, Vec<bool>, Option<usize>) {
    if n <= 2000 || pairs.len() <= MAX_TEST_PAIRS {
        return (pairs, labels, None);
    }
    let mut rng = SeedStreams::new(seed).stream(domain::SUBSAMPLE);
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    // Partial Fisher-Yates: only the kept prefix needs shuffling.
    for i in 0..MAX_TEST_PAIRS {
        let j = rng.random_range(i..idx.len());
        idx.swap(i, j);
    }
    idx.truncate(MAX_TEST_PAIRS);
    idx.sort_unstable();
    let kept_pairs: Vec<(u32, u32)> = idx.iter().map(|&i| pairs[i]).collect();
    let kept_labels: Vec<bool> = idx.iter().map(|&i| labels[i]).collect();
    (kept_pairs, kept_labels, Some(MAX_TEST_PAIRS))
}

/// Outcome of one seed, with the raw scores available to callers that want
/// histograms or extra diagnostics.
pub struct SeedOutcome {
    pub report: SeedReport,
    pub scores: Vec<f64>,
    pub test_pairs: Vec<(u32, u32)>,
}

/// Run one seed of an experiment config against a resolved model.
pub fn run_seed(
    cfg: &ExperimentConfig,
    model: &GraphonModel,
    model_label: &str,
    seed: u64,
) -> Result<SeedOutcome> {
    let n = cfg.n;
    let rho = cfg.rho_mode.resolve(n);
    let d = cfg.d_policy.resolve(n, rho);
    let protocol_label = match cfg.split {
        SplitProtocol::InSample => "in_sample",
        SplitProtocol::OutSample => "out_sample",
    };

    let base_report = |failure: Option<String>| SeedReport {
        seed,
        n,
        rho,
        dim: d,
        layers: cfg.layers,
        method: cfg.method.label().to_string(),
        protocol: protocol_label.to_string(),
        model: model_label.to_string(),
        test_positives: 0,
        test_negatives: 0,
        subsampled_to: None,
        metrics: None,
        fit: None,
        failure,
    };

    let run = || -> Result<SeedOutcome> {
        let graph = sample_graph(model, n, rho, seed).map_err(CliError::from)?;
        let split = split_graph(&graph, cfg.split, cfg.holdout_p, seed).map_err(CliError::from)?;
        let message_graph = graph.masked(split.embedding_edges()).map_err(CliError::from)?;

        let (test_pairs, test_labels) = split.test_pairs();
        let (test_pairs, test_labels, subsampled_to) =
            subsample_test(test_pairs, test_labels, n, seed);
        if test_pairs.is_empty() {
            return Err(CliError::runtime("split produced no test pairs"));
        }

        let (scores, fit_record) = match cfg.method {
            MethodKind::LggnnBox | MethodKind::LggnnPls => {
                let emb = embed(&message_graph, cfg.layers, d, seed).map_err(CliError::from)?;
                let (train_pairs, train_labels) = training_pairs(&split);
                if train_pairs.is_empty() {
                    return Err(CliError::runtime("split produced no training pairs"));
                }
                let pm_train = moment_estimates_for_pairs(&emb, &train_pairs, true);
                let fit: RegressionFit = match cfg.method {
                    MethodKind::LggnnBox => {
                        let stats = accumulate_stats_labeled(&pm_train, &train_labels)
                            .map_err(CliError::from)?;
                        let space = resolve_space(&cfg.bounds, model, cfg.layers, rho)?;
                        fit_box_constrained(&stats, &space, cfg.solver_tol, cfg.solver_max_iter)
                            .map_err(CliError::from)?
                    }
                    MethodKind::LggnnPls => {
                        let components =
                            cfg.pls_components.unwrap_or_else(|| 3.min(cfg.layers + 1));
                        fit_pls_pairs(&pm_train, &train_labels, components)
                            .map_err(CliError::from)?
                    }
                    MethodKind::GcnUntrained => unreachable!(),
                };
                let pm_test = moment_estimates_for_pairs(&emb, &test_pairs, true);
                let scores = predict_pairs(&fit, &pm_test).map_err(CliError::from)?;
                (scores, Some(FitRecord::from_fit(&fit)))
            }
            MethodKind::GcnUntrained => {
                let gcn_cfg = GcnConfig::identity(cfg.layers, d);
                let out = gcn_forward(&message_graph, &gcn_cfg, seed).map_err(CliError::from)?;
                let top = out.embeddings.layer_count();
                let scores: Vec<f64> = test_pairs
                    .iter()
                    .map(|&(i, j)| {
                        dot(
                            out.embeddings.vector(top, i as usize),
                            out.embeddings.vector(top, j as usize),
                        )
                    })
                    .collect();
                (scores, None)
            }
        };

        // True probabilities and pair classes when the model supports them.
        let true_probs: Option<Vec<f64>> = test_pairs
            .iter()
            .map(|&(i, j)| graph.true_prob(model, i as usize, j as usize).ok())
            .collect();
        let same_community: Option<Vec<bool>> = test_pairs
            .iter()
            .map(|&(i, j)| {
                let ci = graph.community(model, i as usize)?;
                let cj = graph.community(model, j as usize)?;
                Some(ci == cj)
            })
            .collect();
        // E_rank needs both classes present among the test pairs.
        let same_community = same_community.filter(|classes| {
            classes.iter().any(|&c| c) && classes.iter().any(|&c| !c)
        });

        let ks: Vec<usize> = cfg.metric_ks.clone();
        let echo = format!(
            "{} model={} n={} rho={} layers={} d={} protocol={} seed={}",
            cfg.method.label(),
            model_label,
            n,
            rho,
            cfg.layers,
            d,
            protocol_label,
            seed
        );
        let eval = EvalReport::compute(
            &scores,
            &test_labels,
            &ks,
            true_probs.as_deref(),
            same_community.as_deref(),
            echo,
        )
        .map_err(CliError::from)?;

        let mut report = base_report(None);
        report.test_positives = eval.positives;
        report.test_negatives = eval.negatives;
        report.subsampled_to = subsampled_to;
        report.fit = fit_record;
        report.metrics = Some(SeedMetrics {
            auc_roc: eval.auc_roc,
            cross_entropy: eval.cross_entropy,
            hits: eval.hits_at_k.iter().map(|&(k, h)| (k, h.value)).collect(),
            hits_shortfall: eval.hits_at_k.iter().any(|&(_, h)| h.negative_shortfall),
            prob_ratio: eval.prob_ratio_at_k.clone(),
            e_rank: eval.e_rank,
        });
        Ok(SeedOutcome { report, scores, test_pairs })
    };

    match run() {
        Ok(outcome) => Ok(outcome),
        Err(CliError::Config(msg)) => Err(CliError::Config(msg)),
        Err(CliError::Runtime(msg)) => Ok(SeedOutcome {
            report: base_report(Some(msg)),
            scores: Vec::new(),
            test_pairs: Vec::new(),
        }),
    }
}

/// Run every seed of a config, write per-seed JSON reports (plus optional
/// score files) and the aggregate JSON/CSV, and return the aggregate row.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRow> {
    cfg.validate()?;
    let (model, model_label) = cfg.model.resolve()?;
    let out_dir = PathBuf::from(&cfg.output_dir);
    let mut reports = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let outcome = run_seed(cfg, &model, &model_label, seed)?;
        let seed_path = out_dir.join(format!("{}_seed{}.json", cfg.name, seed));
        crate::report::write_seed_report(&outcome.report, &seed_path)?;
        if cfg.store_scores && !outcome.scores.is_empty() {
            let mut text = String::new();
            for (pair, score) in outcome.test_pairs.iter().zip(&outcome.scores) {
                text.push_str(&format!("{} {} {}\n", pair.0, pair.1, score));
            }
            atomic_write(&out_dir.join(format!("{}_seed{}_scores.txt", cfg.name, seed)), text.as_bytes())?;
        }
        reports.push(outcome.report);
    }
    let mut row = ResultRow::from_seed_reports(&cfg.name, reports)?;
    row.holdout_p = cfg.holdout_p;
    row.write_json(&out_dir.join(format!("{}.json", cfg.name)))?;
    row.write_csv(&out_dir.join(format!("{}.csv", cfg.name)))?;
    Ok(row)
}

/// Collapse-scaling report: per layer, the median over seeds of the
/// untrained GCN's maximum aggregation norm, plus the median spread of the
/// final embeddings around their mean.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SpreadReport {
    pub n: usize,
    pub rho: f64,
    pub layers: usize,
    pub dim: usize,
    pub seeds: Vec<u64>,
    /// Median over seeds, per layer `1..=L`.
    pub aggregation_spread: Vec<f64>,
    /// Median over seeds, per layer `0..=L` (deviation around the mean).
    pub embedding_spread: Vec<f64>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Run the untrained GCN across seeds and collect collapse diagnostics.
pub fn spread_report(
    model: &GraphonModel,
    n: usize,
    rho: f64,
    layers: usize,
    dim: usize,
    seeds: &[u64],
) -> Result<SpreadReport> {
    let mut agg: Vec<Vec<f64>> = vec![Vec::new(); layers];
    let mut emb: Vec<Vec<f64>> = vec![Vec::new(); layers + 1];
    for &seed in seeds {
        let graph = sample_graph(model, n, rho, seed).map_err(CliError::from)?;
        let out = gcn_forward(&graph, &GcnConfig::identity(layers, dim), seed)
            .map_err(CliError::from)?;
        for (k, v) in out.aggregation_spread.iter().enumerate() {
            agg[k].push(*v);
        }
        let stats = lggnn_core::gcn::collapse_diagnostic(&out.embeddings);
        for (k, v) in stats.spread.iter().enumerate() {
            emb[k].push(*v);
        }
    }
    Ok(SpreadReport {
        n,
        rho,
        layers,
        dim,
        seeds: seeds.to_vec(),
        aggregation_spread: agg.iter_mut().map(|v| median(v)).collect(),
        embedding_spread: emb.iter_mut().map(|v| median(v)).collect(),
    })
}

/// Variance of the pairwise second-moment estimators over a seeded pair
/// subsample (the LG-GNN side of the collapse contrast).
pub fn qhat2_pair_variance(
    model: &GraphonModel,
    n: usize,
    rho: f64,
    dim: usize,
    seed: u64,
    max_pairs: usize,
) -> Result<f64> {
    let graph = sample_graph(model, n, rho, seed).map_err(CliError::from)?;
    let emb = embed(&graph, 0, dim, seed).map_err(CliError::from)?;
    let mut rng = SeedStreams::new(seed).stream(domain::SUBSAMPLE);
    let mut pairs = Vec::with_capacity(max_pairs);
    for _ in 0..max_pairs {
        let i = rng.random_range(0..n as u32);
        let j = rng.random_range(0..n as u32);
        if i != j {
            pairs.push((i.min(j), i.max(j)));
        }
    }
    let pm = moment_estimates_for_pairs(&emb, &pairs, true);
    let values: Vec<f64> = (0..pm.len()).map(|r| pm.row(r)[0]).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64)
}

/// Write a spread report as JSON.
pub fn write_spread_report(report: &SpreadReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::runtime(format!("serialize spread report: {e}")))?;
    atomic_write(path, text.as_bytes())
}
