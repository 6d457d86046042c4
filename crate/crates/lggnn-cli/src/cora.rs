//! Real-data (Cora-style) topology experiment: connectivity-preserving edge
//! removal, equal-count negative sampling, and the moment-regression fits.

use crate::config::MethodKind;
use crate::report::{FitRecord, ResultRow, SeedMetrics, SeedReport};
use crate::{CliError, Result};
use lggnn_core::embed::{embed, moment_estimates_for_pairs};
use lggnn_core::eval::EvalReport;
use lggnn_core::graphon::SampledGraph;
use lggnn_core::regress::{
    accumulate_stats_labeled, fit_box_constrained, fit_pls_pairs, predict_pairs, SearchSpace,
};
use lggnn_core::rng::{domain, SeedStreams};
use rand::Rng;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Edge list shorthand for the splitter results.
pub type EdgeList = Vec<(u32, u32)>;

#[derive(Debug, Clone)]
pub struct CoraConfig {
    pub edges_path: PathBuf,
    pub layers: usize,
    pub holdout_p: f64,
    pub seeds: Vec<u64>,
    pub hits_ks: Vec<usize>,
    pub output_dir: PathBuf,
}

impl CoraConfig {
    pub fn new(edges_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        CoraConfig {
            edges_path: edges_path.into(),
            layers: 2,
            holdout_p: 0.2,
            seeds: vec![1, 2, 3],
            hits_ks: vec![50, 100],
            output_dir: output_dir.into(),
        }
    }
}

/// Positive-edge split that keeps every removal connectivity-preserving:
/// an edge is only removed when its endpoints stay connected without it, so
/// component structure never changes. Returns `(kept, removed)`.
pub fn connectivity_preserving_removal(
    graph: &SampledGraph,
    p: f64,
    seed: u64,
) -> (EdgeList, EdgeList) {
    let n = graph.n();
    let target = (p * graph.edge_count() as f64).round() as usize;
    let mut order: Vec<(u32, u32)> = graph.edges().to_vec();
    let mut rng = SeedStreams::new(seed).stream(domain::SPLIT);
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }

    let mut adjacency: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for &(a, b) in graph.edges() {
        adjacency[a as usize].insert(b);
        adjacency[b as usize].insert(a);
    }
    let mut removed = Vec::with_capacity(target);
    let mut visited = vec![0u32; n];
    let mut stamp = 0u32;
    for &(a, b) in &order {
        if removed.len() == target {
            break;
        }
        adjacency[a as usize].remove(&b);
        adjacency[b as usize].remove(&a);
        // DFS from a looking for b in the graph without this edge.
        stamp += 1;
        let mut stack = vec![a];
        visited[a as usize] = stamp;
        let mut reachable = false;
        while let Some(v) = stack.pop() {
            if v == b {
                reachable = true;
                break;
            }
            for &w in &adjacency[v as usize] {
                if visited[w as usize] != stamp {
                    visited[w as usize] = stamp;
                    stack.push(w);
                }
            }
        }
        if reachable {
            removed.push((a, b));
        } else {
            adjacency[a as usize].insert(b);
            adjacency[b as usize].insert(a);
        }
    }
    let removed_set: BTreeSet<(u32, u32)> = removed.iter().copied().collect();
    let kept: Vec<(u32, u32)> = graph
        .edges()
        .iter()
        .copied()
        .filter(|e| !removed_set.contains(e))
        .collect();
    (kept, removed)
}

/// Sample `count` distinct pairs accepted by `admit`, uniformly by rejection.
fn sample_pairs(
    n: usize,
    count: usize,
    used: &mut BTreeSet<(u32, u32)>,
    rng: &mut impl Rng,
    mut admit: impl FnMut(u32, u32) -> bool,
) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(count);
    let mut guard = 0usize;
    while out.len() < count {
        guard += 1;
        assert!(
            guard < 1000 * count.max(1000),
            "rejection sampling stalled; candidate pool too small"
        );
        let i = rng.random_range(0..n as u32);
        let j = rng.random_range(0..n as u32);
        if i == j {
            continue;
        }
        let pair = (i.min(j), i.max(j));
        if used.contains(&pair) || !admit(pair.0, pair.1) {
            continue;
        }
        used.insert(pair);
        out.push(pair);
    }
    out
}

/// Run the topology-only experiment on an ingested graph for one method.
pub fn run_real_graph_method(
    graph: &SampledGraph,
    cfg: &CoraConfig,
    method: MethodKind,
) -> Result<ResultRow> {
    let n = graph.n();
    let rho_hat = graph.density();
    let d = 64usize.max((4.0 / rho_hat).ceil() as usize);
    let mut reports = Vec::new();
    for &seed in &cfg.seeds {
        let (kept, removed) = connectivity_preserving_removal(graph, cfg.holdout_p, seed);
        // Alternate removed edges into validation and test.
        let mut val_pos = Vec::new();
        let mut test_pos = Vec::new();
        for (idx, e) in removed.iter().enumerate() {
            if idx % 2 == 0 {
                val_pos.push(*e);
            } else {
                test_pos.push(*e);
            }
        }
        if test_pos.is_empty() {
            return Err(CliError::runtime("no test edges after removal"));
        }
        let test_set: BTreeSet<(u32, u32)> = test_pos.iter().copied().collect();

        // Equal-count negatives: test and validation negatives from
        // non-edges; training negatives may also hit test positives.
        let mut rng = SeedStreams::new(seed).stream(domain::SUBSAMPLE);
        let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
        let test_neg = sample_pairs(n, test_pos.len(), &mut used, &mut rng, |i, j| {
            !graph.has_edge(i as usize, j as usize)
        });
        let _val_neg = sample_pairs(n, val_pos.len(), &mut used, &mut rng, |i, j| {
            !graph.has_edge(i as usize, j as usize)
        });
        let train_neg = sample_pairs(n, kept.len(), &mut used, &mut rng, |i, j| {
            !graph.has_edge(i as usize, j as usize) || test_set.contains(&(i, j))
        });

        let message_graph = graph.masked(kept.clone()).map_err(CliError::from)?;
        let emb = embed(&message_graph, cfg.layers, d, seed).map_err(CliError::from)?;

        let mut train_pairs = kept.clone();
        let mut train_labels = vec![1.0; train_pairs.len()];
        train_pairs.extend_from_slice(&train_neg);
        train_labels.extend(std::iter::repeat_n(0.0, train_neg.len()));
        let pm_train = moment_estimates_for_pairs(&emb, &train_pairs, true);

        let fit = match method {
            MethodKind::LggnnBox => {
                let stats =
                    accumulate_stats_labeled(&pm_train, &train_labels).map_err(CliError::from)?;
                let bounds = vec![2.0; cfg.layers + 1];
                let space = SearchSpace::box_bounds(&bounds, rho_hat).map_err(CliError::from)?;
                fit_box_constrained(&stats, &space, 1e-10, 50_000).map_err(CliError::from)?
            }
            MethodKind::LggnnPls => {
                let components = 3.min(cfg.layers + 1);
                fit_pls_pairs(&pm_train, &train_labels, components).map_err(CliError::from)?
            }
            MethodKind::GcnUntrained => {
                return Err(CliError::config(
                    "the real-graph runner covers the moment-regression methods only",
                ))
            }
        };

        let mut test_pairs = test_pos.clone();
        let mut test_labels = vec![true; test_pairs.len()];
        test_pairs.extend_from_slice(&test_neg);
        test_labels.extend(std::iter::repeat_n(false, test_neg.len()));
        let pm_test = moment_estimates_for_pairs(&emb, &test_pairs, true);
        let scores = predict_pairs(&fit, &pm_test).map_err(CliError::from)?;

        let echo = format!(
            "{} real-graph n={} rho_hat={:.6} layers={} d={} seed={}",
            method.label(),
            n,
            rho_hat,
            cfg.layers,
            d,
            seed
        );
        let eval = EvalReport::compute(&scores, &test_labels, &cfg.hits_ks, None, None, echo)
            .map_err(CliError::from)?;

        reports.push(SeedReport {
            seed,
            n,
            rho: rho_hat,
            dim: d,
            layers: cfg.layers,
            method: method.label().to_string(),
            protocol: "in_sample_connected".to_string(),
            model: cfg.edges_path.display().to_string(),
            test_positives: eval.positives,
            test_negatives: eval.negatives,
            subsampled_to: None,
            metrics: Some(SeedMetrics {
                auc_roc: eval.auc_roc,
                cross_entropy: eval.cross_entropy,
                hits: eval.hits_at_k.iter().map(|&(k, h)| (k, h.value)).collect(),
                hits_shortfall: eval.hits_at_k.iter().any(|&(_, h)| h.negative_shortfall),
                prob_ratio: Vec::new(),
                e_rank: None,
            }),
            fit: Some(FitRecord::from_fit(&fit)),
            failure: None,
        });
    }
    let name = format!("cora_{}_layers{}", method.label(), cfg.layers);
    let mut row = ResultRow::from_seed_reports(&name, reports)?;
    row.holdout_p = cfg.holdout_p;
    Ok(row)
}

/// Load the edge list named by the config and run both moment-regression
/// methods across the seeds; rows are written under the output directory.
pub fn run_cora(cfg: &CoraConfig) -> Result<Vec<ResultRow>> {
    if !cfg.edges_path.exists() {
        return Err(CliError::config(format!(
            "Cora edge list not found at `{}`; place the whitespace edge list there \
             (one `u v` pair per line) or point --edges/$CORA_EDGES at it",
            cfg.edges_path.display()
        )));
    }
    let (graph, load) = crate::graph_io::load_edge_list(&cfg.edges_path)?;
    let mut rows = Vec::new();
    for method in [MethodKind::LggnnBox, MethodKind::LggnnPls] {
        let row = run_real_graph_method(&graph, cfg, method)?;
        row.write_json(&cfg.output_dir.join(format!("{}.json", row.name)))?;
        row.write_csv(&cfg.output_dir.join(format!("{}.csv", row.name)))?;
        rows.push(row);
    }
    eprintln!(
        "loaded {} vertices, {} edges ({} self-loops dropped, {} duplicates merged)",
        load.vertices, load.edges, load.self_loops_dropped, load.duplicates_merged
    );
    Ok(rows)
}

/// Default on-disk location of the Cora edge list, overridable via
/// `$CORA_EDGES`.
pub fn default_cora_path() -> PathBuf {
    std::env::var_os("CORA_EDGES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("data").join("cora.edges"))
}
