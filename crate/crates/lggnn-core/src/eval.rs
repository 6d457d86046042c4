//! Train/validation/test split protocols and link-prediction metrics.
//!
//! The in-sample protocol removes each edge independently with probability
//! `p`, splits the removed edges evenly into validation and test positives,
//! and partitions the candidate negatives (non-edges together with the test
//! positives, so the model cannot infer test locations) into
//! train/validation/test at fractions `1-p`, `p/2`, `p/2`. The out-sample
//! protocol holds out a `p` fraction of the vertices and tests on pairs
//! touching the held-out set.

use crate::error::Error;
use crate::graphon::SampledGraph;
use crate::math;
use crate::rng::{domain, SeedStreams};
use crate::Result;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    InSample,
    OutSample,
}

/// Edge/pair masks of one split. All pair tuples satisfy `i < j`.
#[derive(Debug, Clone)]
pub struct SplitSpec {
    pub protocol: Protocol,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub train_pos: Vec<(u32, u32)>,
    pub train_neg: Vec<(u32, u32)>,
    pub val_pos: Vec<(u32, u32)>,
    pub val_neg: Vec<(u32, u32)>,
    pub test_pos: Vec<(u32, u32)>,
    pub test_neg: Vec<(u32, u32)>,
    /// Out-sample only: held-out-side edges available for message passing
    /// (the complement of `test_pos` inside the held-out edge set).
    pub message_passing_edges: Vec<(u32, u32)>,
    /// Out-sample only: the held-out vertices.
    pub holdout_vertices: Vec<u32>,
}

impl SplitSpec {
    /// Edges the embedding stage may propagate over: training positives plus
    /// (out-sample) the message-passing edges.
    pub fn embedding_edges(&self) -> Vec<(u32, u32)> {
        let mut edges = self.train_pos.clone();
        edges.extend_from_slice(&self.message_passing_edges);
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Test universe with duplicates removed: positives keep label 1; any
    /// negative draw that collides with a test positive is dropped.
    pub fn test_pairs(&self) -> (Vec<(u32, u32)>, Vec<bool>) {
        let mut pairs = Vec::with_capacity(self.test_pos.len() + self.test_neg.len());
        let mut labels = Vec::with_capacity(pairs.capacity());
        for &e in &self.test_pos {
            pairs.push(e);
            labels.push(true);
        }
        let positives: alloc::collections::BTreeSet<(u32, u32)> =
            self.test_pos.iter().copied().collect();
        for &e in &self.test_neg {
            if !positives.contains(&e) {
                pairs.push(e);
                labels.push(false);
            }
        }
        (pairs, labels)
    }
}

/// In-sample split: per-edge removal with probability `p`, removed edges
/// split evenly into validation/test, negatives drawn from the union of
/// non-edges and test positives. Deterministic given `seed`; every pair
/// decision has its own stream.
pub fn in_sample_split(graph: &SampledGraph, p: f64, seed: u64) -> Result<SplitSpec> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter("holdout fraction must lie in (0, 1)"));
    }
    if graph.edge_count() == 0 {
        return Err(Error::EmptyData("cannot split a graph with no edges".to_string()));
    }
    let streams = SeedStreams::new(seed);
    let mut train_pos = Vec::new();
    let mut val_pos = Vec::new();
    let mut test_pos = Vec::new();
    for &(i, j) in graph.edges() {
        let mut rng = streams.pair_stream(domain::SPLIT_PAIR_BASE, i as usize, j as usize);
        let remove: f64 = rng.random();
        if remove < p {
            let half: f64 = rng.random();
            if half < 0.5 {
                val_pos.push((i, j));
            } else {
                test_pos.push((i, j));
            }
        } else {
            train_pos.push((i, j));
        }
    }

    let test_set: alloc::collections::BTreeSet<(u32, u32)> = test_pos.iter().copied().collect();
    let n = graph.n();
    let mut train_neg = Vec::new();
    let mut val_neg = Vec::new();
    let mut test_neg = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let pair = (i as u32, j as u32);
            let candidate = !graph.has_edge(i, j) || test_set.contains(&pair);
            if !candidate {
                continue;
            }
            let mut rng = streams.pair_stream(domain::SPLIT_PAIR_BASE, i, j);
            // Skip the draws an edge would have consumed so edge and
            // non-edge decisions stay independent across the two passes.
            if graph.has_edge(i, j) {
                let _: f64 = rng.random();
                let _: f64 = rng.random();
            }
            let u: f64 = rng.random();
            if u < 1.0 - p {
                train_neg.push(pair);
            } else if u < 1.0 - p / 2.0 {
                val_neg.push(pair);
            } else {
                test_neg.push(pair);
            }
        }
    }

    Ok(SplitSpec {
        protocol: Protocol::InSample,
        holdout_fraction: p,
        seed,
        train_pos,
        train_neg,
        val_pos,
        val_neg,
        test_pos,
        test_neg,
        message_passing_edges: Vec::new(),
        holdout_vertices: Vec::new(),
    })
}

/// Out-sample split: a random `p` fraction of the vertices is held out;
/// edges inside the kept set split into train/validation, edges touching the
/// held-out set split into test positives and message-passing edges, and the
/// negatives mirror both partitions.
pub fn out_sample_split(graph: &SampledGraph, p: f64, seed: u64) -> Result<SplitSpec> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter("holdout fraction must lie in (0, 1)"));
    }
    let n = graph.n();
    let m = math::round(p * n as f64) as usize;
    if m == 0 {
        return Err(Error::EmptyData("holdout vertex set is empty".to_string()));
    }
    if m >= n {
        return Err(Error::parameter("holdout fraction leaves no training vertices"));
    }
    let streams = SeedStreams::new(seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut rng = streams.stream(domain::SPLIT);
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let holdout_vertices: Vec<u32> = order[..m].to_vec();
    let mut in_holdout = vec![false; n];
    for &v in &holdout_vertices {
        in_holdout[v as usize] = true;
    }

    let mut train_pos = Vec::new();
    let mut val_pos = Vec::new();
    let mut test_pos = Vec::new();
    let mut message_passing_edges = Vec::new();
    for &(i, j) in graph.edges() {
        let mut rng = streams.pair_stream(domain::SPLIT_PAIR_BASE, i as usize, j as usize);
        let u: f64 = rng.random();
        let touches = in_holdout[i as usize] || in_holdout[j as usize];
        if touches {
            if u < p {
                test_pos.push((i, j));
            } else {
                message_passing_edges.push((i, j));
            }
        } else if u < 1.0 - p {
            train_pos.push((i, j));
        } else {
            val_pos.push((i, j));
        }
    }

    let mut train_neg = Vec::new();
    let mut val_neg = Vec::new();
    let mut test_neg = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if graph.has_edge(i, j) {
                continue;
            }
            let mut rng = streams.pair_stream(domain::SPLIT_PAIR_BASE, i, j);
            let u: f64 = rng.random();
            let touches = in_holdout[i] || in_holdout[j];
            if touches {
                if u < p {
                    test_neg.push((i as u32, j as u32));
                }
            } else if u < 1.0 - p {
                train_neg.push((i as u32, j as u32));
            } else {
                val_neg.push((i as u32, j as u32));
            }
        }
    }

    Ok(SplitSpec {
        protocol: Protocol::OutSample,
        holdout_fraction: p,
        seed,
        train_pos,
        train_neg,
        val_pos,
        val_neg,
        test_pos,
        test_neg,
        message_passing_edges,
        holdout_vertices,
    })
}

/// AUC-ROC by the Mann-Whitney statistic with midrank ties: the probability
/// that a random positive outranks a random negative, ties counting one half.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::parameter("scores and labels length mismatch"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::MissingClass(
            "AUC needs at least one positive and one negative".to_string(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0f64;
    let mut idx = 0;
    while idx < order.len() {
        let mut end = idx + 1;
        while end < order.len() && scores[order[end]] == scores[order[idx]] {
            end += 1;
        }
        // Ranks are 1-based; tied entries share the midrank.
        let midrank = (idx + 1 + end) as f64 / 2.0;
        for &o in &order[idx..end] {
            if labels[o] {
                rank_sum_pos += midrank;
            }
        }
        idx = end;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Hits@k value plus a flag set when fewer than `k` negatives were available
/// (the threshold then falls back to the smallest negative score).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsAtK {
    pub value: f64,
    pub negative_shortfall: bool,
}

/// Fraction of positives scoring strictly above the `k`-th highest negative;
/// ties with the threshold count as misses.
pub fn hits_at_k(scores: &[f64], labels: &[bool], k: usize) -> Result<HitsAtK> {
    if scores.len() != labels.len() {
        return Err(Error::parameter("scores and labels length mismatch"));
    }
    if k == 0 {
        return Err(Error::parameter("k must be >= 1"));
    }
    let mut negatives: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|&(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    let n_pos = scores.len() - negatives.len();
    if n_pos == 0 {
        return Err(Error::MissingClass("hits@k needs at least one positive".to_string()));
    }
    if negatives.is_empty() {
        return Err(Error::MissingClass("hits@k needs at least one negative".to_string()));
    }
    negatives.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let shortfall = negatives.len() < k;
    let threshold = if shortfall {
        *negatives.last().unwrap()
    } else {
        negatives[k - 1]
    };
    let hits = scores
        .iter()
        .zip(labels)
        .filter(|&(&s, &l)| l && s > threshold)
        .count();
    Ok(HitsAtK { value: hits as f64 / n_pos as f64, negative_shortfall: shortfall })
}

/// Probability Ratio@k: the summed true probability of the `k` top-scored
/// pairs over the best achievable top-`k` sum. Ranking ties break by index,
/// which cannot change the value among pairs of equal true probability.
pub fn probability_ratio_at_k(scores: &[f64], true_probs: &[f64], k: usize) -> Result<f64> {
    if scores.len() != true_probs.len() {
        return Err(Error::MissingClass(
            "each scored pair needs its true probability".to_string(),
        ));
    }
    if k == 0 || k > scores.len() {
        return Err(Error::parameter("k must lie in 1..=number of scored pairs"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let pred: f64 = order[..k].iter().map(|&i| true_probs[i]).sum();
    let mut best: Vec<f64> = true_probs.to_vec();
    best.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let max: f64 = best[..k].iter().sum();
    if max == 0.0 {
        return Ok(1.0);
    }
    Ok(pred / max)
}

/// Perfect-ranking event: strict inequality between the smallest
/// within-community score and the largest cross-community score.
pub fn e_rank_check(scores: &[f64], same_community: &[bool]) -> Result<bool> {
    if scores.len() != same_community.len() {
        return Err(Error::parameter("scores and pair classes length mismatch"));
    }
    let mut min_in = f64::INFINITY;
    let mut max_out = f64::NEG_INFINITY;
    let mut seen_in = false;
    let mut seen_out = false;
    for (&s, &inside) in scores.iter().zip(same_community) {
        if inside {
            seen_in = true;
            min_in = min_in.min(s);
        } else {
            seen_out = true;
            max_out = max_out.max(s);
        }
    }
    if !seen_in || !seen_out {
        return Err(Error::MissingClass(
            "E_rank needs both in-community and cross-community pairs".to_string(),
        ));
    }
    Ok(min_in > max_out)
}

/// Clamp bound for cross-entropy scores.
pub const CROSS_ENTROPY_EPS: f64 = 1e-7;

/// Mean binary cross-entropy with scores clamped to `[eps, 1 - eps]`.
pub fn cross_entropy(scores: &[f64], labels: &[bool]) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for (&s, &l) in scores.iter().zip(labels) {
        let p = s.clamp(CROSS_ENTROPY_EPS, 1.0 - CROSS_ENTROPY_EPS);
        total -= if l { math::ln(p) } else { math::ln(1.0 - p) };
    }
    total / scores.len() as f64
}

/// Metric bundle for one evaluation.
#[derive(Debug, Clone)]
pub struct EvalReport {
    /// `None` when the test set holds a single class (ranking undefined).
    pub auc_roc: Option<f64>,
    pub hits_at_k: Vec<(usize, HitsAtK)>,
    pub prob_ratio_at_k: Vec<(usize, f64)>,
    pub cross_entropy: f64,
    pub e_rank: Option<bool>,
    pub positives: usize,
    pub negatives: usize,
    pub config_echo: String,
}

impl EvalReport {
    /// Compute every requested metric over one scored pair set. `ks` larger
    /// than the pair count are skipped for the probability ratio; ranking
    /// metrics are omitted (not errored) when only one class is present.
    pub fn compute(
        scores: &[f64],
        labels: &[bool],
        ks: &[usize],
        true_probs: Option<&[f64]>,
        same_community: Option<&[bool]>,
        config_echo: String,
    ) -> Result<EvalReport> {
        let n_pos = labels.iter().filter(|&&l| l).count();
        let both_classes = n_pos > 0 && n_pos < labels.len();
        let auc = if both_classes { Some(auc_roc(scores, labels)?) } else { None };
        let mut hits = Vec::new();
        if both_classes {
            for &k in ks {
                hits.push((k, hits_at_k(scores, labels, k)?));
            }
        }
        let mut ratios = Vec::new();
        if let Some(probs) = true_probs {
            for &k in ks {
                if k <= scores.len() {
                    ratios.push((k, probability_ratio_at_k(scores, probs, k)?));
                }
            }
        }
        let e_rank = match same_community {
            Some(classes) => Some(e_rank_check(scores, classes)?),
            None => None,
        };
        let positives = labels.iter().filter(|&&l| l).count();
        Ok(EvalReport {
            auc_roc: auc,
            hits_at_k: hits,
            prob_ratio_at_k: ratios,
            cross_entropy: cross_entropy(scores, labels),
            e_rank,
            positives,
            negatives: labels.len() - positives,
            config_echo,
        })
    }
}
