//! Untrained classical GCN forward pass and the embedding-collapse
//! diagnostic.
//!
//! The layer update is
//! `l_i^k = act(M_k0 l_i^(k-1) + M_k1 sum_{j in N(i)} l_j^(k-1) / sqrt(|N(i)||N(j)|))`
//! with random initialization and either identity or fixed random weights
//! (operator norm capped). With random features the aggregation term
//! concentrates to zero at rate `1/sqrt(rho n)`, so the embeddings carry no
//! latent-feature information; the forward pass records the per-layer
//! aggregation spread to make that collapse measurable.

use crate::embed::EmbeddingTable;
use crate::error::Error;
use crate::graphon::SampledGraph;
use crate::linalg;
use crate::math;
use crate::rng::{domain, SeedStreams};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightMode {
    Identity,
    /// Fixed random Gaussian weights, rescaled so each operator norm is at
    /// most `norm_cap`.
    FixedRandom { seed: u64, norm_cap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnConfig {
    pub layers: usize,
    pub dim: usize,
    pub activation: Activation,
    pub weight_mode: WeightMode,
    /// Initial embeddings have `Normal(0, init_scale^2 / dim)` coordinates.
    pub init_scale: f64,
}

impl GcnConfig {
    pub fn identity(layers: usize, dim: usize) -> Self {
        GcnConfig {
            layers,
            dim,
            activation: Activation::Identity,
            weight_mode: WeightMode::Identity,
            init_scale: 1.0,
        }
    }
}

/// Forward-pass output: the embedding table plus, per layer `1..=L`, the
/// largest norm of the raw aggregation term over vertices (the quantity that
/// collapses at rate `1/sqrt(rho n)`).
#[derive(Debug, Clone)]
pub struct GcnOutput {
    pub embeddings: EmbeddingTable,
    pub aggregation_spread: Vec<f64>,
}

/// Run the untrained GCN forward pass. Isolated vertices aggregate zero.
pub fn gcn_forward(graph: &SampledGraph, cfg: &GcnConfig, seed: u64) -> Result<GcnOutput> {
    if cfg.dim == 0 {
        return Err(Error::parameter("gcn dimension must be >= 1"));
    }
    if cfg.init_scale.is_nan() || cfg.init_scale <= 0.0 {
        return Err(Error::parameter("init_scale must be positive"));
    }
    let n = graph.n();
    let d = cfg.dim;
    let mut rng = SeedStreams::new(seed).stream(domain::GCN_INIT);
    let scale = cfg.init_scale / math::sqrt(d as f64);
    let mut layer0 = vec![0.0; n * d];
    for v in layer0.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v = scale * g;
    }

    let weights = match &cfg.weight_mode {
        WeightMode::Identity => None,
        WeightMode::FixedRandom { seed, norm_cap } => {
            if norm_cap.is_nan() || *norm_cap <= 0.0 {
                return Err(Error::parameter("operator-norm cap must be positive"));
            }
            Some(random_weights(cfg.layers, d, *seed, *norm_cap))
        }
    };

    let mut layers = Vec::with_capacity(cfg.layers + 1);
    layers.push(layer0);
    let mut aggregation_spread = Vec::with_capacity(cfg.layers);

    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let deg = graph.degree(i);
            if deg == 0 {
                0.0
            } else {
                1.0 / math::sqrt(deg as f64)
            }
        })
        .collect();

    for k in 1..=cfg.layers {
        let prev = &layers[k - 1];
        let mut agg = vec![0.0; n * d];
        let mut max_agg_norm = 0.0f64;
        for i in 0..n {
            let out = &mut agg[i * d..(i + 1) * d];
            for &j in graph.neighbors(i) {
                let j = j as usize;
                let w = inv_sqrt_deg[i] * inv_sqrt_deg[j];
                let src = &prev[j * d..(j + 1) * d];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
            let norm = math::sqrt(out.iter().map(|v| v * v).sum::<f64>());
            max_agg_norm = max_agg_norm.max(norm);
        }
        aggregation_spread.push(max_agg_norm);

        let mut next = vec![0.0; n * d];
        match &weights {
            None => {
                for ((nx, pv), ag) in next.iter_mut().zip(prev).zip(&agg) {
                    *nx = pv + ag;
                }
            }
            Some(ws) => {
                let (m0, m1) = &ws[k - 1];
                let mut buf = vec![0.0; d];
                for i in 0..n {
                    let pv = &prev[i * d..(i + 1) * d];
                    let ag = &agg[i * d..(i + 1) * d];
                    for (r, b) in buf.iter_mut().enumerate() {
                        *b = linalg::dot(&m0[r * d..(r + 1) * d], pv)
                            + linalg::dot(&m1[r * d..(r + 1) * d], ag);
                    }
                    next[i * d..(i + 1) * d].copy_from_slice(&buf);
                }
            }
        }
        if cfg.activation == Activation::Relu {
            for v in next.iter_mut() {
                *v = v.max(0.0);
            }
        }
        layers.push(next);
    }

    Ok(GcnOutput {
        embeddings: EmbeddingTable::from_layers(n, d, layers, seed),
        aggregation_spread,
    })
}

/// Fixed random weight pairs, each rescaled to operator norm at most `cap`.
fn random_weights(layers: usize, d: usize, seed: u64, cap: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = SeedStreams::new(seed).stream(domain::GCN_WEIGHTS);
    let scale = 1.0 / math::sqrt(d as f64);
    let mut out = Vec::with_capacity(layers);
    for _ in 0..layers {
        let mut pair = (vec![0.0; d * d], vec![0.0; d * d]);
        for m in [&mut pair.0, &mut pair.1] {
            for v in m.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *v = scale * g;
            }
            let norm = operator_norm(m, d);
            if norm > cap {
                let f = cap / norm;
                for v in m.iter_mut() {
                    *v *= f;
                }
            }
        }
        out.push(pair);
    }
    out
}

/// Spectral norm estimate via power iteration on `M^T M`.
fn operator_norm(m: &[f64], d: usize) -> f64 {
    let mut x = vec![1.0 / math::sqrt(d as f64); d];
    let mut sigma = 0.0;
    for _ in 0..60 {
        // y = M x, then z = M^T y.
        let mut y = vec![0.0; d];
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = linalg::dot(&m[r * d..(r + 1) * d], &x);
        }
        let mut z = vec![0.0; d];
        for r in 0..d {
            let yr = y[r];
            if yr == 0.0 {
                continue;
            }
            for c in 0..d {
                z[c] += m[r * d + c] * yr;
            }
        }
        let norm = math::sqrt(z.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        for (xv, zv) in x.iter_mut().zip(&z) {
            *xv = zv / norm;
        }
        let new_sigma = math::sqrt(norm);
        if (new_sigma - sigma).abs() <= 1e-12 * new_sigma.max(1.0) {
            return new_sigma;
        }
        sigma = new_sigma;
    }
    sigma
}

/// Per-layer spread statistics of an embedding table.
#[derive(Debug, Clone)]
pub struct CollapseStats {
    /// `max_i || l_i^k - mean_i l_i^k ||` per layer `0..=L`.
    pub spread: Vec<f64>,
    /// Cross-vertex standard deviation of `|| l_i^k ||` per layer.
    pub norm_sd: Vec<f64>,
}

/// Spread of the embeddings around their cross-vertex mean, per layer.
pub fn collapse_diagnostic(emb: &EmbeddingTable) -> CollapseStats {
    let n = emb.n();
    let d = emb.dim();
    let mut spread = Vec::with_capacity(emb.layer_count() + 1);
    let mut norm_sd = Vec::with_capacity(emb.layer_count() + 1);
    for k in 0..=emb.layer_count() {
        let layer = emb.layer(k);
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(&layer[i * d..(i + 1) * d]) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut max_dev = 0.0f64;
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let row = &layer[i * d..(i + 1) * d];
            let dev = row
                .iter()
                .zip(&mean)
                .map(|(v, m)| (v - m) * (v - m))
                .sum::<f64>();
            max_dev = max_dev.max(math::sqrt(dev));
            norms.push(math::sqrt(row.iter().map(|v| v * v).sum::<f64>()));
        }
        let nm = norms.iter().sum::<f64>() / n as f64;
        let var = norms.iter().map(|v| (v - nm) * (v - nm)).sum::<f64>() / n as f64;
        spread.push(max_dev);
        norm_sd.push(math::sqrt(var));
    }
    CollapseStats { spread, norm_sd }
}
