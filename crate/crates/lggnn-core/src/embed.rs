//! Linear message passing with random features and the path-moment
//! estimators built from embedding dot products.
//!
//! Layer zero aggregates i.i.d. Gaussian features over neighbors with a
//! `1/sqrt(n-1)` scale; subsequent layers add the `1/(n-1)`-normalized
//! neighbor average to the previous embedding:
//!
//! ```text
//! l_i^0 = 1/sqrt(n-1) * sum_l a_il Z_l
//! l_i^k = l_i^(k-1) + 1/(n-1) * sum_l a_il l_l^(k-1)
//! ```
//!
//! The pairwise products `<l_i^(k-2), l_j^0>` then decouple into estimators
//! `q_ij^(k)` of the sparsified path moments via a binomial recursion.

use crate::error::Error;
use crate::graphon::SampledGraph;
use crate::linalg;
use crate::math;
use crate::moments;
use crate::rng::{domain, PairIndexer, SeedStreams};
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;
use rand_distr::{Distribution, StandardNormal};

/// Embeddings for every vertex and layer `0..=L`, row-major `n`×`d` per layer.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    n: usize,
    dim: usize,
    layers: Vec<Vec<f64>>,
    feature_seed: u64,
}

impl EmbeddingTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of message-passing layers `L` (the table holds `L + 1` levels).
    pub fn layer_count(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn feature_seed(&self) -> u64 {
        self.feature_seed
    }

    /// Row-major `n`×`d` matrix of layer `k`.
    pub fn layer(&self, k: usize) -> &[f64] {
        &self.layers[k]
    }

    /// Embedding of vertex `i` after `k` layers.
    pub fn vector(&self, k: usize, i: usize) -> &[f64] {
        &self.layers[k][i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn from_layers(n: usize, dim: usize, layers: Vec<Vec<f64>>, seed: u64) -> Self {
        EmbeddingTable { n, dim, layers, feature_seed: seed }
    }
}

/// `n` i.i.d. feature vectors with `Normal(0, 1/d)` coordinates, row-major.
pub fn init_features(n: usize, d: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || d == 0 {
        return Err(Error::parameter("init_features needs n >= 1 and d >= 1"));
    }
    let mut rng = SeedStreams::new(seed).stream(domain::FEATURES);
    let scale = 1.0 / math::sqrt(d as f64);
    let mut z = vec![0.0; n * d];
    for v in z.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v = scale * g;
    }
    Ok(z)
}

/// Run the message passing for `L` layers with fresh features drawn from
/// `seed`.
pub fn embed(graph: &SampledGraph, layers: usize, d: usize, seed: u64) -> Result<EmbeddingTable> {
    let features = init_features(graph.n(), d, seed)?;
    embed_with_features(graph, layers, &features, d, seed)
}

/// Run the message passing with caller-provided features (used by the
/// Monte-Carlo oracles that average over many feature draws).
pub fn embed_with_features(
    graph: &SampledGraph,
    layers: usize,
    features: &[f64],
    d: usize,
    feature_seed: u64,
) -> Result<EmbeddingTable> {
    let n = graph.n();
    if n < 2 {
        return Err(Error::parameter("embed needs n >= 2"));
    }
    if features.len() != n * d {
        return Err(Error::parameter("feature matrix shape mismatch"));
    }
    let inv_sqrt = 1.0 / math::sqrt((n - 1) as f64);
    let inv = 1.0 / (n - 1) as f64;

    let mut all = Vec::with_capacity(layers + 1);
    let mut layer0 = vec![0.0; n * d];
    for i in 0..n {
        let out = &mut layer0[i * d..(i + 1) * d];
        for &l in graph.neighbors(i) {
            let src = &features[l as usize * d..(l as usize + 1) * d];
            for (o, s) in out.iter_mut().zip(src) {
                *o += s;
            }
        }
        for o in out.iter_mut() {
            *o *= inv_sqrt;
        }
    }
    all.push(layer0);

    for k in 1..=layers {
        let prev = &all[k - 1];
        let mut next = vec![0.0; n * d];
        for i in 0..n {
            let out = &mut next[i * d..(i + 1) * d];
            for &l in graph.neighbors(i) {
                let src = &prev[l as usize * d..(l as usize + 1) * d];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += s;
                }
            }
            let own = &prev[i * d..(i + 1) * d];
            for (o, s) in out.iter_mut().zip(own) {
                *o = *s + inv * *o;
            }
        }
        all.push(next);
    }

    Ok(EmbeddingTable::from_layers(n, d, all, feature_seed))
}

/// Moment estimators `q_ij^(k)` for all unordered pairs and orders
/// `k = 2..=L+2`, stored pair-major per order.
#[derive(Debug, Clone)]
pub struct MomentEstimates {
    n: usize,
    layer_count: usize,
    symmetrized: bool,
    /// `values[k - 2][pair_index(i, j)]`.
    values: Vec<Vec<f64>>,
}

impl MomentEstimates {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Number of stored orders, `L + 1`.
    pub fn order_count(&self) -> usize {
        self.values.len()
    }

    pub fn min_order(&self) -> usize {
        2
    }

    pub fn max_order(&self) -> usize {
        self.layer_count + 2
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        let idx = PairIndexer::new(self.n).index(i, j);
        self.values[k - 2][idx]
    }

    /// Copy `(q^(2), ..., q^(L+2))` for the pair into `out`.
    pub fn pair_vector(&self, i: usize, j: usize, out: &mut [f64]) {
        let idx = PairIndexer::new(self.n).index(i, j);
        for (m, v) in self.values.iter().enumerate() {
            out[m] = v[idx];
        }
    }

    /// All values of one order, in pair-index order.
    pub fn order_slice(&self, k: usize) -> &[f64] {
        &self.values[k - 2]
    }
}

/// Estimators for an explicit list of pairs only (row-major pairs × orders).
#[derive(Debug, Clone)]
pub struct PairMoments {
    pairs: Vec<(u32, u32)>,
    orders: usize,
    rows: Vec<f64>,
}

impl PairMoments {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn order_count(&self) -> usize {
        self.orders
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.orders..(r + 1) * self.orders]
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Binomial row `C(m, 0..=m)`.
fn binomials(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..m {
        let mut next = vec![1.0; row.len() + 1];
        for t in 1..row.len() {
            next[t] = row[t - 1] + row[t];
        }
        row = next;
    }
    row
}

/// Moment estimators for all pairs, symmetrized: the dot products
/// `<l_i^m, l_j^0>` and `<l_j^m, l_i^0>` are averaged before the recursion
/// (their conditional expectation is symmetric; averaging halves variance
/// without bias).
pub fn moment_estimates(emb: &EmbeddingTable) -> MomentEstimates {
    all_pair_estimates(emb, true)
}

/// Moment estimators for all pairs from the raw `i < j` evaluation of
/// `<l_i^(k-2), l_j^0>`.
pub fn moment_estimates_raw(emb: &EmbeddingTable) -> MomentEstimates {
    all_pair_estimates(emb, false)
}

fn all_pair_estimates(emb: &EmbeddingTable, symmetrized: bool) -> MomentEstimates {
    let n = emb.n();
    let d = emb.dim();
    let layers = emb.layer_count();
    let indexer = PairIndexer::new(n);
    let npairs = indexer.len();

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(layers + 1);
    let mut square = vec![0.0; n * n];
    for m in 0..=layers {
        linalg::cross_dots(emb.layer(m), emb.layer(0), n, d, &mut square);
        let mut tri = vec![0.0; npairs];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = if symmetrized {
                    0.5 * (square[i * n + j] + square[j * n + i])
                } else {
                    square[i * n + j]
                };
                tri[indexer.index(i, j)] = v;
            }
        }
        values.push(tri);
    }
    decouple_in_place(&mut values);
    MomentEstimates { n, layer_count: layers, symmetrized, values }
}

/// Moment estimators for selected pairs only.
pub fn moment_estimates_for_pairs(
    emb: &EmbeddingTable,
    pairs: &[(u32, u32)],
    symmetrized: bool,
) -> PairMoments {
    let layers = emb.layer_count();
    let orders = layers + 1;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(orders);
    for m in 0..=layers {
        let mut col = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            let (i, j) = (i as usize, j as usize);
            let forward = linalg::dot(emb.vector(m, i), emb.vector(0, j));
            let v = if symmetrized {
                0.5 * (forward + linalg::dot(emb.vector(m, j), emb.vector(0, i)))
            } else {
                forward
            };
            col.push(v);
        }
        columns.push(col);
    }
    decouple_in_place(&mut columns);
    let mut rows = vec![0.0; pairs.len() * orders];
    for (m, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            rows[r * orders + m] = v;
        }
    }
    PairMoments { pairs: pairs.to_vec(), orders, rows }
}

/// In-place binomial decoupling: entry `m` starts as `<l_i^m, l_j^0>` and
/// ends as `q^(m+2)`, using `q^(k) = <l^(k-2), l^0> - sum_r C(k-2, r) q^(r+2)`.
fn decouple_in_place(columns: &mut [Vec<f64>]) {
    let orders = columns.len();
    for m in 1..orders {
        let binom = binomials(m);
        for r in 0..m {
            let c = binom[r];
            let (head, tail) = columns.split_at_mut(m);
            let (dst, src) = (&mut tail[0], &head[r]);
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= c * s;
            }
        }
    }
}

/// Conditional expectation of `<l_i^(k1), l_j^(k2)>` given the graph, for all
/// pairs (pair-index order):
/// `sum_{q1, q2} C(k1, q1) C(k2, q2) * What^(q1 + q2 + 2)_{ij}`.
pub fn expected_dotproduct_oracle(
    graph: &SampledGraph,
    k1: usize,
    k2: usize,
) -> Result<Vec<f64>> {
    let k_top = k1 + k2 + 2;
    let emp = moments::empirical_moments(graph, k_top)?;
    let b1 = binomials(k1);
    let b2 = binomials(k2);
    let n = graph.n();
    let indexer = PairIndexer::new(n);
    let mut out = vec![0.0; indexer.len()];
    for (i, j) in indexer.iter() {
        let mut s = 0.0;
        for (q1, &c1) in b1.iter().enumerate() {
            for (q2, &c2) in b2.iter().enumerate() {
                s += c1 * c2 * emp.get(q1 + q2 + 2, i, j);
            }
        }
        out[indexer.index(i, j)] = s;
    }
    Ok(out)
}
