//! Graphon families, sparsified graph sampling, and exact oracles.
//!
//! A graphon is a symmetric kernel `W: [0,1]^2 -> [0,1]`. A graph on `n`
//! vertices is sampled by drawing latent features uniformly and connecting
//! each unordered pair independently with probability `rho * W(w_i, w_j)`.
//! Block families (constant, symmetric SBM, general SBM, piecewise grids)
//! carry exact spectral decompositions, path-moment oracles, and the
//! moment-inversion coefficients `beta*`; the geometric family is defined by
//! its latent mechanism (unit-sphere points plus an inner-product threshold)
//! and its moments are estimated by Monte Carlo.

use crate::error::Error;
use crate::linalg;
use crate::math;
use crate::rng::{domain, SeedStreams};
use crate::Result;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Tolerance under which two eigenvalues count as the same for the distinct
/// rank `m_W`.
pub const EIGENVALUE_DEDUP_TOL: f64 = 1e-9;

/// Kernel family of a [`GraphonModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonKind {
    /// `W(x, y) = p`.
    Constant { p: f64 },
    /// Symmetric stochastic block model: `k` equal communities, intra
    /// probability `p`, inter probability `q`.
    Ssbm { communities: usize, intra: f64, inter: f64 },
    /// General block model with symmetric connection matrix and community
    /// weights (weights sum to one).
    Sbm { matrix: Vec<Vec<f64>>, weights: Vec<f64> },
    /// Latent points uniform on the unit sphere of `R^dim`; vertices connect
    /// when their inner product reaches `threshold`.
    Geometric { dim: usize, threshold: f64 },
    /// Piecewise-constant kernel on an `m`×`m` grid of equal cells.
    Piecewise { grid: Vec<Vec<f64>> },
}

/// A graphon model together with an optional known margin `delta_w` such
/// that `delta_w <= W <= 1 - delta_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonModel {
    kind: GraphonKind,
    delta_w: Option<f64>,
}

impl GraphonModel {
    pub fn constant(p: f64) -> Result<Self> {
        check_prob("p", p)?;
        Ok(GraphonModel { kind: GraphonKind::Constant { p }, delta_w: None })
    }

    pub fn ssbm(communities: usize, intra: f64, inter: f64) -> Result<Self> {
        if communities == 0 {
            return Err(Error::parameter("ssbm needs at least one community"));
        }
        check_prob("intra", intra)?;
        check_prob("inter", inter)?;
        Ok(GraphonModel {
            kind: GraphonKind::Ssbm { communities, intra, inter },
            delta_w: None,
        })
    }

    pub fn sbm(matrix: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 || weights.len() != k {
            return Err(Error::parameter("sbm matrix/weights size mismatch"));
        }
        for row in &matrix {
            if row.len() != k {
                return Err(Error::parameter("sbm matrix must be square"));
            }
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                check_prob("sbm entry", v)?;
                if (v - matrix[j][i]).abs() > 1e-12 {
                    return Err(Error::parameter("sbm matrix must be symmetric"));
                }
            }
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::parameter("sbm weights must be nonnegative and sum to 1"));
        }
        Ok(GraphonModel { kind: GraphonKind::Sbm { matrix, weights }, delta_w: None })
    }

    /// SBM with equal community weights.
    pub fn sbm_equal(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let k = matrix.len();
        Self::sbm(matrix, vec![1.0 / k as f64; k.max(1)])
    }

    pub fn geometric(dim: usize, threshold: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::parameter("geometric dimension must be >= 1"));
        }
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(Error::parameter("geometric threshold must lie in [-1, 1]"));
        }
        Ok(GraphonModel { kind: GraphonKind::Geometric { dim, threshold }, delta_w: None })
    }

    pub fn piecewise(grid: Vec<Vec<f64>>) -> Result<Self> {
        let m = grid.len();
        if m == 0 {
            return Err(Error::parameter("piecewise grid must be nonempty"));
        }
        for row in &grid {
            if row.len() != m {
                return Err(Error::parameter("piecewise grid must be square"));
            }
        }
        for (i, row) in grid.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                check_prob("grid entry", v)?;
                if (v - grid[j][i]).abs() > 1e-12 {
                    return Err(Error::parameter("piecewise grid must be symmetric"));
                }
            }
        }
        Ok(GraphonModel { kind: GraphonKind::Piecewise { grid }, delta_w: None })
    }

    /// Declare the margin `delta_w`; validated against the kernel on the
    /// block values (a probe grid for block families).
    pub fn with_delta_w(mut self, delta_w: f64) -> Result<Self> {
        if !(delta_w > 0.0 && delta_w <= 0.5) {
            return Err(Error::parameter("delta_w must lie in (0, 1/2]"));
        }
        if let Some((matrix, _)) = self.block_matrix() {
            for row in &matrix {
                for &v in row {
                    if v < delta_w - 1e-12 || v > 1.0 - delta_w + 1e-12 {
                        return Err(Error::parameter(format!(
                            "kernel value {v} violates the declared margin {delta_w}"
                        )));
                    }
                }
            }
        } else {
            // The 0/1 geometric kernel admits no interior margin.
            return Err(Error::UnsupportedModel(
                "delta_w margin cannot hold for a 0/1 threshold kernel".to_string(),
            ));
        }
        self.delta_w = Some(delta_w);
        Ok(self)
    }

    pub fn kind(&self) -> &GraphonKind {
        &self.kind
    }

    pub fn delta_w(&self) -> Option<f64> {
        self.delta_w
    }

    /// Block-matrix view: `(connection matrix, community weights)` for every
    /// family that is a block model; `None` for geometric.
    pub fn block_matrix(&self) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        match &self.kind {
            GraphonKind::Constant { p } => Some((vec![vec![*p]], vec![1.0])),
            GraphonKind::Ssbm { communities, intra, inter } => {
                let k = *communities;
                let mut m = vec![vec![*inter; k]; k];
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = *intra;
                }
                Some((m, vec![1.0 / k as f64; k]))
            }
            GraphonKind::Sbm { matrix, weights } => Some((matrix.clone(), weights.clone())),
            GraphonKind::Piecewise { grid } => {
                let m = grid.len();
                Some((grid.clone(), vec![1.0 / m as f64; m]))
            }
            GraphonKind::Geometric { .. } => None,
        }
    }

    /// Community of a latent in `[0,1]` under the block weights; intervals
    /// are left-closed and the last one is closed at 1.
    pub fn community_of(&self, x: f64) -> Option<usize> {
        let (_, weights) = self.block_matrix()?;
        let mut acc = 0.0;
        for (c, &w) in weights.iter().enumerate() {
            acc += w;
            if x < acc || c == weights.len() - 1 {
                return Some(c);
            }
        }
        Some(weights.len() - 1)
    }

    /// Kernel value `W(x, y)` for unit-interval families.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::parameter("latents must lie in [0, 1]"));
        }
        match &self.kind {
            GraphonKind::Geometric { .. } => Err(Error::UnsupportedModel(
                "the geometric family is defined by sphere latents, not a [0,1]^2 kernel"
                    .to_string(),
            )),
            _ => {
                let (matrix, _) = self.block_matrix().expect("block families have a matrix");
                let ci = self.community_of(x).expect("block families have communities");
                let cj = self.community_of(y).expect("block families have communities");
                Ok(matrix[ci][cj])
            }
        }
    }
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::parameter(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Latent features of a sampled graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Latents {
    /// Uniform draws on `[0, 1]`.
    Unit(Vec<f64>),
    /// Row-major unit-norm points of `R^dim`.
    Sphere { dim: usize, coords: Vec<f64> },
    /// Ingested real graph: no latent features available.
    Absent,
}

/// An undirected simple graph sampled from (or ingested as) a sparsified
/// graphon, with its latent features when known.
#[derive(Debug, Clone)]
pub struct SampledGraph {
    n: usize,
    neighbors: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    latents: Latents,
    rho: f64,
    seed: u64,
}

impl SampledGraph {
    /// Build directly from an edge list (`i < j`, no self loops, no
    /// duplicates); used by ingestion. `rho` is the caller's density
    /// estimate and latents are absent.
    pub fn from_edges(n: usize, mut edges: Vec<(u32, u32)>, rho: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::parameter("graph needs at least one vertex"));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            if i == j {
                return Err(Error::parameter("self loops are not allowed"));
            }
            if i > j || j as usize >= n {
                return Err(Error::parameter("edges must satisfy i < j < n"));
            }
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
        }
        Ok(SampledGraph { n, neighbors, edges, latents: Latents::Absent, rho, seed: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn latents(&self) -> &Latents {
        &self.latents
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        self.neighbors[i].binary_search(&(j as u32)).is_ok()
    }

    /// Empirical density `2|E| / (n(n-1))`.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// True edge probability `rho * W(w_i, w_j)` under the generating model.
    pub fn true_prob(&self, model: &GraphonModel, i: usize, j: usize) -> Result<f64> {
        match (&self.latents, model.kind()) {
            (Latents::Unit(xs), _) => Ok(self.rho * model.eval(xs[i], xs[j])?),
            (Latents::Sphere { dim, coords }, GraphonKind::Geometric { threshold, .. }) => {
                let xi = &coords[i * dim..(i + 1) * dim];
                let xj = &coords[j * dim..(j + 1) * dim];
                let ip = linalg::dot(xi, xj);
                Ok(if ip >= *threshold { self.rho } else { 0.0 })
            }
            (Latents::Sphere { .. }, _) => Err(Error::parameter(
                "sphere latents require the geometric model",
            )),
            (Latents::Absent, _) => Err(Error::MissingClass(
                "graph has no latent features; true probabilities unavailable".to_string(),
            )),
        }
    }

    /// Community label of vertex `i` for block models.
    pub fn community(&self, model: &GraphonModel, i: usize) -> Option<usize> {
        match &self.latents {
            Latents::Unit(xs) => model.community_of(xs[i]),
            _ => None,
        }
    }

    /// Same vertices, latents, and metadata, but only the given edges (used
    /// to run message passing on a split's visible edge set).
    pub fn masked(&self, mut edges: Vec<(u32, u32)>) -> Result<SampledGraph> {
        edges.sort_unstable();
        edges.dedup();
        let mut neighbors = vec![Vec::new(); self.n];
        for &(i, j) in &edges {
            if i >= j || j as usize >= self.n {
                return Err(Error::parameter("masked edges must satisfy i < j < n"));
            }
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
        }
        Ok(SampledGraph {
            n: self.n,
            neighbors,
            edges,
            latents: self.latents.clone(),
            rho: self.rho,
            seed: self.seed,
        })
    }
}

/// Sample a graph of `n` vertices: latents i.i.d. uniform (or uniform sphere
/// points for geometric), each unordered pair connected independently with
/// probability `rho * W(w_i, w_j)`. Deterministic given `seed`; each pair
/// draws from its own stream.
pub fn sample_graph(model: &GraphonModel, n: usize, rho: f64, seed: u64) -> Result<SampledGraph> {
    if n < 2 {
        return Err(Error::parameter("sample_graph needs n >= 2"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::parameter("rho must lie in (0, 1]"));
    }
    let streams = SeedStreams::new(seed);
    let mut latent_rng = streams.stream(domain::LATENTS);

    let latents = match model.kind() {
        GraphonKind::Geometric { dim, .. } => {
            let mut coords = vec![0.0; n * dim];
            for v in 0..n {
                loop {
                    let row = &mut coords[v * dim..(v + 1) * dim];
                    let mut norm2 = 0.0;
                    for x in row.iter_mut() {
                        let z: f64 = StandardNormal.sample(&mut latent_rng);
                        *x = z;
                        norm2 += z * z;
                    }
                    if norm2 > 0.0 {
                        let norm = math::sqrt(norm2);
                        for x in row.iter_mut() {
                            *x /= norm;
                        }
                        break;
                    }
                }
            }
            Latents::Sphere { dim: *dim, coords }
        }
        _ => Latents::Unit((0..n).map(|_| latent_rng.random::<f64>()).collect()),
    };

    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = match (&latents, model.kind()) {
                (Latents::Unit(xs), _) => model.eval(xs[i], xs[j])?,
                (Latents::Sphere { dim, coords }, GraphonKind::Geometric { threshold, .. }) => {
                    let ip = linalg::dot(
                        &coords[i * dim..(i + 1) * dim],
                        &coords[j * dim..(j + 1) * dim],
                    );
                    if ip >= *threshold {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => unreachable!("latent kind always matches the model"),
            };
            let p = rho * w;
            let u: f64 = streams
                .pair_stream(domain::SAMPLE_PAIR_BASE, i, j)
                .random();
            if u < p {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
                edges.push((i as u32, j as u32));
            }
        }
    }

    Ok(SampledGraph { n, neighbors, edges, latents, rho, seed })
}

/// Spectral decomposition of an equal-weight block graphon: eigenvalues
/// `mu_i = lambda_i / k` with piecewise-constant eigenfunctions taking value
/// `sqrt(k) * (v_i)_j` on community `j`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<Vec<f64>>,
    distinct_rank: usize,
}

impl SpectralDecomposition {
    /// All eigenvalues (with multiplicity), ordered by descending |mu|.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Piecewise values of the eigenfunction paired with `eigenvalues()[r]`.
    pub fn eigenfunction(&self, r: usize) -> &[f64] {
        &self.eigenfunctions[r]
    }

    pub fn communities(&self) -> usize {
        self.eigenfunctions.first().map_or(0, |f| f.len())
    }

    /// Number of distinct nonzero eigenvalues `m_W`.
    pub fn distinct_rank(&self) -> usize {
        self.distinct_rank
    }

    /// Distinct nonzero eigenvalues with their multiplicities, ordered by
    /// descending |mu|. Values within [`EIGENVALUE_DEDUP_TOL`] are merged.
    pub fn distinct_nonzero(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &mu in &self.eigenvalues {
            if mu.abs() <= EIGENVALUE_DEDUP_TOL {
                continue;
            }
            match out.iter_mut().find(|(v, _)| (*v - mu).abs() <= EIGENVALUE_DEDUP_TOL) {
                Some((_, m)) => *m += 1,
                None => out.push((mu, 1)),
            }
        }
        out
    }

    /// Kernel value between communities from the eigen-expansion.
    pub fn reconstruct(&self, ci: usize, cj: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenfunctions)
            .map(|(mu, phi)| mu * phi[ci] * phi[cj])
            .sum()
    }

    /// `k`-th moment between communities from the eigen-expansion:
    /// `sum_r mu_r^k phi_r(ci) phi_r(cj)`.
    pub fn moment(&self, k: usize, ci: usize, cj: usize) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenfunctions)
            .map(|(mu, phi)| math::powi(*mu, k as i32) * phi[ci] * phi[cj])
            .sum()
    }
}

/// Exact spectrum of an equal-weight block model (constant, symmetric SBM,
/// equal-weight SBM, piecewise grid).
pub fn sbm_spectrum(model: &GraphonModel) -> Result<SpectralDecomposition> {
    let (matrix, weights) = model.block_matrix().ok_or_else(|| {
        Error::UnsupportedModel("spectrum oracle needs a block model".to_string())
    })?;
    let k = matrix.len();
    let w0 = 1.0 / k as f64;
    if weights.iter().any(|&w| (w - w0).abs() > 1e-12) {
        return Err(Error::UnsupportedModel(
            "spectrum oracle is stated for equal community weights only".to_string(),
        ));
    }
    let mut flat = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            flat[i * k + j] = matrix[i][j];
        }
    }
    let (lambdas, vectors) = linalg::sym_eigen(&flat, k);
    let sqrt_k = math::sqrt(k as f64);
    let eigenvalues: Vec<f64> = lambdas.iter().map(|l| l / k as f64).collect();
    let eigenfunctions: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| sqrt_k * x).collect())
        .collect();
    let mut decomp = SpectralDecomposition { eigenvalues, eigenfunctions, distinct_rank: 0 };
    decomp.distinct_rank = decomp.distinct_nonzero().len();
    Ok(decomp)
}

/// A moment value with its Monte-Carlo standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub value: f64,
    pub std_error: f64,
}

/// A latent position handed to [`graphon_moment`]: unit-interval for block
/// families, a sphere point for the geometric family.
#[derive(Debug, Clone, Copy)]
pub enum LatentPoint<'a> {
    Unit(f64),
    Sphere(&'a [f64]),
}

/// `k`-th sparsified moment `W_n^(k)(x, y) = rho^k * W^(k)(x, y)`: the
/// probability of a length-`k` path between latents `x` and `y`, averaged
/// over the intermediate latents.
///
/// Block families evaluate exactly through the weighted block-matrix power;
/// the geometric family is estimated with `mc_samples` Monte-Carlo paths
/// (`seed`-reproducible), reporting the standard error alongside.
pub fn graphon_moment(
    model: &GraphonModel,
    k: usize,
    x: LatentPoint<'_>,
    y: LatentPoint<'_>,
    rho: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<MomentValue> {
    if k < 1 {
        return Err(Error::parameter("moment order must be >= 1"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::parameter("rho must lie in (0, 1]"));
    }
    let rho_k = math::powi(rho, k as i32);
    if let Some((matrix, weights)) = model.block_matrix() {
        let (x, y) = match (x, y) {
            (LatentPoint::Unit(a), LatentPoint::Unit(b)) => (a, b),
            _ => return Err(Error::parameter("block models take unit-interval latents")),
        };
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::parameter("latents must lie in [0, 1]"));
        }
        let ci = model.community_of(x).expect("block model");
        let cj = model.community_of(y).expect("block model");
        let value = block_moment(&matrix, &weights, k, ci, cj);
        return Ok(MomentValue { value: rho_k * value, std_error: 0.0 });
    }

    // Geometric: Monte Carlo over intermediate sphere latents.
    let GraphonKind::Geometric { dim, threshold } = model.kind() else {
        unreachable!("non-block families are geometric");
    };
    let (xs, ys) = match (x, y) {
        (LatentPoint::Sphere(a), LatentPoint::Sphere(b)) => (a, b),
        _ => return Err(Error::parameter("the geometric model takes sphere latents")),
    };
    if xs.len() != *dim || ys.len() != *dim {
        return Err(Error::parameter("sphere latent dimension mismatch"));
    }
    if k == 1 {
        let value = if linalg::dot(xs, ys) >= *threshold { 1.0 } else { 0.0 };
        return Ok(MomentValue { value: rho * value, std_error: 0.0 });
    }
    if mc_samples == 0 {
        return Err(Error::UnsupportedModel(
            "no exact moment for the geometric family; request mc_samples > 0".to_string(),
        ));
    }
    let mut rng = SeedStreams::new(seed).stream(domain::MC_MOMENT);
    let mut hits = 0usize;
    let mut prev = vec![0.0; *dim];
    let mut draw = vec![0.0; *dim];
    for _ in 0..mc_samples {
        prev.copy_from_slice(xs);
        let mut ok = true;
        for _step in 0..(k - 1) {
            loop {
                let mut norm2 = 0.0;
                for c in draw.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *c = z;
                    norm2 += z * z;
                }
                if norm2 > 0.0 {
                    let norm = math::sqrt(norm2);
                    for c in draw.iter_mut() {
                        *c /= norm;
                    }
                    break;
                }
            }
            if linalg::dot(&prev, &draw) < *threshold {
                ok = false;
                break;
            }
            prev.copy_from_slice(&draw);
        }
        if ok && linalg::dot(&prev, ys) >= *threshold {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / mc_samples as f64;
    let se = math::sqrt(p_hat * (1.0 - p_hat) / mc_samples as f64);
    Ok(MomentValue { value: rho_k * p_hat, std_error: rho_k * se })
}

/// Exact block moment `W^(k)` between communities: `(P D_w)^(k-1) P` at
/// `(ci, cj)`, which reduces to `(P^k)_{ci,cj} / k^(k-1)` for equal weights.
fn block_moment(matrix: &[Vec<f64>], weights: &[f64], k: usize, ci: usize, cj: usize) -> f64 {
    let m = matrix.len();
    // row = e_ci^T P, then repeatedly row <- row * D_w * P.
    let mut row: Vec<f64> = matrix[ci].clone();
    for _ in 1..k {
        let mut next = vec![0.0; m];
        for (t, &r) in row.iter().enumerate() {
            let scaled = r * weights[t];
            if scaled == 0.0 {
                continue;
            }
            for (j, n) in next.iter_mut().enumerate() {
                *n += scaled * matrix[t][j];
            }
        }
        row = next;
    }
    row[cj]
}

/// Coefficients `beta*` expressing `W` as a linear combination of its
/// moments `W^(2) .. W^(m_W + 1)`: the solution of the system with rows
/// `(mu_s^2, ..., mu_s^(m_W + 1)) . beta = mu_s` over the distinct nonzero
/// eigenvalues.
pub fn beta_star(spec: &SpectralDecomposition) -> Result<Vec<f64>> {
    let mus: Vec<f64> = spec.distinct_nonzero().iter().map(|(mu, _)| *mu).collect();
    beta_star_from_eigenvalues(&mus)
}

/// As [`beta_star`], from a caller-provided list of distinct nonzero
/// eigenvalues. Duplicated eigenvalues (within the dedup tolerance) make the
/// system singular and are rejected.
pub fn beta_star_from_eigenvalues(mus: &[f64]) -> Result<Vec<f64>> {
    let m = mus.len();
    if m == 0 {
        return Err(Error::parameter("need at least one nonzero eigenvalue"));
    }
    let mut max_abs = 0.0f64;
    for (a, &mu) in mus.iter().enumerate() {
        if mu == 0.0 {
            return Err(Error::parameter("eigenvalues must be nonzero"));
        }
        max_abs = max_abs.max(mu.abs());
        for &nu in &mus[a + 1..] {
            if (mu - nu).abs() <= EIGENVALUE_DEDUP_TOL {
                return Err(Error::SingularSystem(
                    "duplicated eigenvalues must be merged before solving for beta*".to_string(),
                ));
            }
        }
    }
    let mut a = vec![0.0; m * m];
    for (s, &mu) in mus.iter().enumerate() {
        let mut pw = mu * mu;
        for c in 0..m {
            a[s * m + c] = pw;
            pw *= mu;
        }
    }
    let beta = linalg::solve(&a, mus, m)?;
    // Residual guard on the solved system.
    for (s, &mu) in mus.iter().enumerate() {
        let mut lhs = 0.0;
        for c in 0..m {
            lhs += a[s * m + c] * beta[c];
        }
        if (lhs - mu).abs() > 1e-9 * max_abs {
            return Err(Error::SingularSystem(format!(
                "beta* residual {:.3e} exceeds tolerance",
                (lhs - mu).abs()
            )));
        }
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_sbm() -> GraphonModel {
        GraphonModel::sbm_equal(vec![vec![0.5, 0.25], vec![0.25, 0.75]]).unwrap()
    }

    fn unit(x: f64) -> LatentPoint<'static> {
        LatentPoint::Unit(x)
    }

    #[test]
    fn constant_zero_gives_empty_graph() {
        let model = GraphonModel::constant(0.0).unwrap();
        for seed in [0, 7, 99] {
            let g = sample_graph(&model, 10, 1.0, seed).unwrap();
            assert_eq!(g.edge_count(), 0);
        }
    }

    #[test]
    fn constant_one_gives_complete_graph() {
        let model = GraphonModel::constant(1.0).unwrap();
        let g = sample_graph(&model, 10, 1.0, 3).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn sampling_is_deterministic_in_seed() {
        let model = GraphonModel::ssbm(4, 0.6, 0.1).unwrap();
        let a = sample_graph(&model, 40, 0.9, 11).unwrap();
        let b = sample_graph(&model, 40, 0.9, 11).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.latents(), b.latents());
        let c = sample_graph(&model, 40, 0.9, 12).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn rho_out_of_range_is_rejected() {
        let model = GraphonModel::constant(0.5).unwrap();
        assert!(sample_graph(&model, 10, 0.0, 1).is_err());
        assert!(sample_graph(&model, 10, 1.5, 1).is_err());
        assert!(sample_graph(&model, 1, 1.0, 1).is_err());
    }

    #[test]
    fn eval_block_lookups() {
        let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
        assert_eq!(model.eval(0.05, 0.10).unwrap(), 0.8);
        assert_eq!(model.eval(0.05, 0.95).unwrap(), 0.2);
        assert_eq!(example_sbm().eval(0.25, 0.75).unwrap(), 0.25);
        assert!(model.eval(-0.1, 0.5).is_err());
        assert!(model.eval(0.5, 1.1).is_err());
    }

    #[test]
    fn eval_is_symmetric_on_probe_grid() {
        let models = [
            GraphonModel::ssbm(6, 0.8, 0.2).unwrap(),
            example_sbm(),
            GraphonModel::piecewise(vec![
                vec![0.9, 0.3, 0.5],
                vec![0.3, 0.8, 0.1],
                vec![0.5, 0.1, 0.7],
            ])
            .unwrap(),
            GraphonModel::constant(0.4).unwrap(),
        ];
        for model in &models {
            for a in 0..=20 {
                for b in 0..=20 {
                    let (x, y) = (a as f64 / 20.0, b as f64 / 20.0);
                    assert_eq!(model.eval(x, y).unwrap(), model.eval(y, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn ssbm_spectrum_closed_form() {
        let (k, p, q) = (6usize, 0.8, 0.2);
        let spec = sbm_spectrum(&GraphonModel::ssbm(k, p, q).unwrap()).unwrap();
        let mu1 = (p + (k as f64 - 1.0) * q) / k as f64;
        let mu2 = (p - q) / k as f64;
        assert!((spec.eigenvalues()[0] - mu1).abs() < 1e-12);
        for r in 1..k {
            assert!((spec.eigenvalues()[r] - mu2).abs() < 1e-12);
        }
        assert_eq!(spec.distinct_rank(), 2);
        let distinct = spec.distinct_nonzero();
        assert!((distinct[0].0 - 0.3).abs() < 1e-12 && distinct[0].1 == 1);
        assert!((distinct[1].0 - 0.1).abs() < 1e-12 && distinct[1].1 == k - 1);
    }

    #[test]
    fn constant_spectrum_is_rank_one() {
        let spec = sbm_spectrum(&GraphonModel::constant(0.37).unwrap()).unwrap();
        assert_eq!(spec.eigenvalues().len(), 1);
        assert!((spec.eigenvalues()[0] - 0.37).abs() < 1e-15);
        assert_eq!(spec.distinct_rank(), 1);
    }

    #[test]
    fn spectrum_orthonormal_and_reconstructs() {
        for model in [
            GraphonModel::ssbm(6, 0.8, 0.2).unwrap(),
            example_sbm(),
            GraphonModel::piecewise(vec![
                vec![0.9, 0.3, 0.5],
                vec![0.3, 0.8, 0.1],
                vec![0.5, 0.1, 0.7],
            ])
            .unwrap(),
        ] {
            let spec = sbm_spectrum(&model).unwrap();
            let (matrix, _) = model.block_matrix().unwrap();
            let k = matrix.len();
            let sqrt_k = (k as f64).sqrt();
            // Orthonormal under the block measure; bounded by sqrt(k).
            for r in 0..k {
                for s in 0..k {
                    let ip: f64 = (0..k)
                        .map(|j| spec.eigenfunction(r)[j] * spec.eigenfunction(s)[j] / k as f64)
                        .sum();
                    let want = if r == s { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-10);
                }
                for j in 0..k {
                    assert!(spec.eigenfunction(r)[j].abs() <= sqrt_k + 1e-12);
                }
            }
            // Entrywise reconstruction of the block matrix.
            for i in 0..k {
                for j in 0..k {
                    assert!((spec.reconstruct(i, j) - matrix[i][j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn spectrum_requires_equal_weights() {
        let model = GraphonModel::sbm(
            vec![vec![0.5, 0.2], vec![0.2, 0.7]],
            vec![0.3, 0.7],
        )
        .unwrap();
        assert!(matches!(sbm_spectrum(&model), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn spectral_moments_match_block_power_oracle() {
        for model in [
            GraphonModel::ssbm(6, 0.8, 0.2).unwrap(),
            example_sbm(),
            GraphonModel::piecewise(vec![
                vec![0.9, 0.3, 0.5],
                vec![0.3, 0.8, 0.1],
                vec![0.5, 0.1, 0.7],
            ])
            .unwrap(),
        ] {
            let spec = sbm_spectrum(&model).unwrap();
            let (matrix, weights) = model.block_matrix().unwrap();
            let k = matrix.len();
            for order in 1..=6 {
                for i in 0..k {
                    for j in 0..k {
                        let by_power = block_moment(&matrix, &weights, order, i, j);
                        let by_spec = spec.moment(order, i, j);
                        assert!(
                            (by_power - by_spec).abs() < 1e-10,
                            "order {order} pair ({i},{j}): {by_power} vs {by_spec}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn example_second_moments_show_identifiability_obstruction() {
        let model = example_sbm();
        let m11 = graphon_moment(&model, 2, unit(0.2), unit(0.3), 1.0, 0, 0).unwrap();
        let m12 = graphon_moment(&model, 2, unit(0.2), unit(0.8), 1.0, 0, 0).unwrap();
        let m22 = graphon_moment(&model, 2, unit(0.8), unit(0.9), 1.0, 0, 0).unwrap();
        assert!((m11.value - 5.0 / 32.0).abs() < 1e-12);
        assert!((m12.value - 5.0 / 32.0).abs() < 1e-12);
        assert!((m22.value - 5.0 / 16.0).abs() < 1e-12);
        assert!((m11.value - m12.value).abs() < 1e-12);
    }

    #[test]
    fn constant_moment_is_power() {
        let model = GraphonModel::constant(0.3).unwrap();
        let m = graphon_moment(&model, 3, unit(0.5), unit(0.5), 1.0, 0, 0).unwrap();
        assert!((m.value - 0.027).abs() < 1e-15);
    }

    #[test]
    fn ssbm_second_moment_same_community() {
        let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
        let m = graphon_moment(&model, 2, unit(0.01), unit(0.02), 1.0, 0, 0).unwrap();
        assert!((m.value - 0.14).abs() < 1e-12);
    }

    #[test]
    fn unequal_weight_sbm_moment_uses_weighted_power() {
        let model = GraphonModel::sbm(
            vec![vec![0.6, 0.2], vec![0.2, 0.9]],
            vec![0.3, 0.7],
        )
        .unwrap();
        // W^(2)(1,1) = w1 * 0.6^2 + w2 * 0.2^2 by direct integration.
        let want = 0.3 * 0.36 + 0.7 * 0.04;
        let got = graphon_moment(&model, 2, unit(0.1), unit(0.2), 1.0, 0, 0).unwrap();
        assert!((got.value - want).abs() < 1e-15);
        // Cross-block: w1 * 0.6 * 0.2 + w2 * 0.2 * 0.9.
        let want = 0.3 * 0.12 + 0.7 * 0.18;
        let got = graphon_moment(&model, 2, unit(0.1), unit(0.8), 1.0, 0, 0).unwrap();
        assert!((got.value - want).abs() < 1e-15);
    }

    #[test]
    fn moment_scales_with_rho() {
        let model = GraphonModel::ssbm(6, 0.8, 0.2).unwrap();
        let m1 = graphon_moment(&model, 2, unit(0.01), unit(0.02), 1.0, 0, 0).unwrap();
        let m05 = graphon_moment(&model, 2, unit(0.01), unit(0.02), 0.5, 0, 0).unwrap();
        assert!((m05.value - 0.25 * m1.value).abs() < 1e-15);
    }

    #[test]
    fn geometric_moment_requires_samples() {
        let model = GraphonModel::geometric(5, 0.2).unwrap();
        let x = [1.0, 0.0, 0.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0, 0.0, 0.0];
        let err = graphon_moment(
            &model,
            2,
            LatentPoint::Sphere(&x),
            LatentPoint::Sphere(&y),
            1.0,
            0,
            0,
        );
        assert!(matches!(err, Err(Error::UnsupportedModel(_))));
        // Order 1 stays exact: the kernel is the 0/1 threshold indicator.
        let m1 = graphon_moment(
            &model,
            1,
            LatentPoint::Sphere(&x),
            LatentPoint::Sphere(&y),
            1.0,
            0,
            0,
        )
        .unwrap();
        assert_eq!(m1.value, 0.0);
        assert_eq!(m1.std_error, 0.0);
    }

    #[test]
    fn geometric_sampling_respects_threshold_kernel() {
        let model = GraphonModel::geometric(4, 0.1).unwrap();
        let g = sample_graph(&model, 30, 1.0, 5).unwrap();
        let Latents::Sphere { dim, coords } = g.latents() else {
            panic!("geometric latents expected")
        };
        for i in 0..30 {
            for j in (i + 1)..30 {
                let ip = crate::linalg::dot(
                    &coords[i * dim..(i + 1) * dim],
                    &coords[j * dim..(j + 1) * dim],
                );
                assert_eq!(g.has_edge(i, j), ip >= 0.1, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn beta_star_constant_is_reciprocal() {
        let spec = sbm_spectrum(&GraphonModel::constant(0.4).unwrap()).unwrap();
        let beta = beta_star(&spec).unwrap();
        assert_eq!(beta.len(), 1);
        assert!((beta[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn beta_star_ssbm_closed_form() {
        let spec = sbm_spectrum(&GraphonModel::ssbm(6, 0.8, 0.2).unwrap()).unwrap();
        let beta = beta_star(&spec).unwrap();
        assert!((beta[0] - 40.0 / 3.0).abs() < 1e-8);
        assert!((beta[1] + 100.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn beta_star_defining_property() {
        for model in [
            GraphonModel::ssbm(6, 0.8, 0.2).unwrap(),
            example_sbm(),
            GraphonModel::piecewise(vec![
                vec![0.9, 0.3, 0.5],
                vec![0.3, 0.8, 0.1],
                vec![0.5, 0.1, 0.7],
            ])
            .unwrap(),
        ] {
            let spec = sbm_spectrum(&model).unwrap();
            let beta = beta_star(&spec).unwrap();
            for (mu, _) in spec.distinct_nonzero() {
                let mut fitted = 0.0;
                let mut pw = mu * mu;
                for &b in &beta {
                    fitted += b * pw;
                    pw *= mu;
                }
                assert!((fitted - mu).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn beta_star_reconstructs_kernel_on_block_pairs() {
        // Block models with m_W <= 4: W(x,y) = sum_i beta*_i W^(i+1)(x,y).
        for model in [
            GraphonModel::ssbm(6, 0.8, 0.2).unwrap(),
            example_sbm(),
            GraphonModel::piecewise(vec![
                vec![0.9, 0.3, 0.5],
                vec![0.3, 0.8, 0.1],
                vec![0.5, 0.1, 0.7],
            ])
            .unwrap(),
        ] {
            let spec = sbm_spectrum(&model).unwrap();
            let beta = beta_star(&spec).unwrap();
            assert!(spec.distinct_rank() <= 4);
            let (matrix, weights) = model.block_matrix().unwrap();
            let k = matrix.len();
            for i in 0..k {
                for j in 0..k {
                    let recon: f64 = beta
                        .iter()
                        .enumerate()
                        .map(|(r, b)| b * block_moment(&matrix, &weights, r + 2, i, j))
                        .sum();
                    assert!(
                        (recon - matrix[i][j]).abs() < 1e-8,
                        "pair ({i},{j}): {recon} vs {}",
                        matrix[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn beta_star_rejects_unmerged_duplicates() {
        let err = beta_star_from_eigenvalues(&[0.3, 0.3 + 1e-12]);
        assert!(matches!(err, Err(Error::SingularSystem(_))));
    }

    #[test]
    fn delta_w_margin_is_validated() {
        let ok = GraphonModel::ssbm(6, 0.8, 0.2).unwrap().with_delta_w(0.2);
        assert!(ok.is_ok());
        let bad = GraphonModel::ssbm(6, 0.9, 0.2).unwrap().with_delta_w(0.2);
        assert!(bad.is_err());
        let geo = GraphonModel::geometric(3, 0.0).unwrap().with_delta_w(0.1);
        assert!(geo.is_err());
    }

    #[test]
    fn sbm_constructor_validates() {
        assert!(GraphonModel::sbm(vec![vec![0.5, 0.3], vec![0.2, 0.5]], vec![0.5, 0.5]).is_err());
        assert!(GraphonModel::sbm(vec![vec![0.5, 1.3], vec![1.3, 0.5]], vec![0.5, 0.5]).is_err());
        assert!(GraphonModel::sbm(vec![vec![0.5]], vec![0.9]).is_err());
    }
}
