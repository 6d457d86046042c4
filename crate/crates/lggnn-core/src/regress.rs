//! Edge-probability regression over moment estimators.
//!
//! The box-constrained fit minimizes the mean squared residual between the
//! linear moment combination `<beta, q_ij>` and the observed labels `a_ij`
//! by projected gradient over a rectangle `prod_i [-b_i/rho^i, b_i/rho^i]`
//! (or an l1 ball). The PLS fit is the NIPALS partial-least-squares variant
//! on the same pair design. Exact population risks are available for block
//! models with known spectra.

use crate::embed::{MomentEstimates, PairMoments};
use crate::error::Error;
use crate::graphon::{SampledGraph, SpectralDecomposition};
use crate::linalg;
use crate::math;
use crate::rng::PairIndexer;
use crate::Result;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Tie-break ridge on the box objective; keeps minimizers unique under
/// multicollinearity without visibly perturbing the fit.
const TIE_RIDGE: f64 = 1e-10;

/// Feasible set for the box fit.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceMode {
    /// Per-coordinate half-widths (already scaled by `1/rho^i`).
    Box { half_widths: Vec<f64> },
    /// `||beta||_1 <= radius`.
    L1Ball { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    mode: SpaceMode,
    coeffs: usize,
}

impl SearchSpace {
    /// Rectangle with half-widths `b_i / rho^i` (`b` is 1-indexed in the
    /// scaling, matching the coefficient on `q^(i+1)`).
    pub fn box_bounds(b: &[f64], rho: f64) -> Result<Self> {
        if b.is_empty() || b.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::parameter("box bounds must be positive"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::parameter("rho must lie in (0, 1]"));
        }
        let half_widths = b
            .iter()
            .enumerate()
            .map(|(i, &bi)| bi / math::powi(rho, (i + 1) as i32))
            .collect::<Vec<_>>();
        Ok(SearchSpace { coeffs: b.len(), mode: SpaceMode::Box { half_widths } })
    }

    /// l1 ball of the given radius.
    pub fn l1_ball(coeffs: usize, radius: f64) -> Result<Self> {
        if coeffs == 0 || radius.is_nan() || radius <= 0.0 {
            return Err(Error::parameter("l1 ball needs coeffs >= 1 and radius > 0"));
        }
        Ok(SearchSpace { coeffs, mode: SpaceMode::L1Ball { radius } })
    }

    /// Default l1 radius `(mu_1 * rho)^-1` from a known leading eigenvalue.
    pub fn l1_from_spectrum(coeffs: usize, mu_1: f64, rho: f64) -> Result<Self> {
        if mu_1.is_nan() || mu_1 <= 0.0 {
            return Err(Error::parameter("leading eigenvalue must be positive"));
        }
        Self::l1_ball(coeffs, 1.0 / (mu_1 * rho))
    }

    pub fn coeffs(&self) -> usize {
        self.coeffs
    }

    pub fn mode(&self) -> &SpaceMode {
        &self.mode
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, beta: &mut [f64]) {
        match &self.mode {
            SpaceMode::Box { half_widths } => {
                for (b, &w) in beta.iter_mut().zip(half_widths) {
                    *b = b.clamp(-w, w);
                }
            }
            SpaceMode::L1Ball { radius } => project_l1(beta, *radius),
        }
    }

    /// Feasibility up to `tol`.
    pub fn contains(&self, beta: &[f64], tol: f64) -> bool {
        match &self.mode {
            SpaceMode::Box { half_widths } => beta
                .iter()
                .zip(half_widths)
                .all(|(&b, &w)| b.abs() <= w + tol),
            SpaceMode::L1Ball { radius } => {
                beta.iter().map(|b| b.abs()).sum::<f64>() <= radius + tol
            }
        }
    }
}

/// Euclidean projection onto the l1 ball (sort-based simplex projection).
fn project_l1(beta: &mut [f64], radius: f64) {
    let norm: f64 = beta.iter().map(|b| b.abs()).sum();
    if norm <= radius {
        return;
    }
    let mut mags: Vec<f64> = beta.iter().map(|b| b.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (r, &m) in mags.iter().enumerate() {
        cum += m;
        let cand = (cum - radius) / (r + 1) as f64;
        if r + 1 == mags.len() || mags[r + 1] <= cand {
            theta = cand;
            break;
        }
    }
    for b in beta.iter_mut() {
        let shrunk = (b.abs() - theta).max(0.0);
        *b = b.signum() * shrunk;
    }
}

/// Streamed normal equations for the pair regression: `gram = sum q q^T`,
/// `cross = sum a q`, `target_ss = sum a^2` over accepted pairs.
#[derive(Debug, Clone)]
pub struct SufficientStats {
    dim: usize,
    gram: Vec<f64>,
    cross: Vec<f64>,
    target_ss: f64,
    pair_count: usize,
}

impl SufficientStats {
    pub fn new(dim: usize) -> Self {
        SufficientStats {
            dim,
            gram: vec![0.0; dim * dim],
            cross: vec![0.0; dim],
            target_ss: 0.0,
            pair_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn cross(&self) -> &[f64] {
        &self.cross
    }

    pub fn target_ss(&self) -> f64 {
        self.target_ss
    }

    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    /// Accumulate one pair with moment vector `q` and label `a`.
    pub fn add_pair(&mut self, q: &[f64], a: f64) {
        debug_assert_eq!(q.len(), self.dim);
        for r in 0..self.dim {
            let qr = q[r];
            for c in 0..self.dim {
                self.gram[r * self.dim + c] += qr * q[c];
            }
            self.cross[r] += a * qr;
        }
        self.target_ss += a * a;
        self.pair_count += 1;
    }

    /// Mean squared residual `(b^T G b - 2 b^T c + ss) / count` at `beta`.
    pub fn objective(&self, beta: &[f64]) -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for r in 0..self.dim {
            let mut row = 0.0;
            for c in 0..self.dim {
                row += self.gram[r * self.dim + c] * beta[c];
            }
            quad += beta[r] * row;
            lin += self.cross[r] * beta[r];
        }
        (quad - 2.0 * lin + self.target_ss) / self.pair_count as f64
    }

    /// Gradient of [`objective`](Self::objective): `2 (G b - c) / count`.
    pub fn gradient(&self, beta: &[f64], out: &mut [f64]) {
        let m = self.pair_count as f64;
        for r in 0..self.dim {
            let mut row = 0.0;
            for c in 0..self.dim {
                row += self.gram[r * self.dim + c] * beta[c];
            }
            out[r] = 2.0 * (row - self.cross[r]) / m;
        }
    }
}

/// Stream all pairs accepted by `pair_filter`, labeling each with the
/// adjacency bit of the graph.
pub fn accumulate_stats(
    moments: &MomentEstimates,
    graph: &SampledGraph,
    mut pair_filter: impl FnMut(usize, usize) -> bool,
) -> Result<SufficientStats> {
    if moments.n() != graph.n() {
        return Err(Error::parameter("moments and graph disagree on n"));
    }
    let dim = moments.order_count();
    let mut stats = SufficientStats::new(dim);
    let mut q = vec![0.0; dim];
    for (i, j) in PairIndexer::new(graph.n()).iter() {
        if !pair_filter(i, j) {
            continue;
        }
        moments.pair_vector(i, j, &mut q);
        stats.add_pair(&q, f64::from(graph.has_edge(i, j)));
    }
    if stats.pair_count == 0 {
        return Err(Error::EmptyData("pair filter accepted no pairs".to_string()));
    }
    Ok(stats)
}

/// As [`accumulate_stats`], over an explicit pair list with explicit labels
/// (split protocols assign labels that can differ from raw adjacency).
pub fn accumulate_stats_labeled(pm: &PairMoments, labels: &[f64]) -> Result<SufficientStats> {
    if pm.len() != labels.len() {
        return Err(Error::parameter("labels length mismatch"));
    }
    if pm.is_empty() {
        return Err(Error::EmptyData("no pairs to accumulate".to_string()));
    }
    let mut stats = SufficientStats::new(pm.order_count());
    for (r, &a) in labels.iter().enumerate() {
        stats.add_pair(pm.row(r), a);
    }
    Ok(stats)
}

/// How a fit was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum FitMethod {
    BoxProjectedGradient,
    Pls { components: usize },
}

/// Result of a regression fit.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub beta: Vec<f64>,
    /// Folded intercept (always 0 for the box fit; PLS centers the response).
    pub intercept: f64,
    pub space: Option<SearchSpace>,
    /// Final mean squared residual on the training pairs.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: FitMethod,
    pub warnings: Vec<String>,
}

impl RegressionFit {
    /// Prediction for one moment vector.
    pub fn predict_one(&self, q: &[f64]) -> f64 {
        self.intercept + linalg::dot(&self.beta, q)
    }
}

/// Minimize the pair-regression quadratic over the search space by projected
/// gradient with fixed step `1 / lambda_max` and per-mode projection.
///
/// Ties among minimizers are broken toward the minimum-norm solution through
/// a `1e-10 ||beta||^2` ridge; a gram matrix that has drifted indefinite is
/// floored at zero eigenvalues (with a warning flag on the fit).
pub fn fit_box_constrained(
    stats: &SufficientStats,
    space: &SearchSpace,
    tol: f64,
    max_iter: usize,
) -> Result<RegressionFit> {
    let dim = stats.dim();
    if space.coeffs() != dim {
        return Err(Error::parameter("search space dimension mismatch"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::parameter("tolerance must be positive"));
    }
    let m = stats.pair_count() as f64;

    let mut warnings = Vec::new();
    let (vals, vecs) = linalg::sym_eigen(stats.gram(), dim);
    let max_eig = vals.iter().cloned().fold(0.0f64, f64::max);
    let mut gram = stats.gram().to_vec();
    if vals.iter().any(|&v| v < -1e-12 * max_eig.max(1.0)) {
        // Rebuild with negative eigenvalues floored at zero.
        gram = vec![0.0; dim * dim];
        for (lam, v) in vals.iter().zip(&vecs) {
            let lam = lam.max(0.0);
            for r in 0..dim {
                for c in 0..dim {
                    gram[r * dim + c] += lam * v[r] * v[c];
                }
            }
        }
        warnings.push("gram matrix stabilized: negative eigenvalues floored at zero".to_string());
    }

    // Hessian of the ridged objective is 2 G / m + 2 ridge I; the largest
    // eigenvalue comes from the decomposition already at hand.
    let lambda_max = 2.0 * max_eig.max(0.0) / m + 2.0 * TIE_RIDGE;
    let step = 1.0 / lambda_max;

    let grad = |beta: &[f64], out: &mut [f64]| {
        for r in 0..dim {
            let mut row = 0.0;
            for c in 0..dim {
                row += gram[r * dim + c] * beta[c];
            }
            out[r] = 2.0 * (row - stats.cross()[r]) / m + 2.0 * TIE_RIDGE * beta[r];
        }
    };
    let ridged = |beta: &[f64]| -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for r in 0..dim {
            let mut row = 0.0;
            for c in 0..dim {
                row += gram[r * dim + c] * beta[c];
            }
            quad += beta[r] * row;
            lin += stats.cross()[r] * beta[r];
        }
        (quad - 2.0 * lin + stats.target_ss()) / m
            + TIE_RIDGE * beta.iter().map(|b| b * b).sum::<f64>()
    };

    let mut beta = vec![0.0; dim];
    space.project(&mut beta);
    let mut g = vec![0.0; dim];
    let mut current = ridged(&beta);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        grad(&beta, &mut g);
        let mut next = beta.clone();
        for (n, &gi) in next.iter_mut().zip(&g) {
            *n -= step * gi;
        }
        space.project(&mut next);
        let pg_norm = math::sqrt(
            beta.iter()
                .zip(&next)
                .map(|(b, n)| {
                    let d = (b - n) / step;
                    d * d
                })
                .sum::<f64>(),
        );
        let next_obj = ridged(&next);
        debug_assert!(
            next_obj <= current + 1e-12 * current.abs().max(1.0),
            "projected gradient increased the objective"
        );
        beta = next;
        current = next_obj;
        if pg_norm <= tol {
            converged = true;
            break;
        }
    }

    Ok(RegressionFit {
        objective: stats.objective(&beta),
        beta,
        intercept: 0.0,
        space: Some(space.clone()),
        iterations,
        converged,
        method: FitMethod::BoxProjectedGradient,
        warnings,
    })
}

/// First-order optimality report for a box fit.
#[derive(Debug, Clone, Copy)]
pub struct KktReport {
    /// Largest |gradient| over coordinates strictly inside the box.
    pub max_interior_grad: f64,
    /// Largest wrong-sign gradient magnitude over bound-active coordinates
    /// (positive values mean the certificate fails at that size).
    pub max_active_violation: f64,
    pub active_count: usize,
}

/// Evaluate the KKT conditions of a box fit at `beta`.
pub fn kkt_report(stats: &SufficientStats, space: &SearchSpace, beta: &[f64]) -> Result<KktReport> {
    let SpaceMode::Box { half_widths } = space.mode() else {
        return Err(Error::parameter("KKT report is defined for box spaces"));
    };
    let dim = stats.dim();
    let mut g = vec![0.0; dim];
    stats.gradient(beta, &mut g);
    for (r, b) in beta.iter().enumerate() {
        g[r] += 2.0 * TIE_RIDGE * b;
    }
    let mut interior = 0.0f64;
    let mut violation = 0.0f64;
    let mut active = 0usize;
    for r in 0..dim {
        let w = half_widths[r];
        let at_upper = (beta[r] - w).abs() <= 1e-9 * w.max(1.0);
        let at_lower = (beta[r] + w).abs() <= 1e-9 * w.max(1.0);
        if at_upper {
            // At the upper bound a positive gradient would let the objective
            // improve by moving inward, so optimality needs g <= 0.
            violation = violation.max(g[r]);
            active += 1;
        } else if at_lower {
            violation = violation.max(-g[r]);
            active += 1;
        } else {
            interior = interior.max(g[r].abs());
        }
    }
    Ok(KktReport {
        max_interior_grad: interior,
        max_active_violation: violation,
        active_count: active,
    })
}

/// NIPALS PLS1 on an explicit design (rows × cols, row-major). Columns and
/// response are centered, not scaled; the returned coefficients live on the
/// uncentered scale with the intercept folded into `intercept`.
pub fn fit_pls_design(
    x: &[f64],
    y: &[f64],
    rows: usize,
    cols: usize,
    components: usize,
) -> Result<RegressionFit> {
    if rows == 0 {
        return Err(Error::EmptyData("PLS needs at least one row".to_string()));
    }
    if x.len() != rows * cols || y.len() != rows {
        return Err(Error::parameter("design shape mismatch"));
    }
    if components == 0 || components > cols {
        return Err(Error::parameter("components must lie in 1..=cols"));
    }
    let mut warnings = Vec::new();

    let mut col_means = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            col_means[c] += x[r * cols + c];
        }
    }
    for m in col_means.iter_mut() {
        *m /= rows as f64;
    }
    let y_mean = y.iter().sum::<f64>() / rows as f64;

    let mut e: Vec<f64> = (0..rows * cols)
        .map(|idx| x[idx] - col_means[idx % cols])
        .collect();
    let mut f: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    // Column-variance guard for the zero-loading warning.
    for c in 0..cols {
        let var: f64 = (0..rows).map(|r| e[r * cols + c] * e[r * cols + c]).sum();
        if var <= 1e-24 {
            warnings.push(alloc::format!("column {c} has zero variance; loading is zero"));
        }
    }

    let mut w_vecs: Vec<Vec<f64>> = Vec::new();
    let mut p_vecs: Vec<Vec<f64>> = Vec::new();
    let mut q_scalars: Vec<f64> = Vec::new();
    let scale = {
        let mut s = 0.0f64;
        for &v in e.iter() {
            s = s.max(v.abs());
        }
        s.max(1e-300)
    };
    for _ in 0..components {
        let mut w = vec![0.0; cols];
        for r in 0..rows {
            let fr = f[r];
            if fr == 0.0 {
                continue;
            }
            for c in 0..cols {
                w[c] += e[r * cols + c] * fr;
            }
        }
        let w_norm = math::sqrt(w.iter().map(|v| v * v).sum::<f64>());
        if w_norm <= 1e-14 * scale {
            break; // response deflated to zero or rank exhausted
        }
        for v in w.iter_mut() {
            *v /= w_norm;
        }
        let mut t = vec![0.0; rows];
        for r in 0..rows {
            t[r] = linalg::dot(&e[r * cols..(r + 1) * cols], &w);
        }
        let tt: f64 = t.iter().map(|v| v * v).sum();
        if tt <= 1e-28 * scale * scale {
            break;
        }
        let mut p = vec![0.0; cols];
        for r in 0..rows {
            let tr = t[r];
            for c in 0..cols {
                p[c] += e[r * cols + c] * tr;
            }
        }
        for v in p.iter_mut() {
            *v /= tt;
        }
        let q: f64 = f.iter().zip(&t).map(|(fv, tv)| fv * tv).sum::<f64>() / tt;
        for r in 0..rows {
            let tr = t[r];
            for c in 0..cols {
                e[r * cols + c] -= tr * p[c];
            }
            f[r] -= q * tr;
        }
        w_vecs.push(w);
        p_vecs.push(p);
        q_scalars.push(q);
    }

    let used = w_vecs.len();
    let beta = if used == 0 {
        vec![0.0; cols]
    } else {
        // beta = W (P^T W)^-1 q
        let mut ptw = vec![0.0; used * used];
        for (r, p) in p_vecs.iter().enumerate() {
            for (c, w) in w_vecs.iter().enumerate() {
                ptw[r * used + c] = linalg::dot(p, w);
            }
        }
        let inner = linalg::solve(&ptw, &q_scalars, used)?;
        let mut beta = vec![0.0; cols];
        for (w, &coef) in w_vecs.iter().zip(&inner) {
            for c in 0..cols {
                beta[c] += coef * w[c];
            }
        }
        beta
    };

    let intercept = y_mean - linalg::dot(&col_means, &beta);
    let mut sse = 0.0;
    for r in 0..rows {
        let pred = intercept + linalg::dot(&x[r * cols..(r + 1) * cols], &beta);
        let resid = pred - y[r];
        sse += resid * resid;
    }

    Ok(RegressionFit {
        beta,
        intercept,
        space: None,
        objective: sse / rows as f64,
        iterations: used,
        converged: true,
        method: FitMethod::Pls { components },
        warnings,
    })
}

/// PLS over all pairs accepted by the filter, labels taken from adjacency.
pub fn fit_pls(
    moments: &MomentEstimates,
    graph: &SampledGraph,
    components: usize,
    mut pair_filter: impl FnMut(usize, usize) -> bool,
) -> Result<RegressionFit> {
    if moments.n() != graph.n() {
        return Err(Error::parameter("moments and graph disagree on n"));
    }
    let cols = moments.order_count();
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut q = vec![0.0; cols];
    for (i, j) in PairIndexer::new(graph.n()).iter() {
        if !pair_filter(i, j) {
            continue;
        }
        moments.pair_vector(i, j, &mut q);
        x.extend_from_slice(&q);
        y.push(f64::from(graph.has_edge(i, j)));
    }
    if y.is_empty() {
        return Err(Error::EmptyData("pair filter accepted no pairs".to_string()));
    }
    let rows = y.len();
    fit_pls_design(&x, &y, rows, cols, components)
}

/// PLS over an explicit pair list with explicit labels.
pub fn fit_pls_pairs(pm: &PairMoments, labels: &[f64], components: usize) -> Result<RegressionFit> {
    if pm.len() != labels.len() {
        return Err(Error::parameter("labels length mismatch"));
    }
    if pm.is_empty() {
        return Err(Error::EmptyData("no pairs for PLS".to_string()));
    }
    let cols = pm.order_count();
    let mut x = Vec::with_capacity(pm.len() * cols);
    for r in 0..pm.len() {
        x.extend_from_slice(pm.row(r));
    }
    fit_pls_design(&x, labels, pm.len(), cols, components)
}

/// Predictions `p_ij = intercept + <beta, q_ij>` for all stored pairs, in
/// pair-index order. Values are not clipped: they are risk-minimizing
/// estimates, not calibrated probabilities.
pub fn predict(fit: &RegressionFit, moments: &MomentEstimates) -> Result<Vec<f64>> {
    if fit.beta.len() != moments.order_count() {
        return Err(Error::parameter("fit and moments disagree on order count"));
    }
    let indexer = PairIndexer::new(moments.n());
    let mut q = vec![0.0; fit.beta.len()];
    let mut out = vec![0.0; indexer.len()];
    for (i, j) in indexer.iter() {
        moments.pair_vector(i, j, &mut q);
        out[indexer.index(i, j)] = fit.predict_one(&q);
    }
    Ok(out)
}

/// Predictions for an explicit pair list.
pub fn predict_pairs(fit: &RegressionFit, pm: &PairMoments) -> Result<Vec<f64>> {
    if fit.beta.len() != pm.order_count() {
        return Err(Error::parameter("fit and moments disagree on order count"));
    }
    Ok((0..pm.len()).map(|r| fit.predict_one(pm.row(r))).collect())
}

/// Optional reporting clamp to `[0, 1]`.
pub fn clamp_unit(scores: &mut [f64]) {
    for s in scores.iter_mut() {
        *s = s.clamp(0.0, 1.0);
    }
}

/// Pairs whose prediction reaches the threshold `gamma`.
pub fn threshold_edges(
    pairs: &[(u32, u32)],
    p_hat: &[f64],
    gamma: f64,
) -> Vec<(u32, u32)> {
    pairs
        .iter()
        .zip(p_hat)
        .filter(|&(_, &p)| p >= gamma)
        .map(|(&pair, _)| pair)
        .collect()
}

/// Exact population risk for a block model with known spectrum:
/// `R(beta) = sum_s (rho mu_s - sum_r beta_r (rho mu_s)^(r+1))^2`, summing
/// over all eigenvalues with multiplicity.
pub fn population_risk_sbm(
    spec: &SpectralDecomposition,
    beta: &[f64],
    rho: f64,
) -> Result<f64> {
    if beta.is_empty() {
        return Err(Error::parameter("beta must be nonempty"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::parameter("rho must lie in (0, 1]"));
    }
    let mut risk = 0.0;
    for &mu in spec.eigenvalues() {
        let target = rho * mu;
        let mut fitted = 0.0;
        let mut pw = target * target;
        for &b in beta {
            fitted += b * pw;
            pw *= target;
        }
        risk += (target - fitted) * (target - fitted);
    }
    Ok(risk)
}

/// Truncation penalty of fitting only `L + 1` moment coefficients when the
/// kernel has distinct rank `m_W`:
/// `sqrt( sum_s [ sum_{r=L+1}^{m_W} beta*_r (mu_s^(r+1) - mu_s^(L+2)) ]^2 )`
/// over the distinct nonzero eigenvalues; zero once `L + 1 >= m_W`.
pub fn gen_error_bound(spec: &SpectralDecomposition, layers: usize) -> Result<f64> {
    let k = layers + 1;
    let m_w = spec.distinct_rank();
    if k >= m_w {
        return Ok(0.0);
    }
    let beta = crate::graphon::beta_star(spec)?;
    let mus: Vec<f64> = spec.distinct_nonzero().iter().map(|(mu, _)| *mu).collect();
    let mut total = 0.0;
    for &mu in &mus {
        let anchor = math::powi(mu, (k + 1) as i32);
        let mut dev = 0.0;
        for r in k..=m_w {
            dev += beta[r - 1] * (math::powi(mu, (r + 1) as i32) - anchor);
        }
        total += dev * dev;
    }
    Ok(math::sqrt(total))
}

/// Mean squared residual of `beta` (plus intercept) over filtered pairs.
pub fn empirical_risk(
    beta: &[f64],
    intercept: f64,
    moments: &MomentEstimates,
    graph: &SampledGraph,
    mut pair_filter: impl FnMut(usize, usize) -> bool,
) -> Result<f64> {
    if moments.n() != graph.n() {
        return Err(Error::parameter("moments and graph disagree on n"));
    }
    if beta.len() != moments.order_count() {
        return Err(Error::parameter("beta and moments disagree on order count"));
    }
    let mut q = vec![0.0; beta.len()];
    let mut sse = 0.0;
    let mut count = 0usize;
    for (i, j) in PairIndexer::new(graph.n()).iter() {
        if !pair_filter(i, j) {
            continue;
        }
        moments.pair_vector(i, j, &mut q);
        let resid = intercept + linalg::dot(beta, &q) - f64::from(graph.has_edge(i, j));
        sse += resid * resid;
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyData("pair filter accepted no pairs".to_string()));
    }
    Ok(sse / count as f64)
}
