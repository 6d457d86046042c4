//! Brute-force moment references: empirical moments via adjacency-matrix
//! powers, and the concentration-rate diagnostic.

use crate::error::Error;
use crate::graphon::SampledGraph;
use crate::math;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;

/// Empirical moments `(A^k)_{ij} / (n-1)^(k-1)` for all orders `2..=k_max`.
///
/// Walk counts are accumulated in `f64`; they are integer-exact while below
/// 2^53 (every regime this crate exercises) and carry relative error at most
/// ~1e-12·k beyond that.
#[derive(Debug, Clone)]
pub struct EmpiricalMoments {
    n: usize,
    k_max: usize,
    /// Raw walk-count matrices for k = 2..=k_max, dense row-major n×n.
    counts: Vec<Vec<f64>>,
}

impl EmpiricalMoments {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Normalized moment for `i != j`: `(A^k)_{ij} / (n-1)^(k-1)`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        assert!((2..=self.k_max).contains(&k), "order {k} out of range");
        let scale = math::powi((self.n - 1) as f64, (k - 1) as i32);
        self.counts[k - 2][i * self.n + j] / scale
    }

    /// Raw walk count `(A^k)_{ij}` (diagonal included).
    pub fn walk_count(&self, k: usize, i: usize, j: usize) -> f64 {
        assert!((2..=self.k_max).contains(&k), "order {k} out of range");
        self.counts[k - 2][i * self.n + j]
    }
}

/// Compute empirical moments for all orders `2..=k_max` by repeated sparse
/// multiplication with the adjacency structure.
pub fn empirical_moments(graph: &SampledGraph, k_max: usize) -> Result<EmpiricalMoments> {
    if !(2..=8).contains(&k_max) {
        return Err(Error::UnsupportedOrder(k_max));
    }
    let n = graph.n();
    // A^1 as a dense seed for the iteration.
    let mut adjacency = vec![0.0f64; n * n];
    for i in 0..n {
        for &j in graph.neighbors(i) {
            adjacency[i * n + j as usize] = 1.0;
        }
    }
    let mut counts: Vec<Vec<f64>> = Vec::with_capacity(k_max - 1);
    for step in 0..(k_max - 1) {
        let prev: &[f64] = if step == 0 { &adjacency } else { &counts[step - 1] };
        let mut next = vec![0.0f64; n * n];
        for i in 0..n {
            let row = &prev[i * n..(i + 1) * n];
            let out = &mut next[i * n..(i + 1) * n];
            for (t, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                for &j in graph.neighbors(t) {
                    out[j as usize] += c;
                }
            }
        }
        counts.push(next);
    }
    Ok(EmpiricalMoments { n, k_max, counts })
}

/// Concentration-rate diagnostic
/// `r(n, d, m) = max_{2<=k<=m+1} log(n)^k / sqrt(n-1) * [3 a_k sqrt(rho) + 96 a_{k-1} / sqrt(d)]`
/// with `a_k = (8(k+2))^k * k^(k+1) * sqrt(k!)`.
///
/// The absolute constant in `a_k` is unknown and fixed to 1 here, so the
/// value is a diagnostic for comparing settings, not a sound bound.
pub fn rate_r(n: usize, d: usize, m: usize, rho: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::parameter("rate_r needs n >= 2"));
    }
    if m < 1 {
        return Err(Error::parameter("rate_r needs m >= 1"));
    }
    if d < 1 {
        return Err(Error::parameter("rate_r needs d >= 1"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::parameter("rho must lie in (0, 1]"));
    }
    let log_n = math::ln(n as f64);
    let sqrt_nm1 = math::sqrt((n - 1) as f64);
    let mut best = f64::NEG_INFINITY;
    for k in 2..=(m + 1) {
        let term = math::powi(log_n, k as i32) / sqrt_nm1
            * (3.0 * a_k(k) * math::sqrt(rho) + 96.0 * a_k(k - 1) / math::sqrt(d as f64));
        best = best.max(term);
    }
    Ok(best)
}

/// `a_k = (8(k+2))^k * k^(k+1) * sqrt(k!)` with the unknown constant set to 1.
pub fn a_k(k: usize) -> f64 {
    let base = math::powi(8.0 * (k as f64 + 2.0), k as i32);
    let poly = math::powi(k as f64, k as i32 + 1);
    let mut fact = 1.0;
    for t in 2..=k {
        fact *= t as f64;
    }
    base * poly * math::sqrt(fact)
}
