//! Small dense linear algebra: symmetric eigendecomposition (cyclic Jacobi),
//! Gaussian elimination, power iteration, and the blocked pairwise-dot kernel
//! used for all-pairs embedding products.

use crate::error::Error;
use crate::math;
use crate::Result;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Eigendecomposition of a symmetric `k`×`k` matrix (row-major).
///
/// Returns `(values, vectors)` with `vectors[r]` the unit eigenvector for
/// `values[r]`, sorted by descending |value| (ties: descending value). Signs
/// are fixed so the first component of largest magnitude is positive.
pub fn sym_eigen(a: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), k * k);
    let mut m = a.to_vec();
    // v starts as identity; accumulates rotations column-wise.
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                s += m[p * k + q] * m[p * k + q];
            }
        }
        s
    };

    let mut sweeps = 0;
    while off(&m) > 1e-30 && sweeps < 100 {
        sweeps += 1;
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = m[p * k + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * k + p];
                let aqq = m[q * k + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for r in 0..k {
                    let mrp = m[r * k + p];
                    let mrq = m[r * k + q];
                    m[r * k + p] = c * mrp - s * mrq;
                    m[r * k + q] = s * mrp + c * mrq;
                }
                for r in 0..k {
                    let mpr = m[p * k + r];
                    let mqr = m[q * k + r];
                    m[p * k + r] = c * mpr - s * mqr;
                    m[q * k + r] = s * mpr + c * mqr;
                }
                for r in 0..k {
                    let vrp = v[r * k + p];
                    let vrq = v[r * k + q];
                    v[r * k + p] = c * vrp - s * vrq;
                    v[r * k + q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a_, &b_| {
        let (va, vb) = (m[a_ * k + a_], m[b_ * k + b_]);
        vb.abs()
            .partial_cmp(&va.abs())
            .unwrap()
            .then(vb.partial_cmp(&va).unwrap())
    });

    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for &col in &order {
        values.push(m[col * k + col]);
        let mut vec_r: Vec<f64> = (0..k).map(|r| v[r * k + col]).collect();
        // Deterministic sign: largest-magnitude component positive.
        let mut best = 0;
        for (idx, &x) in vec_r.iter().enumerate() {
            if x.abs() > vec_r[best].abs() {
                best = idx;
            }
        }
        if vec_r[best] < 0.0 {
            for x in vec_r.iter_mut() {
                *x = -*x;
            }
        }
        vectors.push(vec_r);
    }
    (values, vectors)
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let mut max_abs = 0.0f64;
    for &x in a {
        max_abs = max_abs.max(x.abs());
    }
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col].abs() <= 1e-14 * max_abs.max(1e-300) {
            return Err(Error::SingularSystem(
                "pivot vanished during elimination".to_string(),
            ));
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            rhs.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = rhs[r];
        for c in (r + 1)..n {
            s -= m[r * n + c] * x[c];
        }
        x[r] = s / m[r * n + r];
    }
    Ok(x)
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
pub fn power_iteration_sym(a: &[f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    let mut x = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let mut y = vec![0.0; n];
        for r in 0..n {
            let mut s = 0.0;
            for c in 0..n {
                s += a[r * n + c] * x[c];
            }
            y[r] = s;
        }
        let norm = math::sqrt(y.iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        let next = y.iter().map(|v| v / norm).collect::<Vec<_>>();
        let new_lambda = norm;
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        x = next;
        if delta <= 1e-13 * lambda.max(1.0) {
            break;
        }
    }
    lambda
}

/// Dot product with four accumulators so the reduction vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let chunks = a.len() / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in 0..chunks {
        let i = c * 4;
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in (chunks * 4)..a.len() {
        tail += a[i] * b[i];
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// `out[i*n + j] = <a_i, b_j>` for row-major `a`, `b` of shape `n`×`d`.
///
/// Blocked over row tiles so each tile of `b` is reused across a tile of `a`.
pub fn cross_dots(a: &[f64], b: &[f64], n: usize, d: usize, out: &mut [f64]) {
    assert_eq!(a.len(), n * d);
    assert_eq!(b.len(), n * d);
    assert_eq!(out.len(), n * n);
    const TILE: usize = 16;
    let mut ib = 0;
    while ib < n {
        let ie = (ib + TILE).min(n);
        let mut jb = 0;
        while jb < n {
            let je = (jb + TILE).min(n);
            for i in ib..ie {
                let ai = &a[i * d..(i + 1) * d];
                for j in jb..je {
                    out[i * n + j] = dot(ai, &b[j * d..(j + 1) * d]);
                }
            }
            jb = je;
        }
        ib = ie;
    }
}
