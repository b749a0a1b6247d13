//! Truncated SVD by seeded block subspace iteration.
//!
//! Each sweep multiplies the current basis by Aᵀ and A, re-orthonormalizing
//! (Householder QR) after each product. Ritz values and vectors come from a
//! one-sided Jacobi SVD of the small projected matrix. Iteration stops when
//! both the change in the top-k singular values and the Ritz residual fall
//! below `tol · σ₁`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{dot, norm, orthonormalize, Dense};
use super::sparse::SparseMatrix;
use super::NumericsError;

#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    /// rows × k, orthonormal columns.
    pub u: Dense,
    /// k singular values, descending.
    pub s: Vec<f64>,
    /// cols × k, orthonormal columns.
    pub v: Dense,
    pub sweeps: usize,
}

impl SvdFactors {
    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// U·diag(S)·Vᵀ.
    pub fn reconstruct(&self) -> Dense {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.s.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.v.transpose())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 1000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

pub fn truncated_svd(m: &SparseMatrix, k: usize) -> Result<SvdFactors, NumericsError> {
    truncated_svd_with(m, k, &SvdOptions::default())
}

pub fn truncated_svd_with(
    m: &SparseMatrix,
    k: usize,
    opts: &SvdOptions,
) -> Result<SvdFactors, NumericsError> {
    let (rows, cols) = (m.rows(), m.cols());
    let full = rows.min(cols);
    if k == 0 || k > full {
        return Err(NumericsError::InvalidInput(format!(
            "k = {k} must lie in 1..={full} for a {rows}x{cols} matrix"
        )));
    }
    let l = (k + 10).min(full);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let omega = Dense::from_vec(
        cols,
        l,
        (0..cols * l).map(|_| rng.random_range(-1.0..1.0)).collect(),
    );
    let mut q = orthonormalize(&m.mul_dense(&omega));

    let mut prev: Option<Vec<f64>> = None;
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_sweeps {
        let z = orthonormalize(&m.t_mul_dense(&q));
        q = orthonormalize(&m.mul_dense(&z));

        let (rot, w, sigma) = jacobi_columns(&m.t_mul_dense(&q));
        let s: Vec<f64> = sigma[..k].to_vec();
        let scale = s[0];
        if scale == 0.0 {
            // zero matrix: any orthonormal bases will do
            return Ok(finish(
                q.columns(0..k),
                s,
                complete(&Dense::zeros(cols, 0), cols, k),
                sweep,
            ));
        }
        let u = q.matmul(&rot).columns(0..k);
        let mut v = Dense::zeros(cols, k);
        let mut kept = 0;
        for j in 0..k {
            if s[j] > scale * 1e-13 {
                let col: Vec<f64> = w[j].iter().map(|x| x / s[j]).collect();
                v.set_column(j, &col);
                kept += 1;
            }
        }
        let av = m.mul_dense(&v);
        residual = (0..kept)
            .map(|j| {
                let diff: Vec<f64> = (0..rows).map(|i| av[(i, j)] - s[j] * u[(i, j)]).collect();
                norm(&diff)
            })
            .fold(0.0, f64::max);
        let change = prev.as_ref().map_or(f64::INFINITY, |p| {
            p.iter()
                .zip(&s)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        // a basis spanning the full space is exact after one sweep
        let exact = l == full && residual <= opts.tol * scale;
        if exact || (change <= opts.tol * scale && residual <= opts.tol * scale) {
            let v = if kept < k {
                complete(&v.columns(0..kept), cols, k)
            } else {
                v
            };
            return Ok(finish(u, s, v, sweep));
        }
        prev = Some(s);
    }
    Err(NumericsError::ConvergenceFailure {
        sweeps: opts.max_sweeps,
        residual,
    })
}

/// Makes the largest-magnitude entry of each left vector positive.
fn finish(mut u: Dense, s: Vec<f64>, mut v: Dense, sweeps: usize) -> SvdFactors {
    for j in 0..s.len() {
        let col = u.column(j);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            u.set_column(j, &col.iter().map(|x| -x).collect::<Vec<_>>());
            let vc = v.column(j);
            v.set_column(j, &vc.iter().map(|x| -x).collect::<Vec<_>>());
        }
    }
    SvdFactors { u, s, v, sweeps }
}

/// Extends orthonormal columns `base` (n × r) to n × k with standard-basis
/// Gram–Schmidt completion.
fn complete(base: &Dense, n: usize, k: usize) -> Dense {
    let mut cols: Vec<Vec<f64>> = (0..base.cols()).map(|j| base.column(j)).collect();
    let mut e = 0;
    while cols.len() < k && e < n {
        let mut x = vec![0.0; n];
        x[e] = 1.0;
        for _ in 0..2 {
            for c in &cols {
                let d = dot(&x, c);
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi -= d * ci;
                }
            }
        }
        let nx = norm(&x);
        if nx > 1e-8 {
            cols.push(x.iter().map(|v| v / nx).collect());
        }
        e += 1;
    }
    let mut out = Dense::zeros(n, k);
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// One-sided Jacobi: finds an orthogonal J with the columns of A·J mutually
/// orthogonal. Returns J, the columns of A·J and their norms, sorted by norm
/// descending.
pub(crate) fn jacobi_columns(a: &Dense) -> (Dense, Vec<Vec<f64>>, Vec<f64>) {
    let n = a.cols();
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut j_cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut j_cols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let mut rot = Dense::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        rot.set_column(new, &j_cols[old]);
    }
    let w_sorted = order.iter().map(|&o| w[o].clone()).collect();
    let s_sorted = order.iter().map(|&o| norms[o]).collect();
    (rot, w_sorted, s_sorted)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}
