use std::fmt;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Dense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Dense {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Self { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Dense {
        let mut out = Dense::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// Rows selected by `indices`, in that order (repeats allowed).
    pub fn select_rows(&self, indices: &[usize]) -> Dense {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Dense::from_vec(indices.len(), self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Dense) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Dense {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Dense {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Householder QR of an m×n matrix with m ≥ n.
pub(crate) struct Householder {
    /// Reflector vectors stored below the diagonal, R on and above it.
    qr: Dense,
    /// Leading element of each reflector.
    v0: Vec<f64>,
    /// Scale factor 2 / vᵀv of each reflector (0 when the column was zero).
    tau: Vec<f64>,
}

impl Householder {
    pub fn new(a: &Dense) -> Self {
        let (m, n) = (a.rows, a.cols);
        assert!(m >= n, "Householder QR needs rows >= cols");
        let mut qr = a.clone();
        let mut v0 = vec![0.0; n];
        let mut tau = vec![0.0; n];
        for k in 0..n {
            let x_norm = (k..m).map(|i| qr[(i, k)].powi(2)).sum::<f64>().sqrt();
            if x_norm == 0.0 {
                continue;
            }
            let alpha = if qr[(k, k)] > 0.0 { -x_norm } else { x_norm };
            let lead = qr[(k, k)] - alpha;
            let vtv = lead * lead + (k + 1..m).map(|i| qr[(i, k)].powi(2)).sum::<f64>();
            if vtv == 0.0 {
                qr[(k, k)] = alpha;
                continue;
            }
            v0[k] = lead;
            tau[k] = 2.0 / vtv;
            qr[(k, k)] = alpha;
            for j in k + 1..n {
                let s =
                    lead * qr[(k, j)] + (k + 1..m).map(|i| qr[(i, k)] * qr[(i, j)]).sum::<f64>();
                let f = tau[k] * s;
                qr[(k, j)] -= f * lead;
                for i in k + 1..m {
                    let vi = qr[(i, k)];
                    qr[(i, j)] -= f * vi;
                }
            }
        }
        Self { qr, v0, tau }
    }

    fn reflect(&self, k: usize, x: &mut [f64]) {
        if self.tau[k] == 0.0 {
            return;
        }
        let m = self.qr.rows;
        let s = self.v0[k] * x[k] + (k + 1..m).map(|i| self.qr[(i, k)] * x[i]).sum::<f64>();
        let f = self.tau[k] * s;
        x[k] -= f * self.v0[k];
        for (i, xi) in x.iter_mut().enumerate().take(m).skip(k + 1) {
            *xi -= f * self.qr[(i, k)];
        }
    }

    /// Qᵀ·b.
    pub fn qt_mul(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for k in 0..self.qr.cols {
            self.reflect(k, &mut x);
        }
        x
    }

    /// The thin m×n factor Q.
    pub fn thin_q(&self) -> Dense {
        let (m, n) = (self.qr.rows, self.qr.cols);
        let mut q = Dense::zeros(m, n);
        for j in 0..n {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            for k in (0..n).rev() {
                self.reflect(k, &mut e);
            }
            q.set_column(j, &e);
        }
        q
    }

    /// The n×n upper-triangular factor R.
    pub fn r(&self) -> Dense {
        let n = self.qr.cols;
        let mut r = Dense::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r[(i, j)] = self.qr[(i, j)];
            }
        }
        r
    }

    pub fn r_diag(&self) -> Vec<f64> {
        (0..self.qr.cols).map(|i| self.qr[(i, i)]).collect()
    }
}

/// Orthonormal basis (m×n, m ≥ n) spanning the columns of `a`, via
/// Householder QR.
pub fn orthonormalize(a: &Dense) -> Dense {
    Householder::new(a).thin_q()
}

/// Solves R·x = b for upper-triangular R.
pub(crate) fn back_substitute(r: &Dense, b: &[f64]) -> Vec<f64> {
    let n = r.cols;
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| r[(i, j)] * x[j]).sum();
        x[i] = (b[i] - s) / r[(i, i)];
    }
    x
}

/// Inverse of an upper-triangular matrix.
pub(crate) fn upper_triangular_inverse(r: &Dense) -> Dense {
    let n = r.cols;
    let mut inv = Dense::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = back_substitute(r, &e);
        inv.set_column(j, &col);
    }
    inv
}

/// Cholesky factor L (lower) of a symmetric positive-definite matrix, or
/// `None` when a pivot is not positive.
pub(crate) fn cholesky(a: &Dense) -> Option<Dense> {
    let n = a.rows;
    let mut l = Dense::zeros(n, n);
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    for j in 0..n {
        let d = a[(j, j)] - (0..j).map(|k| l[(j, k)].powi(2)).sum::<f64>();
        // also rejects NaN
        if d.is_nan() || d <= scale * 1e-14 {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves A·x = b given the Cholesky factor L of A.
pub(crate) fn cholesky_solve(l: &Dense, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (b[i] - s) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
        x[i] = (y[i] - s) / l[(i, i)];
    }
    x
}
