use sha2::{Digest, Sha256};

use super::dense::Dense;
use super::NumericsError;

/// Compressed sparse column matrix (rows = terms, columns = documents).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Zero values are
    /// dropped; duplicates, out-of-range indices and non-finite values are
    /// rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, NumericsError> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(NumericsError::InvalidInput(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(NumericsError::InvalidInput(format!(
                    "entry ({r}, {c}) is {v}"
                )));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(NumericsError::InvalidInput(format!(
                "duplicate entry ({}, {})",
                w[0].0, w[0].1
            )));
        }
        entries.retain(|e| e.2 != 0.0);
        let mut col_ptr = vec![0; cols + 1];
        for &(_, c, _) in &entries {
            col_ptr[c + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self {
            rows,
            cols,
            col_ptr,
            row_idx: entries.iter().map(|e| e.0).collect(),
            values: entries.iter().map(|e| e.2).collect(),
        })
    }

    pub fn from_dense(m: &Dense) -> Self {
        let triplets = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, m[(i, j)]));
        Self::from_triplets(m.rows(), m.cols(), triplets).expect("dense entries are unique")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Non-zero `(row, value)` pairs of column `j`, by row.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All non-zero entries as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.column(j)
            .find(|&(r, _)| r == i)
            .map_or(0.0, |(_, v)| v)
    }

    pub fn to_dense(&self) -> Dense {
        let mut d = Dense::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// A·X for dense X (cols × l).
    pub fn mul_dense(&self, x: &Dense) -> Dense {
        assert_eq!(self.cols, x.rows(), "dimension mismatch");
        let l = x.cols();
        let mut out = Dense::zeros(self.rows, l);
        for j in 0..self.cols {
            let xrow = x.row(j);
            for (i, v) in self.column(j) {
                for c in 0..l {
                    out[(i, c)] += v * xrow[c];
                }
            }
        }
        out
    }

    /// Aᵀ·X for dense X (rows × l).
    pub fn t_mul_dense(&self, x: &Dense) -> Dense {
        assert_eq!(self.rows, x.rows(), "dimension mismatch");
        let l = x.cols();
        let mut out = Dense::zeros(self.cols, l);
        for j in 0..self.cols {
            for (i, v) in self.column(j) {
                let xrow = x.row(i);
                for c in 0..l {
                    out[(j, c)] += v * xrow[c];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Hex SHA-256 over the shape and entries; identifies a corpus.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.rows as u64).to_le_bytes());
        h.update((self.cols as u64).to_le_bytes());
        for (i, j, v) in self.triplets() {
            h.update((i as u64).to_le_bytes());
            h.update((j as u64).to_le_bytes());
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_multiplies() {
        let m =
            SparseMatrix::from_triplets(3, 2, [(2, 1, 4.0), (0, 0, 1.0), (1, 1, 0.0), (0, 1, 2.0)])
                .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(2, 1), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        let dense = m.to_dense();
        let x = Dense::from_rows(&[[1.0, 0.5], [2.0, -1.0]]);
        assert!(m.mul_dense(&x).max_abs_diff(&dense.matmul(&x)) < 1e-15);
        let y = Dense::from_rows(&[[1.0], [2.0], [3.0]]);
        assert!(
            m.t_mul_dense(&y)
                .max_abs_diff(&dense.transpose().matmul(&y))
                < 1e-15
        );
    }

    #[test]
    fn rejects_duplicates_and_non_finite() {
        assert!(SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, [(0, 0, f64::NAN)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn hash_depends_on_content() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0)]).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, [(0, 0, 2.0)]).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), a.clone().content_hash());
    }
}
