//! Ordinary least squares via Householder QR, and Wald chunk tests.

use super::dense::{
    back_substitute, cholesky, cholesky_solve, dot, upper_triangular_inverse, Dense, Householder,
};
use super::NumericsError;

/// Relative size of |R_jj| below which column j counts as dependent.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// β, intercept first.
    pub coefficients: Vec<f64>,
    /// σ̂²(XᵀX)⁻¹.
    pub covariance: Dense,
    pub residual_variance: f64,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n: usize,
    /// Number of columns, intercept included.
    pub p: usize,
}

/// Fits y = Xβ. Column 0 of `x` must be the intercept.
pub fn ols_fit(x: &Dense, y: &[f64]) -> Result<OlsFit, NumericsError> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(NumericsError::InvalidInput(format!(
            "X has {n} rows but y has {} values",
            y.len()
        )));
    }
    if p == 0 || n <= p {
        return Err(NumericsError::InvalidInput(format!(
            "OLS needs n > p, got n = {n}, p = {p}"
        )));
    }
    let qr = Householder::new(x);
    let diag = qr.r_diag();
    let col_norms: Vec<f64> = (0..p).map(|j| super::dense::norm(&x.column(j))).collect();
    let scale = col_norms.iter().copied().fold(0.0, f64::max);
    let dependent: Vec<usize> = (0..p)
        .filter(|&j| diag[j].abs() <= RANK_TOLERANCE * scale.max(f64::MIN_POSITIVE))
        .collect();
    if !dependent.is_empty() {
        return Err(NumericsError::SingularDesign { columns: dependent });
    }
    let r = qr.r();
    let qty = qr.qt_mul(y);
    let beta = back_substitute(&r, &qty[..p]);

    let rss = residual_sum_of_squares(x, y, &beta);
    let sigma2 = rss / (n - p) as f64;
    let r_inv = upper_triangular_inverse(&r);
    let mut covariance = r_inv.matmul(&r_inv.transpose());
    for i in 0..p {
        for j in 0..p {
            covariance[(i, j)] *= sigma2;
        }
    }
    // symmetrize away rounding
    for i in 0..p {
        for j in 0..i {
            let m = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
            covariance[(i, j)] = m;
            covariance[(j, i)] = m;
        }
    }
    let r_squared = r_squared(y, rss);
    Ok(OlsFit {
        coefficients: beta,
        covariance,
        residual_variance: sigma2,
        r_squared,
        adj_r_squared: adjust(r_squared, n, p),
        n,
        p,
    })
}

fn residual_sum_of_squares(x: &Dense, y: &[f64], beta: &[f64]) -> f64 {
    (0..x.rows())
        .map(|i| (y[i] - dot(x.row(i), beta)).powi(2))
        .sum()
}

/// 1 − RSS/TSS; 0 when y is constant.
fn r_squared(y: &[f64], rss: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        0.0
    } else {
        1.0 - rss / tss
    }
}

/// Adjusted R² with `p` counting the intercept column.
fn adjust(r2: f64, n: usize, p: usize) -> f64 {
    let predictors = (p - 1) as f64;
    let n = n as f64;
    1.0 - (1.0 - r2) * (n - 1.0) / (n - predictors - 1.0)
}

impl OlsFit {
    /// Adjusted R² of these coefficients evaluated on other data with the
    /// same columns.
    pub fn adj_r_squared_on(&self, x: &Dense, y: &[f64]) -> f64 {
        let rss = residual_sum_of_squares(x, y, &self.coefficients);
        adjust(r_squared(y, rss), x.rows(), self.p)
    }

    pub fn residuals(&self, x: &Dense, y: &[f64]) -> Vec<f64> {
        (0..x.rows())
            .map(|i| y[i] - dot(x.row(i), &self.coefficients))
            .collect()
    }

    pub fn standard_error(&self, j: usize) -> f64 {
        self.covariance[(j, j)].sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaldResult {
    pub parameter: String,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
}

/// W = β_gᵀ V_g⁻¹ β_g over the coefficient group `group`.
pub fn wald_chunk(
    fit: &OlsFit,
    group: &[usize],
    parameter: &str,
) -> Result<WaldResult, NumericsError> {
    if group.is_empty() || group.iter().any(|&j| j == 0 || j >= fit.p) {
        return Err(NumericsError::InvalidInput(format!(
            "coefficient group {group:?} must be nonempty, exclude the intercept and lie below {}",
            fit.p
        )));
    }
    let beta: Vec<f64> = group.iter().map(|&j| fit.coefficients[j]).collect();
    if beta.iter().all(|b| *b == 0.0) {
        return Ok(WaldResult {
            parameter: parameter.to_string(),
            statistic: 0.0,
            degrees_of_freedom: group.len(),
        });
    }
    let g = group.len();
    let mut v = Dense::zeros(g, g);
    for (a, &i) in group.iter().enumerate() {
        for (b, &j) in group.iter().enumerate() {
            v[(a, b)] = fit.covariance[(i, j)];
        }
    }
    let l = cholesky(&v).ok_or(NumericsError::SingularCovariance)?;
    let z = cholesky_solve(&l, &beta);
    Ok(WaldResult {
        parameter: parameter.to_string(),
        statistic: dot(&beta, &z).max(0.0),
        degrees_of_freedom: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_design(xs: &[f64]) -> Dense {
        Dense::from_rows(&xs.iter().map(|x| [1.0, *x]).collect::<Vec<_>>())
    }

    #[test]
    fn noiseless_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let fit = ols_fit(&line_design(&xs), &y).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_response() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let fit = ols_fit(&line_design(&xs), &[4.0; 10]).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert_eq!(fit.r_squared, 0.0);
        assert!(fit.adj_r_squared <= fit.r_squared);
    }

    #[test]
    fn dependent_columns_are_reported() {
        let x = Dense::from_rows(&[
            [1.0, 1.0, 2.0],
            [1.0, 2.0, 4.0],
            [1.0, 3.0, 6.0],
            [1.0, 4.0, 8.0],
        ]);
        assert_eq!(
            ols_fit(&x, &[1.0, 2.0, 3.0, 5.0]).unwrap_err(),
            NumericsError::SingularDesign { columns: vec![2] }
        );
    }

    #[test]
    fn wald_single_coefficient_is_squared_z() {
        let xs: Vec<f64> = (0..12).map(f64::from).collect();
        let y: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| 1.0 + 0.5 * x + if i % 2 == 0 { 0.3 } else { -0.3 })
            .collect();
        let fit = ols_fit(&line_design(&xs), &y).unwrap();
        let w = wald_chunk(&fit, &[1], "x").unwrap();
        let z = fit.coefficients[1] / fit.standard_error(1);
        assert!((w.statistic - z * z).abs() < 1e-9 * z * z);
        assert_eq!(w.degrees_of_freedom, 1);
        assert!(wald_chunk(&fit, &[0], "intercept").is_err());
        assert!(wald_chunk(&fit, &[], "none").is_err());
    }
}
