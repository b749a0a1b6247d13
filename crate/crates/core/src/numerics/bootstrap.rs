//! Bootstrap resampling and optimism-corrected adjusted R².

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::Dense;
use super::ols::ols_fit;
use super::NumericsError;

/// Row indices of resample `b`: `n` draws with replacement from an RNG
/// stream derived from (`seed`, `b`), so resamples are independent of the
/// order in which they are generated.
pub fn resample_indices(n: usize, seed: u64, b: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimismResult {
    /// Adjusted R² of the fit on the original data.
    pub apparent: f64,
    pub mean_optimism: f64,
    /// `apparent − mean_optimism`.
    pub corrected: f64,
    pub used: usize,
    /// Resamples whose design was singular.
    pub skipped: usize,
}

/// Optimism-corrected adjusted R² over `b` seeded resamples.
pub fn bootstrap_optimism(
    x: &Dense,
    y: &[f64],
    b: usize,
    seed: u64,
) -> Result<OptimismResult, NumericsError> {
    if b == 0 {
        return Err(NumericsError::InvalidInput(
            "bootstrap needs at least one resample".into(),
        ));
    }
    let resamples: Vec<Vec<usize>> = (0..b as u64)
        .map(|i| resample_indices(x.rows(), seed, i))
        .collect();
    bootstrap_optimism_with(x, y, &resamples)
}

/// As [`bootstrap_optimism`], with explicit resample index sets.
pub fn bootstrap_optimism_with(
    x: &Dense,
    y: &[f64],
    resamples: &[Vec<usize>],
) -> Result<OptimismResult, NumericsError> {
    let original = ols_fit(x, y)?;
    let mut total = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for idx in resamples {
        let xb = x.select_rows(idx);
        let yb: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        match ols_fit(&xb, &yb) {
            Ok(fit) => {
                total += fit.adj_r_squared - fit.adj_r_squared_on(x, y);
                used += 1;
            }
            Err(NumericsError::SingularDesign { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(NumericsError::DegenerateInput(format!(
            "all {skipped} bootstrap resamples had a singular design"
        )));
    }
    let mean_optimism = total / used as f64;
    Ok(OptimismResult {
        apparent: original.adj_r_squared,
        mean_optimism,
        corrected: original.adj_r_squared - mean_optimism,
        used,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_resample_has_no_optimism() {
        let x = Dense::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]);
        let y = [0.1, 0.9, 2.2, 2.8];
        let r = bootstrap_optimism_with(&x, &y, &[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(r.mean_optimism, 0.0);
        assert_eq!(r.corrected, r.apparent);
    }

    #[test]
    fn noiseless_model_stays_near_one() {
        let rows: Vec<[f64; 2]> = (0..30).map(|i| [1.0, f64::from(i)]).collect();
        let x = Dense::from_rows(&rows);
        let y: Vec<f64> = (0..30).map(|i| 1.0 + 0.25 * f64::from(i)).collect();
        let r = bootstrap_optimism(&x, &y, 50, 3).unwrap();
        assert!((r.corrected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn resamples_are_seed_and_index_determined() {
        assert_eq!(resample_indices(20, 5, 3), resample_indices(20, 5, 3));
        assert_ne!(resample_indices(20, 5, 3), resample_indices(20, 5, 4));
        assert!(resample_indices(20, 5, 3).iter().all(|&i| i < 20));
    }
}
