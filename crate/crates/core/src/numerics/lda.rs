//! Collapsed Gibbs sampling for latent Dirichlet allocation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use super::NumericsError;

/// Iterations per log-likelihood window of the convergence test.
pub const LIKELIHOOD_WINDOW: usize = 10;
/// Relative change between consecutive window means that counts as converged.
pub const LIKELIHOOD_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaParams {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl LdaParams {
    /// α = 50/K and β = 0.01, capped at 1,000 iterations.
    pub fn for_topics(topics: usize, seed: u64) -> Self {
        Self {
            topics,
            alpha: 50.0 / topics as f64,
            beta: 0.01,
            max_iterations: 1000,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub topics: usize,
    pub num_terms: usize,
    pub num_docs: usize,
    pub alpha: f64,
    pub beta: f64,
    /// topics × terms, row-major.
    pub phi: Vec<f64>,
    /// docs × topics, row-major.
    pub theta: Vec<f64>,
    pub seed: u64,
    pub iterations_run: usize,
    pub converged: bool,
    /// Content hash of the training corpus.
    pub corpus_hash: String,
}

impl LdaModel {
    /// Assembles a model from given distributions; rows must be normalized.
    pub fn from_parts(
        topics: usize,
        phi: Vec<f64>,
        theta: Vec<f64>,
        corpus_hash: String,
    ) -> Result<Self, NumericsError> {
        if topics == 0 || !phi.len().is_multiple_of(topics) || !theta.len().is_multiple_of(topics) {
            return Err(NumericsError::InvalidInput(
                "phi/theta shapes do not match topic count".into(),
            ));
        }
        Ok(Self {
            topics,
            num_terms: phi.len() / topics,
            num_docs: theta.len() / topics,
            alpha: 0.0,
            beta: 0.0,
            phi,
            theta,
            seed: 0,
            iterations_run: 0,
            converged: true,
            corpus_hash,
        })
    }

    pub fn phi(&self, topic: usize, term: usize) -> f64 {
        self.phi[topic * self.num_terms + term]
    }

    pub fn theta(&self, doc: usize, topic: usize) -> f64 {
        self.theta[doc * self.topics + topic]
    }

    /// p(w | d) = Σ_z phi[z][w] · theta[d][z].
    pub fn word_probability(&self, doc: usize, term: usize) -> f64 {
        (0..self.topics)
            .map(|z| self.phi(z, term) * self.theta(doc, z))
            .sum()
    }

    /// Most probable topic of a document (lowest index on ties).
    pub fn dominant_topic(&self, doc: usize) -> usize {
        (0..self.topics).fold(0, |best, z| {
            if self.theta(doc, z) > self.theta(doc, best) {
                z
            } else {
                best
            }
        })
    }
}

struct State {
    k: usize,
    t: usize,
    alpha: f64,
    beta: f64,
    doc_of: Vec<usize>,
    word_of: Vec<usize>,
    z: Vec<usize>,
    n_dz: Vec<u32>,
    n_zw: Vec<u32>,
    n_z: Vec<u32>,
    n_d: Vec<u32>,
}

impl State {
    fn phi(&self) -> Vec<f64> {
        let tb = self.t as f64 * self.beta;
        let mut phi = vec![0.0; self.k * self.t];
        for z in 0..self.k {
            let denom = self.n_z[z] as f64 + tb;
            for w in 0..self.t {
                phi[z * self.t + w] = (self.n_zw[z * self.t + w] as f64 + self.beta) / denom;
            }
        }
        phi
    }

    fn theta(&self) -> Vec<f64> {
        let ka = self.k as f64 * self.alpha;
        let docs = self.n_d.len();
        let mut theta = vec![0.0; docs * self.k];
        for d in 0..docs {
            let denom = self.n_d[d] as f64 + ka;
            for z in 0..self.k {
                theta[d * self.k + z] = (self.n_dz[d * self.k + z] as f64 + self.alpha) / denom;
            }
        }
        theta
    }

    /// Σ over tokens of ln Σ_z phi·theta under the current smoothed counts.
    fn log_likelihood(&self, corpus: &SparseMatrix) -> f64 {
        let phi = self.phi();
        let theta = self.theta();
        let mut ll = 0.0;
        for (w, d, count) in corpus.triplets() {
            let p: f64 = (0..self.k)
                .map(|z| phi[z * self.t + w] * theta[d * self.k + z])
                .sum();
            ll += count * p.ln();
        }
        ll
    }

    fn sweep(&mut self, rng: &mut ChaCha8Rng, weights: &mut [f64]) {
        let (k, t) = (self.k, self.t);
        let tb = t as f64 * self.beta;
        for i in 0..self.z.len() {
            let (d, w, old) = (self.doc_of[i], self.word_of[i], self.z[i]);
            self.n_dz[d * k + old] -= 1;
            self.n_zw[old * t + w] -= 1;
            self.n_z[old] -= 1;
            let mut total = 0.0;
            for (z, weight) in weights.iter_mut().enumerate() {
                total += (self.n_dz[d * k + z] as f64 + self.alpha)
                    * (self.n_zw[z * t + w] as f64 + self.beta)
                    / (self.n_z[z] as f64 + tb);
                *weight = total;
            }
            let u = rng.random::<f64>() * total;
            let new = weights.partition_point(|&c| c <= u).min(k - 1);
            self.z[i] = new;
            self.n_dz[d * k + new] += 1;
            self.n_zw[new * t + w] += 1;
            self.n_z[new] += 1;
        }
    }
}

/// Trains LDA on a terms × documents count matrix.
///
/// Sampling stops when the mean log-likelihood of the last
/// [`LIKELIHOOD_WINDOW`] iterations differs from the previous window's mean
/// by less than [`LIKELIHOOD_TOLERANCE`] (relative), or at
/// `max_iterations`.
pub fn gibbs_lda(corpus: &SparseMatrix, params: &LdaParams) -> Result<LdaModel, NumericsError> {
    let k = params.topics;
    if k < 2 {
        return Err(NumericsError::InvalidInput(format!(
            "LDA needs at least 2 topics, got {k}"
        )));
    }
    if !(params.alpha > 0.0 && params.beta > 0.0) {
        return Err(NumericsError::InvalidInput(
            "alpha and beta must be positive".into(),
        ));
    }
    let (t, docs) = (corpus.rows(), corpus.cols());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = State {
        k,
        t,
        alpha: params.alpha,
        beta: params.beta,
        doc_of: Vec::new(),
        word_of: Vec::new(),
        z: Vec::new(),
        n_dz: vec![0; docs * k],
        n_zw: vec![0; k * t],
        n_z: vec![0; k],
        n_d: vec![0; docs],
    };
    for (w, d, count) in corpus.triplets() {
        if count < 0.0 || count.fract() != 0.0 {
            return Err(NumericsError::InvalidInput(format!(
                "LDA counts must be non-negative integers; entry ({w}, {d}) is {count}"
            )));
        }
        for _ in 0..count as u64 {
            let z = rng.random_range(0..k);
            state.doc_of.push(d);
            state.word_of.push(w);
            state.z.push(z);
            state.n_dz[d * k + z] += 1;
            state.n_zw[z * t + w] += 1;
            state.n_z[z] += 1;
            state.n_d[d] += 1;
        }
    }

    let mut weights = vec![0.0; k];
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iterations {
        state.sweep(&mut rng, &mut weights);
        iterations += 1;
        history.push(state.log_likelihood(corpus));
        if iterations % LIKELIHOOD_WINDOW == 0 && iterations >= 2 * LIKELIHOOD_WINDOW {
            let n = history.len();
            let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
            let current = mean(&history[n - LIKELIHOOD_WINDOW..]);
            let previous = mean(&history[n - 2 * LIKELIHOOD_WINDOW..n - LIKELIHOOD_WINDOW]);
            let change = if previous == 0.0 {
                0.0
            } else {
                ((current - previous) / previous).abs()
            };
            if change < LIKELIHOOD_TOLERANCE {
                converged = true;
                break;
            }
        }
    }
    if state.z.is_empty() {
        converged = true;
    }

    Ok(LdaModel {
        topics: k,
        num_terms: t,
        num_docs: docs,
        alpha: params.alpha,
        beta: params.beta,
        phi: state.phi(),
        theta: state.theta(),
        seed: params.seed,
        iterations_run: iterations,
        converged,
        corpus_hash: corpus.content_hash(),
    })
}
