//! Latent semantic indexing: cosine similarity in a truncated SVD space.

use super::config::TermWeight;
use super::corpus::{Corpus, IdfMode};
use super::ranked::RankedList;
use super::ModelError;
use crate::numerics::{truncated_svd_with, Dense, SvdOptions};
use crate::textprep::Document;

/// Singular values below this fraction of the largest count as zero when
/// determining the numerical rank.
const RANK_TOLERANCE: f64 = 1e-10;

/// Truncated SVD of a weighted corpus, factored once at the largest topic
/// count and sliced for smaller ones.
#[derive(Debug, Clone)]
pub struct LsiModel {
    weight: TermWeight,
    idf: IdfMode,
    corpus_hash: String,
    /// terms × r
    u: Dense,
    /// docs × r, rows are S·v_d
    doc_latent: Dense,
    rank: usize,
    /// Largest singular value, the scale for treating latent vectors as zero.
    sigma_max: f64,
}

impl LsiModel {
    /// Factors the weighted matrix with up to `max_topics` components,
    /// clamped to its numerical rank.
    pub fn train(
        corpus: &Corpus,
        weight: TermWeight,
        idf: IdfMode,
        max_topics: usize,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let m = corpus.weighted(weight, idf);
        let full = m.rows().min(m.cols());
        let k = max_topics.min(full);
        let (u, doc_latent, rank, sigma_max) = if k == 0 || m.nnz() == 0 {
            (Dense::zeros(m.rows(), 0), Dense::zeros(m.cols(), 0), 0, 0.0)
        } else {
            let f = truncated_svd_with(
                &m,
                k,
                &SvdOptions {
                    seed,
                    ..SvdOptions::default()
                },
            )?;
            let rank =
                f.s.iter()
                    .take_while(|&&s| s > f.s[0] * RANK_TOLERANCE)
                    .count();
            let mut latent = f.v.columns(0..rank);
            for d in 0..latent.rows() {
                for (j, s) in f.s.iter().take(rank).enumerate() {
                    latent[(d, j)] *= s;
                }
            }
            (f.u.columns(0..rank), latent, rank, f.s[0])
        };
        if rank < max_topics {
            log::debug!("LSI: corpus rank {rank} below {max_topics} topics; clamping");
        }
        Ok(Self {
            weight,
            idf,
            corpus_hash: corpus.hash().to_string(),
            u,
            doc_latent,
            rank,
            sigma_max,
        })
    }

    /// Numerical rank of the weighted matrix (capped at the trained size).
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// cosine(Uᵀq, S·v_d) over the first `min(topics, rank)` components.
    pub fn scores(
        &self,
        corpus: &Corpus,
        query: &Document,
        topics: usize,
    ) -> Result<Vec<f64>, ModelError> {
        if corpus.hash() != self.corpus_hash {
            return Err(ModelError::ModelMismatch {
                expected: self.corpus_hash.clone(),
                found: corpus.hash().to_string(),
            });
        }
        Ok(self.scores_unchecked(corpus, query, topics))
    }

    pub(crate) fn scores_unchecked(
        &self,
        corpus: &Corpus,
        query: &Document,
        topics: usize,
    ) -> Vec<f64> {
        let k = topics.min(self.rank);
        let q = corpus.query_vector(query, self.weight, self.idf);
        let mut q_hat = vec![0.0; k];
        for &(t, w) in &q {
            for (j, qh) in q_hat.iter_mut().enumerate() {
                *qh += self.u[(t, j)] * w;
            }
        }
        // projections that are rounding noise orthogonal to the kept space
        // would otherwise score an arbitrary ±1
        let q_full = q.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        let q_norm = q_hat.iter().map(|x| x * x).sum::<f64>().sqrt();
        let q_zero = q_norm <= q_full * RANK_TOLERANCE;
        (0..self.doc_latent.rows())
            .map(|d| {
                let row = &self.doc_latent.row(d)[..k];
                let d_norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if q_zero || d_norm <= self.sigma_max * RANK_TOLERANCE {
                    return 0.0;
                }
                let dot: f64 = row.iter().zip(&q_hat).map(|(a, b)| a * b).sum();
                dot / (q_norm * d_norm)
            })
            .collect()
    }
}

/// Ranks the corpus for one query with `topics` latent dimensions.
pub fn lsi_rank(
    query: &Document,
    corpus: &Corpus,
    weight: TermWeight,
    topics: usize,
    idf: IdfMode,
) -> Result<RankedList, ModelError> {
    let model = LsiModel::train(corpus, weight, idf, topics, 0)?;
    if model.rank() < topics {
        log::warn!(
            "LSI: {topics} topics exceed the matrix rank {}; clamped",
            model.rank()
        );
    }
    let scores = model.scores_unchecked(corpus, query, topics);
    Ok(RankedList::from_scores(
        query.source_id.clone(),
        corpus.entity_ids(),
        corpus.loc(),
        &scores,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[&str]]) -> Corpus {
        let docs: Vec<Document> = docs
            .iter()
            .enumerate()
            .map(|(i, terms)| Document::from_terms(format!("d{i}"), terms.iter().copied()))
            .collect();
        let loc = vec![1; docs.len()];
        Corpus::from_documents(docs, loc)
    }

    #[test]
    fn bridge_document_links_disjoint_documents() {
        // d0 and d2 share no term; d1 bridges them
        let c = corpus(&[&["a", "b"], &["b", "c"], &["c", "d"]]);
        let model = LsiModel::train(&c, TermWeight::Boolean, IdfMode::Log, 1, 0).unwrap();
        let q = Document::from_terms("q", ["a"]);
        let s = model.scores(&c, &q, 1).unwrap();
        assert!(s[2] > 0.0);
    }

    #[test]
    fn out_of_vocabulary_query_scores_zero() {
        let c = corpus(&[&["a", "b"], &["b", "c"]]);
        let r = lsi_rank(
            &Document::from_terms("q", ["zzz"]),
            &c,
            TermWeight::TfIdf,
            32,
            IdfMode::Log,
        )
        .unwrap();
        assert!(r.entries.iter().all(|e| e.score == 0.0));
    }

    #[test]
    fn document_outside_the_kept_space_scores_zero() {
        // d2 is orthogonal to the single kept component
        let c = corpus(&[&["a", "b"], &["a", "b"], &["c"]]);
        let model = LsiModel::train(&c, TermWeight::Boolean, IdfMode::Log, 1, 0).unwrap();
        let s = model
            .scores(&c, &Document::from_terms("q", ["c"]), 1)
            .unwrap();
        assert_eq!(s, vec![0.0; 3]);
        let s = model
            .scores(&c, &Document::from_terms("q", ["a"]), 1)
            .unwrap();
        assert_eq!(s[2], 0.0);
        assert!((s[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_corpus_is_rejected() {
        let a = corpus(&[&["a", "b"], &["b", "c"]]);
        let b = corpus(&[&["a"], &["c"]]);
        let model = LsiModel::train(&a, TermWeight::Boolean, IdfMode::Log, 2, 0).unwrap();
        let q = Document::from_terms("q", ["a"]);
        assert!(matches!(
            model.scores(&b, &q, 2),
            Err(ModelError::ModelMismatch { .. })
        ));
    }
}
