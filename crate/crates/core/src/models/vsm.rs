//! Vector space model: weighted term vectors compared by cosine or overlap.

use super::config::{Similarity, TermWeight};
use super::corpus::{Corpus, IdfMode};
use super::ranked::RankedList;
use crate::numerics::SparseMatrix;
use crate::textprep::Document;

/// Document vectors of a corpus under one weighting, ready for scoring.
#[derive(Debug, Clone)]
pub struct VsmIndex<'a> {
    corpus: &'a Corpus,
    weight: TermWeight,
    idf: IdfMode,
    docs: SparseMatrix,
    norms: Vec<f64>,
}

impl<'a> VsmIndex<'a> {
    pub fn new(corpus: &'a Corpus, weight: TermWeight, idf: IdfMode) -> Self {
        let docs = corpus.weighted(weight, idf);
        let norms = (0..docs.cols())
            .map(|j| docs.column(j).map(|(_, v)| v * v).sum::<f64>().sqrt())
            .collect();
        Self {
            corpus,
            weight,
            idf,
            docs,
            norms,
        }
    }

    /// One score per corpus document, in corpus order.
    pub fn scores(&self, query: &Document, similarity: Similarity) -> Vec<f64> {
        let q = self.corpus.query_vector(query, self.weight, self.idf);
        match similarity {
            Similarity::Cosine => {
                let mut dense = vec![0.0; self.docs.rows()];
                for &(t, w) in &q {
                    dense[t] = w;
                }
                let q_norm = q.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                (0..self.docs.cols())
                    .map(|j| {
                        if q_norm == 0.0 || self.norms[j] == 0.0 {
                            return 0.0;
                        }
                        let dot: f64 = self.docs.column(j).map(|(t, v)| v * dense[t]).sum();
                        dot / (q_norm * self.norms[j])
                    })
                    .collect()
            }
            Similarity::Overlap => {
                // presence, not weight: zero-idf terms still count as shared
                let counts = self.corpus.counts();
                let mut present = vec![false; counts.rows()];
                for &(t, _) in &q {
                    present[t] = true;
                }
                (0..counts.cols())
                    .map(|j| {
                        let doc_terms = counts.column(j).count();
                        let smaller = q.len().min(doc_terms);
                        if smaller == 0 {
                            return 0.0;
                        }
                        let common = counts.column(j).filter(|&(t, _)| present[t]).count();
                        common as f64 / smaller as f64
                    })
                    .collect()
            }
        }
    }

    pub fn rank(&self, query: &Document, similarity: Similarity) -> RankedList {
        let scores = self.scores(query, similarity);
        RankedList::from_scores(
            query.source_id.clone(),
            self.corpus.entity_ids(),
            self.corpus.loc(),
            &scores,
        )
    }
}

/// Ranks the corpus for one query.
pub fn vsm_rank(
    query: &Document,
    corpus: &Corpus,
    weight: TermWeight,
    similarity: Similarity,
    idf: IdfMode,
) -> RankedList {
    VsmIndex::new(corpus, weight, idf).rank(query, similarity)
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
    fn identical_query_scores_one() {
        let c = corpus(&[&["a", "b"], &["b", "c", "d"], &["e"]]);
        let q = Document::from_terms("q", ["b", "c", "d"]);
        let r = vsm_rank(
            &q,
            &c,
            TermWeight::Boolean,
            Similarity::Cosine,
            IdfMode::Log,
        );
        assert_eq!(r.entries[0].entity, "d1");
        assert!((r.entries[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_vocabulary_falls_back_to_id_order() {
        let c = corpus(&[&["a"], &["b"], &["c"]]);
        let q = Document::from_terms("q", ["zzz"]);
        for sim in Similarity::ALL {
            let r = vsm_rank(&q, &c, TermWeight::TfIdf, sim, IdfMode::Log);
            assert!(r.entries.iter().all(|e| e.score == 0.0));
            assert_eq!(r.ids().collect::<Vec<_>>(), vec!["d0", "d1", "d2"]);
        }
    }

    #[test]
    fn overlap_uses_smaller_distinct_count() {
        let c = corpus(&[&["b", "c", "d"], &["a"]]);
        let q = Document::from_terms("q", ["a", "b"]);
        let s = VsmIndex::new(&c, TermWeight::TfIdf, IdfMode::Log).scores(&q, Similarity::Overlap);
        assert_eq!(s, vec![0.5, 1.0]);
    }

    #[test]
    fn empty_documents_score_zero() {
        let c = corpus(&[&[], &["a"]]);
        let q = Document::from_terms("q", ["a"]);
        for sim in Similarity::ALL {
            let s = VsmIndex::new(&c, TermWeight::Sublinear, IdfMode::Log).scores(&q, sim);
            assert_eq!(s[0], 0.0);
        }
    }
}
