//! LDA ranking by the conditional probability of the query given a document.

use super::corpus::Corpus;
use super::ranked::RankedList;
use super::ModelError;
use crate::numerics::{gibbs_lda, LdaModel, LdaParams};
use crate::textprep::Document;

/// Trains a model on the corpus counts with α = 50/K, β = 0.01.
pub fn train_lda(corpus: &Corpus, topics: usize, seed: u64) -> Result<LdaModel, ModelError> {
    let mut model = gibbs_lda(corpus.counts(), &LdaParams::for_topics(topics, seed))?;
    model.corpus_hash = corpus.hash().to_string();
    Ok(model)
}

/// score(d) = Σ_{w in query} count(w) · ln Σ_z phi[z][w]·theta[d][z], over
/// in-vocabulary query terms.
pub fn lda_scores(
    model: &LdaModel,
    corpus: &Corpus,
    query: &Document,
) -> Result<Vec<f64>, ModelError> {
    if model.corpus_hash != corpus.hash() {
        return Err(ModelError::ModelMismatch {
            expected: model.corpus_hash.clone(),
            found: corpus.hash().to_string(),
        });
    }
    let terms: Vec<(usize, f64)> = query
        .terms
        .iter()
        .filter_map(|(t, &c)| corpus.dictionary().index_of(t).map(|i| (i, f64::from(c))))
        .collect();
    Ok((0..corpus.len())
        .map(|d| {
            terms
                .iter()
                .map(|&(w, c)| c * model.word_probability(d, w).ln())
                .sum()
        })
        .collect())
}

pub fn lda_rank(
    query: &Document,
    corpus: &Corpus,
    model: &LdaModel,
) -> Result<RankedList, ModelError> {
    let scores = lda_scores(model, corpus, query)?;
    Ok(RankedList::from_scores(
        query.source_id.clone(),
        corpus.entity_ids(),
        corpus.loc(),
        &scores,
    ))
}
