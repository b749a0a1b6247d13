use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::TermWeight;
use crate::extraction::Snapshot;
use crate::numerics::SparseMatrix;
use crate::textprep::{
    build_entity_doc_with, Dictionary, Document, EntityRep, PbrHistory, PreprocessSpec,
    Preprocessor,
};
use crate::Timestamp;

/// How inverse document frequency is computed.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum IdfMode {
    /// ln(N / df).
    #[default]
    Log,
    /// N / df.
    Raw,
}

impl std::str::FromStr for IdfMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(Self::Log),
            "raw" => Ok(Self::Raw),
            other => Err(format!("unknown idf mode `{other}` (expected log or raw)")),
        }
    }
}

/// The indexed documents of one snapshot under one entity representation
/// and preprocessing.
#[derive(Debug, Clone)]
pub struct Corpus {
    entity_ids: Vec<String>,
    loc: Vec<u64>,
    docs: Vec<Document>,
    dictionary: Dictionary,
    counts: SparseMatrix,
    hash: String,
}

impl Corpus {
    /// Documents must be in entity order; `loc` aligns with them.
    pub fn from_documents(docs: Vec<Document>, loc: Vec<u64>) -> Self {
        assert_eq!(docs.len(), loc.len(), "one LOC value per document");
        let dictionary = Dictionary::build(&docs);
        let triplets = docs.iter().enumerate().flat_map(|(d, doc)| {
            let dict = &dictionary;
            doc.terms.iter().map(move |(t, &c)| {
                (
                    dict.index_of(t).expect("term in dictionary"),
                    d,
                    f64::from(c),
                )
            })
        });
        let counts = SparseMatrix::from_triplets(dictionary.num_terms(), docs.len(), triplets)
            .expect("document terms are unique");
        let hash = corpus_hash(&counts, &dictionary, &docs);
        Self {
            entity_ids: docs.iter().map(|d| d.source_id.clone()).collect(),
            loc,
            docs,
            dictionary,
            counts,
            hash,
        }
    }

    /// Indexes every entity of `snapshot`. Past-bug-report representations
    /// see links fixed before `as_of`.
    pub fn build(
        pre: &Preprocessor,
        snapshot: &Snapshot,
        rep: EntityRep,
        prep: PreprocessSpec,
        history: &PbrHistory,
        as_of: Timestamp,
    ) -> Self {
        let docs: Vec<Document> = snapshot
            .entities
            .iter()
            .map(|e| build_entity_doc_with(pre, e, rep, prep, history, as_of))
            .collect();
        let loc = snapshot.entities.iter().map(|e| e.loc).collect();
        Self::from_documents(docs, loc)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn loc(&self) -> &[u64] {
        &self.loc
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    /// Raw term counts, terms × documents.
    pub fn counts(&self) -> &SparseMatrix {
        &self.counts
    }

    /// Content hash over entity ids, vocabulary and counts.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn idf(&self, term: usize, mode: IdfMode) -> f64 {
        let n = self.dictionary.num_docs() as f64;
        let df = f64::from(self.dictionary.doc_freq(term));
        match mode {
            IdfMode::Log => (n / df).ln(),
            IdfMode::Raw => n / df,
        }
    }

    /// Weight of a term occurring `tf` times.
    pub fn weight(&self, term: usize, tf: f64, weight: TermWeight, idf: IdfMode) -> f64 {
        if tf <= 0.0 {
            return 0.0;
        }
        match weight {
            TermWeight::TfIdf => tf * self.idf(term, idf),
            TermWeight::Sublinear => (1.0 + tf.ln()) * self.idf(term, idf),
            TermWeight::Boolean => 1.0,
        }
    }

    /// Weighted terms × documents matrix.
    pub fn weighted(&self, weight: TermWeight, idf: IdfMode) -> SparseMatrix {
        let triplets = self
            .counts
            .triplets()
            .map(|(t, d, c)| (t, d, self.weight(t, c, weight, idf)));
        SparseMatrix::from_triplets(self.counts.rows(), self.counts.cols(), triplets)
            .expect("weights are finite")
    }

    /// Query weights over in-vocabulary terms as `(term index, weight)`,
    /// by term index; out-of-vocabulary terms are dropped.
    pub fn query_vector(
        &self,
        query: &Document,
        weight: TermWeight,
        idf: IdfMode,
    ) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = query
            .terms
            .iter()
            .filter_map(|(t, &c)| {
                let i = self.dictionary.index_of(t)?;
                Some((i, self.weight(i, f64::from(c), weight, idf)))
            })
            .collect();
        v.sort_by_key(|e| e.0);
        v
    }
}

fn corpus_hash(counts: &SparseMatrix, dictionary: &Dictionary, docs: &[Document]) -> String {
    let mut h = Sha256::new();
    h.update(counts.content_hash());
    for t in 0..dictionary.num_terms() {
        h.update(dictionary.term(t));
        h.update([0]);
    }
    for d in docs {
        h.update(&d.source_id);
        h.update([0]);
    }
    hex::encode(h.finalize())
}
