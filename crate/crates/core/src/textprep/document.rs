use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{default_preprocessor, EntityRep, PreprocessSpec, Preprocessor, QueryRep, TextError};
use crate::extraction::{BugReport, BugStore, FixLinkSet, SourceEntity};
use crate::Timestamp;

/// A bag of terms. Counts are always at least one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub source_id: String,
    pub terms: BTreeMap<String, u32>,
}

impl Document {
    pub fn new(source_id: impl Into<String>) -> Self {
        Self {
            source_id: source_id.into(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I, S>(source_id: impl Into<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut doc = Self::new(source_id);
        doc.add_terms(terms);
        doc
    }

    pub fn add_terms<I, S>(&mut self, terms: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for t in terms {
            *self.terms.entry(t.into()).or_insert(0) += 1;
        }
    }

    /// Multiset sum.
    pub fn merge(&mut self, other: &Document) {
        for (t, &c) in &other.terms {
            *self.terms.entry(t.clone()).or_insert(0) += c;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct terms.
    pub fn distinct_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_terms(&self) -> u64 {
        self.terms.values().map(|&c| c as u64).sum()
    }

    pub fn count(&self, term: &str) -> u32 {
        self.terms.get(term).copied().unwrap_or(0)
    }
}

/// Term index and document frequencies for one corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    index: HashMap<String, usize>,
    terms: Vec<String>,
    doc_freq: Vec<u32>,
    num_docs: usize,
}

impl Dictionary {
    /// Indices follow lexicographic term order, so they are dense and stable.
    pub fn build<'a>(docs: impl IntoIterator<Item = &'a Document>) -> Self {
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        let mut num_docs = 0;
        for doc in docs {
            num_docs += 1;
            for term in doc.terms.keys() {
                *df.entry(term.as_str()).or_insert(0) += 1;
            }
        }
        let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            index,
            terms,
            doc_freq: df.into_values().collect(),
            num_docs,
        }
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn doc_freq(&self, index: usize) -> u32 {
        self.doc_freq[index]
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }
}

/// Past bug reports per entity, keyed by the time each bug was linked.
#[derive(Debug, Clone, Default)]
pub struct PbrHistory {
    by_entity: HashMap<String, BTreeMap<u64, Timestamp>>,
    bugs: HashMap<u64, BugReport>,
}

impl PbrHistory {
    pub fn new(links: &FixLinkSet, bugs: &BugStore) -> Self {
        let mut by_entity: HashMap<String, BTreeMap<u64, Timestamp>> = HashMap::new();
        let mut used = BTreeSet::new();
        for link in links.iter() {
            if bugs.get(link.bug).is_none() {
                continue;
            }
            let slot = by_entity
                .entry(link.entity.clone())
                .or_default()
                .entry(link.bug)
                .or_insert(link.fixed_at);
            *slot = (*slot).min(link.fixed_at);
            used.insert(link.bug);
        }
        let bugs = used
            .into_iter()
            .filter_map(|id| bugs.get(id).map(|b| (id, b.clone())))
            .collect();
        Self { by_entity, bugs }
    }

    /// Distinct bugs linked to `entity` strictly before `as_of`, newest
    /// report first (ties by ascending bug id).
    pub fn past_reports(&self, entity: &str, as_of: Timestamp) -> Vec<&BugReport> {
        let Some(linked) = self.by_entity.get(entity) else {
            return Vec::new();
        };
        let mut reports: Vec<&BugReport> = linked
            .iter()
            .filter(|(_, &t)| t < as_of)
            .filter_map(|(id, _)| self.bugs.get(id))
            .collect();
        reports.sort_by(|a, b| b.created.cmp(&a.created).then(a.id.cmp(&b.id)));
        reports
    }
}

/// Builds the query document for a bug report with the bundled stop list.
pub fn build_query(
    bug: &BugReport,
    rep: QueryRep,
    spec: PreprocessSpec,
) -> Result<Document, TextError> {
    build_query_with(default_preprocessor(), bug, rep, spec)
}

pub fn build_query_with(
    pre: &Preprocessor,
    bug: &BugReport,
    rep: QueryRep,
    spec: PreprocessSpec,
) -> Result<Document, TextError> {
    let mut doc = Document::new(bug.id.to_string());
    if matches!(rep, QueryRep::Title | QueryRep::TitleAndDescription) {
        doc.add_terms(pre.terms(&bug.title, spec));
    }
    if matches!(rep, QueryRep::Description | QueryRep::TitleAndDescription) {
        doc.add_terms(pre.terms(&bug.description, spec));
    }
    if doc.is_empty() {
        return Err(TextError::EmptyQuery(bug.id));
    }
    Ok(doc)
}

/// Builds the indexed document for an entity. Representations based on past
/// bug reports only see bugs linked before `as_of`; an entity without any
/// yields an empty document, which stays in the corpus.
pub fn build_entity_doc(
    entity: &SourceEntity,
    rep: EntityRep,
    spec: PreprocessSpec,
    history: &PbrHistory,
    as_of: Timestamp,
) -> Document {
    build_entity_doc_with(default_preprocessor(), entity, rep, spec, history, as_of)
}

pub fn build_entity_doc_with(
    pre: &Preprocessor,
    entity: &SourceEntity,
    rep: EntityRep,
    spec: PreprocessSpec,
    history: &PbrHistory,
    as_of: Timestamp,
) -> Document {
    let mut doc = Document::new(entity.id.clone());
    let identifiers = matches!(
        rep,
        EntityRep::Identifiers | EntityRep::IdentifiersAndComments | EntityRep::Everything
    );
    let comments = matches!(
        rep,
        EntityRep::Comments | EntityRep::IdentifiersAndComments | EntityRep::Everything
    );
    if identifiers {
        doc.add_terms(pre.terms(&entity.identifier_text, spec));
    }
    if comments {
        doc.add_terms(pre.terms(&entity.comment_text, spec));
    }
    if rep.uses_history() {
        let reports = history.past_reports(&entity.id, as_of);
        let window = if rep == EntityRep::RecentPastBugReports {
            EntityRep::RECENT_WINDOW
        } else {
            reports.len()
        };
        for bug in reports.into_iter().take(window) {
            doc.add_terms(pre.terms(&bug.title, spec));
            doc.add_terms(pre.terms(&bug.description, spec));
        }
    }
    doc
}
