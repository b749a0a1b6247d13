//! Bag-of-terms documents for bug reports (queries) and source entities.
//!
//! Text goes through [`tokenize`], then [`Preprocessor::preprocess`] which
//! applies the enabled steps in a fixed order: identifier splitting, stop-word
//! removal, Porter stemming. Every term is lower-cased, including under `C0`.

mod document;
mod porter;
mod tokenize;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use document::{
    build_entity_doc, build_entity_doc_with, build_query, build_query_with, Dictionary, Document,
    PbrHistory,
};
pub use porter::stem;
pub use tokenize::{split_identifier, tokenize};

#[derive(Debug, Error)]
pub enum TextError {
    #[error("query {0} has no terms after preprocessing")]
    EmptyQuery(u64),
    #[error("cannot read stop list {path}: {source}")]
    StopList {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which preprocessing steps run (parameter C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PreprocessSpec {
    pub split: bool,
    pub stop: bool,
    pub stem: bool,
}

impl PreprocessSpec {
    /// C0 through C7, in code order.
    pub const ALL: [PreprocessSpec; 8] = [
        Self::new(false, false, false),
        Self::new(true, false, false),
        Self::new(false, true, false),
        Self::new(false, false, true),
        Self::new(true, true, false),
        Self::new(true, false, true),
        Self::new(false, true, true),
        Self::new(true, true, true),
    ];

    pub const fn new(split: bool, stop: bool, stem: bool) -> Self {
        Self { split, stop, stem }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn code(&self) -> u8 {
        Self::ALL
            .iter()
            .position(|s| s == self)
            .expect("every flag triple has a code") as u8
    }
}

impl fmt::Display for PreprocessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.code())
    }
}

/// Bug-report fields used as the query (parameter A).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QueryRep {
    Title,
    Description,
    TitleAndDescription,
}

impl QueryRep {
    pub const ALL: [QueryRep; 3] = [Self::Title, Self::Description, Self::TitleAndDescription];

    pub fn code(&self) -> u8 {
        *self as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        code.checked_sub(1)
            .and_then(|i| Self::ALL.get(i as usize).copied())
    }
}

/// Source entity text used to index it (parameter B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityRep {
    Identifiers,
    Comments,
    IdentifiersAndComments,
    PastBugReports,
    RecentPastBugReports,
    Everything,
}

impl EntityRep {
    pub const ALL: [EntityRep; 6] = [
        Self::Identifiers,
        Self::Comments,
        Self::IdentifiersAndComments,
        Self::PastBugReports,
        Self::RecentPastBugReports,
        Self::Everything,
    ];

    /// Window used by [`EntityRep::RecentPastBugReports`].
    pub const RECENT_WINDOW: usize = 10;

    pub fn code(&self) -> u8 {
        *self as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        code.checked_sub(1)
            .and_then(|i| Self::ALL.get(i as usize).copied())
    }

    /// Whether the representation reads past bug reports.
    pub fn uses_history(&self) -> bool {
        matches!(
            self,
            Self::PastBugReports | Self::RecentPastBugReports | Self::Everything
        )
    }
}

const BUNDLED_STOP_LIST: &str = include_str!("../../data/stopwords.txt");

/// A stop-word list, one lower-case word per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Self { words }
    }

    pub fn from_file(path: &Path) -> Result<Self, TextError> {
        std::fs::read_to_string(path)
            .map(|t| Self::parse(&t))
            .map_err(|source| TextError::StopList {
                path: path.display().to_string(),
                source,
            })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopList {
    fn default() -> Self {
        Self::parse(BUNDLED_STOP_LIST)
    }
}

/// Applies preprocessing specs with a fixed stop list.
#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    stop_list: StopList,
}

impl Preprocessor {
    pub fn new(stop_list: StopList) -> Self {
        Self { stop_list }
    }

    pub fn stop_list(&self) -> &StopList {
        &self.stop_list
    }

    pub fn preprocess(&self, tokens: &[String], spec: PreprocessSpec) -> Vec<String> {
        let mut terms: Vec<String> = if spec.split {
            tokens.iter().flat_map(|t| split_identifier(t)).collect()
        } else {
            tokens.to_vec()
        };
        terms = terms
            .into_iter()
            .map(|t| t.to_lowercase())
            .filter(|t| keep_term(t))
            .collect();
        if spec.stop {
            terms.retain(|t| !self.stop_list.contains(t));
        }
        if spec.stem {
            terms = terms
                .iter()
                .map(|t| stem(t))
                .filter(|t| keep_term(t))
                .collect();
        }
        terms
    }

    /// Tokenizes and preprocesses `text` in one go.
    pub fn terms(&self, text: &str, spec: PreprocessSpec) -> Vec<String> {
        self.preprocess(&tokenize(text), spec)
    }
}

fn keep_term(t: &str) -> bool {
    t.chars().count() > 1 && t.chars().any(char::is_alphabetic)
}

/// [`Preprocessor::preprocess`] with the bundled stop list.
pub fn preprocess(tokens: &[String], spec: PreprocessSpec) -> Vec<String> {
    default_preprocessor().preprocess(tokens, spec)
}

pub(crate) fn default_preprocessor() -> &'static Preprocessor {
    static DEFAULT: std::sync::OnceLock<Preprocessor> = std::sync::OnceLock::new();
    DEFAULT.get_or_init(Preprocessor::default)
}
