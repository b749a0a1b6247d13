//! Ground truth: which entities were changed to fix which bug.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::bugs::BugStore;
use super::entity::{dummy_entity_id, method_entity_id, Granularity, Language, Snapshot};
use super::parser;
use super::vcslog::{Commit, LogWarning, ParsedLog};
use crate::Timestamp;

/// One bug→entity link, stamped with the fixing commit's time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixLink {
    pub bug: u64,
    pub entity: String,
    pub fixed_at: Timestamp,
    pub commit: String,
}

/// Links keyed by (bug, entity); the earliest fixing commit wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixLinkSet {
    links: BTreeMap<(u64, String), FixLink>,
}

impl FixLinkSet {
    pub fn insert(&mut self, link: FixLink) {
        let key = (link.bug, link.entity.clone());
        match self.links.get_mut(&key) {
            Some(existing) if existing.fixed_at <= link.fixed_at => {}
            Some(existing) => *existing = link,
            None => {
                self.links.insert(key, link);
            }
        }
    }

    /// Links ordered by bug id, then entity id.
    pub fn iter(&self) -> impl Iterator<Item = &FixLink> {
        self.links.values()
    }

    pub fn entities_for(&self, bug: u64) -> BTreeSet<&str> {
        self.links
            .range((bug, String::new())..)
            .take_while(|((b, _), _)| *b == bug)
            .map(|((_, e), _)| e.as_str())
            .collect()
    }

    pub fn bugs(&self) -> BTreeSet<u64> {
        self.links.keys().map(|(b, _)| *b).collect()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

impl FromIterator<FixLink> for FixLinkSet {
    fn from_iter<T: IntoIterator<Item = FixLink>>(iter: T) -> Self {
        let mut set = Self::default();
        for l in iter {
            set.insert(l);
        }
        set
    }
}

/// A commit referenced a bug id that is not in the bug store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvedBug {
    pub bug: u64,
    pub commit: String,
}

#[derive(Debug, Clone, Default)]
pub struct LinkReport {
    pub links: FixLinkSet,
    pub unresolved: Vec<UnresolvedBug>,
    pub warnings: Vec<LogWarning>,
    /// Commits whose message referenced at least one bug.
    pub fixing_commits: usize,
}

static FIX_KEYWORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bfix(?:ed|es)?\b").unwrap());
static BUG_LIST: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bbugs?\b\s*:?\s*((?:#?\d+)(?:(?:\s*[,;/&]\s*|\s+and\s+|\s+)#?\d+)*)").unwrap()
});
static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").unwrap());

/// Bug ids referenced by a fixing message: the message must contain a
/// fix/fixed/fixes keyword and `bug`/`bugs` followed by one or more
/// (optionally `#`-prefixed) numbers.
pub fn bug_references(message: &str) -> Vec<u64> {
    if !FIX_KEYWORD.is_match(message) {
        return Vec::new();
    }
    let mut ids = Vec::new();
    for caps in BUG_LIST.captures_iter(message) {
        for n in NUMBER.find_iter(&caps[1]) {
            if let Ok(id) = n.as_str().parse::<u64>() {
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
        }
    }
    ids
}

static LOOSE_CALL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(^|[^@\w$])([A-Za-z_$~][\w$]*(?:::~?[\w$]+)*)\s*\(").unwrap());

const CONTEXT_KEYWORDS: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "else",
    "do",
    "try",
    "sizeof",
    "throw",
    "case",
];

/// Enclosing method named by a hunk-header context line, if any.
pub fn method_from_context(context: &str, language: Language) -> Option<String> {
    let trimmed = context.trim().trim_end_matches('{').trim_end();
    if trimmed.is_empty() {
        return None;
    }
    if let Some(name) = parser::signature_name(trimmed, language) {
        return Some(name);
    }
    // git truncates long context lines; fall back to the first call-like name
    let head = trimmed.split('(').next().unwrap_or(trimmed);
    let type_keywords = ["class", "interface", "enum", "struct", "namespace"];
    if head.split_whitespace().any(|w| type_keywords.contains(&w)) {
        return None;
    }
    LOOSE_CALL
        .captures_iter(trimmed)
        .map(|c| c[2].to_string())
        .find(|name| {
            let simple = name.rsplit("::").next().unwrap_or(name);
            !CONTEXT_KEYWORDS.contains(&simple)
        })
        .filter(|_| !head.contains('='))
}

/// Entities a commit touches at the given granularity.
pub fn touched_entities(commit: &Commit, granularity: Granularity) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for path in commit.touched_paths() {
        let Some(language) = Language::from_extension(path) else {
            continue;
        };
        match granularity {
            Granularity::File => {
                out.insert(path.to_string());
            }
            Granularity::Method => {
                let hunks = commit
                    .diffs
                    .iter()
                    .filter(|d| d.path == path)
                    .flat_map(|d| d.hunks.iter())
                    .collect::<Vec<_>>();
                if hunks.is_empty() {
                    out.insert(dummy_entity_id(path));
                }
                for h in hunks {
                    let id = match method_from_context(&h.context, language) {
                        Some(m) => method_entity_id(path, &m),
                        None => dummy_entity_id(path),
                    };
                    out.insert(id);
                }
            }
        }
    }
    out
}

/// Links fixing commits to the entities they change.
///
/// Bug ids missing from `bugs` are reported in
/// [`LinkReport::unresolved`] and produce no link.
pub fn link_bug_fixes(log: &ParsedLog, granularity: Granularity, bugs: &BugStore) -> LinkReport {
    let mut report = LinkReport {
        warnings: log.warnings.clone(),
        ..Default::default()
    };
    for commit in &log.commits {
        let ids = bug_references(&commit.message);
        if ids.is_empty() {
            continue;
        }
        report.fixing_commits += 1;
        let entities = touched_entities(commit, granularity);
        for id in ids {
            if !bugs.contains(id) {
                log::warn!(
                    "commit {} references unknown bug {id}; link dropped",
                    commit.sha
                );
                report.unresolved.push(UnresolvedBug {
                    bug: id,
                    commit: commit.sha.clone(),
                });
                continue;
            }
            for entity in &entities {
                report.links.insert(FixLink {
                    bug: id,
                    entity: entity.clone(),
                    fixed_at: commit.timestamp,
                    commit: commit.sha.clone(),
                });
            }
        }
    }
    report
}

/// Index of the snapshot a fix at `t` is resolved against: the latest one
/// strictly before `t`, or the first snapshot when `t` precedes them all.
pub fn snapshot_before(snapshots: &[Snapshot], t: Timestamp) -> Option<usize> {
    snapshots
        .iter()
        .rposition(|s| s.timestamp < t)
        .or(if snapshots.is_empty() { None } else { Some(0) })
}

/// Keeps only links whose entity exists in the snapshot preceding the fix.
/// Returns the kept set and the dropped links.
pub fn resolve_links(links: &FixLinkSet, snapshots: &[Snapshot]) -> (FixLinkSet, Vec<FixLink>) {
    let ids: Vec<BTreeSet<&str>> = snapshots
        .iter()
        .map(|s| s.entities.iter().map(|e| e.id.as_str()).collect())
        .collect();
    let mut kept = FixLinkSet::default();
    let mut dropped = Vec::new();
    for link in links.iter() {
        let resolves = snapshot_before(snapshots, link.fixed_at)
            .is_some_and(|i| ids[i].contains(link.entity.as_str()));
        if resolves {
            kept.insert(link.clone());
        } else {
            log::warn!(
                "bug {}: {} not found in the pre-fix snapshot; link dropped",
                link.bug,
                link.entity
            );
            dropped.push(link.clone());
        }
    }
    (kept, dropped)
}
