//! History metrics for the EM classifiers: LOC, churn, new and cumulative
//! bug counts.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::entity::{dummy_entity_id, method_entity_id, Granularity, Language, SourceEntity};
use super::links::{method_from_context, FixLinkSet};
use super::vcslog::{Commit, ParsedLog};
use crate::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityHistoryMetrics {
    pub loc: u64,
    pub churn: u64,
    pub new_bug_count: u64,
    pub cumulative_bug_count: u64,
    pub as_of: Timestamp,
}

/// Per-entity churn and fix events, indexed once per log and granularity.
#[derive(Debug, Clone, Default)]
pub struct HistoryIndex {
    churn: HashMap<String, Vec<(Timestamp, u64)>>,
    fixes: HashMap<String, Vec<(Timestamp, u64)>>,
}

/// Lines added plus deleted per entity for one commit.
///
/// Files use the numstat counts when the commit has them, otherwise the
/// hunk line counts. Methods use hunk counts attributed through the hunk
/// context; changes without a recognizable method (or numstat-only changes)
/// go to the file's dummy method.
fn commit_churn(commit: &Commit, granularity: Granularity) -> Vec<(String, u64)> {
    let mut out: Vec<(String, u64)> = Vec::new();
    let mut add = |id: String, n: u64| match out.iter_mut().find(|(e, _)| *e == id) {
        Some((_, total)) => *total += n,
        None => out.push((id, n)),
    };
    for path in commit.touched_paths() {
        let Some(language) = Language::from_extension(path) else {
            continue;
        };
        let hunks: Vec<_> = commit
            .diffs
            .iter()
            .filter(|d| d.path == path)
            .flat_map(|d| d.hunks.iter())
            .collect();
        let numstat: Option<u64> = commit
            .numstat
            .iter()
            .filter(|n| n.path == path)
            .map(|n| n.added + n.deleted)
            .reduce(|a, b| a + b);
        match granularity {
            Granularity::File => {
                let n = numstat.unwrap_or_else(|| hunks.iter().map(|h| h.added + h.deleted).sum());
                add(path.to_string(), n);
            }
            Granularity::Method if hunks.is_empty() => {
                add(dummy_entity_id(path), numstat.unwrap_or(0));
            }
            Granularity::Method => {
                for h in hunks {
                    let id = match method_from_context(&h.context, language) {
                        Some(m) => method_entity_id(path, &m),
                        None => dummy_entity_id(path),
                    };
                    add(id, h.added + h.deleted);
                }
            }
        }
    }
    out
}

impl HistoryIndex {
    pub fn new(log: &ParsedLog, links: &FixLinkSet, granularity: Granularity) -> Self {
        let mut index = Self::default();
        for commit in &log.commits {
            for (entity, n) in commit_churn(commit, granularity) {
                index
                    .churn
                    .entry(entity)
                    .or_default()
                    .push((commit.timestamp, n));
            }
        }
        for link in links.iter() {
            index
                .fixes
                .entry(link.entity.clone())
                .or_default()
                .push((link.fixed_at, link.bug));
        }
        index
    }

    /// Added plus deleted lines over commits strictly before `as_of`.
    pub fn churn(&self, entity: &str, as_of: Timestamp) -> u64 {
        self.churn.get(entity).map_or(0, |events| {
            events
                .iter()
                .filter(|(t, _)| *t < as_of)
                .map(|(_, n)| n)
                .sum()
        })
    }

    /// Distinct bugs linked to `entity` with a fix time in `[from, until)`.
    pub fn bugs_between(&self, entity: &str, from: Option<Timestamp>, until: Timestamp) -> u64 {
        self.fixes.get(entity).map_or(0, |events| {
            events
                .iter()
                .filter(|(t, _)| *t < until && from.is_none_or(|f| *t >= f))
                .map(|(_, bug)| *bug)
                .collect::<BTreeSet<_>>()
                .len() as u64
        })
    }

    /// Metrics of `entity` as of a snapshot. `window_start` is the previous
    /// snapshot's timestamp; `None` for the first snapshot, whose window is
    /// the whole prior history.
    pub fn metrics(
        &self,
        entity: &SourceEntity,
        as_of: Timestamp,
        window_start: Option<Timestamp>,
    ) -> EntityHistoryMetrics {
        EntityHistoryMetrics {
            loc: entity.loc,
            churn: self.churn(&entity.id, as_of),
            new_bug_count: self.bugs_between(&entity.id, window_start, as_of),
            cumulative_bug_count: self.bugs_between(&entity.id, None, as_of),
            as_of,
        }
    }
}

/// One-off metrics computation; build a [`HistoryIndex`] when computing
/// metrics for many entities.
pub fn compute_entity_metrics(
    log: &ParsedLog,
    links: &FixLinkSet,
    entity: &SourceEntity,
    as_of: Timestamp,
    window_start: Option<Timestamp>,
) -> EntityHistoryMetrics {
    HistoryIndex::new(log, links, entity.granularity).metrics(entity, as_of, window_start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{parse_log, FixLink};

    fn entity(id: &str, granularity: Granularity, loc: u64) -> SourceEntity {
        SourceEntity {
            id: id.into(),
            granularity,
            identifier_text: String::new(),
            comment_text: String::new(),
            loc,
            snapshot: "s".into(),
        }
    }

    const LOG: &str = "\
commit c1
Date:   100

    first

5\t2\tA.java
diff --git a/A.java b/A.java
--- a/A.java
+++ b/A.java
@@ -1,2 +1,3 @@ void run() {
-x
+y
+z
commit c2
Date:   200

    second

1\t1\tA.java
1\t0\tnotes.txt
";

    #[test]
    fn never_touched_entity_has_zero_history() {
        let log = parse_log(LOG);
        let e = entity("B.java", Granularity::File, 40);
        let m = compute_entity_metrics(&log, &FixLinkSet::default(), &e, 1000, None);
        assert_eq!(
            m,
            EntityHistoryMetrics {
                loc: 40,
                churn: 0,
                new_bug_count: 0,
                cumulative_bug_count: 0,
                as_of: 1000
            }
        );
    }

    #[test]
    fn file_churn_sums_numstat() {
        let log = parse_log(LOG);
        let e = entity("A.java", Granularity::File, 10);
        let none = FixLinkSet::default();
        assert_eq!(compute_entity_metrics(&log, &none, &e, 1000, None).churn, 9);
        assert_eq!(compute_entity_metrics(&log, &none, &e, 200, None).churn, 7);
    }

    #[test]
    fn method_churn_follows_hunk_context() {
        let log = parse_log(LOG);
        let index = HistoryIndex::new(&log, &FixLinkSet::default(), Granularity::Method);
        assert_eq!(index.churn("A.java#run", 1000), 3);
        assert_eq!(index.churn("A.java#<dummy>", 1000), 2);
    }

    #[test]
    fn new_and_cumulative_counts() {
        let links: FixLinkSet = [(1, 10), (2, 20), (3, 60), (3, 70)]
            .into_iter()
            .map(|(bug, t)| FixLink {
                bug,
                entity: "A.java".into(),
                fixed_at: t,
                commit: "c".into(),
            })
            .collect();
        let index = HistoryIndex::new(&ParsedLog::default(), &links, Granularity::File);
        let e = entity("A.java", Granularity::File, 1);
        let m = index.metrics(&e, 100, Some(50));
        assert_eq!((m.cumulative_bug_count, m.new_bug_count), (3, 1));
        // windows partition the history
        let first = index.metrics(&e, 50, None).new_bug_count;
        assert_eq!(first + m.new_bug_count, m.cumulative_bug_count);
    }
}
