//! Parser for textual `log -p` / `log --numstat` exports.

use std::sync::LazyLock;

use chrono::DateTime;
use regex::Regex;

use crate::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumstatEntry {
    pub added: u64,
    pub deleted: u64,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub old_start: u64,
    pub old_len: u64,
    pub new_start: u64,
    pub new_len: u64,
    /// Text after the closing `@@`, usually the enclosing declaration.
    pub context: String,
    pub added: u64,
    pub deleted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub path: String,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub sha: String,
    pub timestamp: Timestamp,
    pub message: String,
    pub numstat: Vec<NumstatEntry>,
    pub diffs: Vec<FileDiff>,
}

impl Commit {
    /// Paths touched by the commit, from both the numstat and patch sections.
    pub fn touched_paths(&self) -> Vec<&str> {
        let mut paths: Vec<&str> = self
            .numstat
            .iter()
            .map(|n| n.path.as_str())
            .chain(self.diffs.iter().map(|d| d.path.as_str()))
            .collect();
        paths.sort_unstable();
        paths.dedup();
        paths
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogWarning {
    MalformedHunk { commit: String, line: String },
    BadDate { commit: String, value: String },
}

impl std::fmt::Display for LogWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MalformedHunk { commit, line } => {
                write!(f, "commit {commit}: malformed hunk header `{line}` skipped")
            }
            Self::BadDate { commit, value } => {
                write!(f, "commit {commit}: unparseable date `{value}`")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedLog {
    pub commits: Vec<Commit>,
    pub warnings: Vec<LogWarning>,
}

static HUNK_HEADER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@ ?(.*)$").unwrap());
static NUMSTAT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d+|-)\t(\d+|-)\t(.+)$").unwrap());

/// Parses a commit date as unix seconds, RFC 3339, RFC 2822 or git's
/// default `Mon Nov 2 14:05:33 2009 -0500` format.
pub fn parse_date(value: &str) -> Option<Timestamp> {
    let value = value.trim();
    if let Ok(secs) = value.parse::<i64>() {
        return Some(secs);
    }
    if let Some((secs, _tz)) = value.split_once(' ') {
        if let Ok(secs) = secs.parse::<i64>() {
            return Some(secs);
        }
    }
    DateTime::parse_from_rfc3339(value)
        .or_else(|_| DateTime::parse_from_rfc2822(value))
        .or_else(|_| DateTime::parse_from_str(value, "%a %b %e %H:%M:%S %Y %z"))
        .or_else(|_| DateTime::parse_from_str(value, "%Y-%m-%d %H:%M:%S %z"))
        .ok()
        .map(|d| d.timestamp())
}

fn strip_prefix_path(path: &str) -> Option<String> {
    let path = path.trim();
    let path = path.split('\t').next().unwrap_or(path);
    if path == "/dev/null" {
        return None;
    }
    let path = path
        .strip_prefix("a/")
        .or_else(|| path.strip_prefix("b/"))
        .unwrap_or(path);
    Some(path.to_string())
}

/// Parses the commits of a log export. Unknown lines are ignored.
pub fn parse_log(text: &str) -> ParsedLog {
    let mut log = ParsedLog::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let Some(rest) = lines[i].strip_prefix("commit ") else {
            i += 1;
            continue;
        };
        let sha = rest
            .split_whitespace()
            .next()
            .unwrap_or_default()
            .to_string();
        let mut commit = Commit {
            sha,
            timestamp: 0,
            message: String::new(),
            numstat: Vec::new(),
            diffs: Vec::new(),
        };
        i += 1;
        // header
        while i < lines.len() && !lines[i].is_empty() && !lines[i].starts_with("commit ") {
            if let Some(value) = lines[i].strip_prefix("Date:") {
                match parse_date(value) {
                    Some(t) => commit.timestamp = t,
                    None => log.warnings.push(LogWarning::BadDate {
                        commit: commit.sha.clone(),
                        value: value.trim().to_string(),
                    }),
                }
            }
            i += 1;
        }
        // message
        let mut message = Vec::new();
        while i < lines.len() && !lines[i].starts_with("commit ") {
            let line = lines[i];
            if let Some(m) = line.strip_prefix("    ") {
                message.push(m);
            } else if line.is_empty() {
                message.push("");
            } else {
                break;
            }
            i += 1;
        }
        commit.message = message.join("\n").trim().to_string();
        // numstat and patch
        let mut current: Option<FileDiff> = None;
        while i < lines.len() && !lines[i].starts_with("commit ") {
            let line = lines[i];
            if let Some(caps) = NUMSTAT.captures(line) {
                commit.numstat.push(NumstatEntry {
                    added: caps[1].parse().unwrap_or(0),
                    deleted: caps[2].parse().unwrap_or(0),
                    path: numstat_path(&caps[3]),
                });
                i += 1;
            } else if let Some(rest) = line.strip_prefix("diff --git ") {
                if let Some(d) = current.take() {
                    commit.diffs.push(d);
                }
                let path = rest
                    .rsplit_once(" b/")
                    .map(|(_, b)| b.to_string())
                    .unwrap_or_else(|| rest.to_string());
                current = Some(FileDiff {
                    path,
                    hunks: Vec::new(),
                });
                i += 1;
            } else if let Some(rest) = line.strip_prefix("+++ ") {
                if let (Some(d), Some(p)) = (current.as_mut(), strip_prefix_path(rest)) {
                    d.path = p;
                }
                i += 1;
            } else if line.starts_with("@@") {
                match HUNK_HEADER.captures(line) {
                    Some(caps) => {
                        let num = |k: usize, default: u64| {
                            caps.get(k)
                                .map_or(default, |m| m.as_str().parse().unwrap_or(default))
                        };
                        let mut hunk = Hunk {
                            old_start: num(1, 0),
                            old_len: num(2, 1),
                            new_start: num(3, 0),
                            new_len: num(4, 1),
                            context: caps[5].trim().to_string(),
                            added: 0,
                            deleted: 0,
                        };
                        i += 1;
                        let (mut old_left, mut new_left) = (hunk.old_len, hunk.new_len);
                        while i < lines.len() && (old_left > 0 || new_left > 0) {
                            let body = lines[i];
                            match body.as_bytes().first() {
                                Some(b'+') => {
                                    hunk.added += 1;
                                    new_left = new_left.saturating_sub(1);
                                }
                                Some(b'-') => {
                                    hunk.deleted += 1;
                                    old_left = old_left.saturating_sub(1);
                                }
                                Some(b'\\') => {}
                                Some(b' ') | None => {
                                    old_left = old_left.saturating_sub(1);
                                    new_left = new_left.saturating_sub(1);
                                }
                                Some(_) => break,
                            }
                            i += 1;
                        }
                        match current.as_mut() {
                            Some(d) => d.hunks.push(hunk),
                            None => log.warnings.push(LogWarning::MalformedHunk {
                                commit: commit.sha.clone(),
                                line: line.to_string(),
                            }),
                        }
                    }
                    None => {
                        log.warnings.push(LogWarning::MalformedHunk {
                            commit: commit.sha.clone(),
                            line: line.to_string(),
                        });
                        i += 1;
                        // skip the body of the broken hunk
                        while i < lines.len()
                            && matches!(
                                lines[i].as_bytes().first(),
                                Some(b'+' | b'-' | b' ' | b'\\')
                            )
                            && !lines[i].starts_with("--- ")
                            && !lines[i].starts_with("+++ ")
                        {
                            i += 1;
                        }
                    }
                }
            } else {
                i += 1;
            }
        }
        if let Some(d) = current.take() {
            commit.diffs.push(d);
        }
        log.commits.push(commit);
    }
    log
}

/// Resolves numstat rename notation (`a/{x => y}/z`, `old => new`) to the
/// new path.
fn numstat_path(raw: &str) -> String {
    if let (Some(open), Some(close)) = (raw.find('{'), raw.find('}')) {
        if let Some((_, new)) = raw[open + 1..close].split_once(" => ") {
            let joined = format!("{}{}{}", &raw[..open], new, &raw[close + 1..]);
            return joined.replace("//", "/");
        }
    }
    match raw.split_once(" => ") {
        Some((_, new)) => new.to_string(),
        None => raw.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
commit 1a2b3c
Author: Dev <dev@example.org>
Date:   Mon Nov 2 14:05:33 2009 -0500

    Fixed Bug #293777

    second line

5\t2\tsrc/A.java
-\t-\timg.png
diff --git a/src/A.java b/src/A.java
index 111..222 100644
--- a/src/A.java
+++ b/src/A.java
@@ -10,4 +10,5 @@ public void run(int x) {
 context
-old
+new
+newer
 context
@@ bogus @@
+x
commit 4d5e6f
Author: Dev <dev@example.org>
Date:   1257188733

    refactor cleanup
";

    #[test]
    fn parses_headers_messages_and_hunks() {
        let log = parse_log(SAMPLE);
        assert_eq!(log.commits.len(), 2);
        let c = &log.commits[0];
        assert_eq!(c.sha, "1a2b3c");
        assert_eq!(c.timestamp, 1257188733);
        assert_eq!(c.message, "Fixed Bug #293777\n\nsecond line");
        assert_eq!(
            c.numstat,
            vec![
                NumstatEntry {
                    added: 5,
                    deleted: 2,
                    path: "src/A.java".into()
                },
                NumstatEntry {
                    added: 0,
                    deleted: 0,
                    path: "img.png".into()
                },
            ]
        );
        assert_eq!(c.diffs.len(), 1);
        let h = &c.diffs[0].hunks[0];
        assert_eq!(h.context, "public void run(int x) {");
        assert_eq!((h.added, h.deleted), (2, 1));
        assert_eq!(log.commits[1].timestamp, 1257188733);
        assert_eq!(log.commits[1].message, "refactor cleanup");
        assert_eq!(log.warnings.len(), 1);
        assert!(matches!(log.warnings[0], LogWarning::MalformedHunk { .. }));
    }

    #[test]
    fn dates() {
        assert_eq!(parse_date("1257188733 -0500"), Some(1257188733));
        assert_eq!(parse_date("2009-11-02T19:05:33Z"), Some(1257188733));
        assert_eq!(
            parse_date("Mon, 2 Nov 2009 14:05:33 -0500"),
            Some(1257188733)
        );
        assert_eq!(parse_date("yesterday"), None);
    }

    #[test]
    fn rename_paths() {
        assert_eq!(numstat_path("src/{old => new}/A.java"), "src/new/A.java");
        assert_eq!(numstat_path("src/{ => sub}/A.java"), "src/sub/A.java");
        assert_eq!(numstat_path("A.java => B.java"), "B.java");
    }
}
