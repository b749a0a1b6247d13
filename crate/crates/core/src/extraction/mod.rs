//! Source entities, bug-fix ground truth and entity history metrics.
//!
//! Entities come from [`extract_entities`] (file or method granularity, with
//! one dummy method per file). Ground truth comes from [`link_bug_fixes`],
//! which scans a textual version-control log for fixing commits and maps
//! their hunks to entities.

mod bugs;
mod entity;
pub mod jsonl;
mod lexer;
mod links;
mod loc;
mod metrics;
mod parser;
mod vcslog;

pub use bugs::{BugReport, BugStore};
pub use entity::{
    dummy_entity_id, entity_file, method_entity_id, Granularity, Language, Snapshot, SourceEntity,
    DUMMY_METHOD,
};
pub use links::{
    bug_references, link_bug_fixes, method_from_context, resolve_links, snapshot_before,
    touched_entities, FixLink, FixLinkSet, LinkReport, UnresolvedBug,
};
pub use loc::count_loc;
pub use metrics::{compute_entity_metrics, EntityHistoryMetrics, HistoryIndex};
pub use parser::{extract_entities, ExtractedFile, ParseFallback};
pub use vcslog::{
    parse_date, parse_log, Commit, FileDiff, Hunk, LogWarning, NumstatEntry, ParsedLog,
};
