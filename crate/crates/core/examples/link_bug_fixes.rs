//! Links the bundled fixture's commit log to its bug reports.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use bugloc::extraction::jsonl::read_jsonl;
use bugloc::extraction::{
    bug_references, link_bug_fixes, parse_log, BugReport, BugStore, Granularity,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/minirepo");
    let mut bugs = BugStore::default();
    let reports: Vec<BugReport> =
        read_jsonl(BufReader::new(fs::File::open(fixture.join("bugs.jsonl"))?))?;
    for bug in reports {
        bugs.insert(bug);
    }
    let log = parse_log(&fs::read_to_string(fixture.join("vcs.log"))?);

    for c in &log.commits {
        println!(
            "{} {:?} -> bugs {:?}",
            &c.sha[..8],
            c.message.lines().next().unwrap_or(""),
            bug_references(&c.message)
        );
    }
    let report = link_bug_fixes(&log, Granularity::Method, &bugs);
    println!(
        "\n{} links from {} fixing commits",
        report.links.len(),
        report.fixing_commits
    );
    for link in report.links.iter() {
        println!("  bug {:<6} -> {}", link.bug, link.entity);
    }
    for u in &report.unresolved {
        println!("  unresolved bug {} in {}", u.bug, &u.commit[..8]);
    }
    Ok(())
}
