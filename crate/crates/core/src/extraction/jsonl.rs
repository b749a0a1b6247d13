//! JSON-lines persistence for entities, links and bug reports.
//!
//! Every record carries a `schema` field. Records without one are accepted
//! as the current version so hand-written bug files stay simple.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    Schema { line: usize, found: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn current() -> u32 {
    SCHEMA_VERSION
}

#[derive(Serialize)]
struct Out<'a, T> {
    schema: u32,
    #[serde(flatten)]
    record: &'a T,
}

#[derive(Deserialize)]
struct In<T> {
    #[serde(default = "current")]
    schema: u32,
    #[serde(flatten)]
    record: T,
}

pub fn write_jsonl<'a, T, W, I>(mut writer: W, records: I) -> Result<(), JsonlError>
where
    T: Serialize + 'a,
    W: Write,
    I: IntoIterator<Item = &'a T>,
{
    for record in records {
        let line = serde_json::to_string(&Out {
            schema: SCHEMA_VERSION,
            record,
        })
        .expect("records serialize to JSON");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads records, skipping blank lines.
pub fn read_jsonl<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, JsonlError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: In<T> = serde_json::from_str(&line).map_err(|source| JsonlError::Parse {
            line: i + 1,
            source,
        })?;
        if parsed.schema != SCHEMA_VERSION {
            return Err(JsonlError::Schema {
                line: i + 1,
                found: parsed.schema,
            });
        }
        out.push(parsed.record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{BugReport, FixLink};

    #[test]
    fn links_round_trip_with_schema() {
        let links = vec![FixLink {
            bug: 293777,
            entity: "MethodScope.java#recordInitializationStates".into(),
            fixed_at: 5,
            commit: "abc".into(),
        }];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &links).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("{\"schema\":1,\"bug\":293777"));
        let back: Vec<FixLink> = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, links);
    }

    #[test]
    fn schema_defaults_and_mismatch() {
        let ok = r#"{"id":1,"title":"t","description":"d","created":1,"fixed":2}"#;
        let bugs: Vec<BugReport> = read_jsonl(ok.as_bytes()).unwrap();
        assert_eq!(bugs[0].id, 1);
        let bad = r#"{"schema":9,"id":1,"title":"t","description":"d","created":1,"fixed":2}"#;
        assert!(matches!(
            read_jsonl::<BugReport, _>(bad.as_bytes()),
            Err(JsonlError::Schema { line: 1, found: 9 })
        ));
    }
}
