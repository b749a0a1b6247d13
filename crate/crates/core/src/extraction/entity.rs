use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Timestamp;

/// Name of the synthetic per-file method holding everything outside method
/// bodies. Angle brackets keep it from colliding with a real method name.
pub const DUMMY_METHOD: &str = "<dummy>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    File,
    Method,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::File => "file",
            Self::Method => "method",
        })
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "file" => Ok(Self::File),
            "method" => Ok(Self::Method),
            other => Err(format!(
                "unknown granularity `{other}` (expected file or method)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Java,
    Cpp,
}

impl Language {
    /// Maps a file extension to a language; `None` for files we do not index.
    pub fn from_extension(path: &str) -> Option<Self> {
        let ext = path.rsplit_once('.')?.1.to_ascii_lowercase();
        match ext.as_str() {
            "java" => Some(Self::Java),
            "c" | "cc" | "cpp" | "cxx" | "h" | "hh" | "hpp" | "hxx" => Some(Self::Cpp),
            _ => None,
        }
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "java" => Ok(Self::Java),
            "cpp" | "c++" => Ok(Self::Cpp),
            other => Err(format!("unknown language `{other}` (expected java or cpp)")),
        }
    }
}

/// A rankable unit: a whole file, or one method of a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEntity {
    /// File path, or file path + `#` + method name.
    pub id: String,
    pub granularity: Granularity,
    pub identifier_text: String,
    pub comment_text: String,
    /// Executable lines of code.
    pub loc: u64,
    pub snapshot: String,
}

impl SourceEntity {
    pub fn file_path(&self) -> &str {
        entity_file(&self.id)
    }

    pub fn method_name(&self) -> Option<&str> {
        self.id.split_once('#').map(|(_, m)| m)
    }

    pub fn is_dummy(&self) -> bool {
        self.method_name() == Some(DUMMY_METHOD)
    }
}

pub fn method_entity_id(file: &str, method: &str) -> String {
    format!("{file}#{method}")
}

pub fn dummy_entity_id(file: &str) -> String {
    method_entity_id(file, DUMMY_METHOD)
}

/// File part of an entity id.
pub fn entity_file(id: &str) -> &str {
    id.split_once('#').map_or(id, |(f, _)| f)
}

/// A source code snapshot of the system at one point in time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub timestamp: Timestamp,
    pub entities: Vec<SourceEntity>,
}

impl Snapshot {
    pub fn contains(&self, entity_id: &str) -> bool {
        self.entities.iter().any(|e| e.id == entity_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        assert_eq!(entity_file("a/B.java#run"), "a/B.java");
        assert_eq!(entity_file("a/B.java"), "a/B.java");
        assert_eq!(dummy_entity_id("B.java"), "B.java#<dummy>");
    }

    #[test]
    fn extensions() {
        assert_eq!(Language::from_extension("x/Y.java"), Some(Language::Java));
        assert_eq!(Language::from_extension("nsMsg.cpp"), Some(Language::Cpp));
        assert_eq!(Language::from_extension("README"), None);
        assert_eq!(Language::from_extension("notes.txt"), None);
    }
}
