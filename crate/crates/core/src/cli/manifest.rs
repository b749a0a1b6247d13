use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::evaluation::{DEFAULT_CAP, DEFAULT_K, DEFAULT_K_LOC};
use crate::extraction::Granularity;
use crate::Timestamp;

/// One source snapshot of the system under study.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotEntry {
    pub id: String,
    pub timestamp: Timestamp,
    /// Source tree to extract from.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Pre-extracted entities; defaults to `<output>/entities/<id>.jsonl`.
    #[serde(default)]
    pub entities: Option<PathBuf>,
}

/// Experiment description, read from TOML. Input paths are relative to the
/// manifest's directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub system: String,
    #[serde(default = "default_granularity")]
    pub granularity: Granularity,
    /// Bug reports as JSON lines.
    pub bugs: PathBuf,
    /// Text export of the version history.
    pub log: PathBuf,
    /// Fix links; defaults to `<output>/links.jsonl`.
    #[serde(default)]
    pub links: Option<PathBuf>,
    pub snapshots: Vec<SnapshotEntry>,
    #[serde(default)]
    pub families: Option<Vec<String>>,
    #[serde(default)]
    pub configs: Option<Vec<String>>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_k_loc")]
    pub k_loc: u64,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_granularity() -> Granularity {
    Granularity::Method
}

fn default_k() -> usize {
    DEFAULT_K
}

fn default_k_loc() -> u64 {
    DEFAULT_K_LOC
}

fn default_cap() -> u64 {
    DEFAULT_CAP
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut manifest: Self = toml::from_str(&text).map_err(|e| CliError::Manifest {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        manifest.validate().map_err(|message| CliError::Manifest {
            path: path.display().to_string(),
            message,
        })?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 {
            return Err("k must be at least 1".into());
        }
        if self.k_loc == 0 {
            return Err("k_loc must be at least 1".into());
        }
        if self.cap < self.k_loc {
            return Err(format!("cap {} is below k_loc {}", self.cap, self.k_loc));
        }
        if self.snapshots.is_empty() {
            return Err("at least one snapshot is required".into());
        }
        if self
            .snapshots
            .windows(2)
            .any(|w| w[0].timestamp >= w[1].timestamp)
        {
            return Err("snapshots must be listed in strictly increasing timestamp order".into());
        }
        for s in &self.snapshots {
            if s.dir.is_none() && s.entities.is_none() {
                return Err(format!("snapshot {} needs a dir or an entities file", s.id));
            }
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    pub fn bugs_path(&self) -> PathBuf {
        self.resolve(&self.bugs)
    }

    pub fn log_path(&self) -> PathBuf {
        self.resolve(&self.log)
    }

    pub fn links_path(&self) -> PathBuf {
        match &self.links {
            Some(p) => self.resolve(p),
            None => self.output_dir().join("links.jsonl"),
        }
    }

    pub fn stopwords_path(&self) -> Option<PathBuf> {
        self.stopwords.as_deref().map(|p| self.resolve(p))
    }

    pub fn snapshot_dir(&self, s: &SnapshotEntry) -> Option<PathBuf> {
        s.dir.as_deref().map(|p| self.resolve(p))
    }

    pub fn entities_path(&self, s: &SnapshotEntry) -> PathBuf {
        match &s.entities {
            Some(p) => self.resolve(p),
            None => self
                .output_dir()
                .join("entities")
                .join(format!("{}.jsonl", s.id)),
        }
    }

    /// Cache root: `BUGLOC_CACHE_DIR` if set, else `<output>/cache`.
    pub fn cache_dir(&self) -> PathBuf {
        match std::env::var_os("BUGLOC_CACHE_DIR") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir().join("cache"),
        }
    }
}
