//! On-disk results: per-query detail CSVs, the query manifest and the
//! append-only run log.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::evaluation::QueryOutcome;
use crate::extraction::jsonl::{read_jsonl, write_jsonl};
use crate::models::IdfMode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First line of every CSV the tool writes.
pub fn header_line(seed: u64, inputs: &str) -> String {
    format!("# bugloc {VERSION} seed={seed} inputs={inputs}\n")
}

/// SHA-256 over the contents of `paths`, each prefixed by its length.
pub fn hash_inputs(paths: &[PathBuf]) -> Result<String, CliError> {
    let mut h = Sha256::new();
    for p in paths {
        let bytes = fs::read(p).map_err(CliError::io(p))?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(CliError::io(path))?,
    ))
}

/// Writes `rows` as CSV below the standard header line.
pub fn write_csv<T: Serialize>(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), CliError> {
    let mut file = create_file(path)?;
    file.write_all(header.as_bytes())
        .map_err(CliError::io(path))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(CliError::io(path))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(BufReader::new(file));
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(CliError::csv(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetailRow {
    pub config: String,
    pub snapshot: String,
    pub query: String,
    pub first_rank: Option<usize>,
    pub effort_uncapped: Option<u64>,
}

impl DetailRow {
    pub fn outcome(&self) -> QueryOutcome {
        QueryOutcome {
            query: self.query.clone(),
            first_rank: self.first_rank,
            effort_uncapped: self.effort_uncapped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryStatus {
    Included,
    /// No snapshot precedes the fix.
    NoSnapshot,
    /// None of the linked entities exists in the snapshot.
    NoGroundTruth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRow {
    pub query: String,
    pub snapshot: String,
    pub status: QueryStatus,
    pub relevant: usize,
}

pub struct ResultsDir {
    root: PathBuf,
}

impl ResultsDir {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn details_path(&self, config: &str) -> PathBuf {
        self.root.join("details").join(format!("{config}.csv"))
    }

    pub fn queries_path(&self) -> PathBuf {
        self.root.join("queries.csv")
    }

    pub fn runs_path(&self) -> PathBuf {
        self.root.join("runs.jsonl")
    }

    pub fn read_details(&self, config: &str) -> Result<Option<Vec<DetailRow>>, CliError> {
        let path = self.details_path(config);
        if !path.exists() {
            return Ok(None);
        }
        read_csv(&path).map(Some)
    }

    /// Number of queries excluded from evaluation.
    pub fn excluded_queries(&self) -> Result<usize, CliError> {
        let rows: Vec<QueryRow> = read_csv(&self.queries_path())?;
        Ok(rows
            .iter()
            .filter(|r| r.status != QueryStatus::Included)
            .count())
    }

    pub fn read_runs(&self) -> Result<Vec<RunRecord>, CliError> {
        let path = self.runs_path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let file = File::open(&path).map_err(CliError::io(&path))?;
        read_jsonl(BufReader::new(file)).map_err(CliError::jsonl(&path))
    }

    pub fn append_runs(&self, records: &[RunRecord]) -> Result<(), CliError> {
        if records.is_empty() {
            return Ok(());
        }
        let path = self.runs_path();
        fs::create_dir_all(&self.root).map_err(CliError::io(&self.root))?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(CliError::io(&path))?;
        let mut w = BufWriter::new(file);
        write_jsonl(&mut w, records).map_err(CliError::jsonl(&path))?;
        w.flush().map_err(CliError::io(&path))
    }
}

/// One completed (configuration, snapshot) evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub system: String,
    pub config: String,
    pub snapshot: String,
    pub inputs: String,
    pub seed: u64,
    pub idf: IdfMode,
    pub queries: usize,
    pub localized: usize,
}

impl RunRecord {
    pub fn key(&self) -> RunKey {
        (
            self.system.clone(),
            self.config.clone(),
            self.snapshot.clone(),
            self.inputs.clone(),
            self.seed,
            self.idf,
        )
    }
}

pub type RunKey = (String, String, String, String, u64, IdfMode);

pub fn completed_keys(records: &[RunRecord]) -> BTreeSet<RunKey> {
    records.iter().map(RunRecord::key).collect()
}

/// Writes string records under the standard header line and a column row.
pub fn write_table(
    path: &Path,
    header: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut file = create_file(path)?;
    file.write_all(header.as_bytes())
        .map_err(CliError::io(path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns).map_err(CliError::csv(path))?;
    for row in rows {
        w.write_record(row).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}
