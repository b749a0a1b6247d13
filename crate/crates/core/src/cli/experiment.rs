//! The factorial experiment: every selected configuration against every
//! query, with corpora and trained models shared across configurations.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::hash::Hash;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::manifest::RunManifest;
use super::store::{self, completed_keys, DetailRow, QueryRow, QueryStatus, ResultsDir, RunRecord};
use super::CliError;
use crate::evaluation::QueryOutcome;
use crate::extraction::jsonl::read_jsonl;
use crate::extraction::{
    parse_log, BugReport, BugStore, EntityHistoryMetrics, FixLink, FixLinkSet, HistoryIndex,
    Snapshot, SourceEntity,
};
use crate::models::{
    em_rank, lda_rank, train_lda, Configuration, Corpus, IdfMode, LsiModel, RankedList, TermWeight,
    VsmIndex, TOPIC_COUNTS,
};
use crate::numerics::LdaModel;
use crate::textprep::{
    build_query_with, EntityRep, PbrHistory, PreprocessSpec, Preprocessor, StopList, TextError,
};

pub(crate) fn load_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(CliError::io(path))?;
    read_jsonl(BufReader::new(file)).map_err(CliError::jsonl(path))
}

/// A bug report evaluated against one snapshot.
#[derive(Debug, Clone)]
pub struct Query {
    pub bug: BugReport,
    pub snapshot: usize,
    pub relevant: BTreeSet<String>,
}

/// Everything a run reads, loaded once.
pub struct Workspace {
    pub manifest: RunManifest,
    pub snapshots: Vec<Snapshot>,
    pub bugs: BugStore,
    pub links: FixLinkSet,
    pub pre: Preprocessor,
    pub history: PbrHistory,
    /// EM metrics per snapshot, aligned with its entities.
    pub em_metrics: Vec<Vec<EntityHistoryMetrics>>,
    pub queries: Vec<Query>,
    pub query_rows: Vec<QueryRow>,
    /// Hash over the contents of every input file.
    pub inputs: String,
}

/// Paths whose contents identify a run's inputs.
pub fn input_paths(manifest: &RunManifest) -> Vec<PathBuf> {
    let mut paths = vec![
        manifest.bugs_path(),
        manifest.log_path(),
        manifest.links_path(),
    ];
    paths.extend(manifest.snapshots.iter().map(|s| manifest.entities_path(s)));
    paths.extend(manifest.stopwords_path());
    paths
}

impl Workspace {
    pub fn load(manifest: RunManifest) -> Result<Self, CliError> {
        let inputs = store::hash_inputs(&input_paths(&manifest))?;
        let bugs: BugStore = load_jsonl::<BugReport>(&manifest.bugs_path())?
            .into_iter()
            .collect();
        let links: FixLinkSet = load_jsonl::<FixLink>(&manifest.links_path())?
            .into_iter()
            .collect();
        let log_path = manifest.log_path();
        let log = parse_log(&fs::read_to_string(&log_path).map_err(CliError::io(&log_path))?);
        let mut snapshots = Vec::with_capacity(manifest.snapshots.len());
        for entry in &manifest.snapshots {
            snapshots.push(Snapshot {
                id: entry.id.clone(),
                timestamp: entry.timestamp,
                entities: load_jsonl::<SourceEntity>(&manifest.entities_path(entry))?,
            });
        }
        let pre = match manifest.stopwords_path() {
            Some(p) => Preprocessor::new(
                StopList::from_file(&p).map_err(|e| CliError::Input(e.to_string()))?,
            ),
            None => Preprocessor::default(),
        };
        let history = PbrHistory::new(&links, &bugs);
        let index = HistoryIndex::new(&log, &links, manifest.granularity);
        let em_metrics = snapshots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let window_start = i.checked_sub(1).map(|p| snapshots[p].timestamp);
                s.entities
                    .iter()
                    .map(|e| index.metrics(e, s.timestamp, window_start))
                    .collect()
            })
            .collect();
        let (queries, query_rows) = select_queries(&snapshots, &bugs, &links);
        Ok(Self {
            manifest,
            snapshots,
            bugs,
            links,
            pre,
            history,
            em_metrics,
            queries,
            query_rows,
            inputs,
        })
    }
}

/// Maps each bug to the latest snapshot strictly before its fix and keeps
/// the linked entities present there.
pub fn select_queries(
    snapshots: &[Snapshot],
    bugs: &BugStore,
    links: &FixLinkSet,
) -> (Vec<Query>, Vec<QueryRow>) {
    let mut queries = Vec::new();
    let mut rows = Vec::new();
    for bug in bugs.iter() {
        let Some(idx) = snapshots.iter().rposition(|s| s.timestamp < bug.fixed) else {
            rows.push(QueryRow {
                query: bug.id.to_string(),
                snapshot: String::new(),
                status: QueryStatus::NoSnapshot,
                relevant: 0,
            });
            continue;
        };
        let snapshot = &snapshots[idx];
        let relevant: BTreeSet<String> = links
            .entities_for(bug.id)
            .into_iter()
            .filter(|e| snapshot.contains(e))
            .map(String::from)
            .collect();
        rows.push(QueryRow {
            query: bug.id.to_string(),
            snapshot: snapshot.id.clone(),
            status: if relevant.is_empty() {
                QueryStatus::NoGroundTruth
            } else {
                QueryStatus::Included
            },
            relevant: relevant.len(),
        });
        if !relevant.is_empty() {
            queries.push(Query {
                bug: bug.clone(),
                snapshot: idx,
                relevant,
            });
        }
    }
    (queries, rows)
}

/// Build-once values shared between worker threads.
struct Memo<K, V> {
    cells: Mutex<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K: Eq + Hash, V> Memo<K, V> {
    fn new() -> Self {
        Self {
            cells: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, key: K, init: impl FnOnce() -> V) -> Arc<OnceLock<V>> {
        let cell = self
            .cells
            .lock()
            .expect("memo lock")
            .entry(key)
            .or_default()
            .clone();
        cell.get_or_init(init);
        cell
    }
}

type CorpusKey = (EntityRep, PreprocessSpec, usize);

/// Corpora and models keyed by what determines them.
struct Models<'a> {
    ws: &'a Workspace,
    seed: u64,
    idf: IdfMode,
    lda_dir: PathBuf,
    corpora: Memo<CorpusKey, Arc<Corpus>>,
    lsi: Memo<(CorpusKey, TermWeight), Result<Arc<LsiModel>, String>>,
    lda: Memo<(CorpusKey, u32), Result<Arc<LdaModel>, String>>,
}

impl<'a> Models<'a> {
    fn corpus(&self, key: CorpusKey) -> Arc<Corpus> {
        let (rep, prep, snap) = key;
        let cell = self.corpora.get(key, || {
            let s = &self.ws.snapshots[snap];
            Arc::new(Corpus::build(
                &self.ws.pre,
                s,
                rep,
                prep,
                &self.ws.history,
                s.timestamp,
            ))
        });
        cell.get().expect("initialized").clone()
    }

    fn lsi(&self, key: CorpusKey, weight: TermWeight) -> Result<Arc<LsiModel>, String> {
        let max_topics = *TOPIC_COUNTS.iter().max().expect("topic counts") as usize;
        let cell = self.lsi.get((key, weight), || {
            let corpus = self.corpus(key);
            LsiModel::train(&corpus, weight, self.idf, max_topics, self.seed)
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
        cell.get().expect("initialized").clone()
    }

    fn lda(&self, key: CorpusKey, topics: u32) -> Result<Arc<LdaModel>, String> {
        let cell = self.lda.get((key, topics), || {
            let corpus = self.corpus(key);
            let path = self.lda_dir.join(format!(
                "{}.json",
                lda_cache_key(corpus.hash(), topics, self.seed)
            ));
            if let Some(model) = read_cached_lda(&path, corpus.hash()) {
                return Ok(Arc::new(model));
            }
            let model =
                train_lda(&corpus, topics as usize, self.seed).map_err(|e| e.to_string())?;
            if let Err(e) = write_cached_lda(&path, &model) {
                log::warn!("cannot cache LDA model at {}: {e}", path.display());
            }
            Ok(Arc::new(model))
        });
        cell.get().expect("initialized").clone()
    }
}

fn lda_cache_key(corpus_hash: &str, topics: u32, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(format!(
        "lda/1 corpus={corpus_hash} topics={topics} seed={seed}"
    ));
    hex::encode(h.finalize())
}

fn read_cached_lda(path: &Path, corpus_hash: &str) -> Option<LdaModel> {
    let text = fs::read_to_string(path).ok()?;
    let model: LdaModel = serde_json::from_str(&text).ok()?;
    (model.corpus_hash == corpus_hash).then_some(model)
}

fn write_cached_lda(path: &Path, model: &LdaModel) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(
        &tmp,
        serde_json::to_vec(model).map_err(std::io::Error::other)?,
    )?;
    fs::rename(tmp, path)
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub configs: Vec<Configuration>,
    pub seed: u64,
    pub idf: IdfMode,
    pub jobs: usize,
    pub force: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub executed: usize,
    pub skipped: usize,
    /// (config id, error message)
    pub failed: Vec<(String, String)>,
}

enum ConfigResult {
    Ran(Vec<RunRecord>),
    Skipped,
    Failed(String),
}

pub fn run_experiment(
    ws: &Workspace,
    results: &ResultsDir,
    opts: &RunOptions,
) -> Result<RunSummary, CliError> {
    let header = store::header_line(opts.seed, &ws.inputs);
    store::write_csv(&results.queries_path(), &header, &ws.query_rows)?;
    let done = completed_keys(&results.read_runs()?);
    let snapshots: BTreeSet<usize> = ws.queries.iter().map(|q| q.snapshot).collect();

    let models = Models {
        ws,
        seed: opts.seed,
        idf: opts.idf,
        lda_dir: ws.manifest.cache_dir().join("lda"),
        corpora: Memo::new(),
        lsi: Memo::new(),
        lda: Memo::new(),
    };
    let total = opts.configs.len();
    let finished = AtomicUsize::new(0);
    let report_every = (total / 20).max(1);
    let start = Instant::now();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<ConfigResult> = pool.install(|| {
        opts.configs
            .par_iter()
            .map(|config| {
                let result = run_one(
                    ws, results, &models, config, &snapshots, &done, opts, &header,
                );
                let n = finished.fetch_add(1, Ordering::Relaxed) + 1;
                if n.is_multiple_of(report_every) || n == total {
                    let elapsed = start.elapsed().as_secs_f64();
                    let eta = elapsed / n as f64 * (total - n) as f64;
                    log::info!(
                        "run: {n}/{total} configurations, {elapsed:.1}s elapsed, eta {eta:.1}s"
                    );
                }
                result
            })
            .collect()
    });

    let mut summary = RunSummary::default();
    let mut records = Vec::new();
    for (config, outcome) in opts.configs.iter().zip(outcomes) {
        match outcome {
            ConfigResult::Ran(r) => {
                summary.executed += 1;
                records.extend(r);
            }
            ConfigResult::Skipped => summary.skipped += 1,
            ConfigResult::Failed(message) => {
                log::error!("{config}: {message}");
                summary.failed.push((config.id(), message));
            }
        }
    }
    results.append_runs(&records)?;
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    ws: &Workspace,
    results: &ResultsDir,
    models: &Models<'_>,
    config: &Configuration,
    snapshots: &BTreeSet<usize>,
    done: &BTreeSet<store::RunKey>,
    opts: &RunOptions,
    header: &str,
) -> ConfigResult {
    let id = config.id();
    let record = |snap: usize, queries: usize, localized: usize| RunRecord {
        system: ws.manifest.system.clone(),
        config: id.clone(),
        snapshot: ws.snapshots[snap].id.clone(),
        inputs: ws.inputs.clone(),
        seed: opts.seed,
        idf: opts.idf,
        queries,
        localized,
    };
    let details = results.details_path(&id);
    if !opts.force
        && details.exists()
        && snapshots
            .iter()
            .all(|&s| done.contains(&record(s, 0, 0).key()))
    {
        return ConfigResult::Skipped;
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &snap in snapshots {
        let queries: Vec<&Query> = ws.queries.iter().filter(|q| q.snapshot == snap).collect();
        let outcomes = match evaluate_snapshot(ws, models, config, snap, &queries, opts.idf) {
            Ok(o) => o,
            Err(message) => {
                return ConfigResult::Failed(format!(
                    "snapshot {}: {message}",
                    ws.snapshots[snap].id
                ))
            }
        };
        let localized = outcomes.iter().filter(|o| o.first_rank.is_some()).count();
        records.push(record(snap, outcomes.len(), localized));
        rows.extend(outcomes.into_iter().map(|o| DetailRow {
            config: id.clone(),
            snapshot: ws.snapshots[snap].id.clone(),
            query: o.query,
            first_rank: o.first_rank,
            effort_uncapped: o.effort_uncapped,
        }));
    }
    match store::write_csv(&details, header, &rows) {
        Ok(()) => ConfigResult::Ran(records),
        Err(e) => ConfigResult::Failed(e.to_string()),
    }
}

type RankFn<'a> = dyn Fn(&crate::textprep::Document) -> Result<RankedList, String> + 'a;

/// Ranks every query of one snapshot under `config`.
fn evaluate_snapshot(
    ws: &Workspace,
    models: &Models<'_>,
    config: &Configuration,
    snap: usize,
    queries: &[&Query],
    idf: IdfMode,
) -> Result<Vec<QueryOutcome>, String> {
    let snapshot = &ws.snapshots[snap];
    if let Configuration::Em { metric } = *config {
        let ids: Vec<String> = snapshot.entities.iter().map(|e| e.id.clone()).collect();
        return Ok(queries
            .iter()
            .map(|q| {
                let ranked = em_rank(&q.bug.id.to_string(), metric, &ids, &ws.em_metrics[snap]);
                outcome(&ranked, q)
            })
            .collect());
    }
    let (rep, prep) = config.corpus_key().expect("IR configuration");
    let query_rep = config.query_rep().expect("IR configuration");
    let key = (rep, prep, snap);
    let corpus = models.corpus(key);
    let rank: Box<RankFn<'_>> = match *config {
        Configuration::Vsm {
            weight, similarity, ..
        } => {
            let index = VsmIndex::new(&corpus, weight, idf);
            Box::new(move |doc| Ok(index.rank(doc, similarity)))
        }
        Configuration::Lsi { weight, topics, .. } => {
            let model = models.lsi(key, weight)?;
            let corpus = corpus.clone();
            Box::new(move |doc| {
                let scores = model
                    .scores(&corpus, doc, topics as usize)
                    .map_err(|e| e.to_string())?;
                Ok(RankedList::from_scores(
                    doc.source_id.clone(),
                    corpus.entity_ids(),
                    corpus.loc(),
                    &scores,
                ))
            })
        }
        Configuration::Lda { topics, .. } => {
            let model = models.lda(key, topics)?;
            let corpus = corpus.clone();
            Box::new(move |doc| lda_rank(doc, &corpus, &model).map_err(|e| e.to_string()))
        }
        Configuration::Em { .. } => unreachable!("handled above"),
    };
    queries
        .iter()
        .map(
            |q| match build_query_with(&ws.pre, &q.bug, query_rep, prep) {
                Ok(doc) => rank(&doc).map(|ranked| outcome(&ranked, q)),
                Err(TextError::EmptyQuery(id)) => {
                    log::debug!("{config}: query {id} is empty after preprocessing");
                    Ok(QueryOutcome::not_localized(id.to_string()))
                }
                Err(e) => Err(e.to_string()),
            },
        )
        .collect()
}

fn outcome(ranked: &RankedList, q: &Query) -> QueryOutcome {
    let relevant: BTreeSet<&str> = q.relevant.iter().map(String::as_str).collect();
    QueryOutcome::from_ranked(ranked, &relevant)
}
