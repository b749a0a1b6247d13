//! The `bugloc` experiment harness: extract entities, mine fix links, run
//! the configuration space, and emit evaluation, sensitivity and report
//! tables. All commands but ad-hoc `extract` read a TOML [`RunManifest`].
//!
//! Every CSV starts with `# bugloc <version> seed=<seed> inputs=<sha256>`,
//! where the hash covers the contents of all input files.

mod experiment;
mod manifest;
mod reports;
mod store;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use experiment::{run_experiment, select_queries, Query, RunOptions, RunSummary, Workspace};
pub use manifest::{RunManifest, SnapshotEntry};
pub use reports::{
    load_outcomes, run_sensitivity, write_evaluation, write_report, ReportOptions,
    SensitivityOptions,
};
pub use store::{header_line, DetailRow, QueryRow, QueryStatus, ResultsDir, RunRecord, VERSION};

use crate::evaluation::EvalParams;
use crate::extraction::jsonl::{write_jsonl, JsonlError};
use crate::extraction::{
    extract_entities, link_bug_fixes, parse_log, resolve_links, BugReport, BugStore, Granularity,
    Language, Snapshot, SourceEntity,
};
use crate::models::{
    enumerate_configs, parse_config_id, ConfigParseError, Configuration, Family, IdfMode,
};
use crate::sensitivity::{SensitivityError, DEFAULT_RESAMPLES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("{path}: {source}")]
    Jsonl {
        path: String,
        #[source]
        source: JsonlError,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("no stored results for the {0} family; run it first")]
    MissingResults(Family),
    #[error(transparent)]
    Config(#[from] ConfigParseError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error("{0}")]
    Input(String),
    #[error("{0} configuration(s) failed")]
    RunFailures(usize),
}

impl CliError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path) -> impl FnOnce(csv::Error) -> Self + '_ {
        move |source| Self::Csv {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn jsonl(path: &Path) -> impl FnOnce(JsonlError) -> Self + '_ {
        move |source| Self::Jsonl {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bugloc",
    version,
    about = "Configuration laboratory for IR-based bug localization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract source entities from snapshot directories.
    Extract(ExtractArgs),
    /// Mine bug-fix links from the version history.
    Link(ManifestArgs),
    /// Rank every query under each selected configuration.
    Run(RunArgs),
    /// Top-k, median effort and top-k_LOC per configuration.
    Evaluate(EvaluateArgs),
    /// Wald chi-square sensitivity of each parameter, per family and response.
    Sensitivity(SensitivityArgs),
    /// Rank, likelihood, rank-correlation and lift tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ManifestArgs {
    /// Experiment manifest (TOML).
    #[arg(long, short)]
    pub manifest: PathBuf,
    /// Overrides the manifest's output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SelectArgs {
    /// Comma-separated families (vsm, lsi, lda, em).
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<Family>>,
    /// Comma-separated configuration ids.
    #[arg(long, value_delimiter = ',')]
    pub configs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MetricArgs {
    /// Rank cutoff for top-k.
    #[arg(long)]
    pub k: Option<usize>,
    /// LOC budget for top-k_LOC.
    #[arg(long = "kloc")]
    pub k_loc: Option<u64>,
    /// Effort cap in LOC.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    /// Extract every snapshot with a `dir` into `<output>/entities/`.
    #[arg(long, short, conflicts_with = "dir")]
    pub manifest: Option<PathBuf>,
    /// Overrides the manifest's output directory.
    #[arg(long, requires = "manifest")]
    pub output: Option<PathBuf>,
    /// A single snapshot directory to extract.
    #[arg(required_unless_present = "manifest")]
    pub dir: Option<PathBuf>,
    /// Entities file for a single directory; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Snapshot id for a single directory; its name if absent.
    #[arg(long)]
    pub id: Option<String>,
    /// file or method; overrides the manifest.
    #[arg(long)]
    pub granularity: Option<Granularity>,
    /// Only extract files of this language (java or cpp).
    #[arg(long)]
    pub language: Option<Language>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    /// Seed for SVD and Gibbs sampling; overrides the manifest.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Inverse document frequency: log (ln N/df) or raw (N/df).
    #[arg(long, default_value = "log")]
    pub idf: IdfMode,
    /// Recompute configurations already in the run log.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub bootstrap: usize,
    /// Bootstrap seed; overrides the manifest.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Regress ln(1 + median effort) instead of median effort.
    #[arg(long)]
    pub log_response: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub manifest: ManifestArgs,
    #[command(flatten)]
    pub select: SelectArgs,
    #[command(flatten)]
    pub metrics: MetricArgs,
    /// Rows from each end of a rank table.
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    /// Lift curve spacing in LOC; must divide k_loc. Defaults to k_loc / 20.
    #[arg(long)]
    pub lift_step: Option<u64>,
}

/// Parses arguments, runs the command and maps the result to an exit code.
pub fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .try_init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Link(a) => cmd_link(a),
        Command::Run(a) => cmd_run(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn load_manifest(args: &ManifestArgs) -> Result<RunManifest, CliError> {
    let mut m = RunManifest::load(&args.manifest)?;
    if let Some(out) = &args.output {
        m.output = std::env::current_dir()
            .map_err(CliError::io(Path::new(".")))?
            .join(out);
    }
    Ok(m)
}

fn apply_metrics(m: &mut RunManifest, a: &MetricArgs) -> Result<EvalParams, CliError> {
    m.k = a.k.unwrap_or(m.k);
    m.k_loc = a.k_loc.unwrap_or(m.k_loc);
    m.cap = a.cap.unwrap_or(m.cap);
    m.validate().map_err(CliError::Input)?;
    Ok(EvalParams {
        k: m.k,
        k_loc: m.k_loc,
        cap: m.cap,
    })
}

/// Explicit ids win over families; flags win over the manifest. Without
/// either, the whole space is selected.
pub fn select_configs(
    m: &RunManifest,
    select: &SelectArgs,
) -> Result<Vec<Configuration>, CliError> {
    let families: Option<Vec<Family>> = match &select.families {
        Some(f) => Some(f.clone()),
        None => m
            .families
            .as_ref()
            .map(|names| {
                names
                    .iter()
                    .map(|n| n.parse().map_err(CliError::Input))
                    .collect()
            })
            .transpose()?,
    };
    let keep = |c: &Configuration| families.as_ref().is_none_or(|f| f.contains(&c.family()));
    let ids = select.configs.as_ref().or(m.configs.as_ref());
    let mut configs: Vec<Configuration> = match ids {
        Some(ids) => ids
            .iter()
            .map(|id| parse_config_id(id.trim()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(keep)
            .collect(),
        None => enumerate_configs().into_iter().filter(keep).collect(),
    };
    let mut seen = std::collections::HashSet::new();
    configs.retain(|c| seen.insert(*c));
    if configs.is_empty() {
        return Err(CliError::Input("no configuration selected".into()));
    }
    Ok(configs)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractSummary {
    pub files: usize,
    pub methods: usize,
    pub dummies: usize,
    pub fallbacks: usize,
    pub entities: usize,
}

/// Source files below `dir` with a known language, by relative path.
fn source_files(
    dir: &Path,
    language: Option<Language>,
) -> Result<Vec<(String, PathBuf)>, CliError> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, PathBuf)>) -> Result<(), CliError> {
        for entry in std::fs::read_dir(dir).map_err(CliError::io(dir))? {
            let path = entry.map_err(CliError::io(dir))?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).expect("below root");
                let rel = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                out.push((rel, path));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out)?;
    out.retain(|(rel, _)| match Language::from_extension(rel) {
        Some(l) => language.is_none_or(|want| want == l),
        None => false,
    });
    out.sort();
    Ok(out)
}

/// Extracts every source file of one snapshot directory.
pub fn extract_snapshot(
    dir: &Path,
    snapshot: &str,
    granularity: Granularity,
    language: Option<Language>,
) -> Result<(Vec<SourceEntity>, ExtractSummary), CliError> {
    let mut summary = ExtractSummary::default();
    let mut entities = Vec::new();
    for (rel, path) in source_files(dir, language)? {
        let bytes = std::fs::read(&path).map_err(CliError::io(&path))?;
        let text = String::from_utf8_lossy(&bytes);
        let lang = Language::from_extension(&rel).expect("filtered by extension");
        let file = extract_entities(&rel, &text, lang, granularity, snapshot);
        summary.files += 1;
        summary.fallbacks += usize::from(file.fallback.is_some());
        for e in &file.entities {
            if granularity == Granularity::Method {
                if e.is_dummy() {
                    summary.dummies += 1;
                } else {
                    summary.methods += 1;
                }
            }
        }
        entities.extend(file.entities);
    }
    summary.entities = entities.len();
    if summary.files == 0 {
        log::warn!("{}: no source files found", dir.display());
    }
    Ok((entities, summary))
}

fn print_summary(id: &str, s: &ExtractSummary) {
    println!(
        "{id}: {} files, {} methods, {} dummies, {} fallbacks, {} entities",
        s.files, s.methods, s.dummies, s.fallbacks, s.entities
    );
}

fn write_entities(path: &Path, entities: &[SourceEntity]) -> Result<(), CliError> {
    let mut file = store::create_file(path)?;
    write_jsonl(&mut file, entities).map_err(CliError::jsonl(path))
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<(), CliError> {
    let Some(manifest_path) = &a.manifest else {
        let dir = a
            .dir
            .as_ref()
            .expect("clap requires dir without a manifest");
        let id = match &a.id {
            Some(id) => id.clone(),
            None => dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
        };
        let granularity = a.granularity.unwrap_or(Granularity::Method);
        let (entities, summary) = extract_snapshot(dir, &id, granularity, a.language)?;
        match &a.out {
            Some(out) => {
                write_entities(out, &entities)?;
                print_summary(&id, &summary);
            }
            None => {
                let stdout = std::io::stdout();
                write_jsonl(stdout.lock(), &entities)
                    .map_err(CliError::jsonl(Path::new("<stdout>")))?;
                eprintln!(
                    "{id}: {} files, {} methods, {} dummies, {} fallbacks, {} entities",
                    summary.files,
                    summary.methods,
                    summary.dummies,
                    summary.fallbacks,
                    summary.entities
                );
            }
        }
        return Ok(());
    };
    let m = load_manifest(&ManifestArgs {
        manifest: manifest_path.clone(),
        output: a.output.clone(),
    })?;
    let granularity = a.granularity.unwrap_or(m.granularity);
    for s in &m.snapshots {
        let Some(dir) = m.snapshot_dir(s) else {
            log::info!(
                "snapshot {} has no source directory; using its entities file",
                s.id
            );
            continue;
        };
        let (entities, summary) = extract_snapshot(&dir, &s.id, granularity, a.language)?;
        write_entities(&m.entities_path(s), &entities)?;
        print_summary(&s.id, &summary);
    }
    Ok(())
}

fn load_snapshots(m: &RunManifest) -> Result<Vec<Snapshot>, CliError> {
    m.snapshots
        .iter()
        .map(|s| {
            Ok(Snapshot {
                id: s.id.clone(),
                timestamp: s.timestamp,
                entities: experiment::load_jsonl(&m.entities_path(s))?,
            })
        })
        .collect()
}

pub fn cmd_link(a: &ManifestArgs) -> Result<(), CliError> {
    let m = load_manifest(a)?;
    let bugs: BugStore = experiment::load_jsonl::<BugReport>(&m.bugs_path())?
        .into_iter()
        .collect();
    let log_path = m.log_path();
    let log = parse_log(&std::fs::read_to_string(&log_path).map_err(CliError::io(&log_path))?);
    let report = link_bug_fixes(&log, m.granularity, &bugs);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let snapshots = load_snapshots(&m)?;
    let (kept, dropped) = resolve_links(&report.links, &snapshots);
    let path = m.links_path();
    let mut file = store::create_file(&path)?;
    write_jsonl(&mut file, kept.iter()).map_err(CliError::jsonl(&path))?;
    file.flush().map_err(CliError::io(&path))?;
    println!(
        "{} commits, {} bug-fixing, {} links ({} dropped), {} unresolved bug references",
        log.commits.len(),
        report.fixing_commits,
        kept.len(),
        dropped.len(),
        report.unresolved.len()
    );
    Ok(())
}

pub fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let mut m = load_manifest(&a.manifest)?;
    m.seed = a.seed.unwrap_or(m.seed);
    let configs = select_configs(&m, &a.select)?;
    let results = ResultsDir::new(m.output_dir());
    let opts = RunOptions {
        configs,
        seed: m.seed,
        idf: a.idf,
        jobs: a.jobs,
        force: a.force,
    };
    let ws = Workspace::load(m)?;
    let excluded = ws.query_rows.len() - ws.queries.len();
    log::info!(
        "{} queries ({excluded} excluded), {} configurations",
        ws.queries.len(),
        opts.configs.len()
    );
    let summary = run_experiment(&ws, &results, &opts)?;
    println!(
        "{} configurations run, {} already complete, {} failed",
        summary.executed,
        summary.skipped,
        summary.failed.len()
    );
    if summary.failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::RunFailures(summary.failed.len()))
    }
}

/// Manifest, selected outcomes and the header shared by the table commands.
fn load_for_tables(
    margs: &ManifestArgs,
    select: &SelectArgs,
    metrics: &MetricArgs,
    seed: Option<u64>,
) -> Result<
    (
        RunManifest,
        EvalParams,
        Vec<crate::evaluation::EvalOutcome>,
        String,
    ),
    CliError,
> {
    let mut m = load_manifest(margs)?;
    m.seed = seed.unwrap_or(m.seed);
    let params = apply_metrics(&mut m, metrics)?;
    let configs = select_configs(&m, select)?;
    let inputs = store::hash_inputs(&experiment::input_paths(&m))?;
    let header = header_line(m.seed, &inputs);
    let outcomes = load_outcomes(&ResultsDir::new(m.output_dir()), &configs, params)?;
    Ok((m, params, outcomes, header))
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let (m, _, outcomes, header) = load_for_tables(&a.manifest, &a.select, &a.metrics, None)?;
    let path = m.output_dir().join("evaluation.csv");
    write_evaluation(&path, &header, &outcomes)?;
    println!(
        "{} configurations evaluated -> {}",
        outcomes.len(),
        path.display()
    );
    Ok(())
}

pub fn cmd_sensitivity(a: &SensitivityArgs) -> Result<(), CliError> {
    let (m, _, outcomes, header) = load_for_tables(&a.manifest, &a.select, &a.metrics, a.seed)?;
    let opts = SensitivityOptions {
        resamples: a.bootstrap,
        seed: m.seed,
        log_response: a.log_response,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let reports = pool.install(|| run_sensitivity(&outcomes, opts))?;
    let path = m.output_dir().join("sensitivity.csv");
    let mut file = store::create_file(&path)?;
    file.write_all(header.as_bytes())
        .map_err(CliError::io(&path))?;
    crate::sensitivity::write_csv(&mut file, &m.system, &reports).map_err(CliError::csv(&path))?;
    file.flush().map_err(CliError::io(&path))?;
    println!("{} sensitivity models -> {}", reports.len(), path.display());
    Ok(())
}

pub fn cmd_report(a: &ReportArgs) -> Result<(), CliError> {
    let (m, params, outcomes, header) = load_for_tables(&a.manifest, &a.select, &a.metrics, None)?;
    let dir = m.output_dir().join("report");
    let opts = ReportOptions {
        rows: a.rows,
        lift_step: a.lift_step.unwrap_or(params.k_loc / 20),
    };
    write_report(&dir, &header, &outcomes, params, opts)?;
    println!(
        "report for {} configurations -> {}",
        outcomes.len(),
        dir.display()
    );
    Ok(())
}
