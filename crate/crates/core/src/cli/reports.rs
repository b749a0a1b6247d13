//! Evaluation, sensitivity and report tables computed from stored results.

use std::path::Path;

use serde::Serialize;

use super::store::{self, ResultsDir};
use super::CliError;
use crate::evaluation::{
    lift_curve, likelihood_within, rank_correlation, rank_table, EvalError, EvalOutcome,
    EvalParams, RankBy, LIKELIHOOD_PCTS,
};
use crate::models::{parse_config_id, Configuration, Family};
use crate::sensitivity::{
    build_design_matrix, sensitivity_analysis, Response, SensitivityError, SensitivityReport,
};

/// Outcomes of every selected configuration with stored details, in
/// configuration order.
pub fn load_outcomes(
    results: &ResultsDir,
    configs: &[Configuration],
    params: EvalParams,
) -> Result<Vec<EvalOutcome>, CliError> {
    if !results.queries_path().exists() {
        if let Some(&family) = families_of(configs).first() {
            return Err(CliError::MissingResults(family));
        }
    }
    let excluded = results.excluded_queries()?;
    let mut outcomes = Vec::new();
    for config in configs {
        let id = config.id();
        if let Some(rows) = results.read_details(&id)? {
            let queries = rows.iter().map(store::DetailRow::outcome).collect();
            outcomes.push(EvalOutcome::new(id, queries, excluded, params));
        }
    }
    for family in families_of(configs) {
        if !outcomes.iter().any(|o| family_of(o) == family) {
            return Err(CliError::MissingResults(family));
        }
    }
    Ok(outcomes)
}

fn families_of(configs: &[Configuration]) -> Vec<Family> {
    Family::ALL
        .into_iter()
        .filter(|f| configs.iter().any(|c| c.family() == *f))
        .collect()
}

fn family_of(o: &EvalOutcome) -> Family {
    parse_config_id(&o.config)
        .expect("stored config ids parse")
        .family()
}

fn by_family(outcomes: &[EvalOutcome]) -> Vec<(Family, Vec<EvalOutcome>)> {
    Family::ALL
        .into_iter()
        .map(|f| {
            (
                f,
                outcomes
                    .iter()
                    .filter(|o| family_of(o) == f)
                    .cloned()
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

#[derive(Serialize)]
struct EvaluationRow<'a> {
    config: &'a str,
    family: &'static str,
    queries: usize,
    excluded: usize,
    top_k: f64,
    median_effort: u64,
    top_k_loc: f64,
}

pub fn write_evaluation(
    path: &Path,
    header: &str,
    outcomes: &[EvalOutcome],
) -> Result<(), CliError> {
    store::write_csv(
        path,
        header,
        outcomes.iter().map(|o| EvaluationRow {
            config: &o.config,
            family: family_of(o).name(),
            queries: o.queries.len(),
            excluded: o.excluded,
            top_k: o.top_k,
            median_effort: o.median_effort,
            top_k_loc: o.top_k_loc,
        }),
    )
}

fn na_or<T: ToString>(r: Result<T, EvalError>) -> Result<String, CliError> {
    match r {
        Ok(v) => Ok(v.to_string()),
        Err(EvalError::DegenerateInput(m)) => {
            log::warn!("{m}; reported as NA");
            Ok("NA".into())
        }
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    /// Rows from each end of a rank table.
    pub rows: usize,
    pub lift_step: u64,
}

/// Rank tables, likelihood tables, rank correlations and lift data.
pub fn write_report(
    dir: &Path,
    header: &str,
    outcomes: &[EvalOutcome],
    params: EvalParams,
    opts: ReportOptions,
) -> Result<(), CliError> {
    let families = by_family(outcomes);

    for (by, name) in [
        (RankBy::TopK, "rank_topk.csv"),
        (RankBy::Effort, "rank_effort.csv"),
    ] {
        let mut rows = Vec::new();
        for (family, outs) in &families {
            for r in rank_table(outs, by, opts.rows, opts.rows) {
                rows.push(vec![
                    family.name().to_string(),
                    r.rank.to_string(),
                    r.config,
                    r.top_k.to_string(),
                    r.median_effort.to_string(),
                ]);
            }
        }
        store::write_table(
            &dir.join(name),
            header,
            &["family", "rank", "config", "top_k", "median_effort"],
            &rows,
        )?;
    }

    let pct_columns: Vec<String> = LIKELIHOOD_PCTS.iter().map(|p| format!("{p}%")).collect();
    let mut columns = vec!["family"];
    columns.extend(pct_columns.iter().map(String::as_str));
    for (by, name) in [
        (RankBy::TopK, "likelihood_topk.csv"),
        (RankBy::Effort, "likelihood_effort.csv"),
    ] {
        let mut rows = Vec::new();
        for (family, outs) in families.iter().filter(|(f, _)| *f != Family::Em) {
            let perfs: Vec<f64> = outs
                .iter()
                .map(|o| match by {
                    RankBy::TopK => o.top_k,
                    RankBy::Effort => o.median_effort as f64,
                })
                .collect();
            let mut row = vec![family.name().to_string()];
            for pct in LIKELIHOOD_PCTS {
                row.push(na_or(likelihood_within(&perfs, pct, by))?);
            }
            rows.push(row);
        }
        store::write_table(&dir.join(name), header, &columns, &rows)?;
    }

    let mut rows = Vec::new();
    for (family, outs) in &families {
        rows.push(vec![
            family.name().to_string(),
            na_or(rank_correlation(outs))?,
        ]);
    }
    store::write_table(&dir.join("spearman.csv"), header, &["family", "rho"], &rows)?;

    let mut rows = Vec::new();
    for (family, outs) in &families {
        let best = &rank_table(outs, RankBy::TopK, 1, 0)[0];
        let outcome = outs
            .iter()
            .find(|o| o.config == best.config)
            .expect("ranked outcome");
        let curve = lift_curve(outcome, params.k_loc, opts.lift_step)
            .map_err(|e| CliError::Input(e.to_string()))?;
        for (k_loc, share) in curve.points {
            rows.push(vec![
                family.name().to_string(),
                curve.config.clone(),
                k_loc.to_string(),
                share.to_string(),
            ]);
        }
    }
    store::write_table(
        &dir.join("lift.csv"),
        header,
        &["family", "config", "k_loc", "top_k_loc"],
        &rows,
    )
}

#[derive(Debug, Clone, Copy)]
pub struct SensitivityOptions {
    pub resamples: usize,
    pub seed: u64,
    pub log_response: bool,
}

/// One report per analyzable family and response. Families whose
/// parameters or responses never vary are skipped with a warning.
pub fn run_sensitivity(
    outcomes: &[EvalOutcome],
    opts: SensitivityOptions,
) -> Result<Vec<SensitivityReport>, CliError> {
    let mut reports = Vec::new();
    for (family, outs) in by_family(outcomes) {
        if family == Family::Em {
            continue;
        }
        for response in [Response::TopK, Response::Effort] {
            let dm = match build_design_matrix(&outs, response) {
                Ok(dm) => dm,
                Err(SensitivityError::InsufficientVariation { constant }) => {
                    log::warn!("{family}: no varying parameter ({constant:?}); skipped");
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let dm = if opts.log_response && response == Response::Effort {
                dm.with_log_response()
            } else {
                dm
            };
            if dm.y.iter().all(|v| *v == dm.y[0]) {
                log::warn!(
                    "{family}: {} is constant across configurations; skipped",
                    dm.response_name()
                );
                continue;
            }
            reports.push(sensitivity_analysis(&dm, opts.resamples, opts.seed)?);
        }
    }
    Ok(reports)
}
