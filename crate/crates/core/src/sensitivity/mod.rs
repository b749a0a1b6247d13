//! Parameter sensitivity: categorical regression of configuration
//! performance on configuration parameters, bootstrap optimism-corrected
//! adjusted R², and Wald χ² chunk tests with bootstrap percentile intervals.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::EvalOutcome;
use crate::models::{parse_config_id, ConfigParseError, Family};
use crate::numerics::{ols_fit, percentile, resample_indices, wald_chunk, Dense, NumericsError};

/// Default bootstrap resample count.
pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error("no outcomes to analyze")]
    Empty,
    #[error("outcomes mix families {0} and {1}")]
    MixedFamilies(Family, Family),
    #[error("the {0} family has a single parameter and is not analyzed")]
    UnsupportedFamily(Family),
    #[error("no parameter varies across the outcomes (constant: {constant:?})")]
    InsufficientVariation { constant: Vec<String> },
    #[error(transparent)]
    Config(#[from] ConfigParseError),
    #[error("{}: {source}", match .resample { Some(b) => format!("bootstrap resample {b}"), None => "original fit".to_string() })]
    Numerics {
        resample: Option<usize>,
        #[source]
        source: NumericsError,
    },
}

impl SensitivityError {
    fn numerics(resample: Option<usize>) -> impl FnOnce(NumericsError) -> Self {
        move |source| Self::Numerics { resample, source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    TopK,
    Effort,
}

impl Response {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TopK => "top_k",
            Self::Effort => "effort",
        }
    }
}

/// The columns one categorical parameter contributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterGroup {
    pub parameter: String,
    /// All observed levels, reference first.
    pub levels: Vec<String>,
    /// Design-matrix columns of the non-reference levels.
    pub columns: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub family: Family,
    pub response: Response,
    pub log_response: bool,
    /// Row labels, sorted.
    pub config_ids: Vec<String>,
    /// Intercept column first, then treatment dummies.
    pub x: Dense,
    pub y: Vec<f64>,
    pub groups: Vec<ParameterGroup>,
    /// Parameters left out because they never vary.
    pub dropped: Vec<String>,
}

impl DesignMatrix {
    /// Replaces y by ln(1 + y).
    pub fn with_log_response(mut self) -> Self {
        if !self.log_response {
            self.y.iter_mut().for_each(|v| *v = v.ln_1p());
            self.log_response = true;
        }
        self
    }

    pub fn response_name(&self) -> String {
        if self.log_response {
            format!("log1p_{}", self.response.name())
        } else {
            self.response.name().to_string()
        }
    }
}

fn level_order(level: &str) -> (u64, String) {
    (level.parse().unwrap_or(u64::MAX), level.to_string())
}

type Row = (String, Vec<(char, String)>, f64);

/// Treatment-codes the configuration parameters of one family's outcomes.
/// Rows are sorted by config id, so the result does not depend on input
/// order. LDA's fixed `K` token is not a parameter.
pub fn build_design_matrix(
    outcomes: &[EvalOutcome],
    response: Response,
) -> Result<DesignMatrix, SensitivityError> {
    let first = outcomes.first().ok_or(SensitivityError::Empty)?;
    let family = parse_config_id(&first.config)?.family();
    if family == Family::Em {
        return Err(SensitivityError::UnsupportedFamily(family));
    }
    // (config id, (parameter, level) pairs, response)
    let mut rows: Vec<Row> = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let config = parse_config_id(&o.config)?;
        if config.family() != family {
            return Err(SensitivityError::MixedFamilies(family, config.family()));
        }
        let levels = config
            .levels()
            .into_iter()
            .filter(|(p, _)| *p != 'K')
            .collect();
        let y = match response {
            Response::TopK => o.top_k,
            Response::Effort => o.median_effort as f64,
        };
        rows.push((o.config.clone(), levels, y));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));

    let parameters: Vec<char> = rows[0].1.iter().map(|(p, _)| *p).collect();
    let mut groups = Vec::new();
    let mut dropped = Vec::new();
    let mut next_column = 1;
    for (slot, p) in parameters.iter().enumerate() {
        let mut observed: Vec<String> = rows.iter().map(|r| r.1[slot].1.clone()).collect();
        observed.sort_by_key(|l| level_order(l));
        observed.dedup();
        if observed.len() < 2 {
            log::warn!("parameter {p} is constant across {family} outcomes and is dropped");
            dropped.push(p.to_string());
            continue;
        }
        let columns = (next_column..next_column + observed.len() - 1).collect();
        next_column += observed.len() - 1;
        groups.push((
            slot,
            ParameterGroup {
                parameter: p.to_string(),
                levels: observed,
                columns,
            },
        ));
    }
    if groups.is_empty() {
        return Err(SensitivityError::InsufficientVariation { constant: dropped });
    }

    let mut x = Dense::zeros(rows.len(), next_column);
    for (i, row) in rows.iter().enumerate() {
        x[(i, 0)] = 1.0;
        for (slot, g) in &groups {
            let level = &row.1[*slot].1;
            let pos = g
                .levels
                .iter()
                .position(|l| l == level)
                .expect("observed level");
            if pos > 0 {
                x[(i, g.columns[pos - 1])] = 1.0;
            }
        }
    }
    Ok(DesignMatrix {
        family,
        response,
        log_response: false,
        config_ids: rows.iter().map(|r| r.0.clone()).collect(),
        y: rows.iter().map(|r| r.2).collect(),
        x,
        groups: groups.into_iter().map(|(_, g)| g).collect(),
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSensitivity {
    pub parameter: String,
    pub df: usize,
    /// Wald χ² of the fit on the original rows.
    pub original_chi2: f64,
    pub median_chi2: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub family: Family,
    pub response: String,
    pub resamples: usize,
    pub seed: u64,
    pub apparent_adj_r2: f64,
    pub corrected_adj_r2: f64,
    /// Resamples dropped because a level vanished (singular design).
    pub skipped_resamples: usize,
    pub parameters: Vec<ParameterSensitivity>,
}

impl SensitivityReport {
    /// Parameters by median χ² descending, ties by name.
    pub fn ranked(&self) -> Vec<&ParameterSensitivity> {
        let mut v: Vec<&ParameterSensitivity> = self.parameters.iter().collect();
        v.sort_by(|a, b| {
            b.median_chi2
                .total_cmp(&a.median_chi2)
                .then_with(|| a.parameter.cmp(&b.parameter))
        });
        v
    }
}

pub fn sensitivity_analysis(
    dm: &DesignMatrix,
    resamples: usize,
    seed: u64,
) -> Result<SensitivityReport, SensitivityError> {
    let n = dm.x.rows();
    let sets: Vec<Vec<usize>> = (0..resamples as u64)
        .map(|b| resample_indices(n, seed, b))
        .collect();
    sensitivity_analysis_with(dm, &sets, seed)
}

struct ResampleStats {
    optimism: f64,
    chi2: Vec<f64>,
}

/// As [`sensitivity_analysis`], over explicit resample index sets.
pub fn sensitivity_analysis_with(
    dm: &DesignMatrix,
    resamples: &[Vec<usize>],
    seed: u64,
) -> Result<SensitivityReport, SensitivityError> {
    if resamples.is_empty() {
        return Err(SensitivityError::Numerics {
            resample: None,
            source: NumericsError::InvalidInput("bootstrap needs at least one resample".into()),
        });
    }
    let original = ols_fit(&dm.x, &dm.y).map_err(SensitivityError::numerics(None))?;
    let original_chi2 =
        group_statistics(dm, &original).map_err(SensitivityError::numerics(None))?;

    let per_resample: Vec<Result<Option<ResampleStats>, SensitivityError>> = resamples
        .par_iter()
        .enumerate()
        .map(|(b, idx)| {
            let xb = dm.x.select_rows(idx);
            let yb: Vec<f64> = idx.iter().map(|&i| dm.y[i]).collect();
            let fit = match ols_fit(&xb, &yb) {
                Ok(fit) => fit,
                Err(NumericsError::SingularDesign { .. }) => return Ok(None),
                Err(e) => return Err(SensitivityError::numerics(Some(b))(e)),
            };
            let chi2 = group_statistics(dm, &fit).map_err(SensitivityError::numerics(Some(b)))?;
            Ok(Some(ResampleStats {
                optimism: fit.adj_r_squared - fit.adj_r_squared_on(&dm.x, &dm.y),
                chi2,
            }))
        })
        .collect();

    let mut kept = Vec::new();
    let mut skipped = 0;
    for r in per_resample {
        match r? {
            Some(s) => kept.push(s),
            None => skipped += 1,
        }
    }
    if kept.is_empty() {
        return Err(SensitivityError::Numerics {
            resample: None,
            source: NumericsError::DegenerateInput(format!(
                "all {skipped} resamples lost a parameter level"
            )),
        });
    }
    let mean_optimism = kept.iter().map(|s| s.optimism).sum::<f64>() / kept.len() as f64;

    let parameters = dm
        .groups
        .iter()
        .enumerate()
        .map(|(g, group)| {
            let mut values: Vec<f64> = kept.iter().map(|s| s.chi2[g]).collect();
            values.sort_by(f64::total_cmp);
            ParameterSensitivity {
                parameter: group.parameter.clone(),
                df: group.columns.len(),
                original_chi2: original_chi2[g],
                median_chi2: percentile(&values, 50.0),
                ci_low: percentile(&values, 2.5),
                ci_high: percentile(&values, 97.5),
            }
        })
        .collect();
    Ok(SensitivityReport {
        family: dm.family,
        response: dm.response_name(),
        resamples: resamples.len(),
        seed,
        apparent_adj_r2: original.adj_r_squared,
        corrected_adj_r2: original.adj_r_squared - mean_optimism,
        skipped_resamples: skipped,
        parameters,
    })
}

fn group_statistics(
    dm: &DesignMatrix,
    fit: &crate::numerics::OlsFit,
) -> Result<Vec<f64>, NumericsError> {
    dm.groups
        .iter()
        .map(|g| wald_chunk(fit, &g.columns, &g.parameter).map(|w| w.statistic))
        .collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    system: &'a str,
    response: &'a str,
    parameter: &'a str,
    df: usize,
    median_chi2: f64,
    ci_low: f64,
    ci_high: f64,
    corrected_adj_r2: f64,
    skipped_resamples: usize,
}

/// One row per (report, parameter), parameters in ranked order.
pub fn write_csv<W: Write>(
    writer: W,
    system: &str,
    reports: &[SensitivityReport],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        for p in r.ranked() {
            w.serialize(CsvRow {
                family: r.family.name(),
                system,
                response: &r.response,
                parameter: &p.parameter,
                df: p.df,
                median_chi2: p.median_chi2,
                ci_low: p.ci_low,
                ci_high: p.ci_high,
                corrected_adj_r2: r.corrected_adj_r2,
                skipped_resamples: r.skipped_resamples,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
