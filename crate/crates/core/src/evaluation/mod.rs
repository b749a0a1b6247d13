//! Top-k, effort and top-k_LOC metrics, likelihood tables, configuration
//! rank tables and lift curves.
//!
//! Every metric derives from one [`QueryOutcome`] per query: the rank of the
//! first relevant entity and the LOC a developer reads to reach it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::RankedList;
use crate::numerics::{spearman, NumericsError};

pub const DEFAULT_K: usize = 20;
pub const DEFAULT_K_LOC: u64 = 10_000;
pub const DEFAULT_CAP: u64 = 50_000;
/// Percentages of the likelihood tables.
pub const LIKELIHOOD_PCTS: [u32; 5] = [1, 5, 10, 15, 20];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl From<NumericsError> for EvalError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::DegenerateInput(m) => Self::DegenerateInput(m),
            other => Self::InvalidInput(other.to_string()),
        }
    }
}

/// Where the first relevant entity of one query landed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query: String,
    /// 1-based rank of the first relevant entity.
    pub first_rank: Option<usize>,
    /// Cumulative LOC through the first relevant entity, without the cap.
    pub effort_uncapped: Option<u64>,
}

impl QueryOutcome {
    pub fn from_ranked(ranked: &RankedList, relevant: &BTreeSet<&str>) -> Self {
        let mut cumulative = 0u64;
        for (i, e) in ranked.entries.iter().enumerate() {
            cumulative += e.loc;
            if relevant.contains(e.entity.as_str()) {
                return Self {
                    query: ranked.query.clone(),
                    first_rank: Some(i + 1),
                    effort_uncapped: Some(cumulative),
                };
            }
        }
        Self::not_localized(ranked.query.clone())
    }

    /// A query that produced no ranking (e.g. empty after preprocessing).
    pub fn not_localized(query: impl Into<String>) -> Self {
        Self {
            query: query.into(),
            first_rank: None,
            effort_uncapped: None,
        }
    }

    pub fn localized_at(&self, k: usize) -> bool {
        self.first_rank.is_some_and(|r| r <= k)
    }

    /// Effort capped at `cap`; `cap` when nothing relevant was found.
    pub fn effort(&self, cap: u64) -> u64 {
        self.effort_uncapped.map_or(cap, |e| e.min(cap))
    }

    /// Whether a relevant entity is reachable within `k_loc` lines
    /// (inclusive).
    pub fn localized_within_loc(&self, k_loc: u64) -> bool {
        self.effort_uncapped.is_some_and(|e| e <= k_loc)
    }
}

/// Indicator of one query: a relevant entity ranks within the first `k`.
pub fn top_k_indicator(ranked: &RankedList, relevant: &BTreeSet<&str>, k: usize) -> bool {
    QueryOutcome::from_ranked(ranked, relevant).localized_at(k)
}

/// Share of queries localized within the first `k` entities.
pub fn top_k(outcomes: &[QueryOutcome], k: usize) -> f64 {
    share(outcomes, |o| o.localized_at(k))
}

pub fn effort_to_first(ranked: &RankedList, relevant: &BTreeSet<&str>, cap: u64) -> u64 {
    QueryOutcome::from_ranked(ranked, relevant).effort(cap)
}

/// Share of queries with a relevant entity within `k_loc` cumulative LOC.
pub fn top_k_loc(outcomes: &[QueryOutcome], k_loc: u64) -> f64 {
    share(outcomes, |o| o.localized_within_loc(k_loc))
}

fn share(outcomes: &[QueryOutcome], pred: impl Fn(&QueryOutcome) -> bool) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|o| pred(o)).count() as f64 / outcomes.len() as f64
}

/// Lower median: element `(n - 1) / 2` of the sorted values.
pub fn lower_median(values: &[u64]) -> Option<u64> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.get(v.len().saturating_sub(1) / 2).copied()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalParams {
    pub k: usize,
    pub k_loc: u64,
    pub cap: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            k_loc: DEFAULT_K_LOC,
            cap: DEFAULT_CAP,
        }
    }
}

/// Aggregate performance of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub config: String,
    pub queries: Vec<QueryOutcome>,
    /// Queries left out because their ground truth did not resolve.
    pub excluded: usize,
    pub top_k: f64,
    /// Lower median of the capped efforts; the cap when there are no queries.
    pub median_effort: u64,
    pub top_k_loc: f64,
    pub params: EvalParams,
}

impl EvalOutcome {
    pub fn new(
        config: impl Into<String>,
        queries: Vec<QueryOutcome>,
        excluded: usize,
        params: EvalParams,
    ) -> Self {
        let efforts: Vec<u64> = queries.iter().map(|q| q.effort(params.cap)).collect();
        Self {
            config: config.into(),
            top_k: top_k(&queries, params.k),
            median_effort: lower_median(&efforts).unwrap_or(params.cap),
            top_k_loc: top_k_loc(&queries, params.k_loc),
            queries,
            excluded,
            params,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBy {
    TopK,
    Effort,
}

/// Share of configurations within `pct` percent of the best one: top-k at
/// least `(1 − pct/100)·best`, or effort at most `(1 + pct/100)·least`.
pub fn likelihood_within(perfs: &[f64], pct: u32, mode: RankBy) -> Result<f64, EvalError> {
    if perfs.is_empty() {
        return Err(EvalError::InvalidInput(
            "no configurations to compare".into(),
        ));
    }
    let hits = match mode {
        RankBy::TopK => {
            let best = perfs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if best == 0.0 {
                return Err(EvalError::DegenerateInput(
                    "best top-k performance is 0; every configuration is within any percentage"
                        .into(),
                ));
            }
            let threshold = best * f64::from(100 - pct.min(100)) / 100.0;
            perfs.iter().filter(|&&p| p >= threshold).count()
        }
        RankBy::Effort => {
            let least = perfs.iter().copied().fold(f64::INFINITY, f64::min);
            let threshold = least * f64::from(100 + pct) / 100.0;
            perfs.iter().filter(|&&p| p <= threshold).count()
        }
    };
    Ok(hits as f64 / perfs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub config: String,
    pub top_k: f64,
    pub median_effort: u64,
}

/// All outcomes ranked by top-k (descending) or median effort (ascending),
/// ties by config id.
pub fn rank_all(outcomes: &[EvalOutcome], by: RankBy) -> Vec<RankRow> {
    let mut sorted: Vec<&EvalOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| {
        let primary = match by {
            RankBy::TopK => b.top_k.total_cmp(&a.top_k),
            RankBy::Effort => a.median_effort.cmp(&b.median_effort),
        };
        primary.then_with(|| a.config.cmp(&b.config))
    });
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, o)| RankRow {
            rank: i + 1,
            config: o.config.clone(),
            top_k: o.top_k,
            median_effort: o.median_effort,
        })
        .collect()
}

/// The best `head` and worst `tail` rows of [`rank_all`]; every row once
/// when they overlap.
pub fn rank_table(outcomes: &[EvalOutcome], by: RankBy, head: usize, tail: usize) -> Vec<RankRow> {
    let all = rank_all(outcomes, by);
    if head + tail >= all.len() {
        return all;
    }
    let n = all.len();
    all.into_iter()
        .enumerate()
        .filter(|(i, _)| *i < head || *i >= n - tail)
        .map(|(_, r)| r)
        .collect()
}

/// Spearman correlation between the configuration order by top-k and the
/// order by median effort (1 when both orders agree).
pub fn rank_correlation(outcomes: &[EvalOutcome]) -> Result<f64, EvalError> {
    let top: Vec<f64> = outcomes.iter().map(|o| o.top_k).collect();
    let effort: Vec<f64> = outcomes.iter().map(|o| -(o.median_effort as f64)).collect();
    Ok(spearman(&top, &effort)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftCurve {
    pub config: String,
    /// `(k_loc, top_k_loc)` for k_loc = step, 2·step, …, k_max.
    pub points: Vec<(u64, f64)>,
}

pub fn lift_curve(outcome: &EvalOutcome, k_max: u64, step: u64) -> Result<LiftCurve, EvalError> {
    if step == 0 || k_max == 0 || !k_max.is_multiple_of(step) {
        return Err(EvalError::InvalidInput(format!(
            "lift step {step} must be positive and divide k_max {k_max}"
        )));
    }
    let points = (1..=k_max / step)
        .map(|i| {
            let k_loc = i * step;
            (k_loc, top_k_loc(&outcome.queries, k_loc))
        })
        .collect();
    Ok(LiftCurve {
        config: outcome.config.clone(),
        points,
    })
}
