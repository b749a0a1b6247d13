//! Acceptance checks. Each test prints one `PASS`/`FAIL` line for its
//! criterion before asserting, so `cargo test --test acceptance -- --nocapture`
//! doubles as a scorecard.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bugloc::evaluation::{
    effort_to_first, likelihood_within, top_k, top_k_loc, EvalOutcome, EvalParams, QueryOutcome,
    RankBy, LIKELIHOOD_PCTS,
};
use bugloc::models::{
    enumerate_configs, parse_config_id, Corpus, Family, IdfMode, LsiModel, RankedList, Similarity,
    TermWeight, VsmIndex,
};
use bugloc::numerics::{
    bootstrap_optimism, gibbs_lda, ols_fit, spearman, truncated_svd, wald_chunk, Dense, LdaModel,
    LdaParams, SparseMatrix,
};
use bugloc::sensitivity::{build_design_matrix, sensitivity_analysis, write_csv, Response};
use bugloc::textprep::Document;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const CONFIG_SPACE_BUDGET: Duration = Duration::from_secs(1);
const VSM_TOL: f64 = 1e-9;
const LSI_ROUNDING: f64 = 1e-9;
const SVD_FACTOR_TOL: f64 = 1e-8;
const SVD_RECONSTRUCTION_TOL: f64 = 1e-6;
const LDA_ROW_SUM_TOL: f64 = 1e-9;
const LDA_AGREEMENT: f64 = 0.9;
const LDA_SEEDS_REQUIRED: usize = 4;
const OLS_TOL: f64 = 1e-8;
const WALD_WINS_REQUIRED: usize = 95;
const PIPELINE_BUDGET: Duration = Duration::from_secs(600);

fn verdict(criterion: u32, title: &str, failures: &[String], detail: &str) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("[criterion {criterion}] {status} {title}: {detail}");
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed: {}",
        failures.join("; ")
    );
}

// ---------------------------------------------------------------- 1

#[test]
fn c1_configuration_space() {
    let start = Instant::now();
    let configs = enumerate_configs();
    let mut failures = Vec::new();
    let count = |f: Family| configs.iter().filter(|c| c.family() == f).count();
    let counts = [
        count(Family::Vsm),
        count(Family::Lsi),
        count(Family::Lda),
        count(Family::Em),
    ];
    if counts != [864, 1728, 576, 4] || configs.len() != 3172 {
        failures.push(format!("family counts {counts:?}, total {}", configs.len()));
    }
    let ids: BTreeSet<String> = configs.iter().map(|c| c.id()).collect();
    if ids.len() != configs.len() {
        failures.push(format!(
            "{} distinct ids for {} configurations",
            ids.len(),
            configs.len()
        ));
    }
    for c in &configs {
        match parse_config_id(&c.id()) {
            Ok(back) if back == *c => {}
            other => failures.push(format!("{} does not round-trip: {other:?}", c.id())),
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= CONFIG_SPACE_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    verdict(
        1,
        "configuration space",
        &failures,
        &format!("{counts:?} = {} configs, all ids round-trip, {elapsed:?} (limit {CONFIG_SPACE_BUDGET:?})", configs.len()),
    );
}

// ---------------------------------------------------------------- 2, 3

fn random_corpus(
    rng: &mut ChaCha8Rng,
    max_docs: usize,
    max_terms: usize,
) -> (Vec<Document>, usize) {
    let docs = rng.random_range(1..=max_docs);
    let vocab = rng.random_range(3..=max_terms);
    let documents = (0..docs)
        .map(|d| {
            let len = rng.random_range(0..=40);
            Document::from_terms(
                format!("e{d:02}"),
                (0..len).map(|_| format!("t{}", rng.random_range(0..vocab))),
            )
        })
        .collect();
    (documents, vocab)
}

fn random_query(rng: &mut ChaCha8Rng, vocab: usize, oov: bool) -> Document {
    let len = rng.random_range(1..=12);
    let mut terms: Vec<String> = (0..len)
        .map(|_| format!("t{}", rng.random_range(0..vocab)))
        .collect();
    if oov {
        terms.push("never_indexed".into());
    }
    Document::from_terms("q", terms)
}

/// Dense term weights straight from the definitions, over `terms`.
fn dense_weights(
    doc: &Document,
    terms: &[String],
    docs: &[Document],
    weight: TermWeight,
) -> Vec<f64> {
    let n = docs.len() as f64;
    terms
        .iter()
        .map(|t| {
            let tf = f64::from(doc.count(t));
            if tf == 0.0 {
                return 0.0;
            }
            let df = docs.iter().filter(|d| d.count(t) > 0).count() as f64;
            let idf = (n / df).ln();
            match weight {
                TermWeight::TfIdf => tf * idf,
                TermWeight::Sublinear => (1.0 + tf.ln()) * idf,
                TermWeight::Boolean => 1.0,
            }
        })
        .collect()
}

fn oracle_vsm(
    query: &Document,
    docs: &[Document],
    weight: TermWeight,
    sim: Similarity,
) -> Vec<f64> {
    let vocab: BTreeSet<String> = docs.iter().flat_map(|d| d.terms.keys().cloned()).collect();
    let terms: Vec<String> = vocab.into_iter().collect();
    let q = dense_weights(query, &terms, docs, weight);
    docs.iter()
        .map(|d| match sim {
            Similarity::Cosine => {
                let v = dense_weights(d, &terms, docs, weight);
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                let nq = q.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if nq == 0.0 || nv == 0.0 {
                    0.0
                } else {
                    dot / (nq * nv)
                }
            }
            Similarity::Overlap => {
                let qs: BTreeSet<&String> =
                    query.terms.keys().filter(|t| terms.contains(t)).collect();
                let ds: BTreeSet<&String> = d.terms.keys().collect();
                let smaller = qs.len().min(ds.len());
                if smaller == 0 {
                    0.0
                } else {
                    qs.intersection(&ds).count() as f64 / smaller as f64
                }
            }
        })
        .collect()
}

/// Entity ids by descending score, ties by id.
fn order_by(ids: &[String], scores: &[f64]) -> Vec<String> {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    idx.into_iter().map(|i| ids[i].clone()).collect()
}

fn round_to(x: f64, step: f64) -> f64 {
    // `+ 0.0` folds -0.0 into 0.0, which total_cmp would order apart
    (x / step).round() * step + 0.0
}

#[test]
fn c2_vsm_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut vectors = 0;
    let mut max_diff: f64 = 0.0;
    for fixture in 0..20 {
        let (docs, vocab) = random_corpus(&mut rng, 30, 200);
        let corpus = Corpus::from_documents(docs.clone(), vec![1; docs.len()]);
        let query = random_query(&mut rng, vocab, fixture % 2 == 0);
        let ids: Vec<String> = docs.iter().map(|d| d.source_id.clone()).collect();
        for weight in TermWeight::ALL {
            let index = VsmIndex::new(&corpus, weight, IdfMode::Log);
            for sim in Similarity::ALL {
                vectors += 1;
                let got = index.scores(&query, sim);
                let want = oracle_vsm(&query, &docs, weight, sim);
                for (g, w) in got.iter().zip(&want) {
                    max_diff = max_diff.max((g - w).abs());
                }
                if got.iter().zip(&want).any(|(g, w)| (g - w).abs() > VSM_TOL) {
                    failures.push(format!(
                        "fixture {fixture} {weight:?}/{sim:?}: {got:?} vs {want:?}"
                    ));
                }
                let ranked: Vec<String> = index.rank(&query, sim).ids().map(String::from).collect();
                let rounded: Vec<f64> = want.iter().map(|w| round_to(*w, VSM_TOL)).collect();
                if ranked != order_by(&ids, &rounded) {
                    failures.push(format!(
                        "fixture {fixture} {weight:?}/{sim:?}: ranking differs"
                    ));
                }
            }
        }
    }
    verdict(
        2,
        "VSM vs dense oracle",
        &failures,
        &format!("20 corpora, {vectors} score vectors, max |diff| {max_diff:.2e} (tol {VSM_TOL:e}), rankings identical"),
    );
}

#[test]
fn c3_full_rank_lsi_orders_like_vsm_cosine() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut comparisons = 0;
    for fixture in 0..10 {
        let (docs, vocab) = random_corpus(&mut rng, 20, 40);
        let corpus = Corpus::from_documents(docs.clone(), vec![1; docs.len()]);
        let query = random_query(&mut rng, vocab, false);
        let query = Document::from_terms(
            "q",
            query
                .terms
                .keys()
                .filter(|t| corpus.dictionary().index_of(t).is_some())
                .cloned(),
        );
        let ids = corpus.entity_ids().to_vec();
        let full = corpus.dictionary().num_terms().min(docs.len());
        for weight in TermWeight::ALL {
            comparisons += 1;
            let vsm =
                VsmIndex::new(&corpus, weight, IdfMode::Log).scores(&query, Similarity::Cosine);
            let model =
                LsiModel::train(&corpus, weight, IdfMode::Log, full, fixture).expect("LSI trains");
            let lsi = model.scores(&corpus, &query, full).expect("same corpus");
            let r = |v: &[f64]| {
                v.iter()
                    .map(|x| round_to(*x, LSI_ROUNDING))
                    .collect::<Vec<_>>()
            };
            if order_by(&ids, &r(&vsm)) != order_by(&ids, &r(&lsi)) {
                failures.push(format!(
                    "fixture {fixture} {weight:?}: vsm {vsm:?} lsi {lsi:?}"
                ));
            }
        }
    }
    verdict(
        3,
        "full-rank LSI ordering",
        &failures,
        &format!("10 fixtures, {comparisons} weightings, orders identical after {LSI_ROUNDING:e} rounding"),
    );
}

// ---------------------------------------------------------------- 4

#[test]
fn c4_svd_matches_dense_decomposition() {
    let (rows, cols, k) = (50, 40, 10);
    let mut failures = Vec::new();
    let (mut worst_factor, mut worst_recon): (f64, f64) = (0.0, 0.0);
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let a = Dense::from_vec(rows, cols, data.clone());
        let sparse = SparseMatrix::from_dense(&a);
        let oracle = DMatrix::from_row_slice(rows, cols, &data).svd(true, true);
        let (ou, ovt) = (oracle.u.as_ref().unwrap(), oracle.v_t.as_ref().unwrap());
        let mut order: Vec<usize> = (0..oracle.singular_values.len()).collect();
        order.sort_by(|&x, &y| oracle.singular_values[y].total_cmp(&oracle.singular_values[x]));

        let f = truncated_svd(&sparse, k).expect("SVD converges");
        for (j, &o) in order.iter().enumerate().take(k) {
            let sigma_diff = (f.s[j] - oracle.singular_values[o]).abs();
            let u = f.u.column(j);
            let v = f.v.column(j);
            let sign = if (0..rows).map(|i| u[i] * ou[(i, o)]).sum::<f64>() < 0.0 {
                -1.0
            } else {
                1.0
            };
            let u_diff = (0..rows)
                .map(|i| (sign * u[i] - ou[(i, o)]).abs())
                .fold(0.0, f64::max);
            let v_diff = (0..cols)
                .map(|i| (sign * v[i] - ovt[(o, i)]).abs())
                .fold(0.0, f64::max);
            let diff = sigma_diff.max(u_diff).max(v_diff);
            worst_factor = worst_factor.max(diff);
            if diff > SVD_FACTOR_TOL {
                failures.push(format!("seed {seed} component {j}: max diff {diff:e}"));
            }
        }
        // best rank-k error is the tail of the spectrum
        let tail: f64 = order[k..]
            .iter()
            .map(|&o| oracle.singular_values[o].powi(2))
            .sum::<f64>()
            .sqrt();
        let err_k = (0..rows * cols)
            .map(|i| (a.as_slice()[i] - f.reconstruct().as_slice()[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let rel_k = (err_k - tail).abs() / a.frobenius_norm();

        let full = truncated_svd(&sparse, cols).expect("full SVD converges");
        let rel_full = full.reconstruct().max_abs_diff(&a).max(0.0);
        let rel_full_fro = {
            let r = full.reconstruct();
            (0..rows * cols)
                .map(|i| (r.as_slice()[i] - a.as_slice()[i]).powi(2))
                .sum::<f64>()
                .sqrt()
                / a.frobenius_norm()
        };
        worst_recon = worst_recon.max(rel_full_fro).max(rel_k);
        if rel_full_fro > SVD_RECONSTRUCTION_TOL || rel_k > SVD_RECONSTRUCTION_TOL {
            failures.push(format!(
                "seed {seed}: full-rank rel error {rel_full_fro:e} (max entry {rel_full:e}), rank-{k} optimality gap {rel_k:e}"
            ));
        }
    }
    verdict(
        4,
        "SVD vs dense decomposition",
        &failures,
        &format!(
            "5 random {rows}x{cols}, top-{k} factors max diff {worst_factor:.2e} (tol {SVD_FACTOR_TOL:e}), \
             reconstruction {worst_recon:.2e} (tol {SVD_RECONSTRUCTION_TOL:e})"
        ),
    );
}

// ---------------------------------------------------------------- 5

fn sparse_counts(docs: &[Vec<(usize, f64)>], terms: usize) -> SparseMatrix {
    let triplets = docs
        .iter()
        .enumerate()
        .flat_map(|(d, ws)| ws.iter().map(move |&(t, c)| (t, d, c)));
    SparseMatrix::from_triplets(terms, docs.len(), triplets).expect("valid counts")
}

/// 20 documents drawing only from terms 0..10 and 20 only from 10..20.
fn two_cluster_corpus(seed: u64) -> (SparseMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for d in 0..40 {
        let cluster = d % 2;
        let mut counts = [0.0; 20];
        for _ in 0..60 {
            counts[cluster * 10 + rng.random_range(0..10)] += 1.0;
        }
        docs.push(
            counts
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0.0)
                .map(|(t, c)| (t, *c))
                .collect(),
        );
        labels.push(cluster);
    }
    (sparse_counts(&docs, 20), labels)
}

fn row_sum_error(values: &[f64], width: usize) -> f64 {
    values
        .chunks(width)
        .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn bits(m: &LdaModel) -> Vec<u64> {
    m.phi.iter().chain(&m.theta).map(|v| v.to_bits()).collect()
}

#[test]
fn c5_lda_invariants_and_separation() {
    let mut failures = Vec::new();
    let mut worst_sum: f64 = 0.0;
    let mut agreements = Vec::new();
    for seed in 0..5u64 {
        let (corpus, labels) = two_cluster_corpus(500 + seed);
        let model = gibbs_lda(&corpus, &LdaParams::for_topics(2, seed)).expect("LDA trains");
        worst_sum = worst_sum.max(row_sum_error(&model.phi, model.num_terms));
        worst_sum = worst_sum.max(row_sum_error(&model.theta, model.topics));
        let same = (0..labels.len())
            .filter(|&d| model.dominant_topic(d) == labels[d])
            .count();
        let agreement = same.max(labels.len() - same) as f64 / labels.len() as f64;
        agreements.push(agreement);

        let again = gibbs_lda(&corpus, &LdaParams::for_topics(2, seed)).expect("LDA trains");
        if bits(&model) != bits(&again) {
            failures.push(format!("seed {seed}: retraining is not bit-identical"));
        }
    }
    // row sums on irregular corpora and larger K
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for k in [3, 8, 32] {
        let docs: Vec<Vec<(usize, f64)>> = (0..15)
            .map(|_| {
                let mut terms: Vec<usize> = (0..rng.random_range(0..12))
                    .map(|_| rng.random_range(0..30))
                    .collect();
                terms.sort_unstable();
                terms.dedup();
                terms
                    .into_iter()
                    .map(|t| (t, f64::from(rng.random_range(1..5u32))))
                    .collect()
            })
            .collect();
        let model =
            gibbs_lda(&sparse_counts(&docs, 30), &LdaParams::for_topics(k, 9)).expect("LDA trains");
        worst_sum = worst_sum.max(row_sum_error(&model.phi, model.num_terms));
        worst_sum = worst_sum.max(row_sum_error(&model.theta, model.topics));
    }
    if worst_sum > LDA_ROW_SUM_TOL {
        failures.push(format!("row sums off by {worst_sum:e}"));
    }
    let separated = agreements.iter().filter(|a| **a >= LDA_AGREEMENT).count();
    if separated < LDA_SEEDS_REQUIRED {
        failures.push(format!("agreement {agreements:?}"));
    }
    verdict(
        5,
        "LDA invariants and separation",
        &failures,
        &format!(
            "row sums within {worst_sum:.1e} (tol {LDA_ROW_SUM_TOL:e}), agreement {agreements:?} \
             ({separated}/5 seeds >= {LDA_AGREEMENT}, need {LDA_SEEDS_REQUIRED}), same seed bit-identical"
        ),
    );
}

// ---------------------------------------------------------------- 6

struct MetricFixture {
    lists: Vec<RankedList>,
    truth: Vec<BTreeSet<String>>,
}

fn metric_fixture(rng: &mut ChaCha8Rng) -> MetricFixture {
    let entities = rng.random_range(1..=40);
    let ids: Vec<String> = (0..entities).map(|e| format!("e{e:02}")).collect();
    let loc: Vec<u64> = (0..entities).map(|_| rng.random_range(0..=4000)).collect();
    let queries = rng.random_range(1..=25);
    let mut lists = Vec::new();
    let mut truth = Vec::new();
    for q in 0..queries {
        let scores: Vec<f64> = (0..entities)
            .map(|_| f64::from(rng.random_range(0..10u32)))
            .collect();
        lists.push(RankedList::from_scores(
            format!("q{q}"),
            &ids,
            &loc,
            &scores,
        ));
        let relevant: BTreeSet<String> = ids
            .iter()
            .filter(|_| rng.random_bool(0.15))
            .cloned()
            .collect();
        truth.push(relevant);
    }
    MetricFixture { lists, truth }
}

/// Cumulative LOC through each position of a ranked list.
fn prefix_loc(list: &RankedList) -> Vec<u64> {
    list.entries
        .iter()
        .scan(0, |acc, e| {
            *acc += e.loc;
            Some(*acc)
        })
        .collect()
}

fn oracle_top_k(f: &MetricFixture, k: usize) -> f64 {
    let hits = f
        .lists
        .iter()
        .zip(&f.truth)
        .filter(|(l, t)| l.entries.iter().take(k).any(|e| t.contains(&e.entity)))
        .count();
    hits as f64 / f.lists.len() as f64
}

fn oracle_effort(list: &RankedList, truth: &BTreeSet<String>, cap: u64) -> u64 {
    let sums = prefix_loc(list);
    match list.entries.iter().position(|e| truth.contains(&e.entity)) {
        Some(p) if sums[p] <= cap => sums[p],
        _ => cap,
    }
}

fn oracle_top_k_loc(f: &MetricFixture, k_loc: u64) -> f64 {
    let hits = f
        .lists
        .iter()
        .zip(&f.truth)
        .filter(|(l, t)| {
            let sums = prefix_loc(l);
            l.entries
                .iter()
                .enumerate()
                .any(|(i, e)| t.contains(&e.entity) && sums[i] <= k_loc)
        })
        .count();
    hits as f64 / f.lists.len() as f64
}

/// Exact rational scan: top-k perfs are `hits / queries`.
fn oracle_likelihood_top_k(hits: &[u64], pct: u64) -> f64 {
    let best = *hits.iter().max().unwrap();
    hits.iter()
        .filter(|&&h| 100 * h >= (100 - pct) * best)
        .count() as f64
        / hits.len() as f64
}

fn oracle_likelihood_effort(efforts: &[u64], pct: u64) -> f64 {
    let least = *efforts.iter().min().unwrap();
    efforts
        .iter()
        .filter(|&&e| 100 * e <= (100 + pct) * least)
        .count() as f64
        / efforts.len() as f64
}

#[test]
fn c6_metrics_match_brute_force() {
    let (k, cap, k_loc) = (20, 50_000, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut queries_checked = 0;
    for fixture in 0..50 {
        let f = metric_fixture(&mut rng);
        let outcomes: Vec<QueryOutcome> = f
            .lists
            .iter()
            .zip(&f.truth)
            .map(|(l, t)| QueryOutcome::from_ranked(l, &t.iter().map(String::as_str).collect()))
            .collect();
        queries_checked += outcomes.len();
        if top_k(&outcomes, k) != oracle_top_k(&f, k) {
            failures.push(format!("fixture {fixture}: top_k"));
        }
        if top_k_loc(&outcomes, k_loc) != oracle_top_k_loc(&f, k_loc) {
            failures.push(format!("fixture {fixture}: top_k_loc"));
        }
        for (l, t) in f.lists.iter().zip(&f.truth) {
            let rel: BTreeSet<&str> = t.iter().map(String::as_str).collect();
            if effort_to_first(l, &rel, cap) != oracle_effort(l, t, cap) {
                failures.push(format!("fixture {fixture} {}: effort", l.query));
            }
        }
        let n = f.lists[0].len();
        let by_k: Vec<f64> = (1..=n).map(|k| top_k(&outcomes, k)).collect();
        if by_k.windows(2).any(|w| w[0] > w[1]) {
            failures.push(format!("fixture {fixture}: top_k not monotone in k"));
        }
        let by_loc: Vec<f64> = (0..=60).map(|i| top_k_loc(&outcomes, i * 2_000)).collect();
        if by_loc.windows(2).any(|w| w[0] > w[1]) {
            failures.push(format!(
                "fixture {fixture}: top_k_loc not monotone in k_loc"
            ));
        }

        // a family of configuration performances over a shared query count
        let queries = rng.random_range(1..=60u64);
        let configs = rng.random_range(1..=100);
        let hits: Vec<u64> = (0..configs)
            .map(|_| rng.random_range(0..=queries))
            .collect();
        let efforts: Vec<u64> = (0..configs).map(|_| rng.random_range(1..=cap)).collect();
        let perfs: Vec<f64> = hits.iter().map(|&h| h as f64 / queries as f64).collect();
        let effort_perfs: Vec<f64> = efforts.iter().map(|&e| e as f64).collect();
        for pct in LIKELIHOOD_PCTS {
            let want = oracle_likelihood_top_k(&hits, u64::from(pct));
            match likelihood_within(&perfs, pct, RankBy::TopK) {
                Ok(got) if got == want => {}
                Err(_) if hits.iter().all(|h| *h == 0) => {}
                other => failures.push(format!(
                    "fixture {fixture} top-k {pct}%: {other:?} vs {want}"
                )),
            }
            let want = oracle_likelihood_effort(&efforts, u64::from(pct));
            match likelihood_within(&effort_perfs, pct, RankBy::Effort) {
                Ok(got) if got == want => {}
                other => failures.push(format!(
                    "fixture {fixture} effort {pct}%: {other:?} vs {want}"
                )),
            }
        }
    }
    verdict(
        6,
        "metric oracles",
        &failures,
        &format!(
            "50 fixtures ({queries_checked} queries): top_k@{k}, effort cap {cap}, top_k_loc@{k_loc} and \
             likelihood at {LIKELIHOOD_PCTS:?}% exact; monotone in k and k_loc"
        ),
    );
}

// ---------------------------------------------------------------- 7

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    Normal::new(0.0, sigma).unwrap().sample(rng)
}

/// Three-level factor as two treatment dummies.
fn factor_dummies(level: usize) -> [f64; 2] {
    [f64::from(level == 1), f64::from(level == 2)]
}

#[test]
fn c7_statistics_kernels() {
    let mut failures = Vec::new();

    // OLS against explicit (XᵀX)⁻¹Xᵀy
    let mut worst_ols: f64 = 0.0;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let (n, p) = (200, 5);
        let beta = [1.5, -2.0, 0.5, 3.0, 0.0];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let mut row = vec![1.0];
            row.extend((1..p).map(|_| gaussian(&mut rng, 1.0)));
            y.push(
                row.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>() + gaussian(&mut rng, 0.5),
            );
            rows.push(row);
        }
        let fit = ols_fit(&Dense::from_rows(&rows), &y).expect("full-rank design");
        let xm = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        let xtx_inv = (xm.transpose() * &xm).try_inverse().expect("invertible");
        let oracle = xtx_inv * xm.transpose() * DVector::from_vec(y.clone());
        for j in 0..p {
            let d = (fit.coefficients[j] - oracle[j]).abs();
            worst_ols = worst_ols.max(d);
            if d > OLS_TOL {
                failures.push(format!(
                    "OLS seed {seed} β{j}: {} vs {}",
                    fit.coefficients[j], oracle[j]
                ));
            }
            if (fit.coefficients[j] - beta[j]).abs() > 4.0 * fit.standard_error(j) {
                failures.push(format!("OLS seed {seed} β{j} outside 4 standard errors"));
            }
        }
    }

    // planted strong factor vs null factor
    let mut wins = 0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7_000 + trial);
        let n = 500;
        let effects = [0.0, 0.5, 1.0];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let (strong, null) = (rng.random_range(0..3), rng.random_range(0..3));
            let mut row = vec![1.0];
            row.extend(factor_dummies(strong));
            row.extend(factor_dummies(null));
            rows.push(row);
            y.push(2.0 + effects[strong] + gaussian(&mut rng, 1.0));
        }
        let fit = ols_fit(&Dense::from_rows(&rows), &y).expect("full-rank design");
        let w_strong = wald_chunk(&fit, &[1, 2], "strong").unwrap().statistic;
        let w_null = wald_chunk(&fit, &[3, 4], "null").unwrap().statistic;
        if w_strong > w_null {
            wins += 1;
        }
    }
    if wins < WALD_WINS_REQUIRED {
        failures.push(format!("strong factor won {wins}/100"));
    }

    // optimism: pure-noise model with p ≈ n/2 vs a small true model
    let mut optimism_wins = 0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(77 + seed);
        let n = 60;
        let mut wide = Vec::new();
        let mut narrow = Vec::new();
        let mut y_noise = Vec::new();
        let mut y_line = Vec::new();
        for _ in 0..n {
            let mut row = vec![1.0];
            row.extend((0..29).map(|_| gaussian(&mut rng, 1.0)));
            wide.push(row);
            let x = gaussian(&mut rng, 1.0);
            narrow.push(vec![1.0, x]);
            y_noise.push(gaussian(&mut rng, 1.0));
            y_line.push(1.0 + 2.0 * x + gaussian(&mut rng, 1.0));
        }
        let over =
            bootstrap_optimism(&Dense::from_rows(&wide), &y_noise, 200, seed).expect("bootstrap");
        let good =
            bootstrap_optimism(&Dense::from_rows(&narrow), &y_line, 200, seed).expect("bootstrap");
        if over.mean_optimism > good.mean_optimism {
            optimism_wins += 1;
        } else {
            failures.push(format!(
                "optimism seed {seed}: overfit {} <= small {}",
                over.mean_optimism, good.mean_optimism
            ));
        }
    }

    let up: Vec<f64> = (1..=10).map(f64::from).collect();
    let down: Vec<f64> = up.iter().rev().copied().collect();
    let spearman_cases = [
        (spearman(&up, &up), 1.0),
        (spearman(&up, &down), -1.0),
        (
            spearman(&[1.0, 2.0, 2.0, 4.0], &[10.0, 20.0, 20.0, 40.0]),
            1.0,
        ),
    ];
    for (i, (got, want)) in spearman_cases.iter().enumerate() {
        if got.as_ref().ok() != Some(want) {
            failures.push(format!("spearman case {i}: {got:?} vs {want}"));
        }
    }

    verdict(
        7,
        "statistics kernels",
        &failures,
        &format!(
            "OLS vs normal equations max diff {worst_ols:.1e} (tol {OLS_TOL:e}); strong > null Wald in {wins}/100 \
             (need {WALD_WINS_REQUIRED}); overfit optimism larger in {optimism_wins}/10 seeds; spearman 1, -1, ties exact"
        ),
    );
}

// ---------------------------------------------------------------- 8

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/minirepo")
}

fn bugloc(args: &[&str], cache: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bugloc"))
        .args(args)
        .env("BUGLOC_CACHE_DIR", cache)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "bugloc {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn relative_files(root: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

#[test]
fn c8_fixture_pipeline_reproduces_expected_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cache = tmp.path().join("cache");
    let manifest = fixture_dir().join("bugloc.toml");
    let (m, o) = (manifest.to_str().unwrap(), out.to_str().unwrap());
    let mut failures = Vec::new();

    let start = Instant::now();
    let mut run_time = Duration::ZERO;
    for cmd in ["extract", "link", "run", "evaluate", "report"] {
        let step = Instant::now();
        if let Err(e) = bugloc(&[cmd, "-m", m, "--output", o], &cache) {
            failures.push(e);
            break;
        }
        if cmd == "run" {
            run_time = step.elapsed();
        }
    }
    let total = start.elapsed();
    if run_time >= PIPELINE_BUDGET {
        failures.push(format!("full run took {run_time:?}"));
    }

    let expected = fixture_dir().join("expected");
    let files = relative_files(&expected);
    for rel in &files {
        let want = std::fs::read(expected.join(rel)).unwrap();
        match std::fs::read(out.join(rel)) {
            Ok(got) if got == want => {}
            Ok(_) => failures.push(format!("{} differs", rel.display())),
            Err(e) => failures.push(format!("{}: {e}", rel.display())),
        }
    }
    let links = std::fs::read_to_string(out.join("links.jsonl")).unwrap_or_default();
    let key_link = links.lines().any(|l| {
        l.contains("\"bug\":293777")
            && l.contains("org/eclipse/jdt/internal/compiler/lookup/MethodScope.java#recordInitializationStates")
    });
    if !key_link {
        failures
            .push("bug 293777 is not linked to MethodScope.java#recordInitializationStates".into());
    }
    verdict(
        8,
        "fixture pipeline",
        &failures,
        &format!(
            "{} expected files byte-identical, 293777 -> MethodScope.java#recordInitializationStates linked, \
             3172-config run {run_time:.1?} (limit {PIPELINE_BUDGET:?}), pipeline {total:.1?}",
            files.len()
        ),
    );
}

// ---------------------------------------------------------------- 9

/// Every LSI configuration with a top-k response driven by `dominant`,
/// small effects for the other parameters and noise.
fn planted_outcomes(dominant: char, seed: u64) -> Vec<EvalOutcome> {
    let effect = |letter: char, level: &str| {
        let size = if letter == dominant { 0.15 } else { 0.005 };
        let code: f64 = level.parse().unwrap();
        // topic counts 32..256 become 1..4 like the other codes
        let code = if code >= 32.0 {
            code.log2() - 4.0
        } else {
            code
        };
        size * code
    };
    let mut noise = ChaCha8Rng::seed_from_u64(seed);
    enumerate_configs()
        .into_iter()
        .filter(|c| c.family() == Family::Lsi)
        .map(|c| {
            let y: f64 = c.levels().iter().map(|(l, v)| effect(*l, v)).sum::<f64>()
                + gaussian(&mut noise, 0.05);
            EvalOutcome {
                config: c.id(),
                queries: Vec::new(),
                excluded: 0,
                top_k: y,
                median_effort: 0,
                top_k_loc: 0.0,
                params: EvalParams::default(),
            }
        })
        .collect()
}

fn report_csv(outcomes: &[EvalOutcome], resamples: usize, seed: u64) -> (String, Vec<u8>) {
    let dm = build_design_matrix(outcomes, Response::TopK).expect("design matrix");
    let report = sensitivity_analysis(&dm, resamples, seed).expect("sensitivity");
    let mut buf = Vec::new();
    write_csv(&mut buf, "synthetic", std::slice::from_ref(&report)).unwrap();
    (report.ranked()[0].parameter.clone(), buf)
}

#[test]
fn c9_sensitivity_ranks_planted_parameter_first() {
    let params = ['A', 'B', 'C', 'F', 'G'];
    let mut failures = Vec::new();
    let mut firsts = 0;
    for seed in 0..10u64 {
        let dominant = params[seed as usize % params.len()];
        let outcomes = planted_outcomes(dominant, 900 + seed);
        let (top, csv) = report_csv(&outcomes, 200, seed);
        if top == dominant.to_string() {
            firsts += 1;
        } else {
            failures.push(format!(
                "seed {seed}: planted {dominant}, ranked first {top}"
            ));
        }
        if seed == 0 {
            let (_, again) = report_csv(&outcomes, 200, seed);
            let single = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            let (_, serial) = single.install(|| report_csv(&outcomes, 200, seed));
            if csv != again || csv != serial {
                failures.push("report CSV differs between runs with the same seed".into());
            }
        }
    }
    verdict(
        9,
        "sensitivity on planted data",
        &failures,
        &format!("planted parameter ranked first in {firsts}/10 seeds (LSI design, 200 resamples); CSV byte-identical across runs and thread counts"),
    );
}
