//! Top-k, effort and top-k_LOC for a handful of ranked queries, plus the
//! likelihood of picking a near-best configuration.

use std::collections::BTreeSet;

use bugloc::evaluation::{
    effort_to_first, lift_curve, likelihood_within, EvalOutcome, EvalParams, QueryOutcome, RankBy,
    LIKELIHOOD_PCTS,
};
use bugloc::models::RankedList;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ids: Vec<String> = (0..6).map(|i| format!("e{i}")).collect();
    let loc = [900, 2_500, 120, 4_000, 60, 3_300];
    let cases = [
        ([0.9, 0.8, 0.3, 0.2, 0.1, 0.0], "e1"),
        ([0.1, 0.2, 0.3, 0.4, 0.5, 0.6], "e0"),
        ([0.5, 0.4, 0.9, 0.1, 0.8, 0.7], "e4"),
    ];
    let params = EvalParams {
        k: 2,
        k_loc: 5_000,
        cap: 10_000,
    };
    let mut queries = Vec::new();
    for (q, (scores, relevant)) in cases.iter().enumerate() {
        let ranked = RankedList::from_scores(format!("bug{q}"), &ids, &loc, scores);
        let truth = BTreeSet::from([*relevant]);
        let outcome = QueryOutcome::from_ranked(&ranked, &truth);
        println!(
            "bug{q}: first relevant at rank {:?}, effort {} LOC (cap {})",
            outcome.first_rank,
            effort_to_first(&ranked, &truth, params.cap),
            params.cap
        );
        queries.push(outcome);
    }
    let outcome = EvalOutcome::new("A1.B4.C5.D1.E1", queries, 0, params);
    println!(
        "top-{} = {:.3}, median effort = {}, top-{}LOC = {:.3}",
        params.k, outcome.top_k, outcome.median_effort, params.k_loc, outcome.top_k_loc
    );
    let lift = lift_curve(&outcome, 10_000, 2_500)?;
    println!("lift: {:?}", lift.points);

    let family = [0.34, 0.33, 0.30, 0.27, 0.21, 0.12, 0.05];
    for pct in LIKELIHOOD_PCTS {
        println!(
            "within {pct:>2}% of best top-k: {:.3}",
            likelihood_within(&family, pct, RankBy::TopK)?
        );
    }
    Ok(())
}
