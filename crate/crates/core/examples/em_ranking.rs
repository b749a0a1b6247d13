//! Entity-metric classifiers: the same entities ranked by LOC, churn, new
//! bugs and cumulative bugs.

use bugloc::extraction::EntityHistoryMetrics;
use bugloc::models::{em_rank, EmMetric};

fn main() {
    let ids: Vec<String> = ["Ast.java", "Flow.java", "Lookup.java", "Util.java"]
        .map(String::from)
        .to_vec();
    let metrics = [
        (1200, 40, 0, 3),
        (650, 310, 2, 5),
        (980, 120, 1, 1),
        (90, 0, 0, 0),
    ]
    .map(|(loc, churn, new, total)| EntityHistoryMetrics {
        loc,
        churn,
        new_bug_count: new,
        cumulative_bug_count: total,
        as_of: 0,
    });
    for metric in EmMetric::ALL {
        let ranked = em_rank("any", metric, &ids, &metrics);
        let order: Vec<String> = ranked
            .entries
            .iter()
            .map(|e| format!("{}({})", e.entity, e.score))
            .collect();
        println!("M{} {metric:?}: {}", metric.code(), order.join(" > "));
    }
}
