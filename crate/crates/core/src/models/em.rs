//! Entity-metric classifiers: rank by one history metric, largest first.

use super::config::EmMetric;
use super::ranked::RankedList;
use crate::extraction::EntityHistoryMetrics;

pub fn metric_value(metric: EmMetric, m: &EntityHistoryMetrics) -> u64 {
    match metric {
        EmMetric::Loc => m.loc,
        EmMetric::Churn => m.churn,
        EmMetric::NewBugs => m.new_bug_count,
        EmMetric::CumulativeBugs => m.cumulative_bug_count,
    }
}

/// Ranks entities by `metric` descending, ties by entity id. The score is
/// the raw metric value.
pub fn em_rank(
    query: &str,
    metric: EmMetric,
    ids: &[String],
    metrics: &[EntityHistoryMetrics],
) -> RankedList {
    let scores: Vec<f64> = metrics
        .iter()
        .map(|m| metric_value(metric, m) as f64)
        .collect();
    let loc: Vec<u64> = metrics.iter().map(|m| m.loc).collect();
    RankedList::from_scores(query, ids, &loc, &scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(loc: u64, churn: u64) -> EntityHistoryMetrics {
        EntityHistoryMetrics {
            loc,
            churn,
            new_bug_count: 0,
            cumulative_bug_count: 0,
            as_of: 0,
        }
    }

    #[test]
    fn loc_orders_descending() {
        let ids: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let m = [metrics(10, 0), metrics(300, 0), metrics(42, 0)];
        let r = em_rank("q", EmMetric::Loc, &ids, &m);
        assert_eq!(
            r.entries.iter().map(|e| e.loc).collect::<Vec<_>>(),
            vec![300, 42, 10]
        );
        let r = em_rank("q", EmMetric::Churn, &ids, &m);
        assert_eq!(r.ids().collect::<Vec<_>>(), vec!["a", "b", "c"]);
    }
}
