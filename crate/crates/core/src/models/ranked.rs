use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntity {
    pub entity: String,
    pub score: f64,
    pub loc: u64,
}

/// Entities of one corpus ordered by descending score, ties by entity id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query: String,
    pub produced_by: String,
    pub entries: Vec<RankedEntity>,
}

impl RankedList {
    /// Sorts `ids` by `scores`; `loc` aligns with `ids`.
    pub fn from_scores(
        query: impl Into<String>,
        ids: &[String],
        loc: &[u64],
        scores: &[f64],
    ) -> Self {
        assert!(
            ids.len() == scores.len() && ids.len() == loc.len(),
            "misaligned ranking inputs"
        );
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then_with(|| ids[a].cmp(&ids[b]))
        });
        Self {
            query: query.into(),
            produced_by: String::new(),
            entries: order
                .into_iter()
                .map(|i| RankedEntity {
                    entity: ids[i].clone(),
                    score: scores[i],
                    loc: loc[i],
                })
                .collect(),
        }
    }

    pub fn with_producer(mut self, config_id: impl Into<String>) -> Self {
        self.produced_by = config_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.entity.as_str())
    }

    /// 1-based rank of `entity`.
    pub fn rank_of(&self, entity: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.entity == entity)
            .map(|p| p + 1)
    }
}
