use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::Timestamp;

/// A bug report; the query side of bug localization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub id: u64,
    pub title: String,
    pub description: String,
    pub created: Timestamp,
    pub fixed: Timestamp,
}

/// Bug reports by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BugStore {
    bugs: BTreeMap<u64, BugReport>,
}

impl BugStore {
    /// Returns the previous report with the same id, if any.
    pub fn insert(&mut self, bug: BugReport) -> Option<BugReport> {
        self.bugs.insert(bug.id, bug)
    }

    pub fn get(&self, id: u64) -> Option<&BugReport> {
        self.bugs.get(&id)
    }

    pub fn contains(&self, id: u64) -> bool {
        self.bugs.contains_key(&id)
    }

    /// Reports in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &BugReport> {
        self.bugs.values()
    }

    pub fn len(&self) -> usize {
        self.bugs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bugs.is_empty()
    }
}

impl FromIterator<BugReport> for BugStore {
    fn from_iter<T: IntoIterator<Item = BugReport>>(iter: T) -> Self {
        let mut store = Self::default();
        for bug in iter {
            store.insert(bug);
        }
        store
    }
}
