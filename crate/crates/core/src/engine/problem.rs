use crate::catalog::Catalog;

use super::{level_logs, Scenario, Score, ScoreCounts};

/// Catalog data flattened for the search loops.
pub(crate) struct Problem<'a> {
    pub catalog: &'a Catalog,
    pub level: Vec<usize>,
    pub rank: Vec<u32>,
    pub level_logs: [f64; 5],
    /// Catalog indices sorted by feature id.
    pub by_id: Vec<usize>,
    /// Position of each catalog index within `by_id`.
    pub id_rank: Vec<u16>,
}

/// Canonical scenario key: id ranks in ascending order. Lexicographic
/// order on keys equals lexicographic order on the sorted id lists.
pub(crate) type Key = Box<[u16]>;

impl<'a> Problem<'a> {
    pub fn new(catalog: &'a Catalog) -> Self {
        let mapping = catalog.mapping();
        let features = catalog.features();
        assert!(features.len() <= usize::from(u16::MAX), "catalog too large");
        let mut by_id: Vec<usize> = (0..features.len()).collect();
        by_id.sort_by(|&a, &b| features[a].id.cmp(&features[b].id));
        let mut id_rank = vec![0u16; features.len()];
        for (pos, &i) in by_id.iter().enumerate() {
            id_rank[i] = pos as u16;
        }
        Problem {
            catalog,
            level: features.iter().map(|f| f.probability.index()).collect(),
            rank: features.iter().map(|f| mapping.criticality_rank(f.criticality)).collect(),
            level_logs: level_logs(catalog),
            by_id,
            id_rank,
        }
    }

    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn log_value(&self, i: usize) -> f64 {
        self.level_logs[self.level[i]]
    }

    pub fn score_of(&self, members: impl IntoIterator<Item = usize>) -> Score {
        let mut counts = ScoreCounts::default();
        for i in members {
            counts.add(self.level[i], self.rank[i]);
        }
        counts.score(&self.level_logs)
    }

    pub fn key_of(&self, members: impl IntoIterator<Item = usize>) -> Key {
        let mut key: Vec<u16> = members.into_iter().map(|i| self.id_rank[i]).collect();
        key.sort_unstable();
        key.into_boxed_slice()
    }

    pub fn scenario_of_key(&self, key: &[u16]) -> Scenario {
        let features = self.catalog.features();
        Scenario::new(key.iter().map(|&r| features[self.by_id[usize::from(r)]].id.clone()))
    }
}
