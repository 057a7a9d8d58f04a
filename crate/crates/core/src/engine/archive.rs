use std::collections::BTreeSet;

use super::problem::{Key, Problem};
use super::{FrontPoint, Score, TiePolicy};

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub score: Score,
    pub keys: BTreeSet<Key>,
    /// More distinct keys than the cap were offered for this score.
    pub overflow: bool,
}

/// Incrementally maintained front with tied scenarios per point.
///
/// Entries are kept sorted by strictly decreasing `log10_p`, which forces
/// strictly increasing `crit_sum`. Each entry keeps the canonically
/// smallest `cap` keys.
#[derive(Debug, Clone)]
pub(crate) struct Archive {
    entries: Vec<Entry>,
    cap: usize,
    report_overflow: bool,
}

impl Archive {
    pub fn new(policy: TiePolicy, max_ties: usize) -> Self {
        let (cap, report_overflow) = match policy {
            TiePolicy::AllTies => (max_ties.max(1), true),
            TiePolicy::Representative => (1, false),
        };
        Archive {
            entries: Vec::new(),
            cap,
            report_overflow,
        }
    }

    #[cfg(test)]
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn overflowed(&self) -> bool {
        self.entries.iter().any(|e| e.overflow)
    }

    /// Index of the first entry whose `log10_p` is not above `p`.
    fn split(&self, p: f64) -> usize {
        self.entries.partition_point(|e| e.score.log10_p > p)
    }

    /// True if some archived score strictly dominates `(p, c)`.
    pub fn strictly_dominates(&self, p: f64, c: u32) -> bool {
        let idx = self.split(p);
        if idx > 0 && self.entries[idx - 1].score.crit_sum >= c {
            return true;
        }
        matches!(self.entries.get(idx), Some(e) if e.score.log10_p == p && e.score.crit_sum > c)
    }

    /// Offers a scenario; returns whether it was retained.
    pub fn insert(&mut self, score: Score, key: impl FnOnce() -> Key) -> bool {
        let (p, c) = (score.log10_p, score.crit_sum);
        if self.strictly_dominates(p, c) {
            return false;
        }
        let idx = self.split(p);
        if let Some(e) = self.entries.get(idx) {
            if e.score.log10_p == p && e.score.crit_sum == c {
                return self.add_tie(idx, key());
            }
        }
        let mut end = idx;
        while end < self.entries.len() && self.entries[end].score.crit_sum <= c {
            end += 1;
        }
        let mut keys = BTreeSet::new();
        keys.insert(key());
        self.entries.splice(
            idx..end,
            std::iter::once(Entry {
                score,
                keys,
                overflow: false,
            }),
        );
        true
    }

    fn add_tie(&mut self, idx: usize, key: Key) -> bool {
        let cap = self.cap;
        let report = self.report_overflow;
        let entry = &mut self.entries[idx];
        if entry.keys.len() >= cap {
            if entry.keys.contains(&key) {
                return false;
            }
            entry.overflow |= report;
            if entry.keys.last().is_some_and(|last| &key > last) {
                return false;
            }
            entry.keys.insert(key);
            entry.keys.pop_last();
            return true;
        }
        entry.keys.insert(key)
    }

    /// Merges another archive's content into this one.
    pub fn absorb(&mut self, other: Archive) {
        for entry in other.entries {
            let score = entry.score;
            let overflow = entry.overflow;
            for key in entry.keys {
                self.insert(score, || key);
            }
            if overflow {
                let idx = self.split(score.log10_p);
                if let Some(e) = self.entries.get_mut(idx) {
                    if e.score == score {
                        e.overflow = true;
                    }
                }
            }
        }
    }

    pub fn scores(&self) -> Vec<Score> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn into_points(self, problem: &Problem<'_>) -> Vec<FrontPoint> {
        self.entries
            .into_iter()
            .map(|e| FrontPoint {
                score: e.score,
                scenarios: e.keys.iter().map(|k| problem.scenario_of_key(k)).collect(),
            })
            .collect()
    }
}
