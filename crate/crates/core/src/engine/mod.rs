//! Scenario scoring, exhaustive enumeration and exact Pareto front search.
//!
//! A scenario is a set of catalog features. Its global probability is the
//! product of member probabilities and its global criticality the product
//! of `2^rank` over members; both are carried in log domain as
//! `log10_p` and the integer `crit_sum`. The front maximizes both.

mod archive;
mod brute;
mod problem;
mod search;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::constraint::ConstraintSet;

pub use brute::{enumerate_valid, ValidScenarios};
pub use search::check_satisfiable;

/// Catalogs above this size are searched with branch-and-bound in
/// [`EngineMode::Auto`].
pub const AUTO_BRUTE_FORCE_MAX: usize = 16;

/// A set of feature ids. Ordering and iteration are lexicographic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    members: BTreeSet<String>,
}

impl Scenario {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Scenario {
            members: ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(String::as_str)
    }

    pub fn insert(&mut self, id: impl Into<String>) -> bool {
        self.members.insert(id.into())
    }

    pub fn with(&self, id: impl Into<String>) -> Scenario {
        let mut s = self.clone();
        s.insert(id);
        s
    }

    /// Canonical comparison: by size, then lexicographically.
    pub fn canonical_cmp(&self, other: &Scenario) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// Log-domain global scores: `P_g = 10^log10_p`, `C_g = 2^crit_sum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub log10_p: f64,
    pub crit_sum: u32,
}

impl Score {
    pub const EMPTY: Score = Score {
        log10_p: 0.0,
        crit_sum: 0,
    };

    /// Global probability; underflows to 0.0 for very small products.
    pub fn p_g(&self) -> f64 {
        10f64.powf(self.log10_p)
    }

    /// Global criticality, exact while `crit_sum` fits the f64 exponent.
    pub fn c_g(&self) -> f64 {
        2f64.powi(self.crit_sum as i32)
    }

    pub fn dominates(&self, other: &Score) -> bool {
        self.log10_p >= other.log10_p
            && self.crit_sum >= other.crit_sum
            && (self.log10_p > other.log10_p || self.crit_sum > other.crit_sum)
    }
}

/// Member counts per probability level plus the rank sum.
///
/// `log10_p` is always evaluated from the counts in level order, so equal
/// multisets of levels produce bit-identical scores whatever order the
/// members were added in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct ScoreCounts {
    pub level_counts: [u32; 5],
    pub crit_sum: u32,
}

impl ScoreCounts {
    pub fn add(&mut self, level: usize, rank: u32) {
        self.level_counts[level] += 1;
        self.crit_sum += rank;
    }

    pub fn remove(&mut self, level: usize, rank: u32) {
        self.level_counts[level] -= 1;
        self.crit_sum -= rank;
    }

    pub fn log10_p(&self, level_logs: &[f64; 5]) -> f64 {
        let mut acc = 0.0;
        for (count, log) in self.level_counts.iter().zip(level_logs) {
            if *count > 0 {
                acc += f64::from(*count) * log;
            }
        }
        acc
    }

    pub fn score(&self, level_logs: &[f64; 5]) -> Score {
        Score {
            log10_p: self.log10_p(level_logs),
            crit_sum: self.crit_sum,
        }
    }
}

pub(crate) fn level_logs(catalog: &Catalog) -> [f64; 5] {
    let mut logs = [0.0; 5];
    for (log, p) in logs.iter_mut().zip(catalog.mapping().prob_values()) {
        *log = p.log10();
    }
    logs
}

/// Scores a scenario against a catalog.
pub fn score(scenario: &Scenario, catalog: &Catalog) -> Result<Score, EngineError> {
    let mapping = catalog.mapping();
    let mut counts = ScoreCounts::default();
    for id in scenario.iter() {
        let f = catalog
            .get(id)
            .ok_or_else(|| EngineError::UnknownFeature(id.to_string()))?;
        counts.add(f.probability.index(), mapping.criticality_rank(f.criticality));
    }
    Ok(counts.score(&level_logs(catalog)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// Keep every scenario achieving a front score.
    #[default]
    AllTies,
    /// Keep only the lexicographically smallest scenario per front score.
    Representative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EngineMode {
    BruteForce,
    BranchAndBound,
    /// Brute force up to [`AUTO_BRUTE_FORCE_MAX`] features, branch-and-bound above.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationConfig {
    pub min_features: usize,
    /// `None` means the catalog size.
    pub max_features: Option<usize>,
    pub tie_policy: TiePolicy,
    pub engine_mode: EngineMode,
    pub brute_force_limit: usize,
    pub worker_count: usize,
    /// Cap on retained tied scenarios per front point; exceeding it keeps
    /// the canonically smallest ones and marks the result truncated.
    pub max_ties_per_point: usize,
    /// Optional cap on branch-and-bound nodes; exceeding it stops the
    /// search early and marks the result truncated.
    pub node_limit: Option<u64>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            min_features: 1,
            max_features: None,
            tie_policy: TiePolicy::AllTies,
            engine_mode: EngineMode::Auto,
            brute_force_limit: 25,
            worker_count: 1,
            max_ties_per_point: 100_000,
            node_limit: None,
        }
    }
}

impl GenerationConfig {
    /// Effective `(min, max)` size bounds for a catalog of `n` features.
    pub fn size_bounds(&self, n: usize) -> Result<(usize, usize), EngineError> {
        let max = self.max_features.unwrap_or(n).min(n);
        if self.min_features > self.max_features.unwrap_or(n) {
            return Err(EngineError::Infeasible {
                min: self.min_features,
                max: self.max_features.unwrap_or(n),
            });
        }
        if self.worker_count == 0 {
            return Err(EngineError::InvalidConfig("worker_count must be at least 1".into()));
        }
        if self.max_ties_per_point == 0 {
            return Err(EngineError::InvalidConfig("max_ties_per_point must be at least 1".into()));
        }
        Ok((self.min_features, max))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontPoint {
    pub score: Score,
    /// Canonically ordered, non-empty.
    pub scenarios: Vec<Scenario>,
}

/// The exact Pareto front, sorted by strictly decreasing `log10_p` (and so
/// strictly increasing `crit_sum`).
///
/// Equality ignores `total_valid_examined`, which counts the valid
/// scenarios the chosen engine actually visited and so depends on
/// pruning.
#[derive(Debug, Clone)]
pub struct FrontResult {
    pub points: Vec<FrontPoint>,
    pub total_valid_examined: u64,
    pub truncated: bool,
}

impl PartialEq for FrontResult {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.truncated == other.truncated
    }
}

impl FrontResult {
    pub fn scenario_count(&self) -> usize {
        self.points.iter().map(|p| p.scenarios.len()).sum()
    }

    pub fn scenarios(&self) -> impl Iterator<Item = (&Score, &Scenario)> {
        self.points
            .iter()
            .flat_map(|p| p.scenarios.iter().map(move |s| (&p.score, s)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("infeasible configuration: min_features {min} > max_features {max}")]
    Infeasible { min: usize, max: usize },
    #[error("catalog has {features} features, above the brute-force limit of {limit}; use the branch-and-bound engine")]
    CatalogTooLarge { features: usize, limit: usize },
    #[error("unknown feature id \"{0}\"")]
    UnknownFeature(String),
    #[error("constraints were bound to a catalog of {constraints} features, catalog has {catalog}")]
    CatalogMismatch { constraints: usize, catalog: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub(crate) fn check_binding(catalog: &Catalog, constraints: &ConstraintSet) -> Result<(), EngineError> {
    if constraints.feature_count() != catalog.len() {
        return Err(EngineError::CatalogMismatch {
            constraints: constraints.feature_count(),
            catalog: catalog.len(),
        });
    }
    Ok(())
}

/// Computes the exact Pareto front of valid scenarios.
pub fn generate_front(
    catalog: &Catalog,
    constraints: &ConstraintSet,
    config: &GenerationConfig,
) -> Result<FrontResult, EngineError> {
    check_binding(catalog, constraints)?;
    config.size_bounds(catalog.len())?;
    let brute = match config.engine_mode {
        EngineMode::BruteForce => true,
        EngineMode::BranchAndBound => false,
        EngineMode::Auto => catalog.len() <= AUTO_BRUTE_FORCE_MAX.min(config.brute_force_limit),
    };
    if brute {
        brute::brute_force_front(catalog, constraints, config)
    } else {
        search::branch_and_bound_front(catalog, constraints, config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CriticalityLevel, Feature, LevelMapping, ProbabilityLevel};

    fn feature(id: &str, c: CriticalityLevel, p: ProbabilityLevel) -> Feature {
        Feature {
            id: id.into(),
            name: id.into(),
            criticality: c,
            probability: p,
        }
    }

    fn table1_subset() -> Catalog {
        use CriticalityLevel as C;
        use ProbabilityLevel as P;
        Catalog::new(
            vec![
                feature("curved_road", C::B, P::A),
                feature("cut_out", C::B, P::B),
                feature("overtaking", C::A, P::A),
            ],
            LevelMapping::default(),
        )
        .unwrap()
    }

    #[test]
    fn empty_scenario_scores_zero() {
        let s = score(&Scenario::default(), &table1_subset()).unwrap();
        assert_eq!(s, Score::EMPTY);
        assert_eq!(s.p_g(), 1.0);
        assert_eq!(s.c_g(), 1.0);
    }

    #[test]
    fn single_feature_score() {
        let s = score(&Scenario::new(["overtaking"]), &table1_subset()).unwrap();
        assert_eq!(s, Score { log10_p: -1.0, crit_sum: 3 });
        assert!((s.p_g() - 0.1).abs() < 1e-15);
        assert_eq!(s.c_g(), 8.0);
    }

    #[test]
    fn two_feature_score() {
        let s = score(&Scenario::new(["curved_road", "cut_out"]), &table1_subset()).unwrap();
        assert_eq!(s, Score { log10_p: -3.0, crit_sum: 4 });
        assert!((s.p_g() - 1e-3).abs() < 1e-18);
        assert_eq!(s.c_g(), 16.0);
    }

    #[test]
    fn unknown_feature_in_scenario() {
        assert_eq!(
            score(&Scenario::new(["nope"]), &table1_subset()),
            Err(EngineError::UnknownFeature("nope".into()))
        );
    }

    #[test]
    fn infeasible_bounds() {
        let cfg = GenerationConfig {
            min_features: 3,
            max_features: Some(2),
            ..Default::default()
        };
        assert_eq!(cfg.size_bounds(5), Err(EngineError::Infeasible { min: 3, max: 2 }));
        let cat = table1_subset();
        let cs = ConstraintSet::empty(&cat);
        assert!(matches!(
            generate_front(&cat, &cs, &cfg),
            Err(EngineError::Infeasible { .. })
        ));
    }

    #[test]
    fn scenario_canonical_order() {
        let a = Scenario::new(["b"]);
        let b = Scenario::new(["a", "c"]);
        assert_eq!(a.canonical_cmp(&b), std::cmp::Ordering::Less);
        assert!(b < a);
        assert_eq!(b.to_string(), "{a, c}");
    }
}
