use crate::catalog::Catalog;
use crate::constraint::ConstraintSet;
use crate::pareto::{self, ScorePoint};

use super::archive::Archive;
use super::problem::Problem;
use super::{check_binding, EngineError, FrontResult, GenerationConfig, Scenario};

/// Points buffered between front merges in the brute-force engine.
const CHUNK: usize = 1 << 16;

/// Valid scenarios in canonical order: by size, then lexicographically.
pub struct ValidScenarios<'a> {
    problem: Problem<'a>,
    constraints: &'a ConstraintSet,
    max: usize,
    // positions into `problem.by_id` of the current combination
    comb: Vec<usize>,
    started: bool,
    done: bool,
}

/// Exhaustively enumerates valid scenarios within the configured size
/// bounds. Refuses catalogs above `config.brute_force_limit`.
pub fn enumerate_valid<'a>(
    catalog: &'a Catalog,
    constraints: &'a ConstraintSet,
    config: &GenerationConfig,
) -> Result<ValidScenarios<'a>, EngineError> {
    check_binding(catalog, constraints)?;
    let (min, max) = config.size_bounds(catalog.len())?;
    if catalog.len() > config.brute_force_limit || catalog.len() >= 64 {
        return Err(EngineError::CatalogTooLarge {
            features: catalog.len(),
            limit: config.brute_force_limit.min(63),
        });
    }
    Ok(ValidScenarios {
        problem: Problem::new(catalog),
        constraints,
        max,
        comb: (0..min).collect(),
        started: false,
        done: min > max,
    })
}

impl ValidScenarios<'_> {
    /// Advances to the next combination; false when exhausted.
    fn advance(&mut self) -> bool {
        let n = self.problem.len();
        if !self.started {
            self.started = true;
            return self.comb.len() <= n;
        }
        let k = self.comb.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.comb[i] < n - (k - i) {
                self.comb[i] += 1;
                for j in i + 1..k {
                    self.comb[j] = self.comb[j - 1] + 1;
                }
                return true;
            }
        }
        if k < self.max && k < n {
            self.comb = (0..=k).collect();
            return true;
        }
        false
    }

    fn mask(&self) -> u64 {
        self.comb
            .iter()
            .fold(0u64, |m, &pos| m | (1 << self.problem.by_id[pos]))
    }

    /// Next valid scenario as a bitmask over catalog indices.
    pub(crate) fn next_mask(&mut self) -> Option<u64> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            let mask = self.mask();
            if self
                .constraints
                .is_satisfied_by_indices(|i| mask & (1 << i) != 0)
            {
                return Some(mask);
            }
        }
        None
    }

    pub(crate) fn problem(&self) -> &Problem<'_> {
        &self.problem
    }
}

impl Iterator for ValidScenarios<'_> {
    type Item = Scenario;

    fn next(&mut self) -> Option<Scenario> {
        self.next_mask()?;
        let features = self.problem.catalog.features();
        Some(Scenario::new(
            self.comb.iter().map(|&pos| features[self.problem.by_id[pos]].id.clone()),
        ))
    }
}

pub(crate) fn members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

/// Front over every valid scenario: score each and filter with
/// [`pareto::front`], merging buffered chunks as it goes.
pub(crate) fn brute_force_front(
    catalog: &Catalog,
    constraints: &ConstraintSet,
    config: &GenerationConfig,
) -> Result<FrontResult, EngineError> {
    let mut valid = enumerate_valid(catalog, constraints, config)?;
    let mut front: Vec<ScorePoint<u64>> = Vec::new();
    let mut buffer: Vec<ScorePoint<u64>> = Vec::with_capacity(CHUNK);
    let mut examined = 0u64;
    while let Some(mask) = valid.next_mask() {
        examined += 1;
        let s = valid.problem().score_of(members(mask));
        buffer.push(ScorePoint::new(s.log10_p, f64::from(s.crit_sum), mask));
        if buffer.len() == CHUNK {
            front = pareto::merge(front, std::mem::take(&mut buffer));
        }
    }
    front = pareto::merge(front, buffer);

    let problem = valid.problem();
    let mut archive = Archive::new(config.tie_policy, config.max_ties_per_point);
    for point in front {
        let score = problem.score_of(members(point.payload));
        archive.insert(score, || problem.key_of(members(point.payload)));
    }
    let truncated = archive.overflowed();
    Ok(FrontResult {
        points: archive.into_points(problem),
        total_valid_examined: examined,
        truncated,
    })
}
