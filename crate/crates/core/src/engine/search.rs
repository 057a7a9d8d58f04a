//! Inclusion/exclusion tree search with unit propagation.
//!
//! For front generation each node is bounded by an unconstrained relaxation
//! of its remaining features: for every achievable criticality increment
//! `d`, the best probability any subset of the undecided suffix could keep.
//! A node is pruned only when every such optimistic point is strictly
//! dominated by a front point already found, so scenarios tied with the
//! front are never lost.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::catalog::Catalog;
use crate::constraint::propagate::propagate_in_place;
use crate::constraint::{ConstraintSet, Truth};

use super::archive::Archive;
use super::problem::Problem;
use super::{
    check_binding, EngineError, FrontResult, GenerationConfig, Scenario, Score, ScoreCounts,
};

/// Nodes between synchronizations with the shared front.
const SYNC_INTERVAL: u64 = 4096;

/// Slack added to probability bounds so float rounding in the relaxation
/// never turns an exact tie into a strict domination.
fn optimistic(p: f64) -> f64 {
    p + 1e-9 * (1.0 + p.abs())
}

/// Score staircase shared between workers for pruning.
#[derive(Debug, Clone, Default)]
struct Staircase {
    // strictly decreasing log10_p, strictly increasing crit_sum
    points: Vec<Score>,
}

impl Staircase {
    fn strictly_dominates(&self, p: f64, c: u32) -> bool {
        let idx = self.points.partition_point(|s| s.log10_p > p);
        if idx > 0 && self.points[idx - 1].crit_sum >= c {
            return true;
        }
        matches!(self.points.get(idx), Some(s) if s.log10_p == p && s.crit_sum > c)
    }

    fn merge(&mut self, scores: &[Score]) {
        for &s in scores {
            if self.strictly_dominates(s.log10_p, s.crit_sum) {
                continue;
            }
            let idx = self.points.partition_point(|q| q.log10_p > s.log10_p);
            if self.points.get(idx) == Some(&s) {
                continue;
            }
            let mut end = idx;
            while end < self.points.len() && self.points[end].crit_sum <= s.crit_sum {
                end += 1;
            }
            self.points.splice(idx..end, std::iter::once(s));
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Front,
    Witness,
}

struct Context<'a> {
    problem: Problem<'a>,
    constraints: &'a ConstraintSet,
    order: Vec<usize>,
    /// `suffix_best[k][s][d]`: best summed log10 probability over subsets
    /// of `order[k..]` with at most `s` members and rank sum exactly `d`
    /// (`-inf` if unreachable). A single `s` layer means no size cap.
    suffix_best: Vec<Vec<Vec<f64>>>,
    min: usize,
    max: usize,
    goal: Goal,
}

/// Size-aware tables cost `n * (max + 1) * rank_total` cells; above this
/// the size cap is left out of the bound.
const MAX_TABLE_CELLS: usize = 1 << 24;

fn suffix_tables(problem: &Problem<'_>, order: &[usize], max: usize) -> Vec<Vec<Vec<f64>>> {
    let n = order.len();
    let rank_total: usize = order.iter().map(|&v| problem.rank[v] as usize).sum();
    let layers = if max < n && (n + 1) * (max + 1) * (rank_total + 1) <= MAX_TABLE_CELLS {
        max + 1
    } else {
        1
    };
    // exact[s][d] while sweeping from the back; layer 0 is "any size" when uncapped
    let mut exact = vec![vec![f64::NEG_INFINITY; rank_total + 1]; layers];
    exact[0][0] = 0.0;
    let mut tables = vec![Vec::new(); n + 1];
    let cumulate = |exact: &Vec<Vec<f64>>| {
        let mut out = exact.clone();
        for s in 1..out.len() {
            let (lower, upper) = out.split_at_mut(s);
            for (cell, &below) in upper[0].iter_mut().zip(&lower[s - 1]) {
                *cell = cell.max(below);
            }
        }
        out
    };
    tables[n] = cumulate(&exact);
    for k in (0..n).rev() {
        let v = order[k];
        let r = problem.rank[v] as usize;
        let lp = problem.log_value(v);
        if layers == 1 {
            let row = &mut exact[0];
            for d in (r..=rank_total).rev() {
                row[d] = row[d].max(row[d - r] + lp);
            }
        } else {
            for s in (1..layers).rev() {
                for d in (r..=rank_total).rev() {
                    let with = exact[s - 1][d - r] + lp;
                    if with > exact[s][d] {
                        exact[s][d] = with;
                    }
                }
            }
        }
        tables[k] = cumulate(&exact);
    }
    tables
}

impl<'a> Context<'a> {
    fn new(
        catalog: &'a Catalog,
        constraints: &'a ConstraintSet,
        min: usize,
        max: usize,
        goal: Goal,
    ) -> Self {
        let problem = Problem::new(catalog);
        let mut order: Vec<usize> = (0..problem.len()).collect();
        if goal == Goal::Front {
            // high criticality first, then high probability, then file order
            order.sort_by(|&a, &b| {
                problem.rank[b]
                    .cmp(&problem.rank[a])
                    .then(problem.level[a].cmp(&problem.level[b]))
                    .then(a.cmp(&b))
            });
        }
        let suffix_best = if goal == Goal::Front {
            suffix_tables(&problem, &order, max)
        } else {
            Vec::new()
        };
        Context {
            problem,
            constraints,
            order,
            suffix_best,
            min,
            max,
            goal,
        }
    }
}

struct Shared {
    staircase: Mutex<Staircase>,
    nodes: AtomicU64,
    node_limit: Option<u64>,
    stop: AtomicBool,
    limit_hit: AtomicBool,
}

struct Worker<'c, 'a> {
    ctx: &'c Context<'a>,
    shared: &'c Shared,
    state: Vec<Truth>,
    trail: Vec<usize>,
    counts: ScoreCounts,
    n_true: usize,
    n_unknown: usize,
    archive: Archive,
    snapshot: Staircase,
    published: usize,
    nodes_since_sync: u64,
    examined: u64,
    witness: Option<Vec<usize>>,
}

impl<'c, 'a> Worker<'c, 'a> {
    fn new(ctx: &'c Context<'a>, shared: &'c Shared, archive: Archive, root: &[Truth]) -> Self {
        let mut w = Worker {
            ctx,
            shared,
            state: vec![Truth::Unknown; root.len()],
            trail: Vec::new(),
            counts: ScoreCounts::default(),
            n_true: 0,
            n_unknown: root.len(),
            archive,
            snapshot: Staircase::default(),
            published: 0,
            nodes_since_sync: 0,
            examined: 0,
            witness: None,
        };
        for (v, &t) in root.iter().enumerate() {
            if t != Truth::Unknown {
                w.state[v] = t;
                w.account(v);
            }
        }
        w
    }

    fn account(&mut self, v: usize) {
        self.n_unknown -= 1;
        if self.state[v] == Truth::True {
            self.n_true += 1;
            self.counts.add(self.ctx.problem.level[v], self.ctx.problem.rank[v]);
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail above mark");
            if self.state[v] == Truth::True {
                self.n_true -= 1;
                self.counts.remove(self.ctx.problem.level[v], self.ctx.problem.rank[v]);
            }
            self.n_unknown += 1;
            self.state[v] = Truth::Unknown;
        }
    }

    /// Assigns `v` and propagates; false on conflict. Callers undo to the
    /// trail length they saw before the call either way.
    fn decide(&mut self, v: usize, value: Truth) -> bool {
        let mark = self.trail.len();
        self.state[v] = value;
        self.trail.push(v);
        let result = propagate_in_place(
            self.ctx.constraints,
            &mut self.state,
            self.ctx.constraints.occurrences(v).iter().copied(),
            &mut self.trail,
        );
        for i in mark..self.trail.len() {
            let t = self.trail[i];
            self.account(t);
        }
        result.is_ok()
    }

    fn sync(&mut self) {
        let local = self.archive.scores();
        let mut global = self.shared.staircase.lock().expect("staircase lock");
        if local.len() != self.published {
            global.merge(&local);
            self.published = local.len();
        }
        self.snapshot = global.clone();
    }

    fn dominated(&self, p: f64, c: u32) -> bool {
        self.archive.strictly_dominates(p, c) || self.snapshot.strictly_dominates(p, c)
    }

    fn bound_prunes(&self, pos: usize) -> bool {
        let p0 = self.counts.log10_p(&self.ctx.problem.level_logs);
        let c0 = self.counts.crit_sum;
        let layers = &self.ctx.suffix_best[pos];
        let room = self.ctx.max.saturating_sub(self.n_true);
        let table = &layers[room.min(layers.len() - 1)];
        for d in (0..table.len()).rev() {
            let best = table[d];
            if best == f64::NEG_INFINITY {
                continue;
            }
            if !self.dominated(optimistic(p0 + best), c0 + d as u32) {
                return false;
            }
        }
        true
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.state.len()).filter(|&v| self.state[v] == Truth::True)
    }

    /// Depth-first search below the current state; returns false once
    /// the search should stop.
    fn dfs(&mut self, mut pos: usize) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return false;
        }
        self.nodes_since_sync += 1;
        if self.nodes_since_sync >= SYNC_INTERVAL {
            let total = self.shared.nodes.fetch_add(self.nodes_since_sync, Ordering::Relaxed)
                + self.nodes_since_sync;
            self.nodes_since_sync = 0;
            if self.shared.node_limit.is_some_and(|limit| total > limit) {
                self.shared.limit_hit.store(true, Ordering::Relaxed);
                self.shared.stop.store(true, Ordering::Relaxed);
                return false;
            }
            if self.ctx.goal == Goal::Front {
                self.sync();
            }
        }
        if self.n_true > self.ctx.max || self.n_true + self.n_unknown < self.ctx.min {
            return true;
        }
        let order = &self.ctx.order;
        while pos < order.len() && self.state[order[pos]] != Truth::Unknown {
            pos += 1;
        }
        if pos == order.len() {
            return self.leaf();
        }
        if self.ctx.goal == Goal::Front && self.bound_prunes(pos) {
            return true;
        }
        let v = order[pos];
        let polarities = match self.ctx.goal {
            Goal::Front => [Truth::True, Truth::False],
            Goal::Witness => [Truth::False, Truth::True],
        };
        for value in polarities {
            let mark = self.trail.len();
            let keep_going = !self.decide(v, value) || self.dfs(pos + 1);
            self.undo(mark);
            if !keep_going {
                return false;
            }
        }
        true
    }

    fn leaf(&mut self) -> bool {
        debug_assert!(self
            .ctx
            .constraints
            .is_satisfied_by_indices(|v| self.state[v] == Truth::True));
        self.examined += 1;
        match self.ctx.goal {
            Goal::Witness => {
                self.witness = Some(self.members().collect());
                false
            }
            Goal::Front => {
                let score = self.counts.score(&self.ctx.problem.level_logs);
                let key = self.ctx.problem.key_of(self.members());
                self.archive.insert(score, || key);
                true
            }
        }
    }

    /// Replays a decision prefix from the root state; false on conflict.
    fn replay(&mut self, decisions: &[(usize, Truth)]) -> bool {
        decisions.iter().all(|&(v, t)| self.decide(v, t))
    }
}

/// Root state after propagating every formula, or `None` if the
/// constraints are contradictory.
fn root_state(ctx: &Context<'_>) -> Option<Vec<Truth>> {
    let mut state = vec![Truth::Unknown; ctx.problem.len()];
    let mut trail = Vec::new();
    propagate_in_place(ctx.constraints, &mut state, 0..ctx.constraints.len(), &mut trail)
        .ok()
        .map(|_| state)
}

/// Decision prefixes of the first `depth` branching levels, in DFS order.
fn split_jobs(worker: &mut Worker<'_, '_>, depth: usize) -> Vec<Vec<(usize, Truth)>> {
    fn walk(
        w: &mut Worker<'_, '_>,
        pos: usize,
        depth: usize,
        prefix: &mut Vec<(usize, Truth)>,
        out: &mut Vec<Vec<(usize, Truth)>>,
    ) {
        let order = &w.ctx.order;
        let mut pos = pos;
        while pos < order.len() && w.state[order[pos]] != Truth::Unknown {
            pos += 1;
        }
        if depth == 0 || pos == order.len() {
            out.push(prefix.clone());
            return;
        }
        let v = order[pos];
        for value in [Truth::True, Truth::False] {
            let mark = w.trail.len();
            if w.decide(v, value) {
                prefix.push((v, value));
                walk(w, pos + 1, depth - 1, prefix, out);
                prefix.pop();
            }
            w.undo(mark);
        }
    }
    let mut out = Vec::new();
    walk(worker, 0, depth, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn branch_and_bound_front(
    catalog: &Catalog,
    constraints: &ConstraintSet,
    config: &GenerationConfig,
) -> Result<FrontResult, EngineError> {
    check_binding(catalog, constraints)?;
    let (min, max) = config.size_bounds(catalog.len())?;
    let ctx = Context::new(catalog, constraints, min, max, Goal::Front);
    let new_archive = || Archive::new(config.tie_policy, config.max_ties_per_point);

    let Some(root) = root_state(&ctx) else {
        return Ok(FrontResult {
            points: Vec::new(),
            total_valid_examined: 0,
            truncated: false,
        });
    };
    let shared = Shared {
        staircase: Mutex::new(Staircase::default()),
        nodes: AtomicU64::new(0),
        node_limit: config.node_limit,
        stop: AtomicBool::new(false),
        limit_hit: AtomicBool::new(false),
    };

    let workers = config.worker_count.max(1);
    let (archive, examined) = if workers == 1 {
        let mut w = Worker::new(&ctx, &shared, new_archive(), &root);
        w.dfs(0);
        (w.archive, w.examined)
    } else {
        let depth = (usize::BITS - (workers * 16).leading_zeros()) as usize;
        let jobs = {
            let mut splitter = Worker::new(&ctx, &shared, new_archive(), &root);
            split_jobs(&mut splitter, depth.min(ctx.order.len()))
        };
        let next = AtomicUsize::new(0);
        let results: Vec<(Archive, u64)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut w = Worker::new(&ctx, &shared, new_archive(), &root);
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(job) = jobs.get(i) else { break };
                            let mark = w.trail.len();
                            if w.replay(job) {
                                let start = job
                                    .last()
                                    .and_then(|(v, _)| ctx.order.iter().position(|o| o == v))
                                    .map_or(0, |p| p + 1);
                                w.sync();
                                w.dfs(start);
                            }
                            w.undo(mark);
                        }
                        (w.archive, w.examined)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        let mut merged = new_archive();
        let mut examined = 0;
        for (a, e) in results {
            merged.absorb(a);
            examined += e;
        }
        (merged, examined)
    };

    let truncated = archive.overflowed() || shared.limit_hit.load(Ordering::Relaxed);
    Ok(FrontResult {
        points: archive.into_points(&ctx.problem),
        total_valid_examined: examined,
        truncated,
    })
}

/// Finds some valid scenario within the size bounds, or `None`.
///
/// Uses the same propagating search as front generation, trying exclusion
/// before inclusion and stopping at the first valid leaf, so witnesses
/// tend to be small.
pub fn check_satisfiable(
    catalog: &Catalog,
    constraints: &ConstraintSet,
    config: &GenerationConfig,
) -> Option<Scenario> {
    check_binding(catalog, constraints).ok()?;
    let (min, max) = config.size_bounds(catalog.len()).ok()?;
    let ctx = Context::new(catalog, constraints, min, max, Goal::Witness);
    let root = root_state(&ctx)?;
    let shared = Shared {
        staircase: Mutex::new(Staircase::default()),
        nodes: AtomicU64::new(0),
        node_limit: None,
        stop: AtomicBool::new(false),
        limit_hit: AtomicBool::new(false),
    };
    let mut w = Worker::new(&ctx, &shared, Archive::new(Default::default(), 1), &root);
    w.dfs(0);
    let features = catalog.features();
    w.witness
        .map(|members| Scenario::new(members.into_iter().map(|v| features[v].id.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_merge() {
        let s = |p: f64, c: u32| Score { log10_p: p, crit_sum: c };
        let mut st = Staircase::default();
        st.merge(&[s(-1.0, 1), s(-3.0, 5), s(-2.0, 1), s(-2.0, 3)]);
        assert_eq!(st.points, vec![s(-1.0, 1), s(-2.0, 3), s(-3.0, 5)]);
        st.merge(&[s(-1.0, 4)]);
        assert_eq!(st.points, vec![s(-1.0, 4), s(-3.0, 5)]);
        assert!(st.strictly_dominates(-2.0, 4));
        assert!(!st.strictly_dominates(-1.0, 4));
        assert!(!st.strictly_dominates(-2.5, 5));
    }
}
