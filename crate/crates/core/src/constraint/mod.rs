//! Propositional consistency constraints over feature identifiers.
//!
//! Constraints are parsed from an ASCII grammar (`!`, `&`, `|`, `->`,
//! parentheses), bound against a catalog, and then either evaluated on
//! complete scenarios or used for unit propagation over partial
//! assignments during search. A scenario is valid iff every formula in the
//! set holds.

mod parse;
pub(crate) mod propagate;

use std::fmt;

use thiserror::Error;

use crate::catalog::Catalog;
use crate::engine::Scenario;

pub use parse::{parse_constraint_file, parse_formula, ConstraintFileError, ParseError, SourceFormula};
pub use propagate::{propagate, Conflict, PartialAssignment, Truth};

/// Propositional expression tree over variables of type `V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr<V> {
    Var(V),
    Not(Box<Expr<V>>),
    And(Box<Expr<V>>, Box<Expr<V>>),
    Or(Box<Expr<V>>, Box<Expr<V>>),
    Implies(Box<Expr<V>>, Box<Expr<V>>),
}

/// A parsed formula referring to features by id.
pub type Formula = Expr<String>;

/// A formula whose variables are catalog feature indices.
pub type BoundFormula = Expr<usize>;

impl<V> Expr<V> {
    pub fn try_map_vars<W, E>(&self, f: &mut impl FnMut(&V) -> Result<W, E>) -> Result<Expr<W>, E> {
        Ok(match self {
            Expr::Var(v) => Expr::Var(f(v)?),
            Expr::Not(a) => Expr::Not(Box::new(a.try_map_vars(f)?)),
            Expr::And(a, b) => Expr::And(Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?)),
            Expr::Or(a, b) => Expr::Or(Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?)),
            Expr::Implies(a, b) => {
                Expr::Implies(Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?))
            }
        })
    }

    /// Visits every variable occurrence, left to right.
    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            Expr::Var(v) => f(v),
            Expr::Not(a) => a.for_each_var(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    /// Two-valued evaluation; `value(v)` gives the truth of each variable.
    pub fn eval_with(&self, value: &impl Fn(&V) -> bool) -> bool {
        match self {
            Expr::Var(v) => value(v),
            Expr::Not(a) => !a.eval_with(value),
            Expr::And(a, b) => a.eval_with(value) && b.eval_with(value),
            Expr::Or(a, b) => a.eval_with(value) || b.eval_with(value),
            Expr::Implies(a, b) => !a.eval_with(value) || b.eval_with(value),
        }
    }
}

impl Formula {
    /// `Var(id)` is true iff `id` is a member of `scenario`.
    pub fn evaluate(&self, scenario: &Scenario) -> bool {
        self.eval_with(&|id: &String| scenario.contains(id))
    }
}

impl BoundFormula {
    /// Kleene three-valued evaluation under a partial assignment.
    pub fn eval3(&self, assign: &[Truth]) -> Truth {
        match self {
            Expr::Var(v) => assign[*v],
            Expr::Not(a) => a.eval3(assign).not(),
            Expr::And(a, b) => a.eval3(assign).and(b.eval3(assign)),
            Expr::Or(a, b) => a.eval3(assign).or(b.eval3(assign)),
            Expr::Implies(a, b) => a.eval3(assign).not().or(b.eval3(assign)),
        }
    }
}

/// Fully parenthesized rendering; re-parses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Not(a) => write!(f, "(!{a})"),
            Expr::And(a, b) => write!(f, "({a} & {b})"),
            Expr::Or(a, b) => write!(f, "({a} | {b})"),
            Expr::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unresolved {
    pub id: String,
    pub line: usize,
    pub text: String,
}

impl fmt::Display for Unresolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "\"{}\" (line {}: {})", self.id, self.line, self.text)
        } else {
            write!(f, "\"{}\" (in {})", self.id, self.text)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown identifier{}: {}", if unresolved.len() > 1 { "s" } else { "" }, join(unresolved))]
pub struct BindError {
    pub unresolved: Vec<Unresolved>,
}

fn join(items: &[Unresolved]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Formulas bound against one catalog, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    formulas: Vec<Formula>,
    bound: Vec<BoundFormula>,
    source_lines: Vec<String>,
    lines: Vec<usize>,
    feature_count: usize,
    // distinct variables per formula, and formulas per variable
    formula_vars: Vec<Vec<usize>>,
    occurrences: Vec<Vec<usize>>,
}

/// Resolves every variable against `catalog`, reporting all unresolved ids
/// at once.
pub fn bind_constraints(
    sources: &[SourceFormula],
    catalog: &Catalog,
) -> Result<ConstraintSet, BindError> {
    let mut unresolved = Vec::new();
    let mut bound = Vec::with_capacity(sources.len());
    for src in sources {
        let mut missing: Vec<String> = Vec::new();
        let b = src.formula.try_map_vars(&mut |id: &String| {
            catalog.index_of(id).ok_or_else(|| id.clone())
        });
        match b {
            Ok(b) => bound.push(b),
            Err(_) => {
                src.formula.for_each_var(&mut |id: &String| {
                    if catalog.index_of(id).is_none() && !missing.contains(id) {
                        missing.push(id.clone());
                    }
                });
                unresolved.extend(missing.into_iter().map(|id| Unresolved {
                    id,
                    line: src.line,
                    text: src.text.clone(),
                }));
            }
        }
    }
    if !unresolved.is_empty() {
        return Err(BindError { unresolved });
    }

    let feature_count = catalog.len();
    let mut occurrences = vec![Vec::new(); feature_count];
    let formula_vars: Vec<Vec<usize>> = bound
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            let mut vars = Vec::new();
            f.for_each_var(&mut |&v| {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            });
            for &v in &vars {
                occurrences[v].push(fi);
            }
            vars
        })
        .collect();

    Ok(ConstraintSet {
        formulas: sources.iter().map(|s| s.formula.clone()).collect(),
        bound,
        source_lines: sources.iter().map(|s| s.text.clone()).collect(),
        lines: sources.iter().map(|s| s.line).collect(),
        feature_count,
        formula_vars,
        occurrences,
    })
}

impl ConstraintSet {
    /// The empty set: every scenario is vacuously valid.
    pub fn empty(catalog: &Catalog) -> Self {
        bind_constraints(&[], catalog).expect("empty set always binds")
    }

    pub fn len(&self) -> usize {
        self.bound.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bound.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn bound(&self) -> &[BoundFormula] {
        &self.bound
    }

    pub fn source_lines(&self) -> &[String] {
        &self.source_lines
    }

    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub(crate) fn formula_vars(&self, formula: usize) -> &[usize] {
        &self.formula_vars[formula]
    }

    pub(crate) fn occurrences(&self, var: usize) -> &[usize] {
        &self.occurrences[var]
    }

    /// True iff every formula holds on `scenario`.
    pub fn is_satisfied_by(&self, scenario: &Scenario) -> bool {
        self.formulas.iter().all(|f| f.evaluate(scenario))
    }

    /// Index of the first violated formula, if any.
    pub fn first_violation(&self, scenario: &Scenario) -> Option<usize> {
        self.formulas.iter().position(|f| !f.evaluate(scenario))
    }

    /// Validity check over catalog indices.
    pub fn is_satisfied_by_indices(&self, member: impl Fn(usize) -> bool) -> bool {
        self.bound.iter().all(|f| f.eval_with(&|v: &usize| member(*v)))
    }
}
