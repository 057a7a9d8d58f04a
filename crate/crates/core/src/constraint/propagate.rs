use std::collections::VecDeque;
use std::fmt;

use crate::catalog::Catalog;

use super::ConstraintSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

/// Three-valued state of every catalog feature, indexed like the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    state: Vec<Truth>,
}

impl PartialAssignment {
    /// All `Unknown` over `n` features.
    pub fn unknown(n: usize) -> Self {
        PartialAssignment {
            state: vec![Truth::Unknown; n],
        }
    }

    pub fn for_catalog(catalog: &Catalog) -> Self {
        Self::unknown(catalog.len())
    }

    pub fn from_states(state: Vec<Truth>) -> Self {
        PartialAssignment { state }
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn get(&self, index: usize) -> Truth {
        self.state[index]
    }

    pub fn set(&mut self, index: usize, value: Truth) {
        self.state[index] = value;
    }

    /// Sets a feature by id; returns `false` if the id is not in `catalog`.
    pub fn set_id(&mut self, catalog: &Catalog, id: &str, value: Truth) -> bool {
        match catalog.index_of(id) {
            Some(i) => {
                self.state[i] = value;
                true
            }
            None => false,
        }
    }

    pub fn get_id(&self, catalog: &Catalog, id: &str) -> Option<Truth> {
        catalog.index_of(id).map(|i| self.state[i])
    }

    pub fn states(&self) -> &[Truth] {
        &self.state
    }

    pub fn is_total(&self) -> bool {
        self.state.iter().all(|t| *t != Truth::Unknown)
    }
}

/// Some formula is false under the assigned portion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    /// Index of the violated formula within its set.
    pub formula: usize,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conflict in formula #{}", self.formula)
    }
}

/// Unit propagation to a fixpoint.
///
/// A variable is forced when assigning it one polarity makes some formula
/// false regardless of the remaining unknowns. Returns `Conflict` when a
/// formula is already false, or when both polarities of one of its
/// unknowns falsify it.
pub fn propagate(
    constraints: &ConstraintSet,
    partial: &PartialAssignment,
) -> Result<PartialAssignment, Conflict> {
    assert_eq!(
        partial.len(),
        constraints.feature_count(),
        "partial assignment domain does not match the bound catalog"
    );
    let mut state = partial.state.clone();
    let mut trail = Vec::new();
    propagate_in_place(constraints, &mut state, 0..constraints.len(), &mut trail)?;
    Ok(PartialAssignment { state })
}

/// Propagates starting from the `seeds` formulas, recording every forced
/// variable on `trail` so callers can undo. On conflict the state may hold
/// partial work; the trail still lists it.
pub(crate) fn propagate_in_place(
    constraints: &ConstraintSet,
    state: &mut [Truth],
    seeds: impl IntoIterator<Item = usize>,
    trail: &mut Vec<usize>,
) -> Result<(), Conflict> {
    let mut queued = vec![false; constraints.len()];
    let mut queue = VecDeque::new();
    for fi in seeds {
        if !queued[fi] {
            queued[fi] = true;
            queue.push_back(fi);
        }
    }

    while let Some(fi) = queue.pop_front() {
        queued[fi] = false;
        let formula = &constraints.bound()[fi];
        match formula.eval3(state) {
            Truth::True => continue,
            Truth::False => return Err(Conflict { formula: fi }),
            Truth::Unknown => {}
        }
        let mut forced = None;
        for &v in constraints.formula_vars(fi) {
            if state[v] != Truth::Unknown {
                continue;
            }
            state[v] = Truth::True;
            let when_true = formula.eval3(state);
            state[v] = Truth::False;
            let when_false = formula.eval3(state);
            state[v] = Truth::Unknown;
            match (when_true, when_false) {
                (Truth::False, Truth::False) => return Err(Conflict { formula: fi }),
                (Truth::False, _) => forced = Some((v, Truth::False)),
                (_, Truth::False) => forced = Some((v, Truth::True)),
                _ => continue,
            }
            break;
        }
        if let Some((v, value)) = forced {
            state[v] = value;
            trail.push(v);
            for &other in constraints.occurrences(v) {
                if !queued[other] {
                    queued[other] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    Ok(())
}
