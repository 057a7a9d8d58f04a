//! Scenario generation from annotated feature catalogs.
//!
//! Features carry qualitative probability (`A`..`E`) and criticality
//! (`A`..`C`) levels. Propositional constraints filter out inconsistent
//! feature combinations, every remaining combination gets a global
//! probability and criticality score, and the engine returns the exact set
//! of non-dominated scenarios for expert review.

pub mod catalog;
pub mod cli;
pub mod constraint;
pub mod engine;
pub mod pareto;

pub use catalog::{Catalog, CatalogError, CriticalityLevel, Feature, LevelMapping, ProbabilityLevel};
pub use constraint::{
    bind_constraints, parse_constraint_file, parse_formula, propagate, ConstraintSet, Formula,
    PartialAssignment, Truth,
};
pub use engine::{
    check_satisfiable, enumerate_valid, generate_front, score, EngineMode, FrontPoint,
    FrontResult, GenerationConfig, Scenario, Score, TiePolicy,
};
