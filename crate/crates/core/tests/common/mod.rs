//! Independent oracles shared by the integration tests. Nothing here calls
//! the engine or the pareto module.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use scenforge::constraint::Expr;
use scenforge::{
    bind_constraints, parse_constraint_file, propagate, Catalog, ConstraintSet, Formula,
    PartialAssignment, Scenario, Truth,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load_catalog(name: &str) -> Catalog {
    Catalog::load(&std::fs::read(fixture(name)).unwrap()).unwrap()
}

pub fn load_rules(name: &str, catalog: &Catalog) -> ConstraintSet {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    bind_constraints(&parse_constraint_file(&text).unwrap(), catalog).unwrap()
}

/// Plain recursive evaluation, written separately from the library's.
pub fn eval(f: &Formula, on: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Expr::Var(v) => on(v),
        Expr::Not(a) => !eval(a, on),
        Expr::And(a, b) => eval(a, on) && eval(b, on),
        Expr::Or(a, b) => eval(a, on) || eval(b, on),
        Expr::Implies(a, b) => !eval(a, on) || eval(b, on),
    }
}

pub fn valid(formulas: &[Formula], s: &Scenario) -> bool {
    formulas.iter().all(|f| eval(f, &|id| s.contains(id)))
}

/// Score from the catalog lookups: (sum of log10 P_i, sum of ranks).
pub fn oracle_score(catalog: &Catalog, s: &Scenario) -> (f64, u32) {
    let mut p = 0.0;
    let mut c = 0;
    for id in s.iter() {
        p += catalog.probability_value(id).unwrap().log10();
        c += catalog.criticality_rank(id).unwrap();
    }
    (p, c)
}

pub fn subset(catalog: &Catalog, mask: u64) -> Scenario {
    Scenario::new(
        catalog
            .features()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| f.id.clone()),
    )
}

/// Every valid subset with its score.
pub fn all_valid(
    catalog: &Catalog,
    formulas: &[Formula],
    min: usize,
    max: usize,
) -> Vec<(Scenario, (f64, u32))> {
    let n = catalog.len();
    assert!(n < 24);
    (0u64..1 << n)
        .filter(|m| (min..=max).contains(&(m.count_ones() as usize)))
        .map(|m| subset(catalog, m))
        .filter(|s| valid(formulas, s))
        .map(|s| {
            let sc = oracle_score(catalog, &s);
            (s, sc)
        })
        .collect()
}

const EPS: f64 = 1e-9;

pub fn dominates(a: (f64, u32), b: (f64, u32)) -> bool {
    let p_ge = a.0 >= b.0 - EPS;
    let p_gt = a.0 > b.0 + EPS;
    p_ge && a.1 >= b.1 && (p_gt || a.1 > b.1)
}

/// Front of scored scenarios, grouped per point: (score, sorted
/// scenarios), points by decreasing probability. Uses the best probability
/// per criticality value, so it stays linear in the number of scenarios.
pub fn oracle_front(items: &[(Scenario, (f64, u32))]) -> Vec<((f64, u32), Vec<Scenario>)> {
    let top = items.iter().map(|(_, s)| s.1).max().unwrap_or(0) as usize;
    let mut best = vec![f64::NEG_INFINITY; top + 2];
    for (_, (p, c)) in items {
        let b = &mut best[*c as usize];
        *b = b.max(*p);
    }
    // above[c] = best probability among criticality values > c
    let mut above = vec![f64::NEG_INFINITY; top + 2];
    for c in (0..=top).rev() {
        above[c] = above[c + 1].max(best[c + 1]);
    }
    let mut kept: Vec<&(Scenario, (f64, u32))> = items
        .iter()
        .filter(|(_, (p, c))| {
            let c = *c as usize;
            best[c] <= p + EPS && above[c] < p - EPS
        })
        .collect();
    kept.sort_by(|x, y| y.1 .0.partial_cmp(&x.1 .0).unwrap().then(x.0.cmp(&y.0)));
    let mut out: Vec<((f64, u32), Vec<Scenario>)> = Vec::new();
    for (s, sc) in kept {
        match out.last_mut() {
            Some((last, v)) if (last.0 - sc.0).abs() <= EPS && last.1 == sc.1 => v.push(s.clone()),
            _ => out.push((*sc, vec![s.clone()])),
        }
    }
    for (_, v) in &mut out {
        v.sort();
    }
    out
}

/// Compares an engine front against an oracle front: same points within
/// tolerance and exactly the same scenarios per point.
pub fn same_front(
    got: &scenforge::FrontResult,
    want: &[((f64, u32), Vec<Scenario>)],
) -> Result<(), String> {
    if got.points.len() != want.len() {
        return Err(format!("{} points, oracle has {}", got.points.len(), want.len()));
    }
    for (g, (ws, wv)) in got.points.iter().zip(want) {
        if (g.score.log10_p - ws.0).abs() > EPS || g.score.crit_sum != ws.1 {
            return Err(format!("point {:?} vs oracle {:?}", g.score, ws));
        }
        if &g.scenarios != wv {
            return Err(format!("scenarios at {:?} differ", ws));
        }
    }
    Ok(())
}

/// A random catalog JSON with `n` features named f0.. and random levels.
pub fn random_catalog(rng: &mut impl Rng, n: usize) -> Catalog {
    let feats: Vec<String> = (0..n)
        .map(|i| {
            format!(
                r#"{{"id":"f{i}","name":"F{i}","criticality":"{}","probability":"{}"}}"#,
                ['A', 'B', 'C'][rng.gen_range(0..3)],
                ['A', 'B', 'C', 'D', 'E'][rng.gen_range(0..5)]
            )
        })
        .collect();
    Catalog::load(format!(r#"{{"features":[{}]}}"#, feats.join(",")).as_bytes()).unwrap()
}

/// Up to `max` constraints from the templates `!(a & b)`, `a -> b`, `a | b`.
pub fn random_rules(rng: &mut impl Rng, n: usize, max: usize) -> Vec<String> {
    let k = rng.gen_range(0..=max);
    (0..k)
        .map(|_| {
            let ids: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(rng, 2).copied().collect();
            let (a, b) = (ids[0], ids[1]);
            match rng.gen_range(0..3) {
                0 => format!("!(f{a} & f{b})"),
                1 => format!("f{a} -> f{b}"),
                _ => format!("f{a} | f{b}"),
            }
        })
        .collect()
}

pub fn bind_lines(lines: &[String], catalog: &Catalog) -> ConstraintSet {
    bind_constraints(&parse_constraint_file(&lines.join("\n")).unwrap(), catalog).unwrap()
}

/// Random valid scenario: assign features in random order with a random
/// inclusion bias, propagating after each choice and restarting on
/// conflict. The result is re-checked with the oracle evaluator.
pub fn sample_valid(
    rng: &mut impl Rng,
    catalog: &Catalog,
    constraints: &ConstraintSet,
    min: usize,
) -> Option<Scenario> {
    let n = catalog.len();
    let mut order: Vec<usize> = (0..n).collect();
    'attempt: for _ in 0..1000 {
        order.shuffle(rng);
        let bias: f64 = rng.gen_range(0.05..0.95);
        let mut state = propagate(constraints, &PartialAssignment::unknown(n)).ok()?;
        for &i in &order {
            if state.get(i) != Truth::Unknown {
                continue;
            }
            state.set(i, Truth::from_bool(rng.gen_bool(bias)));
            match propagate(constraints, &state) {
                Ok(next) => state = next,
                Err(_) => continue 'attempt,
            }
        }
        let s = Scenario::new(
            (0..n)
                .filter(|&i| state.get(i) == Truth::True)
                .map(|i| catalog.features()[i].id.clone()),
        );
        if s.len() >= min && valid(constraints.formulas(), &s) {
            return Some(s);
        }
    }
    None
}
