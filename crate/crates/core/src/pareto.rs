//! Two-objective Pareto dominance and non-dominated filtering.
//!
//! Both objectives are maximized. A point dominates another when it is at
//! least as good on both objectives and strictly better on one; equal
//! points never dominate each other, so tied copies all survive
//! filtering.

use std::cmp::Ordering;

/// A scored item: `p_obj` is the probability objective (`log10_p`),
/// `c_obj` the criticality objective (`crit_sum`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePoint<T> {
    pub p_obj: f64,
    pub c_obj: f64,
    pub payload: T,
}

impl<T> ScorePoint<T> {
    pub fn new(p_obj: f64, c_obj: f64, payload: T) -> Self {
        debug_assert!(p_obj.is_finite() && c_obj.is_finite());
        ScorePoint { p_obj, c_obj, payload }
    }
}

pub fn dominates<A, B>(a: &ScorePoint<A>, b: &ScorePoint<B>) -> bool {
    a.p_obj >= b.p_obj && a.c_obj >= b.c_obj && (a.p_obj > b.p_obj || a.c_obj > b.c_obj)
}

/// Descending by `p_obj`, then descending by `c_obj`.
fn sweep_order<T>(a: &ScorePoint<T>, b: &ScorePoint<T>) -> Ordering {
    b.p_obj
        .total_cmp(&a.p_obj)
        .then_with(|| b.c_obj.total_cmp(&a.c_obj))
}

/// Non-dominated subset of `points`, sorted by descending `p_obj` (ties by
/// descending `c_obj`). Every copy of a tied non-dominated point is kept.
/// The sort is stable, so equal-score payloads keep their input order.
///
/// Sort-and-sweep: after ordering, a point survives iff its `c_obj` is the
/// maximum of its equal-`p_obj` run and strictly exceeds the best `c_obj`
/// seen at any larger `p_obj`.
pub fn front<T>(mut points: Vec<ScorePoint<T>>) -> Vec<ScorePoint<T>> {
    points.sort_by(sweep_order);
    let mut out = Vec::new();
    let mut best_c = f64::NEG_INFINITY;
    let mut iter = points.into_iter().peekable();
    while let Some(head) = iter.next() {
        let p = head.p_obj;
        let top_c = head.c_obj;
        let keep = top_c > best_c;
        if keep {
            out.push(head);
        }
        while let Some(next) = iter.next_if(|q| q.p_obj == p) {
            if keep && next.c_obj == top_c {
                out.push(next);
            }
        }
        if top_c > best_c {
            best_c = top_c;
        }
    }
    out
}

/// Non-dominated union of two fronts; associative and commutative up to
/// the order of equal-score payloads.
pub fn merge<T>(mut a: Vec<ScorePoint<T>>, b: Vec<ScorePoint<T>>) -> Vec<ScorePoint<T>> {
    a.extend(b);
    front(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: f64, c: f64) -> ScorePoint<()> {
        ScorePoint::new(p, c, ())
    }

    fn coords<T>(v: &[ScorePoint<T>]) -> Vec<(f64, f64)> {
        v.iter().map(|s| (s.p_obj, s.c_obj)).collect()
    }

    #[test]
    fn dominance_cases() {
        assert!(dominates(&pt(-1.0, 8.0), &pt(-2.0, 4.0)));
        assert!(!dominates(&pt(-1.0, 8.0), &pt(-1.0, 8.0)));
        assert!(!dominates(&pt(-1.0, 2.0), &pt(-2.0, 4.0)));
        assert!(!dominates(&pt(-2.0, 4.0), &pt(-1.0, 2.0)));
        assert!(dominates(&pt(-1.0, 8.0), &pt(-1.0, 4.0)));
        assert!(dominates(&pt(-1.0, 8.0), &pt(-2.0, 8.0)));
    }

    #[test]
    fn small_fronts() {
        assert!(front(Vec::<ScorePoint<()>>::new()).is_empty());
        assert_eq!(coords(&front(vec![pt(-1.0, 8.0)])), vec![(-1.0, 8.0)]);
        let f = front(vec![pt(-1.0, 8.0), pt(-2.0, 4.0), pt(-2.0, 9.0), pt(-3.0, 9.0)]);
        assert_eq!(coords(&f), vec![(-1.0, 8.0), (-2.0, 9.0)]);
    }

    #[test]
    fn equal_p_keeps_only_top_c_run() {
        let f = front(vec![pt(-1.0, 3.0), pt(-1.0, 5.0), pt(-1.0, 5.0), pt(-2.0, 5.0)]);
        assert_eq!(coords(&f), vec![(-1.0, 5.0), (-1.0, 5.0)]);
    }

    #[test]
    fn ties_keep_input_order() {
        let f = front(vec![
            ScorePoint::new(-1.0, 2.0, "b"),
            ScorePoint::new(-3.0, 1.0, "x"),
            ScorePoint::new(-1.0, 2.0, "a"),
        ]);
        let payloads: Vec<_> = f.iter().map(|s| s.payload).collect();
        assert_eq!(payloads, vec!["b", "a"]);
    }

    #[test]
    fn merge_is_front_of_union() {
        let a = front(vec![pt(-1.0, 1.0), pt(-3.0, 5.0)]);
        let b = front(vec![pt(-2.0, 5.0), pt(-4.0, 6.0)]);
        assert_eq!(coords(&merge(a, b)), vec![(-1.0, 1.0), (-2.0, 5.0), (-4.0, 6.0)]);
    }
}
