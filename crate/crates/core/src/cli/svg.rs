//! Scatter plot of a front: criticality over probability of occurrence.

use std::fmt::Write;

use crate::engine::FrontResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

#[derive(Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn covering(values: impl Iterator<Item = f64>, fallback: (f64, f64)) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Range { lo: fallback.0, hi: fallback.1 };
        }
        let lo = lo.floor();
        let hi = hi.ceil();
        if hi - lo < 1.0 {
            Range { lo: lo - 1.0, hi: hi + 1.0 }
        } else {
            Range { lo, hi }
        }
    }

    fn scale(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    /// Integer tick positions, at most about ten.
    fn ticks(&self) -> Vec<i64> {
        let span = self.hi - self.lo;
        let step = ((span / 10.0).ceil() as i64).max(1);
        let first = (self.lo as i64).div_euclid(step) * step;
        let first = if (first as f64) < self.lo { first + step } else { first };
        (0..)
            .map(|i| first + i * step)
            .take_while(|&t| t as f64 <= self.hi)
            .collect()
    }
}

/// Renders `front` as a self-contained SVG document.
///
/// The x axis is `log10_p` (probability of occurrence on a log scale), the
/// y axis `crit_sum` (criticality on a log2 scale). Front points are
/// joined by a staircase line. Output is byte-for-byte deterministic.
pub fn render_scatter(front: &FrontResult) -> String {
    let xs = Range::covering(front.points.iter().map(|p| p.score.log10_p), (-1.0, 0.0));
    let ys = Range::covering(front.points.iter().map(|p| f64::from(p.score.crit_sum)), (0.0, 1.0));
    let x = |v: f64| xs.scale(v, LEFT, WIDTH - RIGHT);
    let y = |v: f64| ys.scale(v, HEIGHT - BOTTOM, TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">Pareto front: criticality over probability of occurrence</text>"#,
        WIDTH / 2.0
    );

    // axes
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<g stroke="black" fill="none"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );
    let _ = writeln!(s, r#"<g class="x-ticks">"#);
    for t in xs.ticks() {
        let px = x(t as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">1e{t}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="y-ticks">"#);
    for t in ys.ticks() {
        let py = y(t as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">2^{t}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">probability of occurrence P_g (log10 scale)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">criticality C_g (log2 scale)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    if !front.points.is_empty() {
        let mut path = String::new();
        for (i, p) in front.points.iter().enumerate() {
            let (px, py) = (x(p.score.log10_p), y(f64::from(p.score.crit_sum)));
            if i == 0 {
                let _ = write!(path, "M {px:.2} {py:.2}");
            } else {
                let _ = write!(path, " H {px:.2} V {py:.2}");
            }
        }
        let _ = writeln!(
            s,
            r#"<path class="staircase" d="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#
        );
        let _ = writeln!(s, r#"<g class="points" fill="crimson">"#);
        for p in &front.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5"><title>log10_p={:?} crit_sum={} scenarios={}</title></circle>"#,
                x(p.score.log10_p),
                y(f64::from(p.score.crit_sum)),
                p.score.log10_p,
                p.score.crit_sum,
                p.scenarios.len()
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}
