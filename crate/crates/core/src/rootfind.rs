//! Uniform bracketing grid plus bisection.
//!
//! The solvers in this crate all reduce to scanning a smooth residual on a
//! dense grid, then driving each sign change down by bisection until the
//! residual magnitude drops under tolerance. A maximal run of consecutive
//! grid nodes already under tolerance counts as a single root (the node with
//! the smallest residual), so a shallow or tangential crossing is not double
//! counted; roots closer than 1.5 grid steps are merged.

use crate::error::Result;
use crate::real::{real, Real};

const MAX_BISECTIONS: usize = 200;

struct RootCollector<R> {
    roots: Vec<R>,
    merge_distance: R,
    /// Best node of the in-tolerance run currently being traversed.
    run_best: Option<(R, R)>,
}

impl<R: Real> RootCollector<R> {
    fn new(merge_distance: R) -> Self {
        RootCollector {
            roots: Vec::new(),
            merge_distance,
            run_best: None,
        }
    }

    fn push(&mut self, x: R) {
        if self.roots.last().is_none_or(|&r| x - r > self.merge_distance) {
            self.roots.push(x);
        }
    }

    /// An in-tolerance node extends the current run; ties keep the earlier
    /// node so the result does not depend on scan internals.
    fn on_node_in_tolerance(&mut self, x: R, f_abs: R) {
        match self.run_best {
            Some((_, best)) if best <= f_abs => {}
            _ => self.run_best = Some((x, f_abs)),
        }
    }

    fn close_run(&mut self) {
        if let Some((x, _)) = self.run_best.take() {
            self.push(x);
        }
    }

    fn finish(mut self) -> Vec<R> {
        self.close_run();
        self.roots
    }
}

/// All roots of `f` on `[lo, hi]`, scanned on `n_intervals + 1` uniform nodes.
/// Roots are refined until `|f| <= f_tol` and returned in ascending order.
pub fn scan_roots<R: Real>(
    lo: R,
    hi: R,
    n_intervals: usize,
    f_tol: R,
    mut f: impl FnMut(R) -> Result<R>,
) -> Result<Vec<R>> {
    assert!(n_intervals >= 1, "scan grid needs at least one interval");
    let step = (hi - lo) / real(n_intervals as f64);
    let mut collector = RootCollector::new(step * real(1.5));

    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    if f_prev.abs() <= f_tol {
        collector.on_node_in_tolerance(lo, f_prev.abs());
    }
    for i in 1..=n_intervals {
        let x = if i == n_intervals {
            hi
        } else {
            lo + step * real(i as f64)
        };
        let fx = f(x)?;
        if fx.abs() <= f_tol {
            collector.on_node_in_tolerance(x, fx.abs());
        } else {
            collector.close_run();
            if f_prev.abs() > f_tol && (f_prev > R::zero()) != (fx > R::zero()) {
                let root = bisect(x_prev, f_prev, x, fx, f_tol, &mut f)?;
                collector.push(root);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    Ok(collector.finish())
}

/// Same bracketing logic over a precomputed table of node values; `f` is the
/// continuous residual used only to refine sign-changing intervals. The node
/// values must tabulate the same function.
pub fn scan_roots_tabulated<R: Real>(
    xs: &[R],
    fs: &[R],
    f_tol: R,
    mut f: impl FnMut(R) -> Result<R>,
) -> Result<Vec<R>> {
    assert!(
        xs.len() == fs.len() && xs.len() >= 2,
        "tabulated scan needs >= 2 nodes"
    );
    let step = xs[1] - xs[0];
    let mut collector = RootCollector::new(step * real(1.5));

    if fs[0].abs() <= f_tol {
        collector.on_node_in_tolerance(xs[0], fs[0].abs());
    }
    for i in 1..xs.len() {
        let (f_prev, fx) = (fs[i - 1], fs[i]);
        if fx.abs() <= f_tol {
            collector.on_node_in_tolerance(xs[i], fx.abs());
        } else {
            collector.close_run();
            if f_prev.abs() > f_tol && (f_prev > R::zero()) != (fx > R::zero()) {
                let root = bisect(xs[i - 1], f_prev, xs[i], fx, f_tol, &mut f)?;
                collector.push(root);
            }
        }
    }
    Ok(collector.finish())
}

/// Bisection on a sign-changing interval, stopping once `|f| <= f_tol` or the
/// interval width degenerates; returns the midpoint in either case.
fn bisect<R: Real>(
    mut a: R,
    mut fa: R,
    mut b: R,
    _fb: R,
    f_tol: R,
    f: &mut impl FnMut(R) -> Result<R>,
) -> Result<R> {
    let width_floor = (b - a).abs() * real(1e-15);
    let mut mid = (a + b) / real(2.0);
    for _ in 0..MAX_BISECTIONS {
        mid = (a + b) / real(2.0);
        let fm = f(mid)?;
        if fm.abs() <= f_tol || (b - a).abs() <= width_floor {
            return Ok(mid);
        }
        if (fa > R::zero()) != (fm > R::zero()) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(mid)
}
