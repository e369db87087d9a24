//! One-dimensional minimization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimizer of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`; returns `(x, f(x))` for the
/// best point evaluated.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 || (fx == best.1 && x < best.0) {
            best = (x, fx);
        }
    }
    best
}

/// Moves `lo` downwards until a convex `f` is known to attain its minimum
/// over `[lo, ∞)` at or right of `lo`, doubling the step from `step`.
///
/// Returns `None` if `f` keeps decreasing for `max_doublings` steps.
pub fn expand_left<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    step: f64,
    max_doublings: usize,
) -> Option<f64> {
    let mut a = start;
    let mut fa = f(a);
    let mut step = step;
    for _ in 0..max_doublings {
        let b = a - step;
        let fb = f(b);
        if fb >= fa {
            return Some(b);
        }
        a = b;
        fa = fb;
        step *= 2.0;
    }
    None
}

/// Evaluates `x_i = lo + (hi − lo)·i/(n − 1)`; lattice points are exact when
/// `(hi − lo)·i` is.
pub fn grid_point(lo: f64, hi: f64, i: usize, points: usize) -> f64 {
    if i + 1 == points {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (points - 1) as f64
    }
}
