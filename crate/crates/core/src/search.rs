//! One-dimensional searches: bracketing grids, golden-section refinement and
//! sign bisection. All searches used by the certificates are continuous and
//! cheap at this scale, so a dense grid followed by local refinement is both
//! robust and deterministic.

/// Number of points in the bracketing grids.
pub const GRID_POINTS: usize = 2048;
/// Relative interval width at which refinements stop.
pub const REFINE_TOL: f64 = 1e-10;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximize `f` on `[lo, hi]`: grid bracketing with [`GRID_POINTS`] samples,
/// then golden-section refinement around the best cell. Returns `(x, f(x))`.
pub fn grid_golden_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    assert!(hi > lo);
    let n = GRID_POINTS;
    let step = (hi - lo) / n as f64;
    let mut best_idx = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for k in 0..=n {
        let x = lo + step * k as f64;
        let v = f(x);
        if v > best_val {
            best_val = v;
            best_idx = k;
        }
    }
    let a = lo + step * best_idx.saturating_sub(1) as f64;
    let b = (lo + step * (best_idx + 1) as f64).min(hi);
    let (x, v) = golden_max(a, b, &f);
    if v >= best_val {
        (x, v)
    } else {
        (lo + step * best_idx as f64, best_val)
    }
}

/// Golden-section maximization on `[a, b]` down to [`REFINE_TOL`] relative width.
pub fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let span = (b - a).abs().max(1e-300);
    let tol = REFINE_TOL * span.max(a.abs()).max(b.abs()).max(1.0);
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_min(a: f64, b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (x, v) = golden_max(a, b, |x| -f(x));
    (x, -v)
}

/// Bisection for the boundary of a predicate that is true at `lo` and false
/// at `hi` (or vice versa). Returns the point where the predicate flips,
/// resolved to [`REFINE_TOL`] relative width.
pub fn bisect_predicate(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    let p_lo = pred(lo);
    debug_assert!(p_lo != pred(hi), "predicate must flip on the interval");
    let tol = REFINE_TOL * hi.abs().max(lo.abs()).max(1.0);
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == p_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for a root of a monotone function with `f(lo)` and `f(hi)` of
/// opposite sign.
pub fn bisect_sign(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    bisect_predicate(lo, hi, |x| (f(x) > 0.0) == lo_positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = grid_golden_max(0.0, 10.0, |x| -(x - 3.25) * (x - 3.25) + 2.0);
        assert!((x - 3.25).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_locates_root() {
        let r = bisect_sign(0.0, 4.0, |x| 2.0 - x);
        assert!((r - 2.0).abs() < 1e-9);
    }

    #[test]
    fn predicate_boundary() {
        let b = bisect_predicate(0.0, 1.0, |x| x < 0.3);
        assert!((b - 0.3).abs() < 1e-9);
    }
}
