//! Derivative-free scalar minimization: dense grid scan and golden-section
//! refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Evaluates `f` on `points` evenly spaced nodes of `[lo, hi]` and returns
/// `(index, x, f(x))` of the smallest value.
///
/// Values within `1e-12` relative of the running minimum count as ties and
/// keep the earlier (smaller) node. Non-finite values are never selected
/// unless every value is non-finite.
pub fn grid_argmin<F>(f: F, lo: f64, hi: f64, points: usize) -> (usize, f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(points >= 2, "grid needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    let node = |i: usize| {
        if i + 1 == points {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut best = (0, node(0), f(node(0)));
    for i in 1..points {
        let x = node(i);
        let fx = f(x);
        if !fx.is_finite() {
            continue;
        }
        let better = if best.2.is_finite() {
            fx < best.2 && (best.2 - fx) > 1e-12 * best.2.abs().max(fx.abs())
        } else {
            true
        };
        if better {
            best = (i, x, fx);
        }
    }
    best
}

/// Golden-section search for a minimum of `f` on `[a, b]`; stops once the
/// bracket is narrower than `tol` or no longer shrinks in floating point.
///
/// Returns `(x_min, f_min)` for the best point evaluated.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    for _ in 0..500 {
        if b - a <= tol {
            break;
        }
        let width = b - a;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            if f1 < best.1 || (f1 == best.1 && x1 < best.0) {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
        if !(b - a < width) {
            break;
        }
    }
    best
}
