//! Bracketing scalar solvers: sign-change bisection, boolean-predicate
//! bisection, and golden-section maximization. All certified (bracket is
//! maintained at every step) and free of derivatives.

/// Refine a sign change of `f` inside `[a, b]` down to an interval of width
/// `tol_x`; returns the midpoint of the final bracket.
///
/// Requires `f(a)` and `f(b)` to have opposite signs (a zero endpoint is
/// returned immediately).
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_x: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(
        flo * fhi < 0.0,
        "bisect_root requires a sign change: f({lo})={flo}, f({hi})={fhi}"
    );
    let lo_negative = flo < 0.0;
    while (hi - lo).abs() > tol_x {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break; // f64 exhausted
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection on a monotone boolean predicate: `pred(lo) == false`,
/// `pred(hi) == true`. Returns the final bracket `(last_false, first_true)`
/// with width at most `tol_x`.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(
    mut pred: P,
    lo: f64,
    hi: f64,
    tol_x: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > tol_x && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    (lo, hi, iterations)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`;
/// returns `(argmax, max)` with the abscissa resolved to `tol_x`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_x: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol_x {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-13);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn predicate_bracket_converges() {
        let (lo, hi, _) = bisect_predicate(|x| x >= 0.3, 0.0, 1.0, 1e-9, 100);
        assert!(lo < 0.3 && hi >= 0.3 && hi - lo <= 1e-9);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.7) * (x - 0.7), 0.0, 1.0, 1e-12);
        assert!((x - 0.7).abs() < 1e-10);
        assert!(v.abs() < 1e-18);
    }
}
