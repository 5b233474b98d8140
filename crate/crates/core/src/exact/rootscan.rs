//! Sign-change scanning and bisection refinement for real-analytic
//! dispersion functions.

/// Refine a bracketing interval [lo, hi] (f(lo) * f(hi) <= 0) by bisection to
/// relative tolerance `rel_tol`.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Scan f over (lo, hi] with the given step, bisecting every sign change.
/// Roots are returned in increasing order, refined to `rel_tol`.
///
/// Exact zeros are treated as missing information rather than roots: the
/// dispersion functions underflow to 0.0 far below the first oscillation
/// (tiny Bessel products), and a genuine crossing shows up as a sign flip
/// between the nearest nonzero samples on either side.
pub fn scan_roots<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    rel_tol: f64,
) -> Vec<f64> {
    debug_assert!(step > 0.0 && hi > lo);
    let mut roots = Vec::new();
    let mut x_ref = lo;
    let mut f_ref = f(lo);
    let n_steps = ((hi - lo) / step).ceil() as usize;
    for i in 1..=n_steps {
        let x = (lo + i as f64 * step).min(hi);
        let fx = f(x);
        if fx != 0.0 {
            if f_ref != 0.0 && f_ref * fx < 0.0 {
                roots.push(bisect_root(&mut f, x_ref, x, rel_tol));
            }
            x_ref = x;
            f_ref = fx;
        }
        if x >= hi {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_all_sine_roots() {
        let roots = scan_roots(|x: f64| x.sin(), 0.1, 20.0, 0.3, 1e-13);
        let expected: Vec<f64> = (1..=6).map(|k| k as f64 * std::f64::consts::PI).collect();
        assert_eq!(roots.len(), expected.len());
        for (r, e) in roots.iter().zip(&expected) {
            assert_abs_diff_eq!(r, e, epsilon = 1e-11);
        }
    }

    #[test]
    fn bisection_tolerance() {
        let r = bisect_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14);
        assert_abs_diff_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-13);
    }
}
