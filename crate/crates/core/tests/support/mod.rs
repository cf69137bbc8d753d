//! Shared helpers for the integration tests: an adaptive Simpson rule that
//! serves as an out-of-crate reference for one-dimensional integrals.

use num_complex::Complex;

type C = Complex<f64>;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// Simpson bisection with a Richardson correction on accepted panels.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> C
where
    F: Fn(f64) -> C,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(fa: C, fm: C, fb: C, h: f64) -> C {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: C, fm: C, fb: C, whole: C, tol: f64, depth: u32) -> C
where
    F: Fn(f64) -> C,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod sanity {
    use super::*;

    #[test]
    fn integrates_a_gaussian() {
        let f = |x: f64| C::new((-0.5 * x * x).exp(), 0.0);
        let got = adaptive_simpson(&f, -20.0, 20.0, 1e-12);
        let expect = (2.0 * std::f64::consts::PI).sqrt();
        assert!((got.re - expect).abs() < 1e-10);
        assert!(got.im.abs() < 1e-14);
    }
}
