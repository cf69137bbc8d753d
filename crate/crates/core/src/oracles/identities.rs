//! Exact algebraic identities used as numerical cross-checks.
//!
//! Two independent expansions are implemented:
//!
//! * the subset expansion of an inverse product over point sets,
//!
//!   ```text
//!   prod_l  e_l^(N-M) / prod_a (e_l - x_a)
//!     = sum over M-subsets S of {1..N} of
//!         prod_{a in S} [ x_a^(N-M) / prod_l (e_l - x_a) ]
//!         * prod_{a in S, b not in S} (x_a - x_b)^(-1)
//!   ```
//!
//! * the Cauchy–Littlewood expansion
//!   `prod_{i,j} (1 - x_i y_j)^(-1) = sum over partitions of s_p(x) s_p(y)`,
//!   with the Schur polynomials evaluated through their bialternant
//!   determinant representation.
//!
//! Both sides of each identity are computed by entirely separate code paths,
//! so agreement to near machine precision is a meaningful check on every
//! ingredient involved.

use num_complex::Complex;

use crate::error::{Error, Result};

/// Both sides of an identity and their discrepancy.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub lhs: Complex<f64>,
    pub rhs: Complex<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl IdentityCheck {
    fn new(lhs: Complex<f64>, rhs: Complex<f64>) -> Self {
        let abs_error = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        IdentityCheck {
            lhs,
            rhs,
            abs_error,
            rel_error: abs_error / scale,
        }
    }
}

/// Checks the subset expansion for the given points and shifts.
///
/// `xs` are the N distinct real points, `epsilons` the M distinct complex
/// shifts, M <= N. The subset sum loses accuracy as the points crowd
/// together, so the sizes are capped at N <= 7 and M <= 3.
pub fn permutation_identity_check(
    xs: &[f64],
    epsilons: &[Complex<f64>],
) -> Result<IdentityCheck> {
    let n = xs.len();
    let m = epsilons.len();
    if m > n {
        return Err(Error::Config(format!(
            "the subset expansion needs at most as many shifts as points, got {m} > {n}"
        )));
    }
    if n > 7 {
        return Err(Error::Capability(format!(
            "subset enumeration is limited to 7 points, got {n}"
        )));
    }
    if m > 3 {
        return Err(Error::Capability(format!(
            "subset enumeration is limited to 3 shifts, got {m}"
        )));
    }
    check_distinct(xs.iter().map(|&x| Complex::new(x, 0.0)), "x")?;
    check_distinct(epsilons.iter().copied(), "epsilon")?;

    let power = (n - m) as i32;
    let lhs = epsilons
        .iter()
        .map(|&e| {
            let mut denom = Complex::new(1.0, 0.0);
            for &x in xs {
                denom *= e - x;
            }
            e.powi(power) / denom
        })
        .product::<Complex<f64>>();

    let mut rhs = Complex::new(0.0, 0.0);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut term = Complex::new(1.0, 0.0);
        for a in 0..n {
            if mask & (1 << a) == 0 {
                continue;
            }
            let mut factor = Complex::new(xs[a].powi(power), 0.0);
            for &e in epsilons {
                factor /= e - xs[a];
            }
            term *= factor;
            for b in 0..n {
                if mask & (1 << b) == 0 {
                    term /= xs[a] - xs[b];
                }
            }
        }
        rhs += term;
    }
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Checks the truncated Cauchy–Littlewood expansion.
///
/// Requires `|x_i y_j| < 1` for every pair; the series over partitions is
/// summed up to weight `max_weight` and its geometric tail shows up in
/// `abs_error` of the returned check.
pub fn cauchy_littlewood_check(
    xs: &[f64],
    ys: &[f64],
    max_weight: usize,
) -> Result<IdentityCheck> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Config(
            "the Cauchy-Littlewood check needs nonempty variable sets".into(),
        ));
    }
    if xs.len() > 4 || ys.len() > 4 {
        return Err(Error::Capability(
            "bialternant Schur evaluation is limited to at most 4 variables per set".into(),
        ));
    }
    check_distinct(xs.iter().map(|&x| Complex::new(x, 0.0)), "x")?;
    check_distinct(ys.iter().map(|&y| Complex::new(y, 0.0)), "y")?;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if !((x * y).abs() < 1.0) {
                return Err(Error::DivergentSeries { i, j });
            }
        }
    }

    let mut lhs = 1.0f64;
    for &x in xs {
        for &y in ys {
            lhs /= 1.0 - x * y;
        }
    }

    let max_parts = xs.len().min(ys.len());
    let mut rhs = 0.0f64;
    for lambda in partitions(max_weight, max_parts) {
        rhs += schur(&lambda, xs) * schur(&lambda, ys);
    }
    Ok(IdentityCheck::new(
        Complex::new(lhs, 0.0),
        Complex::new(rhs, 0.0),
    ))
}

fn check_distinct(
    vals: impl Iterator<Item = Complex<f64>> + Clone,
    family: &'static str,
) -> Result<()> {
    let v: Vec<Complex<f64>> = vals.collect();
    for j in 1..v.len() {
        for i in 0..j {
            if (v[j] - v[i]).norm() <= 1e-12 * (1.0 + v[i].norm().max(v[j].norm())) {
                return Err(Error::DegenerateArguments { family, i, j });
            }
        }
    }
    Ok(())
}

/// All partitions with at most `max_parts` parts and weight at most
/// `max_weight`, the empty partition included.
fn partitions(max_weight: usize, max_parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut current = Vec::new();
    extend(&mut out, &mut current, max_weight, max_parts, max_weight);
    out
}

fn extend(
    out: &mut Vec<Vec<usize>>,
    current: &mut Vec<usize>,
    budget: usize,
    parts_left: usize,
    largest: usize,
) {
    if parts_left == 0 {
        return;
    }
    for part in (1..=largest.min(budget)).rev() {
        current.push(part);
        out.push(current.clone());
        extend(out, current, budget - part, parts_left - 1, part);
        current.pop();
    }
}

/// Schur polynomial via the bialternant ratio
/// `det(x_i^(lambda_j + n - j)) / det(x_i^(n - j))`.
fn schur(lambda: &[usize], xs: &[f64]) -> f64 {
    let n = xs.len();
    if lambda.len() > n {
        return 0.0;
    }
    let exponent = |j: usize| -> i32 {
        let part = if j < lambda.len() { lambda[j] } else { 0 };
        (part + n - 1 - j) as i32
    };
    let mut numer = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            numer[i * n + j] = xs[i].powi(exponent(j));
        }
    }
    let mut vandermonde = 1.0f64;
    for j in 1..n {
        for i in 0..j {
            // det(x_i^(n - 1 - j)) expands to the product of differences
            // with this index order.
            vandermonde *= xs[i] - xs[j];
        }
    }
    det_small(&mut numer, n) / vandermonde
}

/// Determinant of a small dense real matrix by partial-pivot elimination.
fn det_small(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn two_points_one_shift_in_closed_form() {
        // With N = 2, M = 1 both sides reduce to e / ((e - x1)(e - x2)).
        let xs = [0.3, -1.2];
        let e = C::new(0.5, 0.8);
        let check = permutation_identity_check(&xs, &[e]).unwrap();
        let closed = e / ((e - xs[0]) * (e - xs[1]));
        assert!((check.lhs - closed).norm() < 1e-15);
        assert!(check.rel_error < 1e-13, "rel {}", check.rel_error);
    }

    #[test]
    fn five_points_two_shifts() {
        let xs = [0.9, -0.4, 1.7, -2.2, 0.1];
        let es = [C::new(0.2, 1.1), C::new(-0.7, -0.6)];
        let check = permutation_identity_check(&xs, &es).unwrap();
        assert!(check.rel_error < 1e-12, "rel {}", check.rel_error);
    }

    #[test]
    fn full_subset_is_a_plain_product() {
        // M = N leaves a single subset and no cross factors.
        let xs = [0.6, -0.9];
        let es = [C::new(0.1, 0.7), C::new(-0.4, 1.3)];
        let check = permutation_identity_check(&xs, &es).unwrap();
        assert!(check.rel_error < 1e-14, "rel {}", check.rel_error);
    }

    #[test]
    fn geometric_series_single_variables() {
        let check = cauchy_littlewood_check(&[0.4], &[0.55], 60).unwrap();
        assert!(check.rel_error < 1e-13, "rel {}", check.rel_error);
    }

    #[test]
    fn two_by_two_expansion_converges() {
        let check = cauchy_littlewood_check(&[0.5, -0.3], &[0.6, 0.35], 40).unwrap();
        assert!(check.rel_error < 1e-12, "rel {}", check.rel_error);
    }

    #[test]
    fn divergent_pairs_are_named() {
        let err = cauchy_littlewood_check(&[0.5, 2.0], &[0.6, 0.1], 10).unwrap_err();
        match err {
            Error::DivergentSeries { i, j } => assert_eq!((i, j), (1, 0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schur_matches_monomial_expansion() {
        // s_(2,1)(x1, x2) = x1^2 x2 + x1 x2^2.
        let xs = [0.7, -0.45];
        let direct = xs[0] * xs[1] * (xs[0] + xs[1]);
        let s = schur(&[2, 1], &xs);
        assert!((s - direct).abs() < 1e-14, "{s} vs {direct}");
    }

    #[test]
    fn coincident_points_are_rejected() {
        assert!(matches!(
            permutation_identity_check(&[0.5, 0.5], &[C::new(0.0, 1.0)]),
            Err(Error::DegenerateArguments { family: "x", .. })
        ));
    }
}
