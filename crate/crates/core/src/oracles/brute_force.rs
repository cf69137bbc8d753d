//! Direct evaluation of the N-fold eigenvalue integral.
//!
//! The joint eigenvalue density is proportional to the squared Vandermonde
//! times the product of weights, so any average of a symmetric statistic
//! `F(x_1..x_N)` is the ratio of two N-dimensional integrals. Both are
//! computed here by brute summation over a tensor quadrature grid, using
//! strictly increasing index tuples (the integrand is symmetric, and the
//! Vandermonde kills repeated nodes, so ordered tuples lose nothing and cut
//! the work by N factorial).
//!
//! Cost grows like (grid size)^N: this oracle is only offered for N up to 4.
//! Every value is computed twice, on the base grid and on one with doubled
//! panels, and the difference is reported as the error estimate.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::QuadratureRule;

/// Largest matrix size the tensor-grid summation accepts.
pub const MAX_BRUTE_N: usize = 4;

const BASE_PANELS: usize = 6;
// High per-panel order: pole factors 1/(eps - x) with |Im eps| down to ~0.4
// must converge past 1e-8 on panels of order-one width.
const POINTS_PER_PANEL: usize = 16;

/// An eigenvalue-integral average with a grid-doubling error estimate.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceValue {
    pub value: Complex<f64>,
    pub estimated_error: f64,
}

/// The average of `prod_l det(mu_l - H) / prod_k det(eps_k - H)` over the
/// ensemble with the given potential, by direct integration.
pub fn brute_force_average(
    potential: &Potential<f64>,
    epsilons: &[Complex<f64>],
    mus: &[Complex<f64>],
) -> Result<BruteForceValue> {
    let n = potential.matrix_size;
    if n > MAX_BRUTE_N {
        return Err(Error::Capability(format!(
            "the eigenvalue-integral oracle is limited to matrix sizes up to {MAX_BRUTE_N}, got {n}"
        )));
    }
    for e in epsilons {
        if !(e.im.abs() >= 1e-3) {
            return Err(Error::Capability(
                "the eigenvalue-integral oracle needs |Im eps| >= 1e-3 to resolve the poles"
                    .into(),
            ));
        }
    }
    let radius = support_radius(potential);
    // Panel width <= 1 on the doubled grid, whatever the support width:
    // small matrix sizes have slowly decaying weights and wide domains.
    let base_panels = BASE_PANELS.max(radius.ceil() as usize);
    let coarse = grid_average(potential, radius, base_panels, epsilons, mus)?;
    let fine = grid_average(potential, radius, 2 * base_panels, epsilons, mus)?;
    let est = (fine - coarse).norm() + 1e-14 * fine.norm();
    Ok(BruteForceValue {
        value: fine,
        estimated_error: est,
    })
}

/// Where `exp(-N (V - V_min))` has decayed to ~1e-26 on both sides, padded.
fn support_radius(potential: &Potential<f64>) -> f64 {
    let n = potential.matrix_size as f64;
    let (_, vmin) = potential.minimum();
    let decayed = |x: f64| n * (potential.value(x) - vmin) >= 60.0;
    let mut r = 1.0;
    while !(decayed(r) && decayed(-r)) && r < 1e6 {
        r *= 2.0;
    }
    let (mut lo, mut hi) = (r / 2.0, r);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if decayed(mid) && decayed(-mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    1.1 * hi
}

fn grid_average(
    potential: &Potential<f64>,
    radius: f64,
    panels: usize,
    epsilons: &[Complex<f64>],
    mus: &[Complex<f64>],
) -> Result<Complex<f64>> {
    let n = potential.matrix_size;
    let rule = QuadratureRule::fixed_panels(potential, radius, panels, POINTS_PER_PANEL)?;
    let xs = &rule.nodes;
    let ws = &rule.weights;
    let m = xs.len();

    let mut numerator = Complex::new(0.0, 0.0);
    let mut partition = 0.0f64;
    let mut idx = vec![0usize; n];
    // Strictly increasing index tuples i_1 < i_2 < ... < i_n.
    for s in 0..n {
        idx[s] = s;
    }
    loop {
        let mut weight = 1.0f64;
        for &i in &idx {
            weight *= ws[i];
        }
        let mut vandermonde = 1.0f64;
        for a in 1..n {
            for b in 0..a {
                vandermonde *= xs[idx[a]] - xs[idx[b]];
            }
        }
        let base = weight * vandermonde * vandermonde;
        partition += base;
        let mut stat = Complex::new(base, 0.0);
        for mu in mus {
            for &i in &idx {
                stat *= mu - xs[i];
            }
        }
        for eps in epsilons {
            for &i in &idx {
                stat /= eps - xs[i];
            }
        }
        numerator += stat;

        // Advance to the next increasing tuple; position `pos` may rise to
        // m - n + pos, after which the tail restarts in increasing order.
        let mut pos = n;
        let mut advanced = false;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < m - n + pos {
                idx[pos] += 1;
                for p in pos + 1..n {
                    idx[p] = idx[p - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    if !(partition > 0.0) || !partition.is_finite() {
        return Err(Error::Config(format!(
            "degenerate partition integral {partition} in the eigenvalue oracle"
        )));
    }
    Ok(numerator / partition)
}
