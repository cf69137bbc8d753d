//! Verification of the matrix boundary-value characterization.
//!
//! The 2x2 matrix
//!
//! ```text
//!   Y_n(z) = [      pi_n(z)            h_n(z)      ]
//!            [ g_(n-1) pi_(n-1)(z)  g_(n-1) h_(n-1)(z) ]
//! ```
//!
//! (with `g_k` the coupling constants of the basis) is analytic off the real
//! axis and is fixed by two conditions, both of which are measured here
//! rather than assumed:
//!
//! * **jump**: approaching a real `x` from above and below,
//!   `Y(x + i0) = Y(x - i0) * [[1, w(x)], [0, 1]]` with `w` the ensemble
//!   weight. At finite offset `delta` the mismatch is O(delta), so the
//!   returned residual should shrink linearly as `delta` does.
//! * **normalization**: `Y(z) * diag(z^-n, z^n) -> I` as `|z| -> infinity`,
//!   measured on a circle of given radius; entries approach the identity
//!   like 1/z.

use num_complex::Complex;
use serde::Serialize;

use crate::cauchy::cauchy_profile;
use crate::error::{Error, Result};
use crate::logdet::LogComplex;
use crate::orthopoly::OrthoBasis;
use crate::quadrature::QuadratureRule;
use crate::scalar::{real, Real};

/// One measured residual: the probe location (`x` for jumps, the circle
/// radius for normalization), the index `n`, and the max-entry mismatch.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "")]
pub struct ResidualSample<T: Real> {
    #[serde(rename = "x_or_radius")]
    pub location: T,
    pub n: usize,
    pub residual: T,
}

/// Max-entry mismatch of the jump condition at real `x`, measured between
/// `x + i delta` and `x - i delta`.
pub fn jump_residual<T: Real>(
    basis: &OrthoBasis<T>,
    rule: &QuadratureRule<T>,
    x: T,
    n: usize,
    delta: T,
) -> Result<ResidualSample<T>> {
    if n == 0 || n > basis.max_degree() {
        return Err(Error::Config(format!(
            "jump check needs 1 <= n <= {}, got {n}",
            basis.max_degree()
        )));
    }
    if !(delta >= real(1e-6) && delta <= real(1e-2)) {
        return Err(Error::Config(
            "jump offset delta must lie in [1e-6, 1e-2]".into(),
        ));
    }
    if !(x.abs() <= rule.truncation_radius / real(2.0)) {
        return Err(Error::Config(
            "jump check points must sit well inside the truncation radius".into(),
        ));
    }
    let up = y_matrix(basis, rule, Complex::new(x, delta), n)?;
    let dn = y_matrix(basis, rule, Complex::new(x, -delta), n)?;
    let w = basis.potential().weight(x);
    let mismatch = [
        up[0] - dn[0],
        up[1] - (dn[0].scale(w) + dn[1]),
        up[2] - dn[2],
        up[3] - (dn[2].scale(w) + dn[3]),
    ];
    let residual = mismatch
        .iter()
        .map(|m| m.norm())
        .fold(T::zero(), |a, b| a.max(b));
    Ok(ResidualSample {
        location: x,
        n,
        residual,
    })
}

/// Max-entry distance of `Y(z) diag(z^-n, z^n)` from the identity over eight
/// points on the circle `|z| = radius`.
pub fn normalization_residual<T: Real>(
    basis: &OrthoBasis<T>,
    rule: &QuadratureRule<T>,
    n: usize,
    radius: T,
) -> Result<ResidualSample<T>> {
    if n == 0 || n + 6 > basis.max_degree() {
        return Err(Error::Config(format!(
            "normalization check needs 1 <= n <= max_degree - 6 = {}, got {n}",
            basis.max_degree().saturating_sub(6)
        )));
    }
    if !(radius >= real::<T>(10.0) * (T::one() + rule.truncation_radius)) {
        return Err(Error::Config(
            "normalization radius must be at least 10 (1 + truncation radius)".into(),
        ));
    }
    let log_r = radius.ln();
    let mut worst = T::zero();
    for j in 0..8 {
        let theta = real::<T>(std::f64::consts::PI) * real::<T>((2 * j + 1) as f64) / real(8.0);
        let z = Complex::from_polar(radius, theta);
        let dir = Complex::from_polar(T::one(), theta);
        let y = y_log_matrix(basis, rule, z, n)?;
        let shrink = LogComplex {
            log_modulus: -real::<T>(n as f64) * log_r,
            phase: dir.powi(-(n as i32)),
        };
        let grow = LogComplex {
            log_modulus: real::<T>(n as f64) * log_r,
            phase: dir.powi(n as i32),
        };
        let one = Complex::new(T::one(), T::zero());
        let entries = [
            (y[0] * shrink).to_complex() - one,
            (y[1] * grow).to_complex(),
            (y[2] * shrink).to_complex(),
            (y[3] * grow).to_complex() - one,
        ];
        for e in entries {
            worst = worst.max(e.norm());
        }
    }
    Ok(ResidualSample {
        location: radius,
        n,
        residual: worst,
    })
}

/// Row-major `Y_n(z)` in plain complex arithmetic (bulk evaluation).
fn y_matrix<T: Real>(
    basis: &OrthoBasis<T>,
    rule: &QuadratureRule<T>,
    z: Complex<T>,
    n: usize,
) -> Result<[Complex<T>; 4]> {
    let h = cauchy_profile(basis, n - 1, n, z, rule)?;
    let gamma = basis.gamma(n - 1)?;
    let pi_lower = basis.monic(n - 1, z)?;
    let pi_upper = basis.monic(n, z)?;
    Ok([
        pi_upper,
        h[1].value,
        gamma * pi_lower,
        gamma * h[0].value,
    ])
}

/// Row-major `Y_n(z)` in log form (large-|z| evaluation).
fn y_log_matrix<T: Real>(
    basis: &OrthoBasis<T>,
    rule: &QuadratureRule<T>,
    z: Complex<T>,
    n: usize,
) -> Result<[LogComplex<T>; 4]> {
    let h = cauchy_profile(basis, n - 1, n, z, rule)?;
    let pis = basis.monic_range_log(n - 1, n, z)?;
    let gamma = LogComplex {
        log_modulus: basis.gamma_log_modulus(n - 1)?,
        phase: Complex::new(T::zero(), -T::one()),
    };
    let lc = |(log, scaled): (T, Complex<T>)| LogComplex::from_complex(scaled).scale_log(log);
    Ok([
        lc(pis[1]),
        LogComplex::from_complex(h[1].value),
        gamma * lc(pis[0]),
        gamma * LogComplex::from_complex(h[0].value),
    ])
}
