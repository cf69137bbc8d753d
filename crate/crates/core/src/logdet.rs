//! Determinants and Vandermonde products in log-magnitude form.
//!
//! Correlation kernels here are ratios of quantities whose magnitudes grow
//! factorially with the matrix size, so everything multiplicative is carried
//! as a [`LogComplex`]: a real log-modulus plus a unit phase. Determinants
//! come from LU with partial pivoting, which also yields the diagonal ratio
//! `min|u_ii| / max|u_ii|` as a cheap conditioning estimate.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A nonzero complex number stored as `phase * exp(log_modulus)`.
///
/// `phase` is kept on the unit circle; `log_modulus = -inf` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LogComplex<T: Real> {
    pub log_modulus: T,
    pub phase: Complex<T>,
}

impl<T: Real> LogComplex<T> {
    pub fn one() -> Self {
        LogComplex {
            log_modulus: T::zero(),
            phase: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn zero() -> Self {
        LogComplex {
            log_modulus: T::neg_infinity(),
            phase: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        let r = z.norm();
        if r == T::zero() {
            return Self::zero();
        }
        LogComplex {
            log_modulus: r.ln(),
            phase: z.unscale(r),
        }
    }

    /// Renormalizes `phase` onto the unit circle; call after long products.
    pub fn normalized(mut self) -> Self {
        let r = self.phase.norm();
        if r > T::zero() && r.is_finite() {
            self.phase = self.phase.unscale(r);
            self.log_modulus = self.log_modulus + r.ln();
        }
        self
    }

    /// Materializes the value; overflows to infinity if the log-modulus is
    /// beyond the scalar's range.
    pub fn to_complex(self) -> Complex<T> {
        self.phase.scale(self.log_modulus.exp())
    }

    /// True when [`LogComplex::to_complex`] stays finite and nonzero.
    pub fn representable(&self) -> bool {
        let m = self.log_modulus.exp();
        m.is_finite() && m > T::zero()
    }

    pub fn scale_log(mut self, log_factor: T) -> Self {
        self.log_modulus = self.log_modulus + log_factor;
        self
    }

    pub fn recip(self) -> Self {
        LogComplex {
            log_modulus: -self.log_modulus,
            phase: self.phase.conj(),
        }
    }
}

impl<T: Real> std::ops::Mul for LogComplex<T> {
    type Output = LogComplex<T>;
    fn mul(self, rhs: Self) -> Self {
        LogComplex {
            log_modulus: self.log_modulus + rhs.log_modulus,
            phase: self.phase * rhs.phase,
        }
        .normalized()
    }
}

impl<T: Real> std::ops::Div for LogComplex<T> {
    type Output = LogComplex<T>;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

/// Determinant of a dense row-major `n x n` matrix by LU with partial
/// pivoting, in log form, together with the diagonal conditioning ratio
/// `min|u_ii| / max|u_ii|`.
///
/// The matrix is factored in place. An exactly singular matrix returns
/// `(zero, 0)` rather than an error.
pub fn log_det_lu<T: Real>(a: &mut [Complex<T>], n: usize) -> (LogComplex<T>, T) {
    assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
    if n == 0 {
        return (LogComplex::one(), T::one());
    }
    let mut det = LogComplex::one();
    let mut min_diag = T::infinity();
    let mut max_diag = T::zero();
    for col in 0..n {
        let mut piv = col;
        let mut piv_norm = a[col * n + col].norm_sqr();
        for row in col + 1..n {
            let nrm = a[row * n + col].norm_sqr();
            if nrm > piv_norm {
                piv = row;
                piv_norm = nrm;
            }
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det.phase = -det.phase;
        }
        let d = a[col * n + col];
        let dn = d.norm();
        min_diag = min_diag.min(dn);
        max_diag = max_diag.max(dn);
        if dn == T::zero() || !dn.is_finite() {
            let rcond = if dn.is_finite() { T::zero() } else { T::nan() };
            return (LogComplex::zero(), rcond);
        }
        det = det * LogComplex::from_complex(d);
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            a[row * n + col] = Complex::new(T::zero(), T::zero());
            for j in col + 1..n {
                let sub = factor * a[col * n + j];
                a[row * n + j] = a[row * n + j] - sub;
            }
        }
    }
    let rcond = if max_diag > T::zero() {
        min_diag / max_diag
    } else {
        T::zero()
    };
    (det, rcond)
}

/// The Vandermonde product over ordered pairs: the product of
/// `(x_j - x_i)` for `i < j`, in log form. Empty and singleton inputs give 1.
pub fn log_vandermonde<T: Real>(xs: &[Complex<T>]) -> LogComplex<T> {
    let mut acc = LogComplex::one();
    for j in 1..xs.len() {
        for i in 0..j {
            acc = acc * LogComplex::from_complex(xs[j] - xs[i]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn two_by_two_determinant() {
        let mut a = vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)];
        let (det, rcond) = log_det_lu(&mut a, 2);
        // det = 1*3 - (2+i)(-i) = 3 - (1 - 2i)... careful: (2+i)*(-i) = -2i - i^2 = 1 - 2i.
        // det = 3 - (1 - 2i) = 2 + 2i.
        let v = det.to_complex();
        assert!((v - c(2.0, 2.0)).norm() < 1e-14);
        assert!(rcond > 0.0 && rcond <= 1.0);
    }

    #[test]
    fn permuted_identity_has_unit_magnitude() {
        // Row-swapped identity: determinant -1.
        let mut a = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let (det, rcond) = log_det_lu(&mut a, 2);
        let v = det.to_complex();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((rcond - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_reports_zero() {
        let mut a = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        let (det, rcond) = log_det_lu(&mut a, 2);
        assert!(det.log_modulus.is_infinite() && det.log_modulus < 0.0);
        assert_eq!(rcond, 0.0);
    }

    #[test]
    fn huge_diagonal_stays_in_log_space() {
        let n = 3;
        let mut a = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = c(1e200, 0.0);
        }
        let (det, rcond) = log_det_lu(&mut a, n);
        assert!((det.log_modulus - 3.0 * 1e200f64.ln()).abs() < 1e-9);
        assert!((rcond - 1.0).abs() < 1e-15);
        assert!(!det.representable());
    }

    #[test]
    fn column_scaling_shifts_log_modulus_exactly() {
        let mut a = vec![
            c(1.3, 0.2),
            c(-0.4, 1.0),
            c(0.9, -0.7),
            c(2.0, 0.3),
            c(0.1, 0.1),
            c(-1.1, 0.6),
            c(0.5, -0.2),
            c(0.8, 0.0),
            c(1.7, -1.2),
        ];
        let mut scaled = a.clone();
        let s = 1e-7;
        for row in 0..3 {
            scaled[row * 3 + 1] = scaled[row * 3 + 1].scale(s);
        }
        let (d1, _) = log_det_lu(&mut a, 3);
        let (d2, _) = log_det_lu(&mut scaled, 3);
        assert!((d2.log_modulus - (d1.log_modulus + s.ln())).abs() < 1e-10);
        assert!((d2.phase - d1.phase).norm() < 1e-10);
    }

    #[test]
    fn vandermonde_matches_direct_product() {
        let xs = [c(0.3, 0.1), c(-1.2, 0.0), c(0.0, 2.0), c(1.5, -0.5)];
        let mut direct = c(1.0, 0.0);
        for j in 0..xs.len() {
            for i in 0..j {
                direct *= xs[j] - xs[i];
            }
        }
        let lv = log_vandermonde(&xs);
        assert!((lv.to_complex() - direct).norm() < 1e-13 * direct.norm());
    }

    #[test]
    fn vandermonde_trivial_cases() {
        assert_eq!(log_vandermonde::<f64>(&[]).log_modulus, 0.0);
        assert_eq!(log_vandermonde(&[c(5.0, 1.0)]).log_modulus, 0.0);
    }

    #[test]
    fn log_arithmetic_round_trips() {
        let a = LogComplex::from_complex(c(3.0, -4.0));
        let b = LogComplex::from_complex(c(-0.5, 0.25));
        let prod = (a * b).to_complex();
        assert!((prod - c(3.0, -4.0) * c(-0.5, 0.25)).norm() < 1e-14);
        let quot = (a / b).to_complex();
        assert!((quot - c(3.0, -4.0) / c(-0.5, 0.25)).norm() < 1e-13);
        assert!((a.phase.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_yields_negative_infinite_log() {
        let z = LogComplex::from_complex(c(0.0, 0.0));
        assert!(z.log_modulus.is_infinite() && z.log_modulus < 0.0);
        assert_eq!(z.to_complex(), c(0.0, 0.0));
    }
}
