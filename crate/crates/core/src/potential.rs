//! Confining potential of the matrix ensemble.
//!
//! A [`Potential`] is the pair (V, N): the confinement V and the matrix size
//! N, which together define the weight `w(x) = exp(-N V(x))` on the real
//! line. Two kinds are supported: the Gaussian `V(x) = x^2 / 2` and a general
//! polynomial with even degree >= 2 and positive leading coefficient, so that
//! the weight always decays at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Which confinement the ensemble uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    /// `V(x) = x^2 / 2`.
    Gaussian,
    /// `V(x) = sum_j coefficients[j] * x^j`.
    Polynomial,
}

/// Confining potential together with the matrix size.
///
/// Serializes to `{"kind": ..., "coefficients": [...], "matrix_size": N}`;
/// unknown fields are rejected. For the Gaussian kind `coefficients` must be
/// empty (and may be omitted).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "")]
pub struct Potential<T: Real> {
    pub kind: PotentialKind,
    #[serde(default = "Vec::new")]
    pub coefficients: Vec<T>,
    pub matrix_size: usize,
}

impl<T: Real> Potential<T> {
    /// Gaussian confinement for an `n x n` ensemble.
    pub fn gaussian(n: usize) -> Result<Self> {
        let p = Potential {
            kind: PotentialKind::Gaussian,
            coefficients: Vec::new(),
            matrix_size: n,
        };
        p.validate()?;
        Ok(p)
    }

    /// Polynomial confinement `V(x) = sum_j coefficients[j] x^j`.
    pub fn polynomial(coefficients: Vec<T>, n: usize) -> Result<Self> {
        let p = Potential {
            kind: PotentialKind::Polynomial,
            coefficients,
            matrix_size: n,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the structural invariants; every constructor and every consumer
    /// of a deserialized potential calls this.
    pub fn validate(&self) -> Result<()> {
        if self.matrix_size == 0 {
            return Err(Error::InvalidPotential(
                "matrix_size must be at least 1".into(),
            ));
        }
        match self.kind {
            PotentialKind::Gaussian => {
                if !self.coefficients.is_empty() {
                    return Err(Error::InvalidPotential(
                        "gaussian potential takes no coefficients".into(),
                    ));
                }
                Ok(())
            }
            PotentialKind::Polynomial => {
                let degree = self.polynomial_degree()?;
                if degree < 2 || degree % 2 != 0 {
                    return Err(Error::InvalidPotential(format!(
                        "polynomial degree must be even and at least 2, got {degree}"
                    )));
                }
                if self.coefficients[degree] <= T::zero() {
                    return Err(Error::InvalidPotential(
                        "leading coefficient must be positive".into(),
                    ));
                }
                for (j, c) in self.coefficients.iter().enumerate() {
                    if !c.is_finite() {
                        return Err(Error::InvalidPotential(format!(
                            "coefficient {j} is not finite"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    fn polynomial_degree(&self) -> Result<usize> {
        self.coefficients
            .iter()
            .rposition(|c| *c != T::zero())
            .ok_or_else(|| Error::InvalidPotential("polynomial has no nonzero coefficient".into()))
    }

    /// V(x).
    pub fn value(&self, x: T) -> T {
        match self.kind {
            PotentialKind::Gaussian => x * x / real(2.0),
            PotentialKind::Polynomial => {
                // Horner evaluation.
                let mut acc = T::zero();
                for c in self.coefficients.iter().rev() {
                    acc = acc * x + *c;
                }
                acc
            }
        }
    }

    /// `exp(-N V(x))`, the ensemble weight.
    pub fn weight(&self, x: T) -> T {
        let n = real::<T>(self.matrix_size as f64);
        (-n * self.value(x)).exp()
    }

    /// Location and value of the global minimum of V.
    ///
    /// The Gaussian case is exact; polynomial confinements are minimized by a
    /// coarse scan over an interval guaranteed to contain the minimum,
    /// refined by golden-section search.
    pub fn minimum(&self) -> (T, T) {
        match self.kind {
            PotentialKind::Gaussian => (T::zero(), T::zero()),
            PotentialKind::Polynomial => self.polynomial_minimum(),
        }
    }

    fn polynomial_minimum(&self) -> (T, T) {
        // Beyond |x| = B the leading term dominates every lower-order term,
        // so the minimum lies inside [-B, B].
        let degree = self
            .polynomial_degree()
            .expect("validated polynomial has a degree");
        let lead = self.coefficients[degree];
        let mut bound = T::one();
        for (j, c) in self.coefficients.iter().enumerate() {
            if j < degree && *c != T::zero() {
                let r = (c.abs() / lead * real(2.0 * degree as f64))
                    .powf(T::one() / real((degree - j) as f64));
                bound = bound.max(r);
            }
        }
        let samples = 2048usize;
        let mut best_i = 0usize;
        let mut best_v = T::infinity();
        for i in 0..=samples {
            let x = -bound + real::<T>(2.0 * i as f64 / samples as f64) * bound;
            let v = self.value(x);
            if v < best_v {
                best_v = v;
                best_i = i;
            }
        }
        let step = real::<T>(2.0 / samples as f64) * bound;
        let lo = -bound + real::<T>(best_i.saturating_sub(1) as f64) * step;
        let hi = (-bound + real::<T>((best_i + 1) as f64) * step).min(bound);
        self.golden_section(lo, hi)
    }

    fn golden_section(&self, mut a: T, mut b: T) -> (T, T) {
        let inv_phi = real::<T>(0.618_033_988_749_894_8);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.value(c);
        let mut fd = self.value(d);
        for _ in 0..200 {
            if (b - a).abs() <= T::epsilon() * (T::one() + a.abs() + b.abs()) {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.value(d);
            }
        }
        let x = (a + b) / real(2.0);
        (x, self.value(x))
    }
}
