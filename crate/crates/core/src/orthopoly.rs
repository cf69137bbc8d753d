//! Monic polynomials orthogonal with respect to `exp(-N V(x)) dx`.
//!
//! The family satisfies the three-term recurrence
//! `p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x)` with `beta_0 = 0`,
//! and `norms_sq[k]` holds the squared L2 norm of `p_k` against the weight.
//! Coefficients come either from the closed form (Gaussian confinement) or
//! from the Stieltjes procedure on a quadrature rule. Evaluation helpers
//! return plain values or `(log-scale, scaled value)` pairs so that high
//! degrees at large arguments never overflow.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Potential, PotentialKind};
use crate::quadrature::QuadratureRule;
use crate::scalar::{real, Real};

/// Recurrence coefficients and norms of a monic orthogonal family.
#[derive(Debug, Clone)]
pub struct OrthoBasis<T: Real> {
    alpha: Vec<T>,
    beta: Vec<T>,
    norms_sq: Vec<T>,
    norms_sq_log: Vec<T>,
    potential: Potential<T>,
}

/// Serializable snapshot of a basis, exactly
/// `{"alpha": [...], "beta": [...], "norms_sq": [...], "matrix_size": N}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "")]
pub struct BasisCache<T: Real> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub norms_sq: Vec<T>,
    pub matrix_size: usize,
}

impl<T: Real> OrthoBasis<T> {
    /// Builds the basis for `potential`, choosing the closed form when one
    /// exists and the Stieltjes procedure on `rule` otherwise.
    pub fn build(
        potential: &Potential<T>,
        rule: &QuadratureRule<T>,
        max_degree: usize,
    ) -> Result<Self> {
        match potential.kind {
            PotentialKind::Gaussian => Self::gaussian_closed_form(potential.matrix_size, max_degree),
            PotentialKind::Polynomial => Self::from_stieltjes(rule, max_degree),
        }
    }

    /// Exact coefficients for the weight `exp(-N x^2 / 2)`:
    /// `alpha_k = 0`, `beta_k = k / N`, and the norms follow from
    /// `norms_sq[0] = sqrt(2 pi / N)`.
    pub fn gaussian_closed_form(matrix_size: usize, max_degree: usize) -> Result<Self> {
        let potential = Potential::gaussian(matrix_size)?;
        let n = real::<T>(matrix_size as f64);
        let d = max_degree;
        let mut alpha = vec![T::zero(); d + 1];
        let mut beta = vec![T::zero(); d + 1];
        let mut norms_sq = vec![T::zero(); d + 1];
        let mut norms_sq_log = vec![T::zero(); d + 1];
        let c0 = (real::<T>(2.0) * T::PI() / n).sqrt();
        norms_sq[0] = c0;
        norms_sq_log[0] = c0.ln();
        for k in 1..=d {
            beta[k] = real::<T>(k as f64) / n;
            norms_sq[k] = norms_sq[k - 1] * beta[k];
            norms_sq_log[k] = norms_sq_log[k - 1] + beta[k].ln();
        }
        alpha.iter_mut().for_each(|a| *a = T::zero());
        Ok(OrthoBasis {
            alpha,
            beta,
            norms_sq,
            norms_sq_log,
            potential,
        })
    }

    /// Stieltjes orthogonalization on a quadrature rule.
    ///
    /// Each coefficient is a ratio of weighted node sums over the current
    /// polynomial, so the rule must resolve polynomials of degree
    /// `2 max_degree + 1`; as a coarse guard this requires at least
    /// `4 (max_degree + 1)` nodes.
    pub fn from_stieltjes(rule: &QuadratureRule<T>, max_degree: usize) -> Result<Self> {
        let d = max_degree;
        if rule.len() < 4 * (d + 1) {
            return Err(Error::QuadratureInsufficient { degree: d });
        }
        // A validated rule must cover the inner products of degree 2d + 1;
        // rules built without validation (degree_bound = 0) are exempt and
        // answer for themselves.
        if rule.degree_bound > 0 && 2 * d + 2 > rule.degree_bound {
            return Err(Error::QuadratureInsufficient { degree: d });
        }
        let nodes = &rule.nodes;
        let weights = &rule.weights;
        let m = nodes.len();
        let mut alpha = vec![T::zero(); d + 1];
        let mut beta = vec![T::zero(); d + 1];
        let mut norms_sq = vec![T::zero(); d + 1];
        let mut p_prev = vec![T::zero(); m];
        let mut p_cur = vec![T::one(); m];
        for k in 0..=d {
            let mut sq = T::zero();
            let mut xsq = T::zero();
            for i in 0..m {
                let term = weights[i] * p_cur[i] * p_cur[i];
                sq = sq + term;
                xsq = xsq + term * nodes[i];
            }
            if !(sq.is_finite() && sq > T::zero()) {
                return Err(Error::QuadratureInsufficient { degree: k });
            }
            norms_sq[k] = sq;
            alpha[k] = xsq / sq;
            if k > 0 {
                beta[k] = sq / norms_sq[k - 1];
            }
            if k < d {
                for i in 0..m {
                    let next = (nodes[i] - alpha[k]) * p_cur[i] - beta[k] * p_prev[i];
                    p_prev[i] = p_cur[i];
                    p_cur[i] = next;
                }
            }
        }
        let norms_sq_log = norms_sq.iter().map(|c| c.ln()).collect();
        Ok(OrthoBasis {
            alpha,
            beta,
            norms_sq,
            norms_sq_log,
            potential: rule.potential().clone(),
        })
    }

    /// Highest polynomial degree this basis can evaluate.
    pub fn max_degree(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn matrix_size(&self) -> usize {
        self.potential.matrix_size
    }

    pub fn alpha(&self, k: usize) -> T {
        self.alpha[k]
    }

    /// `beta_k`; `beta_0 = 0` by convention.
    pub fn beta(&self, k: usize) -> T {
        self.beta[k]
    }

    /// Squared norm of the degree-`k` polynomial against the weight.
    pub fn norm_sq(&self, k: usize) -> T {
        self.norms_sq[k]
    }

    /// Natural logarithm of [`OrthoBasis::norm_sq`].
    pub fn norm_sq_log(&self, k: usize) -> T {
        self.norms_sq_log[k]
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.max_degree() {
            return Err(Error::DegreeOutOfRange {
                degree: k,
                max: self.max_degree(),
            });
        }
        Ok(())
    }

    /// `p_k(z)` by direct recurrence. Overflow-safe only for moderate
    /// degree and argument; see [`OrthoBasis::monic_scaled`] otherwise.
    pub fn monic(&self, k: usize, z: Complex<T>) -> Result<Complex<T>> {
        self.check_degree(k)?;
        let mut prev = Complex::new(T::zero(), T::zero());
        let mut cur = Complex::new(T::one(), T::zero());
        for j in 0..k {
            let next = (z - self.alpha[j]) * cur - prev.scale(self.beta[j]);
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `p_k(x)` at a real argument.
    pub fn monic_real(&self, k: usize, x: T) -> Result<T> {
        self.check_degree(k)?;
        let mut prev = T::zero();
        let mut cur = T::one();
        for j in 0..k {
            let next = (x - self.alpha[j]) * cur - self.beta[j] * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `p_k(z)` as `(log_scale, scaled)` with `p_k(z) = scaled * exp(log_scale)`.
    pub fn monic_scaled(&self, k: usize, z: Complex<T>) -> Result<(T, Complex<T>)> {
        Ok(self
            .monic_range_log(k, k, z)?
            .pop()
            .expect("range of one degree"))
    }

    /// `p_k(z)` for every `k` in `lo..=hi`, in one recurrence pass.
    ///
    /// Entry `k - lo` is `(log_scale, scaled)` with
    /// `p_k(z) = scaled * exp(log_scale)`; the running rescale keeps the
    /// carried values inside `[sqrt(min_positive), sqrt(max)]`, so arguments
    /// and degrees far beyond the naive overflow point stay representable.
    pub fn monic_range_log(&self, lo: usize, hi: usize, z: Complex<T>) -> Result<Vec<(T, Complex<T>)>> {
        if lo > hi {
            return Err(Error::Config(format!(
                "empty degree range {lo}..={hi}"
            )));
        }
        self.check_degree(hi)?;
        let big = T::max_value().sqrt();
        let small = T::min_positive_value().sqrt();
        let mut out = Vec::with_capacity(hi - lo + 1);
        let mut prev = Complex::new(T::zero(), T::zero());
        let mut cur = Complex::new(T::one(), T::zero());
        let mut log_scale = T::zero();
        for j in 0..=hi {
            if j >= lo {
                out.push((log_scale, cur));
            }
            if j == hi {
                break;
            }
            let next = (z - self.alpha[j]) * cur - prev.scale(self.beta[j]);
            prev = cur;
            cur = next;
            let mag = cur.re.abs().max(cur.im.abs()).max(prev.re.abs()).max(prev.im.abs());
            if mag > big || (mag < small && mag > T::zero()) {
                log_scale = log_scale + mag.ln();
                cur = cur.unscale(mag);
                prev = prev.unscale(mag);
            }
        }
        Ok(out)
    }

    /// The constant `gamma_k = -2 pi i / norms_sq[k]` associated with the
    /// degree-`k` polynomial.
    pub fn gamma(&self, k: usize) -> Result<Complex<T>> {
        self.check_degree(k)?;
        let two_pi = real::<T>(2.0) * T::PI();
        Ok(Complex::new(T::zero(), -(two_pi / self.norms_sq[k])))
    }

    /// `ln |gamma_k| = ln(2 pi) - ln norms_sq[k]`, exact even when the norm
    /// itself would overflow.
    pub fn gamma_log_modulus(&self, k: usize) -> Result<T> {
        self.check_degree(k)?;
        Ok((real::<T>(2.0) * T::PI()).ln() - self.norms_sq_log[k])
    }

    /// Snapshot for serialization.
    pub fn to_cache(&self) -> BasisCache<T> {
        BasisCache {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            norms_sq: self.norms_sq.clone(),
            matrix_size: self.potential.matrix_size,
        }
    }

    /// Rebuilds a basis from a snapshot, checking it against the potential
    /// it claims to describe.
    pub fn from_cache(cache: BasisCache<T>, potential: &Potential<T>) -> Result<Self> {
        potential.validate()?;
        if cache.matrix_size != potential.matrix_size {
            return Err(Error::Config(format!(
                "cached basis is for matrix_size {}, potential has {}",
                cache.matrix_size, potential.matrix_size
            )));
        }
        let d = cache.alpha.len();
        if d == 0 || cache.beta.len() != d || cache.norms_sq.len() != d {
            return Err(Error::Config(
                "cached basis arrays must be nonempty and of equal length".into(),
            ));
        }
        if cache.beta[0] != T::zero() {
            return Err(Error::Config("cached basis must have beta[0] = 0".into()));
        }
        for (k, c) in cache.norms_sq.iter().enumerate() {
            if !(c.is_finite() && *c > T::zero()) {
                return Err(Error::Config(format!(
                    "cached norms_sq[{k}] must be positive and finite"
                )));
            }
        }
        let norms_sq_log = cache.norms_sq.iter().map(|c| c.ln()).collect();
        Ok(OrthoBasis {
            alpha: cache.alpha,
            beta: cache.beta,
            norms_sq: cache.norms_sq,
            norms_sq_log,
            potential: potential.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;

    fn gaussian_basis(n: usize, d: usize) -> OrthoBasis<f64> {
        OrthoBasis::gaussian_closed_form(n, d).unwrap()
    }

    #[test]
    fn closed_form_matches_hand_values() {
        let b = gaussian_basis(2, 4);
        assert!((b.norm_sq(0) - (std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(b.beta(1), 0.5);
        // Degree two: x^2 - 1/2.
        let p2_0 = b.monic(2, num_complex::Complex::new(0.0, 0.0)).unwrap();
        let p2_1 = b.monic(2, num_complex::Complex::new(1.0, 0.0)).unwrap();
        assert!((p2_0.re + 0.5).abs() < 1e-15);
        assert!((p2_1.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_of_degree_zero() {
        let b = gaussian_basis(1, 2);
        let g = b.gamma(0).unwrap();
        assert!((g.re).abs() < 1e-15);
        assert!((g.im + 2.506_628_274_631_000_2).abs() < 1e-14);
        let lg = b.gamma_log_modulus(0).unwrap();
        assert!((lg - g.norm().ln()).abs() < 1e-14);
    }

    #[test]
    fn stieltjes_reproduces_gaussian_recurrence() {
        let p = Potential::<f64>::gaussian(3).unwrap();
        let rule = build_quadrature(&p, 16, 1e-12).unwrap();
        let b = OrthoBasis::from_stieltjes(&rule, 12).unwrap();
        let exact = gaussian_basis(3, 12);
        for k in 0..=12 {
            assert!(b.alpha(k).abs() < 1e-12, "alpha[{k}] = {}", b.alpha(k));
            assert!(
                (b.beta(k) - exact.beta(k)).abs() < 1e-11,
                "beta[{k}] = {} vs {}",
                b.beta(k),
                exact.beta(k)
            );
            let rel = (b.norm_sq(k) - exact.norm_sq(k)).abs() / exact.norm_sq(k);
            assert!(rel < 1e-10, "norms_sq[{k}] rel err {rel}");
        }
    }

    #[test]
    fn gaussian_recurrence_from_hankel_determinants() {
        // Independent route: beta_k = H_k H_{k-2} / H_{k-1}^2 with
        // H_k = det[m_{i+j}], using exact Gaussian moments
        // m_{2j} = (2j-1)!! N^{-j} sqrt(2 pi / N).
        let n = 4usize;
        let mass = (2.0 * std::f64::consts::PI / n as f64).sqrt();
        let moment = |j: usize| -> f64 {
            if j % 2 == 1 {
                0.0
            } else {
                let mut v = mass;
                let mut f = 1.0;
                for odd in (1..j).step_by(2) {
                    f *= odd as f64;
                }
                v *= f / (n as f64).powi((j / 2) as i32);
                v
            }
        };
        let hankel = |k: usize| -> f64 {
            // Determinant of the (k+1)x(k+1) moment matrix by Gaussian
            // elimination; sizes here are at most 4x4.
            let m = k + 1;
            let mut a = vec![0.0f64; m * m];
            for i in 0..m {
                for j in 0..m {
                    a[i * m + j] = moment(i + j);
                }
            }
            let mut det = 1.0;
            for col in 0..m {
                let mut piv = col;
                for r in col + 1..m {
                    if a[r * m + col].abs() > a[piv * m + col].abs() {
                        piv = r;
                    }
                }
                if piv != col {
                    for j in 0..m {
                        a.swap(col * m + j, piv * m + j);
                    }
                    det = -det;
                }
                det *= a[col * m + col];
                for r in col + 1..m {
                    let f = a[r * m + col] / a[col * m + col];
                    for j in col..m {
                        a[r * m + j] -= f * a[col * m + j];
                    }
                }
            }
            det
        };
        let b = gaussian_basis(n, 4);
        for k in 1..=3usize {
            let h2 = if k >= 2 { hankel(k - 2) } else { 1.0 };
            let beta = hankel(k) * h2 / hankel(k - 1).powi(2);
            assert!(
                (beta - b.beta(k)).abs() < 1e-12,
                "beta[{k}] hankel {beta} vs closed form {}",
                b.beta(k)
            );
        }
    }

    #[test]
    fn quartic_basis_is_orthogonal() {
        let p = Potential::<f64>::polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.25], 3).unwrap();
        let rule = build_quadrature(&p, 16, 1e-12).unwrap();
        let b = OrthoBasis::from_stieltjes(&rule, 8).unwrap();
        for i in 0..=6usize {
            for j in 0..=6usize {
                let mut acc = 0.0;
                for (idx, &x) in rule.nodes.iter().enumerate() {
                    acc += rule.weights[idx]
                        * b.monic_real(i, x).unwrap()
                        * b.monic_real(j, x).unwrap();
                }
                let scale = (b.norm_sq(i) * b.norm_sq(j)).sqrt();
                if i == j {
                    assert!((acc - b.norm_sq(i)).abs() < 1e-10 * scale);
                } else {
                    assert!(acc.abs() < 1e-10 * scale, "({i},{j}) -> {acc}");
                }
            }
        }
    }

    #[test]
    fn monic_polynomials_are_monic() {
        let p = Potential::<f64>::polynomial(vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0], 2).unwrap();
        let rule = build_quadrature(&p, 16, 1e-10).unwrap();
        let b = OrthoBasis::from_stieltjes(&rule, 6).unwrap();
        let z = num_complex::Complex::new(1e6, 0.0);
        let v = b.monic(5, z).unwrap();
        assert!((v.re / 1e30 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn scaled_evaluation_matches_direct() {
        let b = gaussian_basis(2, 30);
        let z = num_complex::Complex::new(3.5, -1.25);
        for k in [0usize, 1, 7, 18, 30] {
            let direct = b.monic(k, z).unwrap();
            let (lg, scaled) = b.monic_scaled(k, z).unwrap();
            let back = scaled.scale(lg.exp());
            assert!((back - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn scaled_evaluation_survives_huge_arguments() {
        let b = gaussian_basis(1, 60);
        let z = num_complex::Complex::new(1e8, 1e8);
        let vals = b.monic_range_log(0, 60, z).unwrap();
        let (lg, scaled) = vals[60];
        assert!(scaled.re.is_finite() && scaled.im.is_finite());
        // |p_60(z)| ~ |z|^60, log ~ 60 ln|z|.
        let total = lg + scaled.norm().ln();
        let expect = 60.0 * (z.norm()).ln();
        assert!((total - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn range_log_agrees_with_single_degrees() {
        let b = gaussian_basis(3, 12);
        let z = num_complex::Complex::new(0.3, 0.9);
        let vals = b.monic_range_log(2, 9, z).unwrap();
        for (off, (lg, scaled)) in vals.iter().enumerate() {
            let direct = b.monic(2 + off, z).unwrap();
            let back = scaled.scale(lg.exp());
            assert!((back - direct).norm() <= 1e-13 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn degree_out_of_range_is_reported() {
        let b = gaussian_basis(2, 3);
        let e = b.monic(4, num_complex::Complex::new(0.0, 0.0)).unwrap_err();
        match e {
            Error::DegreeOutOfRange { degree, max } => {
                assert_eq!(degree, 4);
                assert_eq!(max, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn insufficient_rule_is_rejected() {
        let p = Potential::<f64>::gaussian(2).unwrap();
        let rule = QuadratureRule::fixed_panels(&p, 6.0, 2, 8).unwrap();
        let e = OrthoBasis::from_stieltjes(&rule, 10).unwrap_err();
        assert!(matches!(e, Error::QuadratureInsufficient { degree: 10 }));
    }

    #[test]
    fn cache_round_trip() {
        let b = gaussian_basis(5, 9);
        let json = serde_json::to_string(&b.to_cache()).unwrap();
        let cache: BasisCache<f64> = serde_json::from_str(&json).unwrap();
        let p = Potential::<f64>::gaussian(5).unwrap();
        let b2 = OrthoBasis::from_cache(cache, &p).unwrap();
        for k in 0..=9 {
            assert_eq!(b.alpha(k), b2.alpha(k));
            assert_eq!(b.beta(k), b2.beta(k));
            assert_eq!(b.norm_sq(k), b2.norm_sq(k));
        }
    }

    #[test]
    fn cache_rejects_unknown_fields_and_mismatched_size() {
        let r: std::result::Result<BasisCache<f64>, _> = serde_json::from_str(
            r#"{"alpha":[0.0],"beta":[0.0],"norms_sq":[1.0],"matrix_size":2,"extra":1}"#,
        );
        assert!(r.unwrap_err().to_string().contains("extra"));
        let cache: BasisCache<f64> = serde_json::from_str(
            r#"{"alpha":[0.0],"beta":[0.0],"norms_sq":[1.0],"matrix_size":2}"#,
        )
        .unwrap();
        let p = Potential::<f64>::gaussian(3).unwrap();
        assert!(OrthoBasis::from_cache(cache, &p).is_err());
    }
}
