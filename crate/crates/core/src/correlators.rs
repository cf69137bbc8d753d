//! Ensemble averages of products and ratios of characteristic polynomials.
//!
//! For `M` inverse factors at arguments `e_1..e_M` (off the real axis) and
//! `L` direct factors at `m_1..m_L`, the average equals
//!
//! ```text
//!   product of gamma_j for j = N-M .. N-1
//!   ------------------------------------- * det W
//!        Delta(m-set) * Delta(e-set)
//! ```
//!
//! where `W` is the `(M+L) x (M+L)` matrix whose first `M` rows hold the
//! Cauchy transforms `h_k(e_i)` and whose last `L` rows hold the polynomials
//! `p_k(m_l)`, the degree `k` running over `N-M .. N+L-1` across the columns,
//! and `Delta` is the Vandermonde product of each argument family. Matrix
//! entries vary over hundreds of orders of magnitude, so the determinant is
//! taken after exact column and row rescalings whose logs are added back at
//! the end; results are reported in log-magnitude form with the LU diagonal
//! ratio as a conditioning estimate.

use num_complex::Complex;

use crate::cauchy::{cauchy_profile, cauchy_transform, check_off_axis, CauchyQuery};
use crate::error::{Error, Result};
use crate::logdet::{log_det_lu, log_vandermonde, LogComplex};
use crate::orthopoly::OrthoBasis;
use crate::quadrature::QuadratureRule;
use crate::scalar::{as_f64, real, Real};
use serde::{Deserialize, Serialize};

/// Relative separation below which two arguments of one family are treated
/// as coincident.
const SEPARATION: f64 = 1e-10;

/// Conditioning ratio below which a determinant is flagged unreliable.
const RELIABLE_RCOND: f64 = 1e-13;

/// Validated argument sets: `epsilons` for inverse factors (each off the
/// real axis), `mus` for direct factors.
#[derive(Debug, Clone)]
pub struct SpectralArguments<T: Real> {
    epsilons: Vec<Complex<T>>,
    mus: Vec<Complex<T>>,
}

impl<T: Real> SpectralArguments<T> {
    pub fn new(epsilons: Vec<Complex<T>>, mus: Vec<Complex<T>>) -> Result<Self> {
        for &e in &epsilons {
            check_off_axis(e)?;
        }
        for (name, family) in [("epsilon", &epsilons), ("mu", &mus)] {
            let scale = T::one()
                + family
                    .iter()
                    .map(|z| z.norm())
                    .fold(T::zero(), |a, b| a.max(b));
            let gap = real::<T>(SEPARATION) * scale;
            for j in 1..family.len() {
                for i in 0..j {
                    if (family[j] - family[i]).norm() <= gap {
                        return Err(Error::DegenerateArguments { family: name, i, j });
                    }
                }
            }
        }
        Ok(SpectralArguments { epsilons, mus })
    }

    pub fn epsilons(&self) -> &[Complex<T>] {
        &self.epsilons
    }

    pub fn mus(&self) -> &[Complex<T>] {
        &self.mus
    }
}

/// An average in log-magnitude form.
///
/// `value` is the materialized complex number when `exp(log_modulus)` fits
/// the scalar range, `None` when only the log form is representable.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationValue<T: Real> {
    pub log_modulus: T,
    pub phase: Complex<T>,
    pub value: Option<Complex<T>>,
    /// LU diagonal ratio `min|u_ii| / max|u_ii|` of the rescaled matrix;
    /// 1 for determinant-free cases.
    pub condition_estimate: T,
    /// Log-magnitude of the scalar prefactor (gamma products over
    /// Vandermonde factors), kept for diagnostics.
    pub prefactor_log: T,
}

impl<T: Real> CorrelationValue<T> {
    fn from_log(log: LogComplex<T>, condition_estimate: T, prefactor_log: T) -> Self {
        let value = if log.representable() || log.log_modulus == T::neg_infinity() {
            Some(log.to_complex())
        } else {
            None
        };
        CorrelationValue {
            log_modulus: log.log_modulus,
            phase: log.phase,
            value,
            condition_estimate,
            prefactor_log,
        }
    }

    /// Whether the conditioning of the underlying determinant leaves the
    /// digits trustworthy.
    pub fn reliable(&self) -> bool {
        self.condition_estimate >= real(RELIABLE_RCOND) && self.condition_estimate.is_finite()
    }

    /// The flat report form written by the command-line tool.
    pub fn record(&self) -> CorrelationRecord {
        CorrelationRecord {
            log_modulus: as_f64(self.log_modulus),
            phase_re: as_f64(self.phase.re),
            phase_im: as_f64(self.phase.im),
            value_re: self.value.map(|v| as_f64(v.re)),
            value_im: self.value.map(|v| as_f64(v.im)),
            condition: as_f64(self.condition_estimate),
            reliable: self.reliable(),
        }
    }
}

/// Flat JSON form of a [`CorrelationValue`]: complex parts are split into
/// `_re`/`_im` fields, and `value_re`/`value_im` are null when the magnitude
/// does not fit the double range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationRecord {
    pub log_modulus: f64,
    pub phase_re: f64,
    pub phase_im: f64,
    pub value_re: Option<f64>,
    pub value_im: Option<f64>,
    pub condition: f64,
    pub reliable: bool,
}

/// The general mixed average over the ensemble described by `basis`.
///
/// `rule` is only needed when inverse factors are present (their Cauchy
/// transforms are integrals); pure products pass `None`.
pub fn correlation_general<T: Real>(
    basis: &OrthoBasis<T>,
    args: &SpectralArguments<T>,
    rule: Option<&QuadratureRule<T>>,
) -> Result<CorrelationValue<T>> {
    let n = basis.matrix_size();
    let m = args.epsilons.len();
    let l = args.mus.len();
    if m > n {
        return Err(Error::Config(format!(
            "at most matrix_size = {n} inverse factors are allowed, got {m}"
        )));
    }
    if l > n {
        return Err(Error::Config(format!(
            "at most matrix_size = {n} product factors are allowed, got {l}"
        )));
    }
    if m + l == 0 {
        return Ok(CorrelationValue::from_log(LogComplex::one(), T::one(), T::zero()));
    }
    let lo = n - m;
    let hi = n + l - 1;
    if hi > basis.max_degree() {
        return Err(Error::DegreeOutOfRange {
            degree: hi,
            max: basis.max_degree(),
        });
    }
    let dim = m + l;

    // Assemble entries in (log, phase) form: h rows then polynomial rows.
    let mut entries = vec![LogComplex::<T>::zero(); dim * dim];
    if m > 0 {
        let rule = rule.ok_or_else(|| {
            Error::Config("a quadrature rule is required when inverse factors are present".into())
        })?;
        for (i, &eps) in args.epsilons.iter().enumerate() {
            let row = cauchy_profile(basis, lo, hi, eps, rule)?;
            for (j, cv) in row.iter().enumerate() {
                entries[i * dim + j] = LogComplex::from_complex(cv.value);
            }
        }
    }
    for (i, &mu) in args.mus.iter().enumerate() {
        let row = basis.monic_range_log(lo, hi, mu)?;
        for (j, &(log_scale, scaled)) in row.iter().enumerate() {
            entries[(m + i) * dim + j] = LogComplex::from_complex(scaled).scale_log(log_scale);
        }
    }

    // Column balance: divide column j by the norm c_{lo+j}, a scale sitting
    // between the decay of the transforms and the growth of the polynomials.
    let mut restore_log = T::zero();
    for j in 0..dim {
        let sigma = basis.norm_sq_log(lo + j) / real(2.0);
        for i in 0..dim {
            entries[i * dim + j] = entries[i * dim + j].scale_log(-sigma);
        }
        restore_log = restore_log + sigma;
    }
    // Row normalization: pull out each row's largest magnitude so the LU
    // works on entries of order one.
    for i in 0..dim {
        let rho = (0..dim)
            .map(|j| entries[i * dim + j].log_modulus)
            .filter(|l| l.is_finite())
            .fold(T::neg_infinity(), |a, b| a.max(b));
        if rho.is_finite() {
            for j in 0..dim {
                entries[i * dim + j] = entries[i * dim + j].scale_log(-rho);
            }
            restore_log = restore_log + rho;
        }
    }
    let mut matrix: Vec<Complex<T>> = entries.iter().map(|e| e.to_complex()).collect();
    let (det, rcond) = log_det_lu(&mut matrix, dim);

    // Prefactor: gamma_{N-M} .. gamma_{N-1} over both Vandermonde products.
    let mut prefactor = LogComplex::one();
    for j in lo..n {
        prefactor = prefactor
            * LogComplex {
                log_modulus: basis.gamma_log_modulus(j)?,
                phase: Complex::new(T::zero(), -T::one()),
            };
    }
    prefactor = prefactor / log_vandermonde(&args.mus);
    prefactor = prefactor / log_vandermonde(&args.epsilons);
    // The pole-family difference product carries the opposite orientation,
    // `prod_{i<j} (e_i - e_j)`: the transforms decay as
    // `h_k(e) ~ 1/(gamma_k e^{k+1})`, and matching the determinant's
    // large-argument limit against the product of single-pole averages fixes
    // that ordering. `log_vandermonde` is ascending, so compensate the sign.
    if m >= 2 && (m * (m - 1) / 2) % 2 == 1 {
        prefactor.phase = -prefactor.phase;
    }

    let total = (det.scale_log(restore_log)) * prefactor;
    Ok(CorrelationValue::from_log(
        total,
        rcond,
        prefactor.log_modulus,
    ))
}

/// Average of a pure product of characteristic polynomials — the `M = 0`
/// reduction of [`correlation_general`], which needs no integration.
pub fn avg_product<T: Real>(
    basis: &OrthoBasis<T>,
    mus: &[Complex<T>],
) -> Result<CorrelationValue<T>> {
    let args = SpectralArguments::new(Vec::new(), mus.to_vec())?;
    correlation_general(basis, &args, None)
}

/// Average of a single inverse factor: `gamma_{N-1} h_{N-1}(epsilon)`,
/// evaluated directly without any determinant.
pub fn avg_inverse<T: Real>(
    basis: &OrthoBasis<T>,
    epsilon: Complex<T>,
    rule: &QuadratureRule<T>,
) -> Result<CorrelationValue<T>> {
    let n = basis.matrix_size();
    let query = CauchyQuery::new(basis, n - 1, epsilon)?;
    let h = cauchy_transform(&query, rule)?;
    let gamma_log = basis.gamma_log_modulus(n - 1)?;
    let total = LogComplex {
        log_modulus: gamma_log,
        phase: Complex::new(T::zero(), -T::one()),
    } * LogComplex::from_complex(h.value);
    Ok(CorrelationValue::from_log(total, T::one(), gamma_log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use crate::quadrature::build_quadrature;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn setup(n: usize, d: usize) -> (OrthoBasis<f64>, QuadratureRule<f64>) {
        let p = Potential::<f64>::gaussian(n).unwrap();
        let rule = build_quadrature(&p, 16, 1e-10).unwrap();
        let basis = OrthoBasis::gaussian_closed_form(n, d).unwrap();
        (basis, rule)
    }

    #[test]
    fn no_factors_is_exactly_one() {
        let (basis, _) = setup(3, 5);
        let args = SpectralArguments::new(vec![], vec![]).unwrap();
        let v = correlation_general(&basis, &args, None).unwrap();
        assert_eq!(v.log_modulus, 0.0);
        assert_eq!(v.value, Some(c(1.0, 0.0)));
        assert!(v.reliable());
    }

    #[test]
    fn single_product_is_the_monic_polynomial() {
        let (basis, _) = setup(4, 6);
        for &mu in &[c(0.35, 0.0), c(-1.2, 0.4)] {
            let v = avg_product(&basis, &[mu]).unwrap();
            let expect = basis.monic(4, mu).unwrap();
            let got = v.value.unwrap();
            assert!((got - expect).norm() < 1e-12 * expect.norm().max(1e-6));
        }
    }

    #[test]
    fn pair_product_matches_hand_formula() {
        // For N = 2 the pair average is the 2x2 determinant of degree-2 and
        // degree-3 polynomials over the Vandermonde factor; spell those out
        // with literal coefficients (x^2 - 1/2 and x^3 - 3x/2).
        let (basis, _) = setup(2, 4);
        let (m1, m2) = (0.5, -0.3);
        let v = avg_product(&basis, &[c(m1, 0.0), c(m2, 0.0)]).unwrap();
        let p2 = |x: f64| x * x - 0.5;
        let p3 = |x: f64| x * x * x - 1.5 * x;
        let expect = (p2(m1) * p3(m2) - p2(m2) * p3(m1)) / (m2 - m1);
        let got = v.value.unwrap();
        assert!((got.re - expect).abs() < 1e-12, "{} vs {expect}", got.re);
        assert!(got.im.abs() < 1e-14);
    }

    #[test]
    fn single_inverse_routes_agree() {
        let (basis, rule) = setup(3, 8);
        let eps = c(0.7, 1.1);
        let direct = avg_inverse(&basis, eps, &rule).unwrap();
        let args = SpectralArguments::new(vec![eps], vec![]).unwrap();
        let general = correlation_general(&basis, &args, Some(&rule)).unwrap();
        let a = direct.value.unwrap();
        let b = general.value.unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn argument_order_is_immaterial() {
        let (basis, rule) = setup(4, 10);
        let e1 = c(0.4, 0.9);
        let e2 = c(-0.8, -1.5);
        let mus = [c(0.2, 0.0), c(1.1, 0.0), c(-0.6, 0.0)];
        let a = correlation_general(
            &basis,
            &SpectralArguments::new(vec![e1, e2], mus.to_vec()).unwrap(),
            Some(&rule),
        )
        .unwrap();
        let b = correlation_general(
            &basis,
            &SpectralArguments::new(vec![e2, e1], vec![mus[2], mus[0], mus[1]]).unwrap(),
            Some(&rule),
        )
        .unwrap();
        let va = a.value.unwrap();
        let vb = b.value.unwrap();
        assert!((va - vb).norm() < 1e-11 * va.norm(), "{va} vs {vb}");
    }

    #[test]
    fn coincident_arguments_are_rejected() {
        let err = SpectralArguments::<f64>::new(vec![], vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap_err();
        match err {
            Error::DegenerateArguments { family, i, j } => {
                assert_eq!(family, "mu");
                assert_eq!((i, j), (0, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(SpectralArguments::<f64>::new(vec![c(1.0, 1e-12)], vec![]).is_err());
    }

    #[test]
    fn too_many_inverse_factors_is_an_error() {
        let (basis, rule) = setup(2, 8);
        let args = SpectralArguments::new(
            vec![c(0.0, 1.0), c(0.5, 1.0), c(1.0, 1.0)],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            correlation_general(&basis, &args, Some(&rule)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn missing_rule_for_inverse_factors_is_an_error() {
        let (basis, _) = setup(2, 8);
        let args = SpectralArguments::new(vec![c(0.0, 1.0)], vec![]).unwrap();
        assert!(matches!(
            correlation_general(&basis, &args, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn mixed_average_is_finite_and_reliable() {
        let (basis, rule) = setup(6, 16);
        let args = SpectralArguments::new(
            vec![c(0.3, 0.8), c(-0.5, -1.2)],
            vec![c(0.9, 0.0), c(-0.2, 0.0), c(1.4, 0.0)],
        )
        .unwrap();
        let v = correlation_general(&basis, &args, Some(&rule)).unwrap();
        let val = v.value.expect("representable at this scale");
        assert!(val.re.is_finite() && val.im.is_finite());
        assert!(val.norm() > 0.0);
        assert!(v.reliable(), "rcond = {}", v.condition_estimate);
        assert!(v.log_modulus.is_finite());
        assert!((v.phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_dimension_stays_in_log_form() {
        // Push the magnitudes far out with many product slots at large
        // arguments; the log form must stay finite even if `value` does.
        let (basis, _) = setup(12, 40);
        let mus: Vec<C> = (0..12).map(|i| c(30.0 + 3.0 * i as f64, 0.0)).collect();
        let v = avg_product(&basis, &mus).unwrap();
        assert!(v.log_modulus.is_finite());
        assert!(v.log_modulus > 100.0, "log {}", v.log_modulus);
        assert!((v.phase.norm() - 1.0).abs() < 1e-12);
    }
}
