//! Cauchy transforms of the orthogonal polynomials off the real axis.
//!
//! The central object is
//! `h_k(e) = (1 / 2 pi i) * integral of p_k(x) exp(-N V(x)) / (x - e) dx`
//! for complex `e` with nonzero imaginary part. Two evaluation routes cover
//! the plane:
//!
//! * close to the spectrum, quadrature on a rule whose panels are
//!   geometrically graded toward `Re e`, refined until two consecutive
//!   refinement levels agree;
//! * far outside (`|e| >= 2 * truncation radius`), a descending series in
//!   `1/e` built from the weighted moments of the polynomials. Direct
//!   quadrature is useless there — the integrand's sign oscillations cancel
//!   to below machine noise — which is why the series route exists.
//!
//! Every result carries an error estimate that includes the cancellation
//! floor `machine epsilon * sum |w p_k / (x - e)|`, so a caller can tell when
//! a value is noise-dominated.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::orthopoly::OrthoBasis;
use crate::quadrature::QuadratureRule;
use crate::scalar::{as_f64, real, Real};

const MAX_REFINEMENT_LEVELS: usize = 6;

/// Smallest `|Im e|` accepted at a given `Re e`; poles closer to the axis
/// than this cannot be resolved reliably.
pub fn min_imag_threshold<T: Real>(re: T) -> T {
    real::<T>(1e-8) * (T::one() + re.abs())
}

/// A validated request for `h_degree(epsilon)` on a given basis.
#[derive(Debug, Clone, Copy)]
pub struct CauchyQuery<'a, T: Real> {
    basis: &'a OrthoBasis<T>,
    degree: usize,
    epsilon: Complex<T>,
}

impl<'a, T: Real> CauchyQuery<'a, T> {
    pub fn new(basis: &'a OrthoBasis<T>, degree: usize, epsilon: Complex<T>) -> Result<Self> {
        if degree > basis.max_degree() {
            return Err(Error::DegreeOutOfRange {
                degree,
                max: basis.max_degree(),
            });
        }
        check_off_axis(epsilon)?;
        Ok(CauchyQuery {
            basis,
            degree,
            epsilon,
        })
    }

    pub fn basis(&self) -> &'a OrthoBasis<T> {
        self.basis
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn epsilon(&self) -> Complex<T> {
        self.epsilon
    }
}

/// One evaluated transform: the value, an error estimate that is honest
/// about cancellation, and how many refinement levels were spent.
#[derive(Debug, Clone, Copy)]
pub struct CauchyValue<T: Real> {
    pub value: Complex<T>,
    pub estimated_error: T,
    pub refinement_level: usize,
}

pub(crate) fn check_off_axis<T: Real>(epsilon: Complex<T>) -> Result<()> {
    let threshold = min_imag_threshold(epsilon.re);
    if !(epsilon.im.abs() >= threshold) || !epsilon.re.is_finite() || !epsilon.im.is_finite() {
        return Err(Error::NearRealAxis {
            im: as_f64(epsilon.im),
            threshold: as_f64(threshold),
        });
    }
    Ok(())
}

/// `h_k(e)` for the single degree of `query`.
pub fn cauchy_transform<T: Real>(
    query: &CauchyQuery<'_, T>,
    rule: &QuadratureRule<T>,
) -> Result<CauchyValue<T>> {
    let mut v = cauchy_profile(query.basis, query.degree, query.degree, query.epsilon, rule)?;
    Ok(v.pop().expect("profile of one degree"))
}

/// `h_k(e)` for every `k` in `lo..=hi`, sharing one refinement cascade.
pub fn cauchy_profile<T: Real>(
    basis: &OrthoBasis<T>,
    lo: usize,
    hi: usize,
    epsilon: Complex<T>,
    rule: &QuadratureRule<T>,
) -> Result<Vec<CauchyValue<T>>> {
    if lo > hi {
        return Err(Error::Config(format!("empty degree range {lo}..={hi}")));
    }
    if hi > basis.max_degree() {
        return Err(Error::DegreeOutOfRange {
            degree: hi,
            max: basis.max_degree(),
        });
    }
    check_off_axis(epsilon)?;
    if epsilon.norm() >= real::<T>(2.0) * rule.truncation_radius {
        let bands = moment_bands(basis);
        let mut out: Vec<Option<CauchyValue<T>>> = (lo..=hi)
            .map(|k| series_value(basis, &bands, k, epsilon))
            .collect();
        if out.iter().all(|v| v.is_some()) {
            return Ok(out.into_iter().map(|v| v.expect("checked")).collect());
        }
        // Degrees whose series did not settle within the available moment
        // depth fall back to quadrature; out there the estimate will be
        // dominated by the cancellation floor, and says so.
        let quad = quadrature_cascade(basis, lo, hi, epsilon, rule)?;
        for (slot, q) in out.iter_mut().zip(quad) {
            if slot.is_none() {
                *slot = Some(q);
            }
        }
        return Ok(out.into_iter().map(|v| v.expect("filled")).collect());
    }
    quadrature_cascade(basis, lo, hi, epsilon, rule)
}

/// The weighted integral of `x^power * p_degree(x) / (epsilon - x)`, the
/// numerator-side companion of [`cauchy_transform`]. Computed by its own
/// quadrature cascade, never through `h_k`, so the two sides of the algebraic
/// relation between them stay independent.
pub fn tilde_pi<T: Real>(
    basis: &OrthoBasis<T>,
    degree: usize,
    power: usize,
    epsilon: Complex<T>,
    rule: &QuadratureRule<T>,
) -> Result<CauchyValue<T>> {
    if degree > basis.max_degree() {
        return Err(Error::DegreeOutOfRange {
            degree,
            max: basis.max_degree(),
        });
    }
    check_off_axis(epsilon)?;
    let fill = |r: &QuadratureRule<T>, vals: &mut [Complex<T>], abs: &mut [T]| -> Result<()> {
        vals[0] = Complex::new(T::zero(), T::zero());
        abs[0] = T::zero();
        for (i, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let kernel = (epsilon - Complex::new(x, T::zero())).inv();
            let p = basis.monic_real(degree, x)?;
            let xp = x.powi(power as i32);
            let t = kernel.scale(w * xp * p);
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand {
                    index: i,
                    abscissa: as_f64(x),
                });
            }
            vals[0] = vals[0] + t;
            abs[0] = abs[0] + t.norm();
        }
        Ok(())
    };
    let mut v = cascade(rule, epsilon, 1, &fill)?;
    Ok(v.pop().expect("single component"))
}

/// Quadrature route for a whole degree range, one cascade for all degrees.
fn quadrature_cascade<T: Real>(
    basis: &OrthoBasis<T>,
    lo: usize,
    hi: usize,
    epsilon: Complex<T>,
    rule: &QuadratureRule<T>,
) -> Result<Vec<CauchyValue<T>>> {
    let count = hi - lo + 1;
    let fill = |r: &QuadratureRule<T>, vals: &mut [Complex<T>], abs: &mut [T]| -> Result<()> {
        for v in vals.iter_mut() {
            *v = Complex::new(T::zero(), T::zero());
        }
        for a in abs.iter_mut() {
            *a = T::zero();
        }
        for (i, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let kernel = (Complex::new(x, T::zero()) - epsilon).inv();
            let mut prev = T::zero();
            let mut cur = T::one();
            for j in 0..=hi {
                if j >= lo {
                    let t = kernel.scale(w * cur);
                    if !(t.re.is_finite() && t.im.is_finite()) {
                        return Err(Error::NonFiniteIntegrand {
                            index: i,
                            abscissa: as_f64(x),
                        });
                    }
                    vals[j - lo] = vals[j - lo] + t;
                    abs[j - lo] = abs[j - lo] + t.norm();
                }
                if j < hi {
                    let next = (x - basis.alpha(j)) * cur - basis.beta(j) * prev;
                    prev = cur;
                    cur = next;
                }
            }
        }
        Ok(())
    };
    let values = cascade(rule, epsilon, count, &fill)?;
    // 1 / (2 pi i) = -i / (2 pi): fold the prefactor into value and error.
    let scale = Complex::new(T::zero(), -(T::one() / (real::<T>(2.0) * T::PI())));
    let mag = T::one() / (real::<T>(2.0) * T::PI());
    Ok(values
        .into_iter()
        .map(|v| CauchyValue {
            value: v.value * scale,
            estimated_error: v.estimated_error * mag,
            refinement_level: v.refinement_level,
        })
        .collect())
}

/// Runs `fill` on successively graded refinements of `rule` until two levels
/// agree within the relative target plus the per-component cancellation
/// floor.
fn cascade<T: Real>(
    rule: &QuadratureRule<T>,
    epsilon: Complex<T>,
    count: usize,
    fill: &dyn Fn(&QuadratureRule<T>, &mut [Complex<T>], &mut [T]) -> Result<()>,
) -> Result<Vec<CauchyValue<T>>> {
    let target = T::epsilon().powf(real(0.7));
    let im = epsilon.im.abs();
    // Pave only [Re e - |Im e|, Re e + |Im e|] at the finest width; the
    // grading outside the window already keeps panel width proportional to
    // the distance from the pole, which Gauss-Legendre resolves at machine
    // precision.
    let window = im;
    let mut vals = vec![Complex::new(T::zero(), T::zero()); count];
    let mut abs = vec![T::zero(); count];
    fill(rule, &mut vals, &mut abs)?;
    let mut prev_vals = vals.clone();
    let mut prev_abs = abs.clone();
    let mut prev_len = rule.len();
    for level in 1..=MAX_REFINEMENT_LEVELS {
        let min_width = im / real::<T>(4.0).powi(level as i32);
        let refined = rule.refine_near(epsilon.re, window, min_width)?;
        if refined.len() == prev_len {
            // Nothing split further: the previous level already resolved the
            // pole, and the only residual uncertainty is the cancellation
            // floor.
            return Ok(prev_vals
                .iter()
                .zip(&prev_abs)
                .map(|(&v, &a)| CauchyValue {
                    value: v,
                    estimated_error: T::epsilon() * a,
                    refinement_level: level - 1,
                })
                .collect());
        }
        fill(&refined, &mut vals, &mut abs)?;
        let mut all_ok = true;
        for c in 0..count {
            let floor = T::epsilon() * abs[c];
            let diff = (vals[c] - prev_vals[c]).norm();
            if diff > target * vals[c].norm() + floor {
                all_ok = false;
                break;
            }
        }
        if all_ok {
            return Ok(vals
                .iter()
                .zip(&prev_vals)
                .zip(&abs)
                .map(|((&v, &p), &a)| CauchyValue {
                    value: v,
                    estimated_error: (v - p).norm().max(T::epsilon() * a),
                    refinement_level: level,
                })
                .collect());
        }
        prev_vals.copy_from_slice(&vals);
        prev_abs.copy_from_slice(&abs);
        prev_len = refined.len();
    }
    let mut worst = 0;
    let mut worst_diff = T::zero();
    for c in 0..count {
        let d = (vals[c] - prev_vals[c]).norm();
        if d >= worst_diff {
            worst = c;
            worst_diff = d;
        }
    }
    Err(Error::AccuracyNotReached {
        previous_re: as_f64(prev_vals[worst].re),
        previous_im: as_f64(prev_vals[worst].im),
        current_re: as_f64(vals[worst].re),
        current_im: as_f64(vals[worst].im),
    })
}

/// Weighted moments `m[d][k] = integral of p_k(x) x^(k+d) exp(-N V) dx`,
/// band by band.
///
/// Band 0 is the vector of squared norms; higher bands follow from the
/// three-term recurrence applied inside the integral,
/// `m[d][k] = m[d-2][k+1] + alpha_k m[d-1][k] + beta_k m[d][k-1]`.
/// Band `d` is computable for `k <= max_degree - ceil(d/2)`, which limits the
/// usable series depth for the top degrees.
pub(crate) fn moment_bands<T: Real>(basis: &OrthoBasis<T>) -> Vec<Vec<T>> {
    let maxdeg = basis.max_degree();
    let mut bands: Vec<Vec<T>> = Vec::with_capacity(2 * maxdeg + 1);
    bands.push((0..=maxdeg).map(|k| basis.norm_sq(k)).collect());
    for d in 1..=(2 * maxdeg) {
        let len = maxdeg + 1 - d.div_ceil(2);
        let mut band = Vec::with_capacity(len);
        for k in 0..len {
            let from_above = if d >= 2 { bands[d - 2][k + 1] } else { T::zero() };
            let diag = basis.alpha(k) * bands[d - 1][k];
            let below = if k > 0 {
                basis.beta(k) * band[k - 1]
            } else {
                T::zero()
            };
            band.push(from_above + diag + below);
        }
        bands.push(band);
    }
    bands
}

/// Descending series for `h_k(e)`; `None` when the available moment depth is
/// exhausted before the terms sink below machine precision.
fn series_value<T: Real>(
    basis: &OrthoBasis<T>,
    bands: &[Vec<T>],
    k: usize,
    epsilon: Complex<T>,
) -> Option<CauchyValue<T>> {
    let maxdeg = basis.max_degree();
    let depth = 2 * (maxdeg - k);
    let inv = epsilon.inv();
    let mut s = Complex::new(T::zero(), T::zero());
    let mut abs_s = T::zero();
    let mut zpow = Complex::new(T::one(), T::zero());
    let mut run = 0usize;
    let mut last_term = T::zero();
    let mut converged = false;
    for band in bands.iter().take(depth + 1) {
        let term = zpow.scale(band[k]);
        s = s + term;
        abs_s = abs_s + term.norm();
        last_term = term.norm();
        if last_term <= T::epsilon() * abs_s.max(T::min_positive_value()) {
            run += 1;
            if run >= 2 {
                converged = true;
                break;
            }
        } else {
            run = 0;
        }
        zpow = zpow * inv;
    }
    if !converged {
        return None;
    }
    // Prefactor i / (2 pi e^{k+1}); the power is a plain product chain so the
    // whole route commutes with complex conjugation of `e`.
    let mut pref = Complex::new(T::zero(), T::one() / (real::<T>(2.0) * T::PI()));
    for _ in 0..=k {
        pref = pref * inv;
    }
    let pref_mag = pref.norm();
    Some(CauchyValue {
        value: pref * s,
        estimated_error: (last_term * real(2.0) + T::epsilon() * abs_s) * pref_mag,
        refinement_level: 0,
    })
}
