//! Dual low-dimensional integral representations for the Gaussian ensemble.
//!
//! For the Gaussian weight, an N-fold ensemble average of characteristic
//! polynomial factors equals — up to one argument-independent constant — a
//! low-dimensional integral over one dual variable per factor:
//!
//! * a product factor at argument `m` contributes a dual variable on the
//!   whole real line with the factor `q^(N-M) exp(-N q^2/2) exp(i N q m)`
//!   and an outer `exp(N m^2 / 2)`;
//! * an inverse factor at `e` contributes a dual variable on the half-line
//!   pointing along `sign(Im e)` with the same kind of factor and no outer
//!   exponential;
//! * the dual variables couple through a Vandermonde product, and the whole
//!   integral is divided by the Vandermonde of each argument family.
//!
//! Because the overall constant is left free, the checks compare the ratio
//! of the determinantal evaluation to the dual integral across several
//! argument sets of the same shape: the ratio must come out the same every
//! time. That pins every argument-dependent factor on both sides.

use num_complex::Complex;

use crate::correlators::{avg_product, correlation_general, SpectralArguments};
use crate::error::{Error, Result};
use crate::orthopoly::OrthoBasis;
use crate::potential::PotentialKind;
use crate::quadrature::{composite_panels, QuadratureRule};

const BASE_PANELS: usize = 48;
const POINTS_PER_PANEL: usize = 16;

/// Ratios of determinantal to dual-integral values across argument sets, and
/// their relative spread around the mean.
#[derive(Debug, Clone)]
pub struct DualityCheck {
    pub ratios: Vec<Complex<f64>>,
    pub spread: f64,
}

impl DualityCheck {
    fn from_ratios(ratios: Vec<Complex<f64>>) -> Result<Self> {
        let mean = ratios.iter().sum::<Complex<f64>>() / ratios.len() as f64;
        if !(mean.norm() > 0.0) {
            return Err(Error::Config(
                "duality ratios have vanishing mean; arguments sit on a zero".into(),
            ));
        }
        let spread = ratios
            .iter()
            .map(|r| (*r - mean).norm())
            .fold(0.0, f64::max)
            / mean.norm();
        Ok(DualityCheck { ratios, spread })
    }
}

/// The dual integral for a mixed average (`epsilons` inverse factors,
/// `mus` product factors), up to one constant shared by every argument set
/// of the same shape.
pub fn duality_ratio_rhs(
    n: usize,
    epsilons: &[Complex<f64>],
    mus: &[f64],
) -> Result<Complex<f64>> {
    let m = epsilons.len();
    let dim = m + mus.len();
    if dim == 0 || dim > 2 {
        return Err(Error::Capability(format!(
            "the dual integral is implemented for 1 or 2 factors, got {dim}"
        )));
    }
    if m > n {
        return Err(Error::Config(format!(
            "at most matrix_size = {n} inverse factors are allowed, got {m}"
        )));
    }
    for e in epsilons {
        if !(e.im.abs() >= 0.05) {
            return Err(Error::Capability(
                "the dual integral needs |Im eps| >= 0.05 for a convergent half-line".into(),
            ));
        }
    }

    let (coarse, _) = dual_integral(n, m, epsilons, mus, BASE_PANELS)?;
    let (fine, abs_sum) = dual_integral(n, m, epsilons, mus, 3 * BASE_PANELS / 2)?;
    if (fine - coarse).norm() > 1e-8 * fine.norm() + 1e-12 * abs_sum {
        return Err(Error::AccuracyNotReached {
            previous_re: coarse.re,
            previous_im: coarse.im,
            current_re: fine.re,
            current_im: fine.im,
        });
    }

    let mut prefactor = Complex::new(1.0, 0.0);
    for &mu in mus {
        prefactor *= Complex::new((0.5 * n as f64 * mu * mu).exp(), 0.0);
    }
    for (j, &b) in mus.iter().enumerate() {
        for &a in &mus[..j] {
            prefactor /= b - a;
        }
    }
    for (j, &b) in epsilons.iter().enumerate() {
        for &a in &epsilons[..j] {
            prefactor /= b - a;
        }
    }
    Ok(prefactor * fine)
}

/// Product-only special case of [`duality_ratio_rhs`].
pub fn duality_product_rhs(n: usize, lambdas: &[f64]) -> Result<Complex<f64>> {
    duality_ratio_rhs(n, &[], lambdas)
}

/// One dual variable per slot; product slots first, then inverse slots.
/// Returns the integral and the sum of absolute term magnitudes (the
/// cancellation scale).
fn dual_integral(
    n: usize,
    m: usize,
    epsilons: &[Complex<f64>],
    mus: &[f64],
    panels: usize,
) -> Result<(Complex<f64>, f64)> {
    let q_max = {
        let nf = n as f64;
        let q0 = (110.0 / nf).sqrt();
        ((110.0 + 2.0 * nf * (1.0 + q0).ln()) / nf).sqrt()
    };
    let power = (n - m) as i32;
    // Per-slot grids with the phase factor and weight folded in.
    let mut grids: Vec<(Vec<f64>, Vec<Complex<f64>>)> = Vec::new();
    for &mu in mus {
        let (q, w) = composite_panels(-q_max, q_max, 2 * panels, POINTS_PER_PANEL);
        grids.push(slot_values(n, power, mu.into(), q, w));
    }
    for &eps in epsilons {
        // The half-line representation of 1/(x - e) runs along sign(Im e)
        // and carries +i on the upper half-plane, -i on the lower; traversing
        // the lower half-line left to right therefore flips the sign.
        let (a, b) = if eps.im > 0.0 { (0.0, q_max) } else { (-q_max, 0.0) };
        let (q, w) = composite_panels(a, b, panels, POINTS_PER_PANEL);
        let (q, mut vals) = slot_values(n, power, eps, q, w);
        if eps.im < 0.0 {
            for v in &mut vals {
                *v = -*v;
            }
        }
        grids.push((q, vals));
    }

    match grids.len() {
        1 => {
            let total: Complex<f64> = grids[0].1.iter().sum();
            let abs: f64 = grids[0].1.iter().map(|z| z.norm()).sum();
            Ok((total, abs))
        }
        2 => {
            let (q1, f1) = &grids[0];
            let (q2, f2) = &grids[1];
            let mut total = Complex::new(0.0, 0.0);
            let mut abs = 0.0f64;
            for (i, a) in f1.iter().enumerate() {
                let mut inner = Complex::new(0.0, 0.0);
                let mut inner_abs = 0.0f64;
                for (j, b) in f2.iter().enumerate() {
                    let coupling = q2[j] - q1[i];
                    inner += *b * coupling;
                    inner_abs += b.norm() * coupling.abs();
                }
                total += *a * inner;
                abs += a.norm() * inner_abs;
            }
            Ok((total, abs))
        }
        _ => unreachable!("dimension capped by the caller"),
    }
}

fn slot_values(
    n: usize,
    power: i32,
    e: Complex<f64>,
    q: Vec<f64>,
    w: Vec<f64>,
) -> (Vec<f64>, Vec<Complex<f64>>) {
    let nf = n as f64;
    let vals = q
        .iter()
        .zip(&w)
        .map(|(&qi, &wi)| {
            let phase = Complex::new(0.0, nf * qi) * e;
            Complex::new(wi * qi.powi(power) * (-0.5 * nf * qi * qi).exp(), 0.0) * phase.exp()
        })
        .collect();
    (q, vals)
}

/// Ratio-constancy check for product averages. All `lambda_sets` must have
/// the same length; the ensemble must be Gaussian.
pub fn duality_check_products(
    basis: &OrthoBasis<f64>,
    lambda_sets: &[Vec<f64>],
) -> Result<DualityCheck> {
    require_gaussian(basis)?;
    let l = expect_same_shape(lambda_sets.iter().map(|s| s.len()))?;
    if l == 0 {
        return Err(Error::Config("empty argument sets".into()));
    }
    let n = basis.matrix_size();
    let mut ratios = Vec::with_capacity(lambda_sets.len());
    for set in lambda_sets {
        let mus: Vec<Complex<f64>> = set.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let lhs = avg_product(basis, &mus)?
            .value
            .ok_or_else(|| Error::Config("product average overflowed double range".into()))?;
        let rhs = duality_product_rhs(n, set)?;
        ratios.push(lhs / rhs);
    }
    DualityCheck::from_ratios(ratios)
}

/// Ratio-constancy check for mixed averages; each set is (inverse
/// arguments, product arguments) and all sets must share the same shape.
pub fn duality_check_general(
    basis: &OrthoBasis<f64>,
    rule: &QuadratureRule<f64>,
    sets: &[(Vec<Complex<f64>>, Vec<f64>)],
) -> Result<DualityCheck> {
    require_gaussian(basis)?;
    expect_same_shape(sets.iter().map(|(e, _)| e.len()))?;
    expect_same_shape(sets.iter().map(|(_, m)| m.len()))?;
    let n = basis.matrix_size();
    let mut ratios = Vec::with_capacity(sets.len());
    for (epsilons, mus) in sets {
        let mu_args: Vec<Complex<f64>> = mus.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let args = SpectralArguments::new(epsilons.clone(), mu_args)?;
        let lhs = correlation_general(basis, &args, Some(rule))?
            .value
            .ok_or_else(|| Error::Config("mixed average overflowed double range".into()))?;
        let rhs = duality_ratio_rhs(n, epsilons, mus)?;
        ratios.push(lhs / rhs);
    }
    DualityCheck::from_ratios(ratios)
}

fn require_gaussian(basis: &OrthoBasis<f64>) -> Result<()> {
    if basis.potential().kind != PotentialKind::Gaussian {
        return Err(Error::Capability(
            "duality representations hold for the Gaussian ensemble only".into(),
        ));
    }
    Ok(())
}

fn expect_same_shape(lens: impl Iterator<Item = usize>) -> Result<usize> {
    let mut out: Option<usize> = None;
    for len in lens {
        match out {
            None => out = Some(len),
            Some(l) if l == len => {}
            Some(l) => {
                return Err(Error::Config(format!(
                    "argument sets must share one shape, got lengths {l} and {len}"
                )))
            }
        }
    }
    out.ok_or_else(|| Error::Config("at least one argument set is required".into()))
}
