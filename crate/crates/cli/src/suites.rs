//! The `verify` suites: each one compares library results against an
//! independent reference (exact identities, tensor quadrature of the
//! defining average, dual integral representations, boundary conditions)
//! and reports measured residuals against pinned thresholds.

use num_complex::Complex;

use charcorr::oracles::{
    brute_force_average, cauchy_littlewood_check, duality_check_general, duality_check_products,
    permutation_identity_check,
};
use charcorr::rh::{jump_residual, normalization_residual};
use charcorr::{
    avg_inverse, avg_product, correlation_general, CorrelationValue64, PotentialKind,
    SpectralArguments64,
};

use crate::config::RunConfig;
use crate::report::{CheckReport, SuiteReport};
use crate::{build_rig, CliError};

type C = Complex<f64>;

/// Which family of checks `verify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identity,
    Oracle,
    Duality,
    Rh,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::Oracle => "oracle",
            Suite::Duality => "duality",
            Suite::Rh => "rh",
            Suite::All => "all",
        }
    }
}

pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<SuiteReport, CliError> {
    let checks = match suite {
        Suite::Identity => identity_checks(config)?,
        Suite::Oracle => oracle_checks(config)?,
        Suite::Duality => duality_checks(config)?,
        Suite::Rh => rh_checks(config, 3, 1e-4)?,
        Suite::All => {
            let mut all = Vec::new();
            for sub in [Suite::Identity, Suite::Oracle, Suite::Duality, Suite::Rh] {
                for mut check in run_suite(sub, config)?.checks {
                    check.name = format!("{}/{}", sub.name(), check.name);
                    all.push(check);
                }
            }
            all
        }
    };
    Ok(SuiteReport::new(suite.name(), checks))
}

/// Relative deviation between a library value and a reference.
fn relative(value: C, reference: C) -> f64 {
    let scale = reference.norm().max(f64::MIN_POSITIVE);
    (value - reference).norm() / scale
}

fn complex_value(v: &CorrelationValue64) -> Result<C, CliError> {
    v.value
        .ok_or_else(|| CliError::input("result magnitude exceeds the double range"))
}

/// Exact algebraic identities: the subset expansion and the truncated
/// dual-series product formula.
fn identity_checks(config: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    let n = config.potential.matrix_size;
    let args = config.arguments();
    let mut eps: Vec<C> = args.epsilons();
    if eps.is_empty() {
        eps = vec![C::new(0.2, 1.1), C::new(-0.7, -0.6)];
    }
    eps.truncate(n.min(3));
    // A deterministic spread-out point set for the expansion check.
    let xs: Vec<f64> = (0..n)
        .map(|i| i as f64 - 0.5 * (n as f64 - 1.0) + 0.15 * (3.7 * i as f64).sin())
        .collect();
    let expansion = permutation_identity_check(&xs, &eps).map_err(CliError::from_core)?;

    let saturated = permutation_identity_check(
        &[0.6, -0.9, 1.4],
        &[C::new(0.1, 0.7), C::new(-0.4, 1.3), C::new(0.9, -0.8)],
    )
    .map_err(CliError::from_core)?;

    let geometric = cauchy_littlewood_check(&[0.45], &[0.5], 40).map_err(CliError::from_core)?;
    let pair =
        cauchy_littlewood_check(&[0.5, -0.3], &[0.55, 0.35], 20).map_err(CliError::from_core)?;

    Ok(vec![
        CheckReport::new("permutation-identity", expansion.rel_error, 1e-11),
        CheckReport::new("permutation-identity-saturated", saturated.rel_error, 1e-12),
        CheckReport::new("series-expansion-geometric", geometric.rel_error, 1e-12),
        CheckReport::new("series-expansion-pair", pair.rel_error, 1e-9),
    ])
}

/// Library averages against the tensor-quadrature evaluation of the
/// defining integral.
fn oracle_checks(config: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    let potential = &config.potential;
    let n = potential.matrix_size;
    let max_degree = n + 9;
    let (basis, rule) = build_rig(potential, max_degree, &config.numeric, None)?;
    let mut checks = Vec::new();

    // Probe at i rather than 0: odd-degree polynomials vanish at the origin
    // (parity), which would turn the relative residual into 0/0.
    let single = avg_product(&basis, &[C::new(0.0, 1.0)]).map_err(CliError::from_core)?;
    let single_ref =
        brute_force_average(potential, &[], &[C::new(0.0, 1.0)]).map_err(CliError::from_core)?;
    checks.push(CheckReport::new(
        "product-single",
        relative(complex_value(&single)?, single_ref.value),
        1e-8,
    ));

    if n >= 2 {
        let mus = [C::new(0.3, 0.0), C::new(0.9, 0.0)];
        let pair = avg_product(&basis, &mus).map_err(CliError::from_core)?;
        let pair_ref =
            brute_force_average(potential, &[], &mus).map_err(CliError::from_core)?;
        checks.push(CheckReport::new(
            "product-pair",
            relative(complex_value(&pair)?, pair_ref.value),
            1e-8,
        ));
    }

    let eps = C::new(0.0, 1.0);
    let inverse = avg_inverse(&basis, eps, &rule).map_err(CliError::from_core)?;
    let inverse_ref =
        brute_force_average(potential, &[eps], &[]).map_err(CliError::from_core)?;
    checks.push(CheckReport::new(
        "inverse-single",
        relative(complex_value(&inverse)?, inverse_ref.value),
        1e-7,
    ));

    if n >= 2 {
        let eps = vec![C::new(0.0, 2.0), C::new(1.0, -1.0)];
        let mus = vec![C::new(0.4, 0.0)];
        let args =
            SpectralArguments64::new(eps.clone(), mus.clone()).map_err(CliError::from_core)?;
        let mixed =
            correlation_general(&basis, &args, Some(&rule)).map_err(CliError::from_core)?;
        let mixed_ref = brute_force_average(potential, &eps, &mus).map_err(CliError::from_core)?;
        checks.push(CheckReport::new(
            "mixed-ratio",
            relative(complex_value(&mixed)?, mixed_ref.value),
            1e-6,
        ));
    }

    // Arguments from the configuration, when present, are checked verbatim.
    if let Some(args_json) = &config.arguments {
        let eps = args_json.epsilons();
        let mus = args_json.mus();
        if !eps.is_empty() || !mus.is_empty() {
            let args = args_json.to_spectral()?;
            let value =
                correlation_general(&basis, &args, Some(&rule)).map_err(CliError::from_core)?;
            let reference =
                brute_force_average(potential, &eps, &mus).map_err(CliError::from_core)?;
            checks.push(CheckReport::new(
                "configured-arguments",
                relative(complex_value(&value)?, reference.value),
                1e-6,
            ));
        }
    }

    Ok(checks)
}

/// Ratio-constancy checks of the dual integral representations.
fn duality_checks(config: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    let potential = &config.potential;
    if potential.kind != PotentialKind::Gaussian {
        return Err(CliError::input(
            "the duality suite needs the gaussian potential",
        ));
    }
    let n = potential.matrix_size;
    let max_degree = n + 9;
    let (basis, rule) = build_rig(potential, max_degree, &config.numeric, None)?;
    let mut checks = Vec::new();

    let singles = [vec![0.4], vec![-0.8], vec![1.3]];
    let single = duality_check_products(&basis, &singles).map_err(CliError::from_core)?;
    checks.push(CheckReport::new("products-single", single.spread, 1e-5));

    if n >= 2 {
        let pairs = [vec![0.4, -0.6], vec![1.1, 0.2], vec![-1.3, 0.8]];
        let pair = duality_check_products(&basis, &pairs).map_err(CliError::from_core)?;
        checks.push(CheckReport::new("products-pair", pair.spread, 1e-5));
    }

    let inverse_sets = [
        (vec![C::new(0.0, 1.0)], vec![]),
        (vec![C::new(0.3, 0.8)], vec![]),
        (vec![C::new(-0.5, 1.2)], vec![]),
    ];
    let inverse =
        duality_check_general(&basis, &rule, &inverse_sets).map_err(CliError::from_core)?;
    checks.push(CheckReport::new("general-inverse", inverse.spread, 1e-5));

    if n >= 2 {
        let mixed_sets = [
            (vec![C::new(0.0, 1.0)], vec![0.4]),
            (vec![C::new(0.5, 0.9)], vec![-0.3]),
            (vec![C::new(-0.4, 1.1)], vec![0.9]),
        ];
        let mixed =
            duality_check_general(&basis, &rule, &mixed_sets).map_err(CliError::from_core)?;
        checks.push(CheckReport::new("general-mixed", mixed.spread, 1e-5));
    }

    Ok(checks)
}

/// Boundary-condition residuals of the transform matrix: smallness and the
/// first-order decay rates in the probe offset and the circle radius.
pub fn rh_checks(
    config: &RunConfig,
    n_max: usize,
    delta: f64,
) -> Result<Vec<CheckReport>, CliError> {
    let potential = &config.potential;
    let max_degree = n_max + 8;
    let (basis, rule) = build_rig(potential, max_degree, &config.numeric, None)?;
    let nmat = potential.matrix_size as f64;
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let mut worst = 0.0f64;
        for j in 0..20 {
            let x = -1.2 + 2.4 * (j as f64) / 19.0;
            let sample = jump_residual(&basis, &rule, x, n, delta).map_err(CliError::from_core)?;
            let weight = (-nmat * potential.value(x)).exp();
            worst = worst.max(sample.residual / weight);
        }
        checks.push(CheckReport::new(format!("jump-small-n{n}"), worst, 1e-1));

        let coarse = jump_residual(&basis, &rule, 0.3, n, delta)
            .map_err(CliError::from_core)?
            .residual;
        let fine = jump_residual(&basis, &rule, 0.3, n, 0.5 * delta)
            .map_err(CliError::from_core)?
            .residual;
        let rate = coarse / fine.max(f64::MIN_POSITIVE);
        checks.push(CheckReport::new(
            format!("jump-rate-n{n}"),
            (rate - 2.0).abs(),
            0.7,
        ));

        let radius = 1e3f64.max(10.0 * (1.0 + rule.truncation_radius));
        let norm = normalization_residual(&basis, &rule, n, radius)
            .map_err(CliError::from_core)?
            .residual;
        checks.push(CheckReport::new(format!("normalization-n{n}"), norm, 1e-2));

        let far = normalization_residual(&basis, &rule, n, 2.0 * radius)
            .map_err(CliError::from_core)?
            .residual;
        let norm_rate = norm / far.max(f64::MIN_POSITIVE);
        checks.push(CheckReport::new(
            format!("normalization-rate-n{n}"),
            (norm_rate - 2.0).abs(),
            0.7,
        ));
    }
    Ok(checks)
}
