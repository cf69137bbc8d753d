//! Command-line front end: `compute` evaluates the configured average,
//! `sample` cross-checks it with the seeded matrix sampler, `verify` runs
//! the reference suites, and `rh` measures boundary-condition residuals.
//!
//! Exit codes: 0 for a clean result, 1 for input or capability errors, 2 for
//! results flagged as numerically unreliable (the result is still written)
//! and for failed verification checks.

mod config;
mod report;
mod suites;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use charcorr::oracles::{mc_average, McConfig};
use charcorr::orthopoly::BasisCache;
use charcorr::rh::{jump_residual, normalization_residual, ResidualSample};
use charcorr::{
    build_quadrature, correlation_general, OrthoBasis64, Potential64, PotentialKind,
    QuadratureRule64,
};

use config::{CommandName, NumericJson, RunConfig};
use report::write_json;
use suites::Suite;

/// An error destined for standard error, with the exit code it implies.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    /// Input and capability problems: exit code 1.
    pub fn input(message: impl Display) -> Self {
        CliError {
            message: message.to_string(),
            code: 1,
        }
    }

    pub fn from_core(err: charcorr::Error) -> Self {
        CliError::input(err)
    }
}

#[derive(Parser)]
#[command(
    name = "charcorr",
    version,
    about = "Averages of characteristic-polynomial products and ratios over random Hermitian ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured average of products and ratios.
    Compute(CommonArgs),
    /// Run a verification suite against independent references.
    Verify(VerifyArgs),
    /// Estimate the same average by seeded matrix sampling.
    Sample(CommonArgs),
    /// Measure the boundary-condition residuals of the transform matrix.
    Rh(RhArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output destination; `-` writes to standard output.
    #[arg(long)]
    out: Option<String>,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured tolerance target.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the recurrence-coefficient cache here after the run.
    #[arg(long)]
    dump_basis: Option<PathBuf>,
    /// Reuse a previously dumped recurrence-coefficient cache.
    #[arg(long)]
    load_basis: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which suite to run.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(Args)]
struct RhArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest transform-matrix index to probe.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Offset of the probe points from the real axis.
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Rh(args) => cmd_rh(args),
    }
}

/// Loads the config for `invoked` and applies the command-line overrides.
fn load_config(common: &CommonArgs, invoked: CommandName) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&common.config, invoked)?;
    if let Some(seed) = common.seed {
        config.numeric.seed = seed;
    }
    if let Some(tol) = common.tol {
        if !(tol > 0.0) {
            return Err(CliError::input("--tol must be positive"));
        }
        config.numeric.target_tol = tol;
    }
    Ok(config)
}

/// The output destination: `--out` wins over the configured path; absent
/// both, results go to standard output.
fn destination<'a>(common: &'a CommonArgs, config: &'a RunConfig) -> Option<&'a str> {
    common
        .out
        .as_deref()
        .or(config.output_path.as_deref())
}

/// Builds the quadrature rule and recurrence basis for `potential`, loading
/// the basis from a cache file when one is given.
pub fn build_rig(
    potential: &Potential64,
    max_degree: usize,
    numeric: &NumericJson,
    load_basis: Option<&Path>,
) -> Result<(OrthoBasis64, QuadratureRule64), CliError> {
    let mut rule = build_quadrature(potential, numeric.points_per_panel, numeric.target_tol)
        .map_err(CliError::from_core)?;
    rule.ensure_capacity(max_degree).map_err(CliError::from_core)?;
    let basis = match load_basis {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::input(format!("cannot read basis cache {}: {e}", path.display()))
            })?;
            let cache: BasisCache<f64> = serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("invalid basis cache: {e}")))?;
            OrthoBasis64::from_cache(cache, potential).map_err(CliError::from_core)?
        }
        None => match potential.kind {
            PotentialKind::Gaussian => {
                OrthoBasis64::gaussian_closed_form(potential.matrix_size, max_degree)
                    .map_err(CliError::from_core)?
            }
            PotentialKind::Polynomial => {
                OrthoBasis64::from_stieltjes(&rule, max_degree).map_err(CliError::from_core)?
            }
        },
    };
    if basis.max_degree() < max_degree {
        return Err(CliError::input(format!(
            "basis supports degrees up to {}, but {max_degree} are needed",
            basis.max_degree()
        )));
    }
    Ok((basis, rule))
}

fn dump_basis(path: &Path, basis: &OrthoBasis64) -> Result<(), CliError> {
    let body = serde_json::to_string(&basis.to_cache())
        .map_err(|e| CliError::input(format!("cannot serialize basis cache: {e}")))?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body.as_bytes())
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_compute(args: CommonArgs) -> Result<i32, CliError> {
    let config = load_config(&args, CommandName::Compute)?;
    let arguments = config.arguments();
    let spectral = arguments.to_spectral()?;
    let n = config.potential.matrix_size;
    let max_degree = n + arguments.mus.len() + 8;
    let (basis, rule) =
        build_rig(&config.potential, max_degree, &config.numeric, args.load_basis.as_deref())?;
    let value =
        correlation_general(&basis, &spectral, Some(&rule)).map_err(CliError::from_core)?;
    if let Some(path) = &args.dump_basis {
        dump_basis(path, &basis)?;
    }
    let record = value.record();
    write_json(destination(&args, &config), &record)?;
    eprintln!(
        "log-modulus {:.6e}, phase ({:.6}, {:.6}), condition {:.3e}{}",
        record.log_modulus,
        record.phase_re,
        record.phase_im,
        record.condition,
        if record.reliable { "" } else { " (unreliable)" }
    );
    Ok(if record.reliable { 0 } else { 2 })
}

fn cmd_sample(args: CommonArgs) -> Result<i32, CliError> {
    let config = load_config(&args, CommandName::Sample)?;
    if config.potential.kind != PotentialKind::Gaussian {
        return Err(CliError::input(
            "sampling draws gaussian matrices; the configured potential is not gaussian",
        ));
    }
    let arguments = config.arguments();
    let mc_config = McConfig {
        sample_count: config.numeric.mc_samples,
        seed: config.numeric.seed,
        matrix_size: config.potential.matrix_size,
    };
    let estimate = mc_average(&mc_config, &arguments.epsilons(), &arguments.mus())
        .map_err(CliError::from_core)?;
    let record = estimate.record(mc_config.seed);
    write_json(destination(&args, &config), &record)?;
    eprintln!(
        "mean ({:.6e}, {:.6e}) +/- {:.3e} from {} samples",
        record.mean_re, record.mean_im, record.std_error, record.samples
    );
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let config = load_config(&args.common, CommandName::Verify)?;
    let report = suites::run_suite(args.suite, &config)?;
    write_json(destination(&args.common, &config), &report)?;
    let passed = report.checks.iter().filter(|c| c.passed).count();
    eprintln!(
        "suite {}: {passed}/{} checks passed",
        report.suite,
        report.checks.len()
    );
    for check in report.checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "  failed {}: residual {:.6e} vs tolerance {:.1e}",
            check.name, check.residual, check.tolerance
        );
    }
    Ok(if report.passed { 0 } else { 2 })
}

fn cmd_rh(args: RhArgs) -> Result<i32, CliError> {
    let config = load_config(&args.common, CommandName::Rh)?;
    if args.n_max == 0 {
        return Err(CliError::input("--n-max must be at least 1"));
    }
    let max_degree = args.n_max + 8;
    let (basis, rule) = build_rig(
        &config.potential,
        max_degree,
        &config.numeric,
        args.common.load_basis.as_deref(),
    )?;
    let mut samples: Vec<ResidualSample<f64>> = Vec::new();
    for n in 1..=args.n_max {
        for j in 0..20 {
            let x = -1.2 + 2.4 * (j as f64) / 19.0;
            samples.push(
                jump_residual(&basis, &rule, x, n, args.delta).map_err(CliError::from_core)?,
            );
        }
    }
    let radius = 1e3f64.max(10.0 * (1.0 + rule.truncation_radius));
    for n in 1..=args.n_max {
        samples
            .push(normalization_residual(&basis, &rule, n, radius).map_err(CliError::from_core)?);
    }
    if let Some(path) = &args.common.dump_basis {
        dump_basis(path, &basis)?;
    }
    write_json(destination(&args.common, &config), &samples)?;
    let worst = samples
        .iter()
        .map(|s| s.residual)
        .fold(0.0f64, f64::max);
    eprintln!(
        "{} residual samples, worst {:.6e}",
        samples.len(),
        worst
    );
    Ok(0)
}
