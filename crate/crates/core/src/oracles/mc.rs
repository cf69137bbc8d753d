//! Monte-Carlo sampling of the Gaussian unitary ensemble.
//!
//! Draws Hermitian matrices whose density is proportional to
//! `exp(-N/2 tr H^2)` — diagonal entries N(0, 1/N), off-diagonal real and
//! imaginary parts N(0, 1/2N) — and averages the characteristic-polynomial
//! statistic over their eigenvalues. Double precision only: sampling noise
//! dwarfs anything the scalar type could add.
//!
//! Sampling is split into batches, each driven by its own ChaCha stream of
//! the configured seed, so results are reproducible bit for bit for a given
//! configuration and the batch means yield a defensible standard error.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest `|Im eps|` the sampler accepts; closer to the axis the statistic
/// has fat tails and sample means stop converging.
pub const MIN_MC_IMAG: f64 = 0.5;

/// Sampling plan: total sample count, base seed, and the matrix size.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
    pub matrix_size: usize,
}

/// A Monte-Carlo estimate with its batch-based standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: Complex<f64>,
    pub std_error: f64,
    pub batches: usize,
    /// Actual number of samples drawn (`sample_count` rounded down to a
    /// multiple of the batch count).
    pub samples_used: usize,
}

impl McEstimate {
    /// The flat report form written by the command-line tool; `seed` is the
    /// base seed the estimate was drawn with.
    pub fn record(&self, seed: u64) -> McRecord {
        McRecord {
            mean_re: self.mean.re,
            mean_im: self.mean.im,
            std_error: self.std_error,
            samples: self.samples_used,
            seed,
        }
    }
}

/// Flat JSON form of an [`McEstimate`] plus the seed that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McRecord {
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Averages `prod_l det(mu_l - H) / prod_k det(eps_k - H)` over Gaussian
/// Hermitian matrices of size `config.matrix_size`.
pub fn mc_average(
    config: &McConfig,
    epsilons: &[Complex<f64>],
    mus: &[Complex<f64>],
) -> Result<McEstimate> {
    if config.matrix_size == 0 {
        return Err(Error::Config("matrix_size must be at least 1".into()));
    }
    if config.sample_count < 10 {
        return Err(Error::Config(
            "at least 10 Monte-Carlo samples are required".into(),
        ));
    }
    for e in epsilons {
        if !(e.im.abs() >= MIN_MC_IMAG) {
            return Err(Error::Capability(format!(
                "the Monte-Carlo oracle requires |Im eps| >= {MIN_MC_IMAG}, got {}",
                e.im
            )));
        }
    }
    let n = config.matrix_size;
    let batches = config.sample_count.min((config.sample_count / 1000).max(10));
    let per_batch = config.sample_count / batches;
    let diag = Normal::new(0.0, (1.0 / n as f64).sqrt()).expect("finite std");
    let off = Normal::new(0.0, (1.0 / (2.0 * n as f64)).sqrt()).expect("finite std");

    let mut batch_means = Vec::with_capacity(batches);
    for b in 0..batches {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b as u64 + 1);
        let mut sum = Complex::new(0.0, 0.0);
        for _ in 0..per_batch {
            let h = gue_matrix(n, &mut rng, &diag, &off);
            let eigen = h.symmetric_eigen();
            let mut log_stat = Complex::new(0.0, 0.0);
            for &lambda in eigen.eigenvalues.iter() {
                for mu in mus {
                    log_stat += (mu - lambda).ln();
                }
                for eps in epsilons {
                    log_stat -= (eps - lambda).ln();
                }
            }
            sum += log_stat.exp();
        }
        batch_means.push(sum / per_batch as f64);
    }
    let mean = batch_means.iter().sum::<Complex<f64>>() / batches as f64;
    let var = batch_means
        .iter()
        .map(|m| (*m - mean).norm_sqr())
        .sum::<f64>()
        / (batches as f64 * (batches as f64 - 1.0));
    Ok(McEstimate {
        mean,
        std_error: var.sqrt(),
        batches,
        samples_used: batches * per_batch,
    })
}

/// One Hermitian sample with the `exp(-N/2 tr H^2)` density.
pub(crate) fn gue_matrix(
    n: usize,
    rng: &mut impl Rng,
    diag: &Normal<f64>,
    off: &Normal<f64>,
) -> DMatrix<Complex<f64>> {
    let mut h = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex::new(diag.sample(rng), 0.0);
        for j in i + 1..n {
            let z = Complex::new(off.sample(rng), off.sample(rng));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}
