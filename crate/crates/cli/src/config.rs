//! The JSON run configuration: a strict schema (unknown fields are errors)
//! holding the potential, optional spectral arguments, numeric knobs, and an
//! optional output destination.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use charcorr::{Potential64, SpectralArguments64};

use crate::CliError;

/// One complex number in its explicit JSON form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexJson> for Complex<f64> {
    fn from(c: ComplexJson) -> Self {
        Complex::new(c.re, c.im)
    }
}

/// The spectral arguments as they appear in the configuration file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArgumentsJson {
    pub epsilons: Vec<ComplexJson>,
    pub mus: Vec<ComplexJson>,
}

impl ArgumentsJson {
    pub fn epsilons(&self) -> Vec<Complex<f64>> {
        self.epsilons.iter().map(|&c| c.into()).collect()
    }

    pub fn mus(&self) -> Vec<Complex<f64>> {
        self.mus.iter().map(|&c| c.into()).collect()
    }

    /// Validated core-side arguments (distinctness, off-axis poles).
    pub fn to_spectral(&self) -> Result<SpectralArguments64, CliError> {
        SpectralArguments64::new(self.epsilons(), self.mus()).map_err(CliError::input)
    }
}

/// Numeric knobs with their documented defaults.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericJson {
    pub target_tol: f64,
    pub points_per_panel: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for NumericJson {
    fn default() -> Self {
        NumericJson {
            target_tol: 1e-10,
            points_per_panel: 16,
            mc_samples: 20_000,
            seed: 1,
        }
    }
}

impl NumericJson {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.target_tol > 0.0) {
            return Err(CliError::input("numeric.target_tol must be positive"));
        }
        if self.points_per_panel == 0 {
            return Err(CliError::input("numeric.points_per_panel must be positive"));
        }
        if self.mc_samples == 0 {
            return Err(CliError::input("numeric.mc_samples must be positive"));
        }
        Ok(())
    }
}

/// The subcommand a configuration file claims to be written for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Compute,
    Verify,
    Sample,
    Rh,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Compute => "compute",
            CommandName::Verify => "verify",
            CommandName::Sample => "sample",
            CommandName::Rh => "rh",
        }
    }
}

/// A full run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Potential64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arguments: Option<ArgumentsJson>,
    #[serde(default)]
    pub numeric: NumericJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl RunConfig {
    /// Loads and validates a configuration, including the cross-check that
    /// the file was written for the subcommand actually invoked.
    pub fn load(path: &Path, invoked: CommandName) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("invalid config: {e}")))?;
        config.potential.validate().map_err(CliError::input)?;
        config.numeric.validate()?;
        if let Some(declared) = config.command {
            if declared != invoked {
                return Err(CliError::input(format!(
                    "config declares command \"{}\" but \"{}\" was invoked",
                    declared.as_str(),
                    invoked.as_str()
                )));
            }
        }
        Ok(config)
    }

    pub fn arguments(&self) -> ArgumentsJson {
        self.arguments.clone().unwrap_or_default()
    }
}
