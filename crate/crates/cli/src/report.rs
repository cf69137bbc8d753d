//! Output plumbing: machine-readable JSON on the chosen destination, written
//! atomically when it is a file, plus the check-report types for `verify`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One verification check with its measured residual and threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            passed: residual.is_finite() && residual < tolerance,
            residual,
            tolerance,
        }
    }
}

/// The envelope emitted by `verify`: every check plus the overall verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckReport>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport {
            suite: suite.into(),
            checks,
            passed,
        }
    }
}

/// Serializes `value` compactly and writes it to `target`: standard output
/// for `-` (or no destination), otherwise a file replaced atomically via a
/// sibling temporary.
pub fn write_json<T: Serialize>(target: Option<&str>, value: &T) -> Result<(), CliError> {
    let mut body = serde_json::to_string(value)
        .map_err(|e| CliError::input(format!("cannot serialize result: {e}")))?;
    body.push('\n');
    match target {
        None | Some("-") => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::input(format!("cannot write to standard output: {e}")))
        }
        Some(path) => {
            let path = Path::new(path);
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, body.as_bytes())
                .and_then(|()| fs::rename(&tmp, path))
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
    }
}
