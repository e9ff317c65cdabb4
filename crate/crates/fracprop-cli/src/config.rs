//! Canonical run configuration: validated once, embedded verbatim in every
//! output header, and re-parseable from that header.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Diagonal { values: Vec<f64> },
    File { path: String },
    Grid { n: usize, length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Basis { index: usize },
    Gaussian { center: f64, width: f64 },
    File { path: String },
}

/// Everything a run needs, with optional fields absent from the serialized
/// form when a subcommand does not use them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omegas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub double: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub state: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha_sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path_preset: Option<String>,
    pub tol: f64,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn bare(subcommand: &str, tol: f64, format: OutputFormat) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            alphas: None,
            beta: None,
            times: None,
            omegas: None,
            omega_max: None,
            points: None,
            double: None,
            model: None,
            state: None,
            alpha_sweep: None,
            mode: None,
            h: None,
            t_end: None,
            path_preset: None,
            tol,
            format,
        }
    }

    pub fn to_header_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }

    /// Recover the config from a previously written output, CSV or JSON.
    pub fn from_output(text: &str) -> Result<RunConfig, CliError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Envelope {
                config: RunConfig,
            }
            let env: Envelope = serde_json::from_str(trimmed)
                .map_err(|e| CliError::config(format!("cannot parse JSON output: {e}")))?;
            return Ok(env.config);
        }
        for line in text.lines() {
            if let Some(json) = line.strip_prefix("# config: ") {
                return serde_json::from_str(json)
                    .map_err(|e| CliError::config(format!("cannot parse config header: {e}")));
            }
        }
        Err(CliError::config(
            "no config header found in output".to_string(),
        ))
    }
}

/// Validation helpers shared by the subcommands; each names the offending
/// flag so configs fail fast and specifically.
pub fn check_alpha(flag: &str, alpha: f64) -> Result<(), CliError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(CliError::config(format!(
            "{flag} must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

pub fn check_nonnegative(flag: &str, value: f64) -> Result<(), CliError> {
    if !(value >= 0.0 && value.is_finite()) {
        return Err(CliError::config(format!(
            "{flag} must be finite and >= 0, got {value}"
        )));
    }
    Ok(())
}

pub fn check_positive(flag: &str, value: f64) -> Result<(), CliError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(CliError::config(format!(
            "{flag} must be finite and > 0, got {value}"
        )));
    }
    Ok(())
}
