//! Parsers for model and state sources: inline `diag:` lists, `n,L` grid
//! specs, `basis:`/`gaussian:` presets, and the plain-text matrix/state
//! file formats (complex entries as `re+imj` tokens).

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use fracprop::spectral::{decompose, HermitianModel, PeriodicGrid, State};
use fracprop::SpectralModel;

use crate::config::{ModelSpec, StateSpec};
use crate::error::CliError;

/// One complex token: `1.5`, `-2j`, `1e-3+0.25j`, `2-3j`.
pub fn parse_complex(token: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::config(format!("malformed complex token '{token}'"));
    let t = token.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(imag_part) = t.strip_suffix('j') {
        // find the split between real and imaginary parts: a sign that is
        // not a leading sign and not part of an exponent
        let chars: Vec<char> = imag_part.chars().collect();
        let mut split = None;
        for i in (1..chars.len()).rev() {
            if (chars[i] == '+' || chars[i] == '-')
                && chars[i - 1] != 'e'
                && chars[i - 1] != 'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = imag_part[..i].parse().map_err(|_| bad())?;
                let im_str = &imag_part[i..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if imag_part.is_empty() {
                    1.0
                } else if imag_part == "-" {
                    -1.0
                } else {
                    imag_part.parse().map_err(|_| bad())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// `diag:a1,a2,...` from the --matrix flag.
pub fn parse_diag_spec(spec: &str) -> Result<Vec<f64>, CliError> {
    let list = spec.strip_prefix("diag:").ok_or_else(|| {
        CliError::config(format!(
            "--matrix expects diag:a1,a2,... for inline models, got '{spec}'"
        ))
    })?;
    let values: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values =
        values.map_err(|_| CliError::config(format!("--matrix diagonal list '{list}' is not numeric")))?;
    if values.is_empty() {
        return Err(CliError::config("--matrix diagonal list is empty"));
    }
    Ok(values)
}

/// `n,L` from the --grid flag.
pub fn parse_grid_spec(spec: &str) -> Result<(usize, f64), CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::config(format!(
            "--grid expects n,L (points, circumference), got '{spec}'"
        )));
    }
    let n: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("--grid point count '{}' is not an integer", parts[0])))?;
    let length: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("--grid length '{}' is not numeric", parts[1])))?;
    Ok((n, length))
}

/// `basis:k`, `gaussian:center,width`, or `file:path` from the --state flag.
pub fn parse_state_spec(spec: &str) -> Result<StateSpec, CliError> {
    if let Some(idx) = spec.strip_prefix("basis:") {
        let index: usize = idx
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("--state basis index '{idx}' is not an integer")))?;
        return Ok(StateSpec::Basis { index });
    }
    if let Some(params) = spec.strip_prefix("gaussian:") {
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::config(format!(
                "--state gaussian expects gaussian:center,width, got '{spec}'"
            )));
        }
        let center: f64 = parts[0].trim().parse().map_err(|_| {
            CliError::config(format!("--state gaussian center '{}' is not numeric", parts[0]))
        })?;
        let width: f64 = parts[1].trim().parse().map_err(|_| {
            CliError::config(format!("--state gaussian width '{}' is not numeric", parts[1]))
        })?;
        if !(width > 0.0 && width.is_finite()) {
            return Err(CliError::config(format!(
                "--state gaussian width must be > 0, got {width}"
            )));
        }
        return Ok(StateSpec::Gaussian { center, width });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(StateSpec::File {
            path: path.to_string(),
        });
    }
    Err(CliError::config(format!(
        "--state expects basis:k, gaussian:center,width, or file:path, got '{spec}'"
    )))
}

/// Matrix file: first line n, then n rows of n complex tokens.
pub fn read_matrix_file(path: &Path) -> Result<HermitianModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read matrix file {path:?}: {e}")))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| CliError::config(format!("matrix file {path:?} is empty")))?
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("matrix file {path:?}: first line must be the dimension")))?;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| {
            CliError::config(format!("matrix file {path:?}: expected {n} rows, found {i}"))
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n {
            return Err(CliError::config(format!(
                "matrix file {path:?}: row {i} has {} entries, expected {n}",
                tokens.len()
            )));
        }
        for tok in tokens {
            entries.push(parse_complex(tok)?);
        }
    }
    let matrix = DMatrix::from_row_slice(n, n, &entries);
    HermitianModel::new(matrix).map_err(|e| CliError::config(format!("matrix file {path:?}: {e}")))
}

/// State file: one complex token per line.
pub fn read_state_file(path: &Path) -> Result<State, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read state file {path:?}: {e}")))?;
    let values: Result<Vec<Complex64>, CliError> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_complex)
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err(CliError::config(format!("state file {path:?} is empty")));
    }
    Ok(State::new(values))
}

/// Build the spectral model a config describes.
pub fn build_model(spec: &ModelSpec) -> Result<SpectralModel, CliError> {
    match spec {
        ModelSpec::Diagonal { values } => {
            let m = HermitianModel::diagonal(values)
                .map_err(|e| CliError::config(format!("--matrix: {e}")))?;
            let d = decompose(&m).map_err(|e| CliError::config(format!("--matrix: {e}")))?;
            Ok(SpectralModel::Matrix(d))
        }
        ModelSpec::File { path } => {
            let m = read_matrix_file(Path::new(path))?;
            let d = decompose(&m)
                .map_err(|e| CliError::config(format!("matrix file {path:?}: {e}")))?;
            Ok(SpectralModel::Matrix(d))
        }
        ModelSpec::Grid { n, length } => {
            let g = PeriodicGrid::new(*n, *length)
                .map_err(|e| CliError::config(format!("--grid: {e}")))?;
            Ok(SpectralModel::Grid(g))
        }
    }
}

/// Build the initial state a config describes, checked against the model.
pub fn build_state(spec: &StateSpec, model: &SpectralModel) -> Result<State, CliError> {
    let state = match spec {
        StateSpec::Basis { index } => State::basis(model.dim(), *index)
            .map_err(|e| CliError::config(format!("--state: {e}")))?,
        StateSpec::Gaussian { center, width } => match model {
            SpectralModel::Grid(g) => g
                .gaussian(*center, *width)
                .map_err(|e| CliError::config(format!("--state: {e}")))?,
            SpectralModel::Matrix(_) => {
                return Err(CliError::config(
                    "--state gaussian requires a --grid model".to_string(),
                ))
            }
        },
        StateSpec::File { path } => read_state_file(Path::new(path))?,
    };
    if state.dim() != model.dim() {
        return Err(CliError::config(format!(
            "--state dimension {} does not match model dimension {}",
            state.dim(),
            model.dim()
        )));
    }
    Ok(state)
}
