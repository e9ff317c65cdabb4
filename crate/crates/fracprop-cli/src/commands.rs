//! Subcommand implementations: each validates its config, runs the library,
//! and produces a [`Table`].

use num_complex::Complex64;

use fracprop::fracops::{self, SampledPath, TimeGrid};
use fracprop::mlf::{self, Method, RayPoint};
use fracprop::propagator::{alpha_sweep, SolutionFamily};
use fracprop::spectral::inner;
use fracprop::{FractionalOrder, SpectralModel, State};

use crate::config::{check_alpha, check_nonnegative, check_positive, RunConfig};
use crate::error::CliError;
use crate::inputs::{build_model, build_state};
use crate::table::{Cell, Table};

fn order_for(flag: &str, alpha: f64) -> Result<FractionalOrder, CliError> {
    check_alpha(flag, alpha)?;
    FractionalOrder::new(alpha).map_err(|e| CliError::config(format!("{flag}: {e}")))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Series => "series",
        Method::Integral => "integral",
        Method::Exact => "exact",
    }
}

/// ml-eval: rows (alpha, t, omega, re, im, modulus, method, err_est) over
/// the cartesian grid of the three flag lists, in flag order.
pub fn cmd_ml_eval(config: &RunConfig) -> Result<Table, CliError> {
    let alphas = config.alphas.as_ref().expect("set by parser");
    let times = config.times.as_ref().expect("set by parser");
    let omegas = config.omegas.as_ref().expect("set by parser");
    for &a in alphas {
        check_alpha("--alpha", a)?;
    }
    for &t in times {
        check_nonnegative("--t", t)?;
    }
    for &w in omegas {
        check_nonnegative("--omega", w)?;
    }
    check_positive("--tol", config.tol)?;

    let mut table = Table::new(vec![
        "alpha", "t", "omega", "re", "im", "modulus", "method", "err_est",
    ]);
    for &alpha in alphas {
        let order = order_for("--alpha", alpha)?;
        for &t in times {
            for &omega in omegas {
                let point = RayPoint::new(order, t, omega)
                    .map_err(|e| CliError::config(format!("--t/--omega: {e}")))?;
                let v = mlf::ml_ray_with(point, config.tol).map_err(|e| {
                    CliError::numeric(format!(
                        "ml-eval failed at alpha={alpha}, t={t}, omega={omega}: {e}"
                    ))
                })?;
                table.push(vec![
                    Cell::Float(alpha),
                    Cell::Float(t),
                    Cell::Float(omega),
                    Cell::Float(v.value.re),
                    Cell::Float(v.value.im),
                    Cell::Float(v.value.norm()),
                    Cell::Text(method_name(v.method).to_string()),
                    Cell::Float(v.err_est),
                ]);
            }
        }
    }
    Ok(table)
}

/// bound-sweep: rows (alpha, omega_max, sup_modulus, argmax_omega); with
/// --double, comparison rows at twice the range follow the base rows.
pub fn cmd_bound_sweep(config: &RunConfig) -> Result<Table, CliError> {
    let alphas = config.alphas.as_ref().expect("set by parser");
    let omega_max = config.omega_max.expect("set by parser");
    let points = config.points.expect("set by parser");
    for &a in alphas {
        check_alpha("--alpha", a)?;
    }
    check_positive("--omega-max", omega_max)?;
    if points < 2 {
        return Err(CliError::config(format!(
            "--points must be at least 2, got {points}"
        )));
    }

    let mut ranges = vec![omega_max];
    if config.double == Some(true) {
        ranges.push(2.0 * omega_max);
    }
    let mut table = Table::new(vec!["alpha", "omega_max", "sup_modulus", "argmax_omega"]);
    for &range in &ranges {
        for &alpha in alphas {
            let order = order_for("--alpha", alpha)?;
            let sweep = mlf::ml_sup_sweep(order, range, points).map_err(|e| {
                CliError::numeric(format!("bound-sweep failed at alpha={alpha}: {e}"))
            })?;
            table.push(vec![
                Cell::Float(alpha),
                Cell::Float(range),
                Cell::Float(sweep.sup),
                Cell::Float(sweep.argmax_omega),
            ]);
        }
    }
    Ok(table)
}

/// propagate: state dumps or summary rows depending on the mode recorded in
/// the config (`dump`, `trace-norm`, `alpha-sweep`, `certify`,
/// `adjoint-check`).
pub fn cmd_propagate(config: &RunConfig) -> Result<Table, CliError> {
    check_positive("--tol", config.tol)?;
    let model_spec = config
        .model
        .as_ref()
        .ok_or_else(|| CliError::config("propagate needs one of --matrix, --matrix-file, --grid"))?;
    let model = build_model(model_spec)?;
    let state_spec = config
        .state
        .as_ref()
        .ok_or_else(|| CliError::config("propagate needs --state"))?;
    let u0 = build_state(state_spec, &model)?;

    match config.mode.as_deref() {
        Some("alpha-sweep") => {
            let alphas = config.alpha_sweep.as_ref().expect("set by parser");
            for &a in alphas {
                check_alpha("--alpha-sweep", a)?;
            }
            let t = single_time(config)?;
            let mut table = Table::new(vec!["alpha", "error"]);
            for entry in alpha_sweep(&model, alphas, t, &u0) {
                let err = entry.result.map_err(|e| {
                    CliError::numeric(format!("alpha-sweep failed at alpha={}: {e}", entry.alpha))
                })?;
                table.push(vec![Cell::Float(entry.alpha), Cell::Float(err)]);
            }
            Ok(table)
        }
        Some("trace-norm") => {
            let family = family_for(config, model)?;
            let times = config
                .times
                .as_ref()
                .ok_or_else(|| CliError::config("--trace-norm needs --t-list"))?;
            let trace = family
                .norm_trace(&u0, times)
                .map_err(|e| classify_propagator(e))?;
            let mut table = Table::new(vec!["t", "norm"]);
            for (t, n) in trace {
                table.push(vec![Cell::Float(t), Cell::Float(n)]);
            }
            Ok(table)
        }
        Some("certify") => {
            let family = family_for(config, model)?;
            let h = config
                .h
                .ok_or_else(|| CliError::config("--certify needs --h"))?;
            check_positive("--h", h)?;
            let t_end = config.t_end.unwrap_or(1.0);
            check_positive("--t-end", t_end)?;
            let mut table = Table::new(vec![
                "channel",
                "omega",
                "h",
                "residual",
                "refined_residual",
                "rate",
            ]);
            let coarse = certify_at(&family, h, t_end)?;
            let fine = certify_at(&family, h / 2.0, t_end)?;
            let spectrum = family.model().spectrum();
            for (j, (r, rf)) in coarse.iter().zip(&fine).enumerate() {
                let rate = (r / rf).log2();
                table.push(vec![
                    Cell::Int(j as i64),
                    Cell::Float(spectrum[j]),
                    Cell::Float(h),
                    Cell::Float(*r),
                    Cell::Float(*rf),
                    Cell::Float(rate),
                ]);
            }
            Ok(table)
        }
        Some("adjoint-check") => {
            let family = family_for(config, model)?;
            let t = single_time(config)?;
            let dim = family.model().dim();
            // deterministic probe vectors
            let psi = State::from_fn(dim, |j| {
                Complex64::from_polar(1.0 / (1.0 + j as f64).sqrt(), j as f64)
            });
            let phi = State::from_fn(dim, |j| {
                Complex64::from_polar(1.0, -0.37 * (j * j) as f64 / dim as f64)
            });
            let forward = family.propagate(t, &psi).map_err(classify_propagator)?;
            let back = family.adjoint_propagate(t, &phi).map_err(classify_propagator)?;
            let adjoint_defect = (inner(&forward, &phi) - inner(&psi, &back)).norm();
            let gram: Vec<Complex64> = family
                .gram_multiplier(t)
                .map_err(classify_propagator)?
                .iter()
                .map(|&g| Complex64::new(g, 0.0))
                .collect();
            let via_gram = family
                .model()
                .apply_values(&gram, &psi)
                .map_err(|e| CliError::numeric(e.to_string()))?;
            let round_trip = family
                .adjoint_propagate(t, &family.propagate(t, &psi).map_err(classify_propagator)?)
                .map_err(classify_propagator)?;
            let gram_defect = (&round_trip - &via_gram).norm();
            let mut table = Table::new(vec!["t", "adjoint_defect", "gram_defect"]);
            table.push(vec![
                Cell::Float(t),
                Cell::Float(adjoint_defect),
                Cell::Float(gram_defect),
            ]);
            Ok(table)
        }
        _ => {
            // plain state dump at a single time
            let family = family_for(config, model)?;
            let t = single_time(config)?;
            let out = family.propagate(t, &u0).map_err(classify_propagator)?;
            let mut table = Table::new(vec!["index", "re", "im"]);
            for (i, v) in out.values().iter().enumerate() {
                table.push(vec![
                    Cell::Int(i as i64),
                    Cell::Float(v.re),
                    Cell::Float(v.im),
                ]);
            }
            Ok(table)
        }
    }
}

fn single_time(config: &RunConfig) -> Result<f64, CliError> {
    let times = config
        .times
        .as_ref()
        .ok_or_else(|| CliError::config("this mode needs --t"))?;
    if times.len() != 1 {
        return Err(CliError::config(format!(
            "this mode needs a single --t, got {} times",
            times.len()
        )));
    }
    check_nonnegative("--t", times[0])?;
    Ok(times[0])
}

fn family_for(config: &RunConfig, model: SpectralModel) -> Result<SolutionFamily, CliError> {
    let alphas = config
        .alphas
        .as_ref()
        .ok_or_else(|| CliError::config("this mode needs --alpha"))?;
    if alphas.len() != 1 {
        return Err(CliError::config("this mode needs a single --alpha"));
    }
    let order = order_for("--alpha", alphas[0])?;
    SolutionFamily::new(model, order).map_err(|e| CliError::numeric(e.to_string()))
}

fn certify_at(family: &SolutionFamily, h: f64, t_end: f64) -> Result<Vec<f64>, CliError> {
    let n = (t_end / h).round() as usize + 1;
    let grid = TimeGrid::new(h, n).map_err(|e| CliError::config(format!("--h: {e}")))?;
    let dim = family.model().dim();
    let u0 = State::from_fn(dim, |_| Complex64::new(1.0, 0.0));
    let report = family
        .residual_certify(&grid, &u0)
        .map_err(classify_propagator)?;
    Ok(report.channel_residuals)
}

/// semigroup-check: the composition defect of the fractional integrals on a
/// preset path, rows (alpha, beta, h, defect).
pub fn cmd_semigroup_check(config: &RunConfig) -> Result<Table, CliError> {
    let alphas = config.alphas.as_ref().expect("set by parser");
    let alpha = alphas[0];
    let beta = config.beta.expect("set by parser");
    let h = config.h.expect("set by parser");
    let t_end = config.t_end.expect("set by parser");
    check_positive("--alpha", alpha)?;
    check_positive("--beta", beta)?;
    check_positive("--h", h)?;
    check_positive("--t-end", t_end)?;

    let n = (t_end / h).round() as usize + 1;
    let grid = TimeGrid::new(h, n).map_err(|e| CliError::config(format!("--h: {e}")))?;
    let preset = config.path_preset.as_deref().expect("set by parser");
    let path = match preset {
        "ones" => SampledPath::from_fn(grid, |_| Complex64::new(1.0, 0.0)),
        "ramp" => SampledPath::from_fn(grid, |t| Complex64::new(t, 0.0)),
        "sine" => SampledPath::from_fn(grid, |t| Complex64::new(t.sin(), 0.0)),
        other => {
            return Err(CliError::config(format!(
                "--path must be ones, ramp, or sine, got '{other}'"
            )))
        }
    }
    .map_err(|e| CliError::config(e.to_string()))?;

    let defect = fracops::semigroup_defect(alpha, beta, &path)
        .map_err(|e| CliError::numeric(e.to_string()))?;
    let mut table = Table::new(vec!["alpha", "beta", "h", "defect"]);
    table.push(vec![
        Cell::Float(alpha),
        Cell::Float(beta),
        Cell::Float(h),
        Cell::Float(defect),
    ]);
    Ok(table)
}

fn classify_propagator(e: fracprop::propagator::PropagatorError) -> CliError {
    use fracprop::propagator::PropagatorError as P;
    match e {
        P::InvalidTime(_) | P::TimesNotAscending | P::CertifyGridTooCoarse(_) => {
            CliError::config(e.to_string())
        }
        _ => CliError::numeric(e.to_string()),
    }
}
