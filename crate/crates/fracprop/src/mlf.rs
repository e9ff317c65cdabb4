//! Mittag-Leffler function E_α(z) for complex arguments, 0 < α ≤ 1.
//!
//! Two backends: the defining power series Σ z^k / Γ(αk + 1), and the
//! kernel/exponential integral representation
//!
//! ```text
//! E_α(z) = ∫₀^∞ K_α(r, z) dr + (1/α) e^{z^{1/α}},
//! K_α(r, z) = − e^{−r^{1/α}} z sin(πα) / (πα (r² − 2rz cos(πα) + z²)),
//! ```
//!
//! where the exponential term is present only for |arg z| ≤ πα (crossing
//! that sector boundary moves a kernel pole across the integration path and
//! the residue it leaves behind is exactly the exponential term).
//!
//! The argument of interest is the ray z = e^{−iαπ/2} t^α ω coming from the
//! fractional Schrödinger symbol (−it)^α ω; `ml_ray` evaluates there with
//! the exact relation z^{1/α} = −i t ω^{1/α} so the exponential stays on the
//! unit circle even when t^α ω is far too large for principal powers of a
//! rounded z.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::gamma::ln_gamma;
use crate::quad::{adaptive_gk15, QuadError};

/// Default absolute tolerance for the evaluators.
pub const DEFAULT_TOL: f64 = 1e-10;
/// |z| at or below which the dispatcher prefers the power series.
pub const DEFAULT_SERIES_RADIUS: f64 = 5.0;
/// Hard cap on series terms; double precision gains nothing past this.
pub const DEFAULT_SERIES_CAP: usize = 2000;
/// Relative floor on the kernel denominator before a point counts as
/// pole-adjacent.
pub const POLE_GUARD: f64 = 1e-12;

const QUAD_MAX_DEPTH: usize = 40;

#[derive(Debug, Error)]
pub enum MlfError {
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("ray point requires finite t >= 0 and omega >= 0, got t = {t}, omega = {omega}")]
    InvalidRayPoint { t: f64, omega: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("series did not converge within {terms} terms at |z| = {z_abs:.6e}")]
    NonConvergence { terms: usize, z_abs: f64 },
    #[error("kernel denominator inside pole guard at r = {r:.6e}")]
    PoleProximity { r: f64 },
    #[error("kernel requires r > 0 and z != 0")]
    KernelDomain,
    #[error("integral representation requires z != 0")]
    ZeroArgument,
    #[error("adaptive quadrature exceeded depth {depth} while refining near a guarded pole")]
    QuadratureFailure { depth: usize },
    #[error("sweep requires at least 2 grid points, got {0}")]
    SweepTooSmall(usize),
    #[error("sweep requires finite omega_max > 0, got {0}")]
    InvalidSweepRange(f64),
    #[error("sweep evaluation failed at omega = {omega:.6e}: {source}")]
    SweepPoint {
        omega: f64,
        #[source]
        source: Box<MlfError>,
    },
}

/// Validated fractional order α ∈ (0, 1] together with the cached phase
/// (−i)^α = e^{−iαπ/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    phase: Complex64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self, MlfError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(MlfError::InvalidOrder(alpha));
        }
        Ok(Self {
            alpha,
            phase: Complex64::from_polar(1.0, -alpha * PI / 2.0),
        })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    /// (−i)^α on the principal branch.
    pub fn phase(self) -> Complex64 {
        self.phase
    }

    /// α = 1, where the whole machinery collapses to the exponential.
    pub fn is_classical(self) -> bool {
        self.alpha == 1.0
    }
}

/// Which backend produced an [`MLValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Integral,
    Exact,
}

/// An evaluation of E_α together with its provenance and an absolute error
/// estimate. The estimate is an upper-bound claim: cross-checks assert
/// |series − integral| ≤ err_series + err_integral.
#[derive(Debug, Clone, Copy)]
pub struct MLValue {
    pub value: Complex64,
    pub method: Method,
    pub err_est: f64,
}

/// A point (α, t, ω) on the spectral ray; the induced argument is
/// z = e^{−iαπ/2} t^α ω with arg z = −απ/2 whenever tω > 0.
#[derive(Debug, Clone, Copy)]
pub struct RayPoint {
    order: FractionalOrder,
    t: f64,
    omega: f64,
}

impl RayPoint {
    pub fn new(order: FractionalOrder, t: f64, omega: f64) -> Result<Self, MlfError> {
        if !(t >= 0.0 && t.is_finite()) || !(omega >= 0.0 && omega.is_finite()) {
            return Err(MlfError::InvalidRayPoint { t, omega });
        }
        Ok(Self { order, t, omega })
    }

    pub fn order(self) -> FractionalOrder {
        self.order
    }

    pub fn t(self) -> f64 {
        self.t
    }

    pub fn omega(self) -> f64 {
        self.omega
    }

    /// z = phase · t^α · ω.
    pub fn argument(self) -> Complex64 {
        self.order.phase * self.t.powf(self.order.alpha) * self.omega
    }

    /// z^{1/α} = −i t ω^{1/α}, exact on the ray (purely imaginary).
    fn power(self) -> Complex64 {
        if self.t == 0.0 || self.omega == 0.0 {
            return Complex64::default();
        }
        Complex64::new(0.0, -(self.t * self.omega.powf(1.0 / self.order.alpha)))
    }
}

/// Power series Σ_{k≥0} z^k / Γ(αk + 1) with the default term cap.
pub fn ml_series(order: FractionalOrder, z: Complex64, tol: f64) -> Result<MLValue, MlfError> {
    ml_series_capped(order, z, tol, DEFAULT_SERIES_CAP)
}

/// Power series with an explicit term cap.
///
/// Truncates once three consecutive terms fall below tol·max(1, |sum|).
/// The error estimate is the magnitude of those trailing terms plus a
/// roundoff floor proportional to the largest intermediate term, which is
/// what actually limits accuracy on oscillatory rays.
pub fn ml_series_capped(
    order: FractionalOrder,
    z: Complex64,
    tol: f64,
    cap: usize,
) -> Result<MLValue, MlfError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MlfError::InvalidTolerance(tol));
    }
    if z == Complex64::default() {
        return Ok(MLValue {
            value: Complex64::new(1.0, 0.0),
            method: Method::Series,
            err_est: 0.0,
        });
    }
    let alpha = order.alpha;
    let ln_z = z.ln();
    let mut sum = Complex64::default();
    let mut peak = 0.0f64;
    let mut trailing = [0.0f64; 3];
    let mut consecutive = 0usize;

    for k in 0..cap {
        let term = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            (ln_z * k as f64 - ln_gamma(alpha * k as f64 + 1.0)).exp()
        };
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(MlfError::NonConvergence {
                terms: k,
                z_abs: z.norm(),
            });
        }
        sum += term;
        let mag = term.norm();
        peak = peak.max(mag);
        trailing[consecutive.min(2)] = mag;
        if mag < tol * sum.norm().max(1.0) {
            consecutive += 1;
            if consecutive == 3 {
                let roundoff = peak * f64::EPSILON * (k + 1) as f64;
                return Ok(MLValue {
                    value: sum,
                    method: Method::Series,
                    err_est: trailing.iter().sum::<f64>() + roundoff,
                });
            }
        } else {
            consecutive = 0;
        }
    }
    Err(MlfError::NonConvergence {
        terms: cap,
        z_abs: z.norm(),
    })
}

/// Integrand kernel K_α(r, z) of the integral representation.
pub fn ml_kernel(order: FractionalOrder, r: f64, z: Complex64) -> Result<Complex64, MlfError> {
    if !(r > 0.0) || z == Complex64::default() {
        return Err(MlfError::KernelDomain);
    }
    let alpha = order.alpha;
    let denom = Complex64::new(r * r, 0.0) - z * (2.0 * r * (PI * alpha).cos()) + z * z;
    if denom.norm() < POLE_GUARD * (r * r + z.norm_sqr()) {
        return Err(MlfError::PoleProximity { r });
    }
    let decay = (-r.powf(1.0 / alpha)).exp();
    Ok(-z * (decay * (PI * alpha).sin()) / (denom * (PI * alpha)))
}

/// Distance from the nearest kernel pole r = z e^{±iπα} to the positive
/// real axis. Controls both the uniform denominator floor and how close
/// the argument sits to the sector boundary |arg z| = πα.
fn pole_distance(z: Complex64, alpha: f64) -> f64 {
    let mut d = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let p = z * Complex64::from_polar(1.0, sign * PI * alpha);
        let dist = if p.re <= 0.0 { p.norm() } else { p.im.abs() };
        d = d.min(dist);
    }
    d
}

/// Integral representation with principal-branch z^{1/α}.
pub fn ml_integral(order: FractionalOrder, z: Complex64, tol: f64) -> Result<MLValue, MlfError> {
    if z == Complex64::default() {
        return Err(MlfError::ZeroArgument);
    }
    let power = if order.is_classical() {
        z
    } else {
        z.powf(1.0 / order.alpha)
    };
    integral_with_power(order, z, power, tol)
}

/// Integral representation with the caller supplying z^{1/α}. Ray callers
/// pass the exact purely imaginary power; see the module docs.
fn integral_with_power(
    order: FractionalOrder,
    z: Complex64,
    power: Complex64,
    tol: f64,
) -> Result<MLValue, MlfError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MlfError::InvalidTolerance(tol));
    }
    let alpha = order.alpha;
    if order.is_classical() {
        // sin(πα) = 0: the kernel vanishes identically and only the
        // exponential term survives.
        let value = z.exp();
        return Ok(MLValue {
            value,
            method: Method::Integral,
            err_est: 4.0 * f64::EPSILON * value.norm(),
        });
    }

    let abs_z = z.norm();
    let d_min = pole_distance(z, alpha);
    if d_min * d_min <= 10.0 * POLE_GUARD * abs_z * abs_z {
        // a pole sits on the integration path (arg z = ±πα); bisection
        // can never escape the guard region
        return Err(MlfError::QuadratureFailure { depth: 0 });
    }

    // uniform kernel bound |K| <= g_max e^{-r^{1/alpha}} from
    // |denominator| >= d_min^2
    let sin_pa = (PI * alpha).sin();
    let g_max = abs_z * sin_pa / (PI * alpha * d_min * d_min);
    let tol_tail = 0.25 * tol;
    let tol_quad = 0.5 * tol;

    // cut radius R = S^alpha from the substituted tail
    // ∫_R^∞ e^{-r^{1/α}} dr = α ∫_S^∞ s^{α-1} e^{-s} ds <= e^{-S} for S >= 1
    let s_cut = (2.0 * g_max.max(1e-300) / tol_tail).ln().max(1.0);
    let r_cut = s_cut.powf(alpha);
    let tail_bound = g_max * alpha * s_cut.powf(alpha - 1.0) * (-s_cut).exp();

    // initial panels: the live region of e^{-r^{1/α}}, and a split at
    // r = |z| where the denominator can be smallest
    let mut breakpoints = vec![0.0, r_cut];
    let live = (-tol.ln()).max(1.0).powf(alpha);
    if live < r_cut {
        breakpoints.push(live);
    }
    if abs_z < r_cut {
        breakpoints.push(abs_z);
    }
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();

    let mut integrand = |r: f64| ml_kernel(order, r, z).ok();
    let quad = adaptive_gk15(&mut integrand, &breakpoints, tol_quad, QUAD_MAX_DEPTH)
        .map_err(|QuadError::Depth { depth, .. }| MlfError::QuadratureFailure { depth })?;

    let mut value = quad.value;
    let mut err_est = quad.err + tail_bound;
    if z.arg().abs() <= PI * alpha {
        let exp_term = power.exp() / alpha;
        value += exp_term;
        err_est += 4.0 * f64::EPSILON * exp_term.norm();
    }
    Ok(MLValue {
        value,
        method: Method::Integral,
        err_est,
    })
}

/// Backend dispatch shared by [`ml_eval`] and [`ml_ray`]. A series result
/// whose honest error estimate is poor (cancellation at small α) falls
/// through to the integral when that is available.
fn dispatch(
    order: FractionalOrder,
    z: Complex64,
    ray_power: Option<Complex64>,
    tol: f64,
) -> Result<MLValue, MlfError> {
    let integral = || {
        let power = ray_power.unwrap_or_else(|| z.powf(1.0 / order.alpha));
        integral_with_power(order, z, power, tol)
    };
    if z.norm() <= DEFAULT_SERIES_RADIUS {
        match ml_series(order, z, tol) {
            Ok(v) if v.err_est <= 1e-6 * v.value.norm().max(1.0) => Ok(v),
            Ok(v) => Ok(integral().unwrap_or(v)),
            Err(_) => integral(),
        }
    } else {
        match integral() {
            Ok(v) => Ok(v),
            Err(e) => ml_series(order, z, tol).map_err(|_| e),
        }
    }
}

/// Evaluate E_α(z) with the default tolerance.
///
/// α = 1 short-circuits to `exp(z)`; otherwise the series is used inside
/// [`DEFAULT_SERIES_RADIUS`] and the integral representation outside, each
/// falling back to the other before reporting failure.
pub fn ml_eval(order: FractionalOrder, z: Complex64) -> Result<MLValue, MlfError> {
    ml_eval_with(order, z, DEFAULT_TOL)
}

/// [`ml_eval`] with an explicit tolerance.
pub fn ml_eval_with(order: FractionalOrder, z: Complex64, tol: f64) -> Result<MLValue, MlfError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MlfError::InvalidTolerance(tol));
    }
    if order.is_classical() {
        let value = z.exp();
        return Ok(MLValue {
            value,
            method: Method::Exact,
            err_est: 4.0 * f64::EPSILON * value.norm(),
        });
    }
    dispatch(order, z, None, tol)
}

/// E_α((−it)^α ω) on the spectral ray, with the default tolerance.
pub fn ml_ray(point: RayPoint) -> Result<Complex64, MlfError> {
    ml_ray_with(point, DEFAULT_TOL).map(|v| v.value)
}

/// [`ml_ray`] with an explicit tolerance, returning the full value record.
pub fn ml_ray_with(point: RayPoint, tol: f64) -> Result<MLValue, MlfError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MlfError::InvalidTolerance(tol));
    }
    if point.t == 0.0 || point.omega == 0.0 {
        return Ok(MLValue {
            value: Complex64::new(1.0, 0.0),
            method: Method::Exact,
            err_est: 0.0,
        });
    }
    let order = point.order;
    if order.is_classical() {
        return Ok(MLValue {
            value: Complex64::from_polar(1.0, -point.t * point.omega),
            method: Method::Exact,
            err_est: f64::EPSILON,
        });
    }
    dispatch(order, point.argument(), Some(point.power()), tol)
}

/// Result of a boundedness sweep along the ray at t = 1.
#[derive(Debug, Clone, Copy)]
pub struct SweepResult {
    /// max over the grid of |E_α((−i)^α ω)|
    pub sup: f64,
    /// grid point attaining the max
    pub argmax_omega: f64,
}

/// Sweep |E_α((−i)^α ω)| over ω ∈ {0} ∪ log-grid(ω_max·1e−9, ω_max) and
/// return the grid supremum. t = 1 suffices: the ray argument only enters
/// through the product t^α ω.
pub fn ml_sup_sweep(
    order: FractionalOrder,
    omega_max: f64,
    n: usize,
) -> Result<SweepResult, MlfError> {
    if n < 2 {
        return Err(MlfError::SweepTooSmall(n));
    }
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(MlfError::InvalidSweepRange(omega_max));
    }
    let omega_min = omega_max * 1e-9;
    let ratio = (omega_max / omega_min).powf(1.0 / (n - 1) as f64);
    let mut grid = Vec::with_capacity(n + 1);
    grid.push(0.0);
    let mut w = omega_min;
    for _ in 0..n {
        grid.push(w.min(omega_max));
        w *= ratio;
    }

    let moduli: Vec<(f64, Result<f64, MlfError>)> = grid
        .par_iter()
        .map(|&omega| {
            let r = RayPoint::new(order, 1.0, omega)
                .and_then(|p| ml_ray_with(p, DEFAULT_TOL))
                .map(|v| v.value.norm());
            (omega, r)
        })
        .collect();

    let mut sup = f64::NEG_INFINITY;
    let mut argmax = 0.0;
    for (omega, r) in moduli {
        match r {
            Ok(m) => {
                if m > sup {
                    sup = m;
                    argmax = omega;
                }
            }
            Err(source) => {
                return Err(MlfError::SweepPoint {
                    omega,
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(SweepResult {
        sup,
        argmax_omega: argmax,
    })
}
