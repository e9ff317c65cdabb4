//! Numerics for the time-fractional Schrödinger equation
//! D^α u = (−i)^α A u with a positive self-adjoint generator A and Caputo
//! derivative of order α ∈ (0, 1].
//!
//! The solution family U_α(t) = W E_α((−it)^α a(·)) W⁻¹ acts by spectral
//! multipliers built from the Mittag-Leffler function on the ray
//! arg z = −απ/2. The crate provides:
//!
//! - [`mlf`] — E_α(z) by power series and by the kernel/exponential
//!   integral representation, with boundedness sweeps along the ray;
//! - [`fracops`] — Riemann-Liouville integrals and Caputo L1 derivatives
//!   on uniform grids, the independent oracle that certifies solutions by
//!   their equation residual;
//! - [`spectral`] — Hermitian matrix models under eigendecomposition and
//!   periodic grids under the FFT, each exposing functional calculus;
//! - [`propagator`] — U_α(t), its adjoint and gram multipliers, the
//!   unitary reference e^{−itA}, α → 1 sweeps, norm traces, and the
//!   end-to-end residual certificate.

pub mod fracops;
pub mod gamma;
pub mod mlf;
pub mod propagator;
pub mod spectral;

mod quad;

pub use fracops::{SampledPath, TimeGrid};
pub use mlf::{FractionalOrder, MLValue, Method, RayPoint};
pub use propagator::{SolutionFamily, SpectralModel};
pub use spectral::{Decomposition, HermitianModel, PeriodicGrid, State};
