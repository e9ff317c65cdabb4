//! The solution-operator family U_α(t) = W E_α((−it)^α a(·)) W⁻¹.
//!
//! Propagation is always a multiplier application through the model's
//! spectral map; the operator is never materialized. Alongside the family
//! itself: its adjoint, the gram multiplier |E_α((it)^α a)|², the unitary
//! reference group e^{−itA}, α → 1 convergence sweeps, norm traces, and an
//! end-to-end residual certificate against the L1 oracle.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::fracops::{self, FracopsError, SampledPath, TimeGrid};
use crate::mlf::{ml_ray_with, FractionalOrder, MlfError, RayPoint, DEFAULT_TOL};
use crate::spectral::{Decomposition, PeriodicGrid, SpectralError, State};

/// Diagonality tolerance for residual certification and minimum grid
/// resolution for a meaningful certificate.
pub const DIAGONAL_TOL: f64 = 1e-10;
pub const CERTIFY_MIN_NODES: usize = 100;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("time must be finite and >= 0, got {0}")]
    InvalidTime(f64),
    #[error("evaluation failed at spectral value {omega:.6e}: {source}")]
    Eval {
        omega: f64,
        #[source]
        source: MlfError,
    },
    #[error(transparent)]
    Mlf(#[from] MlfError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Fractional(#[from] FracopsError),
    #[error("spectral value {value:.6e} is negative")]
    NegativeSpectrum { value: f64 },
    #[error("residual certification requires a 1x1 or diagonal matrix model")]
    NonDiagonalModel,
    #[error("trace times must be nonnegative and ascending")]
    TimesNotAscending,
    #[error("certification grid needs at least {CERTIFY_MIN_NODES} nodes, got {0}")]
    CertifyGridTooCoarse(usize),
}

/// The finite stand-in for the spectral theorem's (Ω, μ, a, W): either an
/// eigendecomposed Hermitian matrix or a periodic grid under the DFT.
#[derive(Debug, Clone)]
pub enum SpectralModel {
    Matrix(Decomposition),
    Grid(PeriodicGrid),
}

impl From<Decomposition> for SpectralModel {
    fn from(d: Decomposition) -> Self {
        Self::Matrix(d)
    }
}

impl From<PeriodicGrid> for SpectralModel {
    fn from(g: PeriodicGrid) -> Self {
        Self::Grid(g)
    }
}

impl SpectralModel {
    pub fn dim(&self) -> usize {
        match self {
            Self::Matrix(d) => d.dim(),
            Self::Grid(g) => g.n(),
        }
    }

    /// The multiplier values a(·): eigenvalues, or ξ² per FFT bin.
    pub fn spectrum(&self) -> Vec<f64> {
        match self {
            Self::Matrix(d) => d.eigenvalues().to_vec(),
            Self::Grid(g) => g.multipliers(),
        }
    }

    pub fn apply_values(&self, values: &[Complex64], x: &State) -> Result<State, SpectralError> {
        match self {
            Self::Matrix(d) => d.apply_values(values, x),
            Self::Grid(g) => g.apply_values(values, x),
        }
    }

    /// f(A)·x for an infallible multiplier.
    pub fn apply_multiplier(
        &self,
        f: impl Fn(f64) -> Complex64,
        x: &State,
    ) -> Result<State, SpectralError> {
        let values: Vec<Complex64> = self.spectrum().iter().map(|&a| f(a)).collect();
        self.apply_values(&values, x)
    }

    /// A·x.
    pub fn apply_operator(&self, x: &State) -> Result<State, SpectralError> {
        self.apply_multiplier(|a| Complex64::new(a, 0.0), x)
    }

    /// The unitary group e^{−itA} applied to u0.
    pub fn unitary_reference(&self, t: f64, u0: &State) -> Result<State, PropagatorError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(PropagatorError::InvalidTime(t));
        }
        Ok(self.apply_multiplier(|a| Complex64::from_polar(1.0, -t * a), u0)?)
    }

    /// Evaluate a fallible multiplier over the whole spectrum, in parallel,
    /// attaching the offending spectral value to any failure.
    fn try_multiplier_values(
        &self,
        f: impl Fn(f64) -> Result<Complex64, MlfError> + Sync,
    ) -> Result<Vec<Complex64>, PropagatorError> {
        let spectrum = self.spectrum();
        let evals: Vec<(f64, Result<Complex64, MlfError>)> = spectrum
            .par_iter()
            .map(|&a| (a, f(a)))
            .collect();
        let mut values = Vec::with_capacity(evals.len());
        for (omega, r) in evals {
            match r {
                Ok(v) => values.push(v),
                Err(source) => return Err(PropagatorError::Eval { omega, source }),
            }
        }
        Ok(values)
    }
}

/// U_α(t) for a fixed model and order.
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    model: SpectralModel,
    order: FractionalOrder,
}

impl SolutionFamily {
    pub fn new(
        model: impl Into<SpectralModel>,
        order: FractionalOrder,
    ) -> Result<Self, PropagatorError> {
        let model = model.into();
        if let Some(&value) = model
            .spectrum()
            .iter()
            .find(|v| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(PropagatorError::NegativeSpectrum { value });
        }
        Ok(Self { model, order })
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// u(t) = U_α(t) u0, the multiplier a ↦ E_α((−it)^α a).
    pub fn propagate(&self, t: f64, u0: &State) -> Result<State, PropagatorError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(PropagatorError::InvalidTime(t));
        }
        let order = self.order;
        let values = self
            .model
            .try_multiplier_values(|a| ml_ray_with(RayPoint::new(order, t, a)?, DEFAULT_TOL).map(|v| v.value))?;
        Ok(self.model.apply_values(&values, u0)?)
    }

    /// U_α(t)* u0: the multiplier a ↦ conj E_α((−it)^α a), which equals
    /// E_α((it)^α a) because the spectrum is real and the series
    /// coefficients of E_α are real.
    pub fn adjoint_propagate(&self, t: f64, u0: &State) -> Result<State, PropagatorError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(PropagatorError::InvalidTime(t));
        }
        let order = self.order;
        let values = self.model.try_multiplier_values(|a| {
            ml_ray_with(RayPoint::new(order, t, a)?, DEFAULT_TOL).map(|v| v.value.conj())
        })?;
        Ok(self.model.apply_values(&values, u0)?)
    }

    /// The gram multiplier |E_α((it)^α a_j)|² per spectral value, realizing
    /// U_α(t) U_α(t)* = U_α(t)* U_α(t).
    pub fn gram_multiplier(&self, t: f64) -> Result<Vec<f64>, PropagatorError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(PropagatorError::InvalidTime(t));
        }
        let order = self.order;
        let values = self.model.try_multiplier_values(|a| {
            ml_ray_with(RayPoint::new(order, t, a)?, DEFAULT_TOL).map(|v| v.value)
        })?;
        Ok(values.iter().map(|v| v.norm_sqr()).collect())
    }

    /// e^{−itA} u0 on this family's model.
    pub fn unitary_reference(&self, t: f64, u0: &State) -> Result<State, PropagatorError> {
        self.model.unitary_reference(t, u0)
    }

    /// ‖U_α(t) u0‖ over a nonnegative ascending list of times.
    pub fn norm_trace(&self, u0: &State, ts: &[f64]) -> Result<Vec<(f64, f64)>, PropagatorError> {
        let ascending = ts.windows(2).all(|w| w[0] <= w[1]);
        if !ascending || ts.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(PropagatorError::TimesNotAscending);
        }
        ts.iter()
            .map(|&t| Ok((t, self.propagate(t, u0)?.norm())))
            .collect()
    }

    /// ‖A·U_α(t)u0 − U_α(t)·A u0‖, both sides computed independently.
    pub fn commutation_defect(&self, t: f64, u0: &State) -> Result<f64, PropagatorError> {
        let a_after = self.model.apply_operator(&self.propagate(t, u0)?)?;
        let a_before = self.propagate(t, &self.model.apply_operator(u0)?)?;
        Ok((&a_after - &a_before).norm())
    }

    /// Per-channel L1 residual of the propagated family on a diagonal
    /// matrix model: each eigenchannel's time series must satisfy the
    /// scalar equation D^α v = (−i)^α a_j v.
    pub fn residual_certify(
        &self,
        grid: &TimeGrid,
        u0: &State,
    ) -> Result<CertifyReport, PropagatorError> {
        let decomp = match &self.model {
            SpectralModel::Matrix(d) if d.basis_is_axis_aligned(DIAGONAL_TOL) => d,
            _ => return Err(PropagatorError::NonDiagonalModel),
        };
        if grid.len() < CERTIFY_MIN_NODES {
            return Err(PropagatorError::CertifyGridTooCoarse(grid.len()));
        }
        let coords = decomp.to_eigenbasis(u0)?;
        let order = self.order;
        let mut channel_residuals = Vec::with_capacity(decomp.dim());
        for (j, &a) in decomp.eigenvalues().iter().enumerate() {
            let v0 = coords[j];
            let mut values = Vec::with_capacity(grid.len());
            for t in grid.nodes() {
                let e = ml_ray_with(RayPoint::new(order, t, a)?, DEFAULT_TOL)
                    .map_err(|source| PropagatorError::Eval { omega: a, source })?;
                values.push(v0 * e.value);
            }
            let path = SampledPath::new(*grid, values)?;
            let residual =
                fracops::equation_residual(order, Complex64::new(a, 0.0), &path)?;
            channel_residuals.push(residual);
        }
        let max_residual = channel_residuals.iter().copied().fold(0.0, f64::max);
        Ok(CertifyReport {
            max_residual,
            channel_residuals,
        })
    }
}

/// Residual certificate: the max over eigenchannels of the L1 residual,
/// with the startup region excluded as documented in `fracops`.
#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub max_residual: f64,
    pub channel_residuals: Vec<f64>,
}

/// One entry of an α-convergence sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub alpha: f64,
    pub result: Result<f64, PropagatorError>,
}

/// ‖U_α(t)u0 − e^{−itA}u0‖ for each α, in input order. Per-α failures are
/// reported inline without aborting the sweep.
pub fn alpha_sweep(model: &SpectralModel, alphas: &[f64], t: f64, u0: &State) -> Vec<SweepEntry> {
    alphas
        .iter()
        .map(|&alpha| SweepEntry {
            alpha,
            result: sweep_distance(model, alpha, t, u0),
        })
        .collect()
}

fn sweep_distance(
    model: &SpectralModel,
    alpha: f64,
    t: f64,
    u0: &State,
) -> Result<f64, PropagatorError> {
    let order = FractionalOrder::new(alpha)?;
    let family = SolutionFamily::new(model.clone(), order)?;
    let propagated = family.propagate(t, u0)?;
    let reference = model.unitary_reference(t, u0)?;
    Ok((&propagated - &reference).norm())
}

/// The free evolution on a periodic grid: the Fourier multiplier
/// E_α((−it)^α ξ²) applied to g. At α = 1 this is the exact free
/// Schrödinger evolution on the torus.
pub fn free_propagate(
    grid: &PeriodicGrid,
    order: FractionalOrder,
    t: f64,
    g: &State,
) -> Result<State, PropagatorError> {
    SolutionFamily::new(*grid, order)?.propagate(t, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{decompose, inner, HermitianModel};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn order(alpha: f64) -> FractionalOrder {
        FractionalOrder::new(alpha).unwrap()
    }

    fn random_psd(dim: usize, seed: u64) -> Decomposition {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let a = b.adjoint() * &b;
        let sym = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        decompose(&HermitianModel::new(sym).unwrap()).unwrap()
    }

    fn random_state(dim: usize, seed: u64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        State::from_fn(dim, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Materialize the operator by propagating the basis vectors; used only
    /// to cross-check the adjoint.
    fn materialize(family: &SolutionFamily, t: f64) -> DMatrix<Complex64> {
        let n = family.model().dim();
        let mut m = DMatrix::from_element(n, n, Complex64::default());
        for j in 0..n {
            let col = family
                .propagate(t, &State::basis(n, j).unwrap())
                .unwrap();
            for i in 0..n {
                m[(i, j)] = col.values()[i];
            }
        }
        m
    }

    #[test]
    fn identity_at_time_zero() {
        let d = random_psd(12, 1);
        let u0 = random_state(12, 2);
        for &alpha in &[0.3, 0.5, 0.9, 1.0] {
            let family = SolutionFamily::new(d.clone(), order(alpha)).unwrap();
            let out = family.propagate(0.0, &u0).unwrap();
            assert!((&out - &u0).norm() <= 1e-12 * u0.norm());
        }
    }

    #[test]
    fn scalar_model_reproduces_mittag_leffler_solution() {
        let d = decompose(&HermitianModel::diagonal(&[0.7]).unwrap()).unwrap();
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let u0 = State::new(vec![Complex64::new(2.0, -1.0)]);
        let t = 1.7;
        let out = family.propagate(t, &u0).unwrap();
        let e = crate::mlf::ml_ray(RayPoint::new(order(0.5), t, 0.7).unwrap()).unwrap();
        assert!((out.values()[0] - u0.values()[0] * e).norm() < 1e-12);
    }

    #[test]
    fn classical_order_is_unitary_group() {
        let d = random_psd(16, 3);
        let family = SolutionFamily::new(d, order(1.0)).unwrap();
        let u0 = random_state(16, 4);
        for &t in &[0.3, 1.0, 3.7] {
            let fractional = family.propagate(t, &u0).unwrap();
            let unitary = family.unitary_reference(t, &u0).unwrap();
            assert!((&fractional - &unitary).norm() <= 1e-10 * u0.norm());
            assert!((unitary.norm() - u0.norm()).abs() <= 1e-12 * u0.norm());
        }
    }

    #[test]
    fn unitary_reference_group_law() {
        let d = random_psd(10, 5);
        let model = SpectralModel::from(d);
        let u0 = random_state(10, 6);
        let (t, s) = (0.8, 1.9);
        let step = model
            .unitary_reference(t, &model.unitary_reference(s, &u0).unwrap())
            .unwrap();
        let direct = model.unitary_reference(t + s, &u0).unwrap();
        assert!((&step - &direct).norm() <= 1e-11 * u0.norm());
    }

    #[test]
    fn adjoint_matches_materialized_transpose() {
        let d = random_psd(6, 7);
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let t = 1.0;
        let u = materialize(&family, t);
        let u0 = random_state(6, 8);
        let adj = family.adjoint_propagate(t, &u0).unwrap();
        let expected = u.adjoint() * nalgebra::DVector::from_column_slice(u0.values());
        for i in 0..6 {
            assert!((adj.values()[i] - expected[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let d = random_psd(20, 9);
        let family = SolutionFamily::new(d, order(0.7)).unwrap();
        let t = 1.3;
        let psi = random_state(20, 10);
        let phi = random_state(20, 11);
        let lhs = inner(&family.propagate(t, &psi).unwrap(), &phi);
        let rhs = inner(&psi, &family.adjoint_propagate(t, &phi).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * psi.norm() * phi.norm());
    }

    #[test]
    fn gram_multiplier_consistency() {
        let d = random_psd(14, 12);
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let t = 1.0;
        let u0 = random_state(14, 13);
        let gram = family.gram_multiplier(t).unwrap();
        let gram_c: Vec<Complex64> = gram.iter().map(|&g| Complex64::new(g, 0.0)).collect();
        let via_multiplier = family.model().apply_values(&gram_c, &u0).unwrap();
        let forward_adjoint = family
            .adjoint_propagate(t, &family.propagate(t, &u0).unwrap())
            .unwrap();
        let adjoint_forward = family
            .propagate(t, &family.adjoint_propagate(t, &u0).unwrap())
            .unwrap();
        assert!((&forward_adjoint - &via_multiplier).norm() <= 1e-10 * u0.norm());
        assert!((&adjoint_forward - &via_multiplier).norm() <= 1e-10 * u0.norm());
    }

    #[test]
    fn gram_values_at_zero_and_classical() {
        let d = random_psd(8, 14);
        let half = SolutionFamily::new(d.clone(), order(0.5)).unwrap();
        for g in half.gram_multiplier(0.0).unwrap() {
            assert!((g - 1.0).abs() < 1e-14);
        }
        let classical = SolutionFamily::new(d, order(1.0)).unwrap();
        for g in classical.gram_multiplier(2.3).unwrap() {
            assert!((g - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_departs_from_unity_for_fractional_order() {
        let d = decompose(&HermitianModel::diagonal(&[1.0]).unwrap()).unwrap();
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let gram = family.gram_multiplier(1.0).unwrap();
        assert!((gram[0] - 1.0).abs() > 0.01);
        // extended-precision reference |E_{1/2}(e^{-i pi/4})|^2
        assert!((gram[0] - 4.10281751777651411).abs() < 1e-9);
    }

    #[test]
    fn commutation_defect_small_everywhere() {
        let diag = decompose(&HermitianModel::diagonal(&[0.0, 1.0, 4.0]).unwrap()).unwrap();
        let family = SolutionFamily::new(diag, order(0.6)).unwrap();
        let u0 = random_state(3, 15);
        assert!(family.commutation_defect(1.0, &u0).unwrap() < 1e-13);

        let d = random_psd(64, 16);
        let family = SolutionFamily::new(d.clone(), order(0.7)).unwrap();
        let u0 = random_state(64, 17);
        let defect = family.commutation_defect(1.0, &u0).unwrap();
        assert!(defect <= 1e-10 * d.max_eigenvalue() * u0.norm());
        assert!(family.commutation_defect(0.0, &u0).unwrap() <= 1e-12 * u0.norm());
    }

    #[test]
    fn norm_trace_constant_for_classical_order() {
        let d = random_psd(10, 18);
        let family = SolutionFamily::new(d, order(1.0)).unwrap();
        let u0 = random_state(10, 19);
        let trace = family.norm_trace(&u0, &[0.0, 1.0, 2.0, 4.0]).unwrap();
        for (_, n) in trace {
            assert!((n - u0.norm()).abs() <= 1e-12 * u0.norm());
        }
    }

    #[test]
    fn norm_trace_departs_for_fractional_order() {
        let d = decompose(&HermitianModel::diagonal(&[1.0]).unwrap()).unwrap();
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let u0 = State::new(vec![Complex64::new(1.0, 0.0)]);
        let trace = family.norm_trace(&u0, &[0.0, 1.0, 2.0, 4.0]).unwrap();
        assert!((trace[0].1 - 1.0).abs() < 1e-14);
        let max_dev = trace
            .iter()
            .map(|(_, n)| (n - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(max_dev > 0.01, "deviation {max_dev}");
        // frozen moduli from the extended-precision series
        assert!((trace[1].1 - 2.0255412900695246278).abs() < 1e-10);
        assert!((trace[2].1 - 2.3239684343070954173).abs() < 1e-9);
        assert!((trace[3].1 - 2.0288884891005054223).abs() < 1e-9);
    }

    #[test]
    fn norm_trace_rejects_unordered_times() {
        let d = random_psd(4, 20);
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let u0 = random_state(4, 21);
        assert!(matches!(
            family.norm_trace(&u0, &[1.0, 0.5]),
            Err(PropagatorError::TimesNotAscending)
        ));
    }

    #[test]
    fn alpha_sweep_strictly_decreasing_on_matrix() {
        let d = decompose(&HermitianModel::diagonal(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap())
            .unwrap();
        let model = SpectralModel::from(d);
        let u0 = State::from_fn(6, |j| Complex64::new(1.0 / (j + 1) as f64, 0.1));
        let entries = alpha_sweep(&model, &[0.9, 0.99, 0.999], 1.0, &u0);
        let errs: Vec<f64> = entries.iter().map(|e| *e.result.as_ref().unwrap()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn alpha_sweep_zero_time_is_zero_error() {
        let d = random_psd(6, 22);
        let model = SpectralModel::from(d);
        let u0 = random_state(6, 23);
        for entry in alpha_sweep(&model, &[0.5, 0.9], 0.0, &u0) {
            assert!(*entry.result.as_ref().unwrap() <= 1e-12 * u0.norm());
        }
    }

    #[test]
    fn strong_continuity_probe() {
        let d = random_psd(12, 24);
        let family = SolutionFamily::new(d, order(0.6)).unwrap();
        let u0 = random_state(12, 25);
        let t = 1.0;
        let base = family.propagate(t, &u0).unwrap();
        let mut last = f64::INFINITY;
        for &delta in &[1e-2, 1e-3, 1e-4] {
            let stepped = family.propagate(t + delta, &u0).unwrap();
            let d = (&stepped - &base).norm();
            assert!(d < last, "no contraction at delta = {delta}");
            last = d;
        }
        assert!(last < 1e-3 * u0.norm());
    }

    #[test]
    fn free_propagate_identity_at_zero_and_classical_dispersion() {
        let grid = PeriodicGrid::new(1024, 80.0).unwrap();
        let g = grid.gaussian(0.0, 1.0).unwrap();
        let frozen = free_propagate(&grid, order(0.5), 0.0, &g).unwrap();
        assert!((&frozen - &g).norm() <= 1e-12);

        // alpha = 1 equals the exact torus evolution of the same multiplier
        let t = 0.5;
        let classical = free_propagate(&grid, order(1.0), t, &g).unwrap();
        let reference = grid
            .fourier_multiplier(|a| Complex64::from_polar(1.0, -t * a), &g)
            .unwrap();
        assert!((&classical - &reference).norm() <= 1e-12);
    }

    #[test]
    fn free_propagate_alpha_ordering_towards_classical() {
        let grid = PeriodicGrid::new(512, 60.0).unwrap();
        let g = grid.gaussian(0.0, 1.0).unwrap();
        let t = 0.5;
        let reference = free_propagate(&grid, order(1.0), t, &g).unwrap();
        let d_99 = (&free_propagate(&grid, order(0.99), t, &g).unwrap() - &reference).norm();
        let d_999 = (&free_propagate(&grid, order(0.999), t, &g).unwrap() - &reference).norm();
        assert!(d_999 < d_99, "{d_999} !< {d_99}");
    }

    #[test]
    fn certify_diagonal_models() {
        let d = decompose(&HermitianModel::diagonal(&[1.0]).unwrap()).unwrap();
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let grid = TimeGrid::new(1e-3, 1001).unwrap();
        let u0 = State::new(vec![Complex64::new(1.0, 0.0)]);
        let report = family.residual_certify(&grid, &u0).unwrap();
        assert!(report.max_residual < 0.05, "{}", report.max_residual);
    }

    #[test]
    fn certify_rejects_non_diagonal_and_coarse_grids() {
        let d = random_psd(4, 26);
        let family = SolutionFamily::new(d, order(0.5)).unwrap();
        let grid = TimeGrid::new(1e-2, 101).unwrap();
        let u0 = random_state(4, 27);
        assert!(matches!(
            family.residual_certify(&grid, &u0),
            Err(PropagatorError::NonDiagonalModel)
        ));

        let diag = decompose(&HermitianModel::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        let family = SolutionFamily::new(diag, order(0.5)).unwrap();
        let coarse = TimeGrid::new(1e-2, 50).unwrap();
        let u0 = State::new(vec![Complex64::new(1.0, 0.0); 2]);
        assert!(matches!(
            family.residual_certify(&coarse, &u0),
            Err(PropagatorError::CertifyGridTooCoarse(50))
        ));
    }

    #[test]
    fn negative_spectrum_rejected_at_family_construction() {
        // bypass the decomposition gate to exercise the family's own check
        let d = Decomposition::from_parts(vec![-0.5, 1.0], DMatrix::identity(2, 2));
        assert!(matches!(
            SolutionFamily::new(d, order(0.5)),
            Err(PropagatorError::NegativeSpectrum { .. })
        ));
    }
}
