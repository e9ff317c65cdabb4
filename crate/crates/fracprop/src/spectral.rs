//! Finite spectral models of a positive self-adjoint generator.
//!
//! A Hermitian matrix is diagonalized once into (eigenvalues, unitary basis)
//! and every function of the operator becomes a multiplier on the
//! eigencoordinates. A periodic grid plays the same game with the discrete
//! Fourier transform and the Laplacian symbol ξ².

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

/// Elementwise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above this floor count as nonnegative; anything in
/// [−POSITIVITY_TOL, 0) is clamped to zero after the gate.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must be at least 1x1")]
    EmptyModel,
    #[error("entry ({row}, {col}) breaks Hermitian symmetry")]
    NotHermitian { row: usize, col: usize },
    #[error("eigenvalue {value:.6e} at position {index} is negative")]
    NotPositive { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid size must be a power of two >= 2, got {0}")]
    GridSize(usize),
    #[error("grid length must be positive and finite, got {0}")]
    GridLength(f64),
    #[error("gaussian width must be positive and finite, got {0}")]
    GaussianWidth(f64),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

/// A complex vector in the model's Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    values: Vec<Complex64>,
}

impl State {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            values: (0..dim).map(&mut f).collect(),
        }
    }

    /// Standard basis vector e_index.
    pub fn basis(dim: usize, index: usize) -> Result<Self, SpectralError> {
        if index >= dim {
            return Err(SpectralError::IndexOutOfRange { index, dim });
        }
        let mut values = vec![Complex64::default(); dim];
        values[index] = Complex64::new(1.0, 0.0);
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Euclidean 2-norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    fn from_dvector(v: DVector<Complex64>) -> Self {
        Self {
            values: v.as_slice().to_vec(),
        }
    }
}

impl std::ops::Sub for &State {
    type Output = State;

    fn sub(self, rhs: &State) -> State {
        assert_eq!(self.dim(), rhs.dim(), "state dimensions differ");
        State {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Add for &State {
    type Output = State;

    fn add(self, rhs: &State) -> State {
        assert_eq!(self.dim(), rhs.dim(), "state dimensions differ");
        State {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// ⟨a, b⟩ with the conjugation on the first slot.
pub fn inner(a: &State, b: &State) -> Complex64 {
    assert_eq!(a.dim(), b.dim(), "state dimensions differ");
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// A Hermitian matrix standing in for the generator. Construction checks
/// symmetry; positivity is checked when the matrix is decomposed.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianModel {
    entries: DMatrix<Complex64>,
}

impl HermitianModel {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, SpectralError> {
        if entries.nrows() != entries.ncols() {
            return Err(SpectralError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(SpectralError::EmptyModel);
        }
        let scale = entries
            .iter()
            .map(|e| e.norm())
            .fold(1.0f64, f64::max);
        for i in 0..entries.nrows() {
            for j in i..entries.ncols() {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(SpectralError::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self, SpectralError> {
        if diag.is_empty() {
            return Err(SpectralError::EmptyModel);
        }
        let n = diag.len();
        let mut entries = DMatrix::from_element(n, n, Complex64::default());
        for (i, &d) in diag.iter().enumerate() {
            entries[(i, i)] = Complex64::new(d, 0.0);
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// A·x directly from the entries, independent of any decomposition.
    pub fn apply(&self, x: &State) -> Result<State, SpectralError> {
        if x.dim() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(State::from_dvector(&self.entries * x.to_dvector()))
    }
}

/// Eigendecomposition A = W diag(a) W*: ascending nonnegative eigenvalues
/// and an orthonormal basis with each column's largest component made real
/// positive, so the decomposition is deterministic.
#[derive(Debug, Clone)]
pub struct Decomposition {
    eigenvalues: Vec<f64>,
    basis: DMatrix<Complex64>,
}

/// Diagonalize a Hermitian model, rejecting negative spectrum.
pub fn decompose(model: &HermitianModel) -> Result<Decomposition, SpectralError> {
    let eig = model.entries.clone().symmetric_eigen();
    let n = model.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut basis = DMatrix::from_element(n, n, Complex64::default());
    for (dst, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        if lambda < -POSITIVITY_TOL {
            return Err(SpectralError::NotPositive {
                index: dst,
                value: lambda,
            });
        }
        eigenvalues.push(lambda.max(0.0));
        let mut col = eig.eigenvectors.column(src).clone_owned();
        // phase convention: largest-magnitude component real positive
        let mut pivot = 0usize;
        let mut best = -1.0f64;
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best {
                best = v.norm();
                pivot = i;
            }
        }
        if best > 0.0 {
            let c = col[pivot];
            let rotate = c.conj() / c.norm();
            col *= rotate;
        }
        basis.set_column(dst, &col);
    }
    Ok(Decomposition { eigenvalues, basis })
}

impl Decomposition {
    #[cfg(test)]
    pub(crate) fn from_parts(eigenvalues: Vec<f64>, basis: DMatrix<Complex64>) -> Self {
        Self { eigenvalues, basis }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Coordinates of x in the eigenbasis, W*·x.
    pub fn to_eigenbasis(&self, x: &State) -> Result<Vec<Complex64>, SpectralError> {
        if x.dim() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok((self.basis.adjoint() * x.to_dvector()).as_slice().to_vec())
    }

    /// W diag(values) W*·x for precomputed multiplier values.
    pub fn apply_values(&self, values: &[Complex64], x: &State) -> Result<State, SpectralError> {
        if values.len() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.dim(),
                got: values.len(),
            });
        }
        if x.dim() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let mut coords = self.basis.adjoint() * x.to_dvector();
        for (c, v) in coords.iter_mut().zip(values) {
            *c *= v;
        }
        Ok(State::from_dvector(&self.basis * coords))
    }

    /// Functional calculus f(A)·x.
    pub fn apply_multiplier(
        &self,
        f: impl Fn(f64) -> Complex64,
        x: &State,
    ) -> Result<State, SpectralError> {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&a| f(a)).collect();
        self.apply_values(&values, x)
    }

    /// A·x through the decomposition (f = identity).
    pub fn apply_operator(&self, x: &State) -> Result<State, SpectralError> {
        self.apply_multiplier(|a| Complex64::new(a, 0.0), x)
    }

    /// True when every basis column is a standard basis vector up to `tol`,
    /// i.e. the model was diagonal in the caller's coordinates.
    pub fn basis_is_axis_aligned(&self, tol: f64) -> bool {
        let n = self.dim();
        for j in 0..n {
            let col = self.basis.column(j);
            let mut pivot = 0usize;
            let mut best = -1.0f64;
            for (i, v) in col.iter().enumerate() {
                if v.norm() > best {
                    best = v.norm();
                    pivot = i;
                }
            }
            for (i, v) in col.iter().enumerate() {
                let target = if i == pivot {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                };
                if (v - target).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// A one-dimensional torus of circumference `length` sampled at `n` points
/// (power of two). Frequencies ξ_k = 2πk/L for k ∈ {−n/2, …, n/2−1}; the
/// Laplacian acts as the multiplier ξ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    n: usize,
    length: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, length: f64) -> Result<Self, SpectralError> {
        if n < 2 || !n.is_power_of_two() {
            return Err(SpectralError::GridSize(n));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(SpectralError::GridLength(length));
        }
        Ok(Self { n, length })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn length(self) -> f64 {
        self.length
    }

    pub fn step(self) -> f64 {
        self.length / self.n as f64
    }

    /// Sample point x_j = −L/2 + j·L/n.
    pub fn point(self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.step()
    }

    pub fn points(self) -> impl Iterator<Item = f64> {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Frequency of FFT bin `bin` in natural (wrapped) ordering.
    pub fn frequency(self, bin: usize) -> f64 {
        let k = if bin < self.n / 2 {
            bin as i64
        } else {
            bin as i64 - self.n as i64
        };
        2.0 * std::f64::consts::PI * k as f64 / self.length
    }

    /// Laplacian symbol ξ_k² per FFT bin.
    pub fn multipliers(self) -> Vec<f64> {
        (0..self.n)
            .map(|bin| {
                let xi = self.frequency(bin);
                xi * xi
            })
            .collect()
    }

    /// F⁻¹ diag(values) F·x with unitary normalization, so all-ones values
    /// act as the identity.
    pub fn apply_values(self, values: &[Complex64], x: &State) -> Result<State, SpectralError> {
        if values.len() != self.n {
            return Err(SpectralError::DimensionMismatch {
                expected: self.n,
                got: values.len(),
            });
        }
        if x.dim() != self.n {
            return Err(SpectralError::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(self.n);
        let inverse = planner.plan_fft_inverse(self.n);
        let mut buf = x.values().to_vec();
        forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (b, v) in buf.iter_mut().zip(values) {
            *b *= v * scale;
        }
        inverse.process(&mut buf);
        Ok(State::new(buf))
    }

    /// Fourier multiplier x ↦ F⁻¹ (f(ξ²) F x).
    pub fn fourier_multiplier(
        self,
        f: impl Fn(f64) -> Complex64,
        x: &State,
    ) -> Result<State, SpectralError> {
        let values: Vec<Complex64> = self.multipliers().iter().map(|&a| f(a)).collect();
        self.apply_values(&values, x)
    }

    /// Normalized Gaussian sample exp(−(x−center)²/(2 width²)).
    pub fn gaussian(self, center: f64, width: f64) -> Result<State, SpectralError> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(SpectralError::GaussianWidth(width));
        }
        let raw = State::from_fn(self.n, |j| {
            let x = self.point(j) - center;
            Complex64::new((-x * x / (2.0 * width * width)).exp(), 0.0)
        });
        let norm = raw.norm();
        Ok(raw.scaled(Complex64::new(1.0 / norm, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian_psd(dim: usize, seed: u64) -> HermitianModel {
        // B*B + small shift is Hermitian PSD by construction
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let a = b.adjoint() * &b;
        // symmetrize away the last roundoff
        let sym = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianModel::new(sym).unwrap()
    }

    #[test]
    fn hermitian_gate() {
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            HermitianModel::new(bad),
            Err(SpectralError::NotHermitian { row: 0, col: 1 })
        ));
        let rect = DMatrix::from_element(2, 3, Complex64::default());
        assert!(matches!(
            HermitianModel::new(rect),
            Err(SpectralError::NotSquare { .. })
        ));
    }

    #[test]
    fn decompose_diagonal_model() {
        let m = HermitianModel::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let d = decompose(&m).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0, 3.0]);
        assert!(d.basis_is_axis_aligned(1e-12));
    }

    #[test]
    fn decompose_two_by_two_exchange() {
        // [[2, 1], [1, 2]]: eigenvalues 1 and 3, eigenvectors (1, ∓1)/√2
        let m = HermitianModel::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        ))
        .unwrap();
        let d = decompose(&m).unwrap();
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((d.eigenvalues()[1] - 3.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        let col0: Vec<Complex64> = d.basis().column(0).iter().copied().collect();
        let col1: Vec<Complex64> = d.basis().column(1).iter().copied().collect();
        // phase convention makes the dominant entry real positive
        assert!((col0[0].re.abs() - s).abs() < 1e-12);
        assert!((col0[1].re.abs() - s).abs() < 1e-12);
        assert!((col0[0].re * col0[1].re + s * s).abs() < 1e-12, "opposite signs");
        assert!((col1[0].re - s).abs() < 1e-12);
        assert!((col1[1].re - s).abs() < 1e-12);
    }

    #[test]
    fn decompose_pauli_shifted() {
        // [[0, i], [−i, 0]] + I has eigenvalues 0 and 2
        let m = HermitianModel::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 0.0),
            ],
        ))
        .unwrap();
        let d = decompose(&m).unwrap();
        assert!(d.eigenvalues()[0].abs() < 1e-12);
        assert!((d.eigenvalues()[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_rejects_negative_spectrum() {
        let m = HermitianModel::diagonal(&[0.5, -0.1]).unwrap();
        match decompose(&m) {
            Err(SpectralError::NotPositive { value, .. }) => {
                assert!((value + 0.1).abs() < 1e-12)
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn decompose_reconstructs_random_models() {
        for &dim in &[2usize, 8, 32, 256] {
            let m = random_hermitian_psd(dim, dim as u64);
            let d = decompose(&m).unwrap();
            let diag = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    Complex64::new(d.eigenvalues()[i], 0.0)
                } else {
                    Complex64::default()
                }
            });
            let recon = d.basis() * diag * d.basis().adjoint();
            let scale = d.max_eigenvalue();
            let err = (recon - m.entries()).norm();
            assert!(err <= 1e-9 * scale, "dim {dim}: err {err}");
            let unitarity = (d.basis().adjoint() * d.basis()
                - DMatrix::<Complex64>::identity(dim, dim))
            .norm();
            assert!(unitarity < 1e-10, "dim {dim}: unitarity {unitarity}");
        }
    }

    #[test]
    fn decompose_is_deterministic() {
        let m = random_hermitian_psd(16, 7);
        let d1 = decompose(&m).unwrap();
        let d2 = decompose(&m).unwrap();
        assert_eq!(d1.eigenvalues(), d2.eigenvalues());
        assert_eq!(d1.basis(), d2.basis());
    }

    #[test]
    fn multiplier_identity_and_operator() {
        let m = HermitianModel::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let d = decompose(&m).unwrap();
        let x = State::new(vec![Complex64::new(1.0, 0.0); 3]);
        let id = d.apply_multiplier(|_| Complex64::new(1.0, 0.0), &x).unwrap();
        assert!((&id - &x).norm() < 1e-12);
        let ax = d.apply_operator(&x).unwrap();
        for (i, expect) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((ax.values()[i].re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplier_unitary_preserves_norm() {
        let m = random_hermitian_psd(24, 3);
        let d = decompose(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = State::from_fn(24, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let t = 2.3;
        let y = d
            .apply_multiplier(|a| Complex64::from_polar(1.0, -t * a), &x)
            .unwrap();
        assert!((y.norm() - x.norm()).abs() < 1e-12 * x.norm());
    }

    #[test]
    fn multiplier_composition_is_pointwise_product() {
        let m = random_hermitian_psd(16, 5);
        let d = decompose(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = State::from_fn(16, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let f = |a: f64| Complex64::new(a.cos(), 0.2 * a.sin());
        let g = |a: f64| Complex64::from_polar(1.0, -0.7 * a);
        let seq = d.apply_multiplier(f, &d.apply_multiplier(g, &x).unwrap()).unwrap();
        let fused = d.apply_multiplier(|a| f(a) * g(a), &x).unwrap();
        assert!((&seq - &fused).norm() <= 1e-10 * x.norm());
    }

    #[test]
    fn grid_validation() {
        assert!(PeriodicGrid::new(100, 1.0).is_err());
        assert!(PeriodicGrid::new(0, 1.0).is_err());
        assert!(PeriodicGrid::new(64, -1.0).is_err());
        let g = PeriodicGrid::new(8, 4.0).unwrap();
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.point(0), -2.0);
        assert_eq!(g.frequency(0), 0.0);
        // bin n/2 is the most negative frequency
        assert!((g.frequency(4) + 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn fourier_identity_round_trip() {
        let g = PeriodicGrid::new(64, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = State::from_fn(64, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let y = g.fourier_multiplier(|_| Complex64::new(1.0, 0.0), &x).unwrap();
        assert!((&y - &x).norm() < 1e-12 * x.norm());
    }

    #[test]
    fn fourier_single_mode_is_laplacian_eigenfunction() {
        let g = PeriodicGrid::new(32, 8.0).unwrap();
        let xi1 = 2.0 * std::f64::consts::PI / 8.0;
        let x = State::from_fn(32, |j| Complex64::from_polar(1.0, xi1 * g.point(j)));
        let y = g.fourier_multiplier(|a| Complex64::new(a, 0.0), &x).unwrap();
        for (yj, xj) in y.values().iter().zip(x.values()) {
            assert!((yj - xj * (xi1 * xi1)).norm() < 1e-10);
        }
    }

    #[test]
    fn fourier_gaussian_free_evolution_matches_closed_form() {
        // multiplier e^{−itξ²} on a narrow Gaussian, compared with the
        // dispersive closed form w/√(w²+2it) · exp(−x²/(2(w²+2it)))
        let g = PeriodicGrid::new(1024, 80.0).unwrap();
        let width = 1.0;
        let t = 0.5;
        let x0 = State::from_fn(1024, |j| {
            let x = g.point(j);
            Complex64::new((-x * x / (2.0 * width * width)).exp(), 0.0)
        });
        let evolved = g
            .fourier_multiplier(|a| Complex64::from_polar(1.0, -t * a), &x0)
            .unwrap();
        let b = Complex64::new(width * width, 2.0 * t);
        let prefactor = (Complex64::new(width * width, 0.0) / b).sqrt();
        let mut max_err = 0.0f64;
        for (j, v) in evolved.values().iter().enumerate() {
            let x = g.point(j);
            let exact = prefactor * (Complex64::new(-x * x, 0.0) / (b * 2.0)).exp();
            max_err = max_err.max((v - exact).norm());
        }
        assert!(max_err < 1e-8, "max pointwise error {max_err}");
    }

    #[test]
    fn gaussian_state_is_normalized_and_centered() {
        let g = PeriodicGrid::new(256, 40.0).unwrap();
        let s = g.gaussian(3.0, 1.5).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let peak = s
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        assert!((g.point(peak) - 3.0).abs() <= g.step());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn fourier_unimodular_preserves_norm(
            seed in 0u64..1000,
            theta in 0.0f64..10.0,
        ) {
            let g = PeriodicGrid::new(64, 20.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = State::from_fn(64, |_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let y = g
                .fourier_multiplier(|a| Complex64::from_polar(1.0, -theta * a), &x)
                .unwrap();
            prop_assert!((y.norm() - x.norm()).abs() < 1e-12 * x.norm().max(1.0));
        }

        #[test]
        fn decompose_round_trip_random(dim in 2usize..24, seed in 0u64..500) {
            let m = random_hermitian_psd(dim, seed);
            let d = decompose(&m).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let x = State::from_fn(dim, |_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let via_decomp = d.apply_operator(&x).unwrap();
            let direct = m.apply(&x).unwrap();
            let scale = d.max_eigenvalue() * x.norm();
            prop_assert!((&via_decomp - &direct).norm() <= 1e-9 * scale.max(1e-30));
        }
    }
}
