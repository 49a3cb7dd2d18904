//! Dense Hermitian operators, their spectral decompositions, and state vectors.
//!
//! Every matrix exponential in the crate goes through [`SpectralDecomposition`]
//! except the long-time adiabatic propagator, which uses the Chebyshev
//! expansion in [`chebyshev`] on a sparse view of the same operators.

pub mod chebyshev;
pub mod sparse;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Hermiticity tolerance used when constructing operators.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Norm deviation above which [`fidelity`] rejects a state.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Components below this magnitude are skipped when fixing eigenvector phases.
const PHASE_THRESHOLD: f64 = 1e-10;

/// Dense complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    /// Validates squareness and Hermiticity; the error names the worst pair.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let scale = matrix.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..rows {
            for j in i..cols {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > worst.2 {
                    worst = (i, j, dev);
                }
            }
        }
        if worst.2 > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NonHermitian {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
            });
        }
        Ok(Self { matrix })
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| C64::new(x, 0.0)))
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let d = DVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)));
        Self {
            matrix: DMatrix::from_diagonal(&d),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Skips validation; callers guarantee Hermiticity by construction.
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let mut matrix = self.matrix.clone();
        matrix.zip_apply(&other.matrix, |a, b| *a += b * factor);
        Ok(Self { matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    /// Matrix product `self * other`, returned as a plain matrix.
    pub fn product(&self, other: &Self) -> DMatrix<C64> {
        &self.matrix * &other.matrix
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(&self.matrix * psi.amplitudes())
    }

    /// Largest entry of `self - other` in modulus.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest entry of `self - self^†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

/// Eigenvalues ascending, eigenvector column `k` paired with eigenvalue `k`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> StateVector {
        StateVector {
            amplitudes: self.eigenvectors.column(k).into_owned(),
        }
    }

    pub fn ground_state(&self) -> StateVector {
        self.eigenvector(0)
    }

    /// Coordinates of `psi` in the eigenbasis, `V^† psi`.
    pub fn to_eigenbasis(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.ad_mul(psi)
    }

    pub fn from_eigenbasis(&self, coefficients: &DVector<C64>) -> DVector<C64> {
        &self.eigenvectors * coefficients
    }

    /// Indices of eigenvalues within `window` of the lowest one.
    pub fn ground_space(&self, window: f64) -> std::ops::Range<usize> {
        let e0 = self.eigenvalues[0];
        let end = self.eigenvalues.iter().take_while(|&&e| e - e0 <= window).count();
        0..end
    }

    /// `V diag(E) V^†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::new(self.eigenvalues[k], 0.0);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `V f(E) V^†` for a scalar function applied to the spectrum.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Dense unitary `exp(-i H theta)`.
    pub fn propagator(&self, theta: f64) -> DMatrix<C64> {
        self.function(|e| C64::new(0.0, -e * theta).exp())
    }

    /// `exp(-i H theta) psi`.
    pub fn evolve(&self, theta: f64, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), psi.dim())?;
        let mut coefficients = self.to_eigenbasis(psi.amplitudes());
        for (c, &e) in coefficients.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::new(0.0, -e * theta).exp();
        }
        Ok(StateVector {
            amplitudes: self.from_eigenbasis(&coefficients),
        })
    }
}

/// Complex amplitudes of a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes as given; [`fidelity`] rejects unnormalized input.
    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn normalized(mut amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn renormalize(&mut self) {
        let norm = self.amplitudes.norm();
        if norm > 0.0 {
            self.amplitudes.unscale_mut(norm);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Ascending eigendecomposition with each eigenvector's first non-negligible
/// component made real and positive.
pub fn spectral_decompose(h: &HermitianOperator) -> SpectralDecomposition {
    let dim = h.dim();
    let (values, vectors) = if h.is_real() {
        let real = h.matrix.map(|z| z.re);
        let eig = real.symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = h.matrix.clone().symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).into_owned();
        if let Some(pivot) = col.iter().find(|z| z.norm() > PHASE_THRESHOLD) {
            let phase = pivot.conj() / pivot.norm();
            col *= phase;
        }
        eigenvectors.set_column(dst, &col);
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(h: &HermitianOperator) -> Vec<f64> {
    let mut values: Vec<f64> = if h.is_real() {
        h.matrix.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.matrix.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// `exp(-i H theta) psi` through the spectral decomposition of `H`.
pub fn evolve(h: &HermitianOperator, theta: f64, psi: &StateVector) -> Result<StateVector> {
    check_dim(h.dim(), psi.dim())?;
    spectral_decompose(h).evolve(theta, psi)
}

/// Squared overlap `|<phi|psi>|^2`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    check_dim(psi.dim(), phi.dim())?;
    for s in [psi, phi] {
        let norm = s.norm();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
    }
    Ok(phi.amplitudes.dotc(&psi.amplitudes).norm_sqr().min(1.0))
}

/// Populations `|<E_k|psi>|^2` in ascending-energy order.
pub fn populations(decomposition: &SpectralDecomposition, psi: &StateVector) -> Result<Vec<f64>> {
    check_dim(decomposition.dim(), psi.dim())?;
    Ok(decomposition
        .to_eigenbasis(psi.amplitudes())
        .iter()
        .map(|c| c.norm_sqr())
        .collect())
}

/// Total population inside the ground space (levels within `window` of `E_0`).
pub fn ground_space_fidelity(decomposition: &SpectralDecomposition, psi: &StateVector, window: f64) -> Result<f64> {
    let pops = populations(decomposition, psi)?;
    let total: f64 = pops[decomposition.ground_space(window)].iter().sum();
    Ok(total.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> HermitianOperator {
        HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap()
    }

    fn pauli_z() -> HermitianOperator {
        HermitianOperator::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn diagonal_spectrum_is_standard_basis() {
        let d = spectral_decompose(&HermitianOperator::diagonal(&[1.0, -1.0]));
        assert_eq!(d.eigenvalues(), &[-1.0, 1.0]);
        assert!((d.eigenvector(0).amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((d.eigenvector(1).amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn minus_z_ground_state_is_up() {
        let d = spectral_decompose(&pauli_z().scaled(-1.0));
        assert_eq!(d.eigenvalues(), &[-1.0, 1.0]);
        let g = d.ground_state();
        assert!((g.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn transverse_midpoint_gap() {
        let h = pauli_x().scaled(-0.2);
        let e = spectral_decompose(&h);
        assert!((e.eigenvalues()[1] - e.eigenvalues()[0] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected_with_pair() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(2.0, 1.0),
                c(0.0, 0.0),
                c(2.0, 1.0),
                c(1.0, 0.0),
            ],
        );
        match HermitianOperator::new(m) {
            Err(Error::NonHermitian { row, col, .. }) => assert_eq!((row, col), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let out = evolve(&pauli_x(), 0.0, &psi).unwrap();
        assert!((out.amplitudes() - psi.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn z_evolution_for_pi_is_global_phase() {
        let psi = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let out = evolve(&pauli_z(), PI, &psi).unwrap();
        assert!((out.amplitudes() + psi.amplitudes()).norm() < 1e-14);
        assert!((fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn x_evolution_matches_analytic_exponential() {
        // exp(-i X t) = cos t - i sin t X
        let psi = StateVector::basis(2, 0);
        for &t in &[0.3, 1.1, FRAC_PI_2, -2.5] {
            let out = evolve(&pauli_x(), t, &psi).unwrap();
            assert!((out.amplitudes()[0] - c(t.cos(), 0.0)).norm() < 1e-14);
            assert!((out.amplitudes()[1] - c(0.0, -t.sin())).norm() < 1e-14);
        }
        let flipped = evolve(&pauli_x(), FRAC_PI_2, &psi).unwrap();
        assert!((fidelity(&flipped, &StateVector::basis(2, 1)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let up = StateVector::basis(2, 0);
        let down = StateVector::basis(2, 1);
        let plus = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(fidelity(&up, &up).unwrap(), 1.0);
        assert_eq!(fidelity(&up, &down).unwrap(), 0.0);
        assert!((fidelity(&up, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!((fidelity(&plus, &up).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_unnormalized() {
        let bad = StateVector::from_amplitudes(DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]));
        assert!(matches!(
            fidelity(&bad, &StateVector::basis(2, 0)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let psi = StateVector::basis(3, 0);
        assert!(matches!(
            evolve(&pauli_x(), 1.0, &psi),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        let d = spectral_decompose(&pauli_x());
        assert!(populations(&d, &psi).is_err());
    }

    #[test]
    fn populations_of_eigenvectors() {
        let h = HermitianOperator::from_real(DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 0.5, 0.0, 0.5, -1.0, 0.3, 0.0, 0.3, 0.7],
        ))
        .unwrap();
        let d = spectral_decompose(&h);
        let p = populations(&d, &d.ground_state()).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12 && p[2].abs() < 1e-12);

        let mix = StateVector::normalized(d.eigenvector(0).amplitudes() + d.eigenvector(1).amplitudes()).unwrap();
        let p = populations(&d, &mix).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12 && p[2].abs() < 1e-12);
    }

    #[test]
    fn phase_convention_first_component_positive() {
        let h = HermitianOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let d = spectral_decompose(&h);
        for k in 0..2 {
            let first = d.eigenvector(k).amplitudes()[0];
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn degenerate_ground_space_window() {
        let d = spectral_decompose(&HermitianOperator::diagonal(&[-1.0, -1.0, 0.5]));
        assert_eq!(d.ground_space(1e-8), 0..2);
        let psi = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!((ground_space_fidelity(&d, &psi, 1e-8).unwrap() - 1.0).abs() < 1e-14);
    }
}
