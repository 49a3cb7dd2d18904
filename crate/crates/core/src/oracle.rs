//! Slow reference constructions used to check the fast paths.
//!
//! Nothing here is tuned; each routine follows its defining formula as
//! literally as possible.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, HermitianOperator, C64};
use crate::models::{HamiltonianFamily, ParameterVector};

fn hermitized(m: DMatrix<C64>) -> HermitianOperator {
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    HermitianOperator::from_matrix_unchecked(sym)
}

/// Gauge potential components `A_mn = i <m|d_k n>` from central differences
/// of eigenvectors. Requires a non-degenerate spectrum at `lambda`.
pub fn finite_difference_agp(
    family: &HamiltonianFamily,
    lambda: &ParameterVector,
    delta: f64,
) -> Result<Vec<HermitianOperator>> {
    let center = spectral_decompose(&family.hamiltonian_at(lambda)?);
    let v0 = center.eigenvectors();
    let dim = family.dim();
    let mut out = Vec::with_capacity(family.parameter_count());
    for k in 0..family.parameter_count() {
        let mut step = vec![0.0; family.parameter_count()];
        step[k] = delta;
        let step = ParameterVector::new(step)?;
        let plus = spectral_decompose(&family.hamiltonian_at(&lambda.add(&step))?);
        let minus = spectral_decompose(&family.hamiltonian_at(&lambda.sub(&step))?);
        let aligned = |m: &DMatrix<C64>| {
            let mut m = m.clone();
            for n in 0..dim {
                let overlap = v0.column(n).dotc(&m.column(n));
                let phase = overlap.conj() / overlap.norm();
                for r in 0..dim {
                    m[(r, n)] *= phase;
                }
            }
            m
        };
        let d = (aligned(plus.eigenvectors()) - aligned(minus.eigenvectors())) / C64::new(2.0 * delta, 0.0);
        let mut a = DMatrix::<C64>::zeros(dim, dim);
        for n in 0..dim {
            let vn = v0.column(n);
            let dn: DVector<C64> = d.column(n).into_owned();
            let projected = &dn - vn * vn.dotc(&dn);
            a += projected * vn.adjoint() * C64::new(0.0, 1.0);
        }
        out.push(hermitized(a));
    }
    Ok(out)
}

/// `-(1/2) int_0^inf e^{-eta s} (e^{iHs} G e^{-iHs} - e^{-iHs} G e^{iHs}) ds`
/// by composite Simpson quadrature on `[0, 50/eta]`.
pub fn quadrature_regularized_agp(
    h: &HermitianOperator,
    g: &HermitianOperator,
    eta: f64,
    intervals: usize,
) -> HermitianOperator {
    let intervals = intervals + intervals % 2;
    let span = 50.0 / eta;
    let step = span / intervals as f64;
    let decomposition = spectral_decompose(h);
    let g = g.matrix();
    let mut sum = DMatrix::<C64>::zeros(h.dim(), h.dim());
    for i in 0..=intervals {
        let s = i as f64 * step;
        let weight = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let u = decomposition.propagator(s);
        let forward = u.adjoint() * g * &u;
        let backward = &u * g * u.adjoint();
        sum += (forward - backward) * C64::new(weight * (-eta * s).exp(), 0.0);
    }
    hermitized(sum * C64::new(-0.5 * step / 3.0, 0.0))
}

/// `-(1/(2 eta M)) sum_{j=1}^{M-1} (e^{iHs_j} G e^{-iHs_j} - e^{-iHs_j} G e^{iHs_j})`
/// with `s_j = -ln(j/M)/eta`, evaluated with dense propagators.
pub fn dense_trapezoid_agp(
    family: &HamiltonianFamily,
    lambda: &ParameterVector,
    eta: f64,
    steps: usize,
) -> Result<Vec<HermitianOperator>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("M must be >= 2, got {steps}")));
    }
    let decomposition = spectral_decompose(&family.hamiltonian_at(lambda)?);
    let propagators: Vec<DMatrix<C64>> = (1..steps)
        .map(|j| decomposition.propagator(-(j as f64 / steps as f64).ln() / eta))
        .collect();
    let scale = C64::new(-1.0 / (2.0 * eta * steps as f64), 0.0);
    let mut out = Vec::new();
    for g in family.gradient_at(lambda)? {
        let g = g.matrix();
        let mut sum = DMatrix::<C64>::zeros(family.dim(), family.dim());
        for u in &propagators {
            sum += u.adjoint() * g * u - u * g * u.adjoint();
        }
        out.push(hermitized(sum * scale));
    }
    Ok(out)
}

/// `exp(-i theta H)` for a 2x2 Hermitian `H` from the Pauli decomposition.
pub fn pauli_exponential(h: &HermitianOperator, theta: f64) -> DMatrix<C64> {
    assert_eq!(h.dim(), 2, "pauli_exponential needs a 2x2 operator");
    let m = h.matrix();
    let a0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let az = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let ax = m[(0, 1)].re;
    let ay = -m[(0, 1)].im;
    let r = (ax * ax + ay * ay + az * az).sqrt();
    let traceless = m - DMatrix::<C64>::identity(2, 2) * C64::new(a0, 0.0);
    let (c, s) = ((theta * r).cos(), (theta * r).sin());
    let sinc = if r > 0.0 { s / r } else { theta };
    let body = DMatrix::<C64>::identity(2, 2) * C64::new(c, 0.0) - traceless * C64::new(0.0, sinc);
    body * C64::new(0.0, -theta * a0).exp()
}

/// The full step `u U u` for a 2x2 `H`, multiplied out left to right as the
/// product is written.
pub fn dense_step_product(h: &HermitianOperator, g: &HermitianOperator, eta: f64, steps: usize) -> DMatrix<C64> {
    let m_f = steps as f64;
    let theta = 1.0 / (2.0 * eta * m_f);
    let outer = pauli_exponential(h, -(1.0 / m_f).ln() / eta);
    let mut product = outer.clone();
    for m in (1..steps).map(|j| -(j as f64)) {
        product = product * pauli_exponential(g, theta) * pauli_exponential(h, (m / (m - 1.0)).ln() / eta);
    }
    for m in (1..steps).rev().map(|j| j as f64) {
        product = product * pauli_exponential(h, (m / (m + 1.0)).ln() / eta) * pauli_exponential(g, -theta);
    }
    product * outer
}

/// Collective `sum_i Z_i` and `sum_i X_i` on `n` qubits restricted to the
/// symmetric subspace, built from the `2^n` computational basis. Dicke state
/// `k` is the uniform superposition of strings with `k` flipped spins.
pub fn brute_force_collective(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(n <= 14, "brute force limited to small registers");
    let full = 1usize << n;
    let dicke: Vec<DVector<f64>> = (0..=n)
        .map(|k| {
            let mut v = DVector::zeros(full);
            for s in 0..full {
                if s.count_ones() as usize == k {
                    v[s] = 1.0;
                }
            }
            let norm = v.norm();
            v / norm
        })
        .collect();
    let apply_z = |v: &DVector<f64>| DVector::from_fn(full, |s, _| (n as f64 - 2.0 * s.count_ones() as f64) * v[s]);
    let apply_x = |v: &DVector<f64>| {
        let mut out = DVector::zeros(full);
        for s in 0..full {
            for bit in 0..n {
                out[s ^ (1 << bit)] += v[s];
            }
        }
        out
    };
    let project = |apply: &dyn Fn(&DVector<f64>) -> DVector<f64>| {
        let images: Vec<DVector<f64>> = dicke.iter().map(apply).collect();
        DMatrix::from_fn(n + 1, n + 1, |r, c| dicke[r].dot(&images[c]))
    };
    (project(&apply_z), project(&apply_x))
}
