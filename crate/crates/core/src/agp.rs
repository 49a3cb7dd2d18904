//! Adiabatic gauge potentials: exact, regularized, and trapezoid-discretized.
//!
//! All three are evaluated from the eigendecomposition `H = sum_n E_n |n><n|`
//! and the gradient elements `<m| dH/dlambda_c |n>`:
//!
//! * exact: `i <m|dH|n> / (E_n - E_m)`, zero on the diagonal;
//! * regularized: `i (E_n - E_m) / (eta^2 + (E_n - E_m)^2) <m|dH|n>`;
//! * discretized: `1/(2 eta M) sum_{0<|j|<M} sgn(j) e^{iHs_j} dH e^{-iHs_j}` sampled at
//!   `s_j = -sgn(j) ln(|j|/M) / eta`, the trapezoid rule for the regularized
//!   integral after substituting `u = e^{-eta s}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, HermitianOperator, SpectralDecomposition, C64};
use crate::models::{HamiltonianFamily, ParameterVector};

/// Smallest level spacing accepted by the exact gauge potential.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularizer(f64);

impl Regularizer {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularizer eta must be > 0, got {eta}"
            )));
        }
        Ok(Self(eta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AgpKind {
    Exact,
    Regularized { eta: f64 },
    Discretized { eta: f64, steps: usize },
}

/// One Hermitian operator per parameter component.
#[derive(Clone, Debug)]
pub struct AgpComponents {
    pub kind: AgpKind,
    pub components: Vec<HermitianOperator>,
}

impl AgpComponents {
    /// `delta . A`.
    pub fn contract(&self, delta: &ParameterVector) -> Result<HermitianOperator> {
        if delta.len() != self.components.len() {
            return Err(Error::DimensionMismatch {
                expected: self.components.len(),
                found: delta.len(),
            });
        }
        let mut out = HermitianOperator::zeros(self.components[0].dim());
        for (a, &d) in self.components.iter().zip(delta.components()) {
            out = out.add_scaled(a, d)?;
        }
        Ok(out)
    }

    pub fn max_deviation(&self, other: &AgpComponents) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_deviation(b))
            .fold(0.0, f64::max)
    }
}

/// Maps eigenbasis gradient elements `B_mn` to `f(E_m, E_n) B_mn` and back to the
/// computational basis.
fn dress(
    decomposition: &SpectralDecomposition,
    gradient: &[HermitianOperator],
    weight: impl Fn(f64, f64) -> C64,
) -> Result<Vec<HermitianOperator>> {
    let v = decomposition.eigenvectors();
    let e = decomposition.eigenvalues();
    let dim = e.len();
    let mut weights = DMatrix::<C64>::zeros(dim, dim);
    for m in 0..dim {
        for n in 0..dim {
            if m != n {
                weights[(m, n)] = weight(e[m], e[n]);
            }
        }
    }
    gradient
        .iter()
        .map(|g| {
            crate::linalg::check_dim(dim, g.dim())?;
            let b = v.ad_mul(&(g.matrix() * v));
            let a = b.component_mul(&weights);
            HermitianOperator::new(v * a * v.adjoint())
        })
        .collect()
}

pub fn exact_agp_for(h: &HermitianOperator, gradient: &[HermitianOperator]) -> Result<Vec<HermitianOperator>> {
    let decomposition = spectral_decompose(h);
    let e = decomposition.eigenvalues();
    for k in 1..e.len() {
        let separation = e[k] - e[k - 1];
        if separation <= DEGENERACY_THRESHOLD {
            return Err(Error::Degenerate {
                lower: k - 1,
                upper: k,
                separation,
            });
        }
    }
    dress(&decomposition, gradient, |em, en| C64::new(0.0, 1.0 / (en - em)))
}

pub fn regularized_agp_for(
    h: &HermitianOperator,
    gradient: &[HermitianOperator],
    eta: Regularizer,
) -> Result<Vec<HermitianOperator>> {
    let eta = eta.value();
    let decomposition = spectral_decompose(h);
    dress(&decomposition, gradient, |em, en| {
        let w = en - em;
        C64::new(0.0, w / (eta * eta + w * w))
    })
}

pub fn discretized_agp_for(
    h: &HermitianOperator,
    gradient: &[HermitianOperator],
    eta: Regularizer,
    steps: usize,
) -> Result<Vec<HermitianOperator>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "trapezoid step count M must be >= 2, got {steps}"
        )));
    }
    let eta = eta.value();
    let decomposition = spectral_decompose(h);
    let nodes: Vec<f64> = (1..steps).map(|j| (j as f64 / steps as f64).ln() / eta).collect();
    let prefactor = 1.0 / (eta * steps as f64);
    // the +j and -j conjugations combine into 2i sin((E_m - E_n) ln(j/M) / eta)
    dress(&decomposition, gradient, |em, en| {
        let w = em - en;
        let s: f64 = nodes.iter().map(|a| (a * w).sin()).sum();
        C64::new(0.0, prefactor * s)
    })
}

pub fn exact_agp(family: &HamiltonianFamily, lambda: &ParameterVector) -> Result<AgpComponents> {
    let h = family.hamiltonian_at(lambda)?;
    Ok(AgpComponents {
        kind: AgpKind::Exact,
        components: exact_agp_for(&h, family.gradient_at(lambda)?)?,
    })
}

pub fn regularized_agp(
    family: &HamiltonianFamily,
    lambda: &ParameterVector,
    eta: Regularizer,
) -> Result<AgpComponents> {
    let h = family.hamiltonian_at(lambda)?;
    Ok(AgpComponents {
        kind: AgpKind::Regularized { eta: eta.value() },
        components: regularized_agp_for(&h, family.gradient_at(lambda)?, eta)?,
    })
}

pub fn discretized_agp(
    family: &HamiltonianFamily,
    lambda: &ParameterVector,
    eta: Regularizer,
    steps: usize,
) -> Result<AgpComponents> {
    let h = family.hamiltonian_at(lambda)?;
    Ok(AgpComponents {
        kind: AgpKind::Discretized {
            eta: eta.value(),
            steps,
        },
        components: discretized_agp_for(&h, family.gradient_at(lambda)?, eta, steps)?,
    })
}
