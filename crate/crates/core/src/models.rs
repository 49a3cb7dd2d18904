//! Benchmark Hamiltonian families and their parameter schedules.
//!
//! Both families are affine in the parameters, `H(lambda) = H_0 + sum_c lambda_c G_c`,
//! so the gradient `(G_c)` is independent of `lambda`. The p-spin model is
//! represented in the (N+1)-dimensional permutation-symmetric (Dicke) sector,
//! basis `|k>` = `k` spins flipped from all-up, where both the transverse-field
//! ground state and the dynamics live.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::sparse::AffineSparse;
use crate::linalg::{eigenvalues, HermitianOperator};

/// Energy window identifying the (possibly degenerate) ground space.
pub const GROUND_SPACE_WINDOW: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "parameter vector has non-finite entries: {components:?}"
            )));
        }
        Ok(Self(components))
    }

    pub fn scalar(value: f64) -> Self {
        Self(vec![value])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Path `s in [0, 1] -> lambda(s)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Path {
    /// `(h_x, h_z) = (h0x sin(pi s), h0z cos(pi s))`.
    SpinFlip { hx0: f64, hz0: f64 },
    /// Scalar `lambda = start + (end - start) s`.
    Linear { start: f64, end: f64 },
}

impl Path {
    pub fn at(&self, s: f64) -> ParameterVector {
        match *self {
            Path::SpinFlip { hx0, hz0 } => {
                // pin the endpoints exactly
                if s == 0.0 {
                    ParameterVector(vec![0.0, hz0])
                } else if s == 1.0 {
                    ParameterVector(vec![0.0, -hz0])
                } else {
                    ParameterVector(vec![hx0 * (PI * s).sin(), hz0 * (PI * s).cos()])
                }
            }
            Path::Linear { start, end } => {
                if s == 1.0 {
                    ParameterVector(vec![end])
                } else {
                    ParameterVector(vec![start + (end - start) * s])
                }
            }
        }
    }
}

/// A path together with its uniform `L`-slice discretization in `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    path: Path,
    slices: Vec<ParameterVector>,
}

impl Schedule {
    pub fn new(path: Path, slice_count: usize) -> Result<Self> {
        if slice_count == 0 {
            return Err(Error::InvalidParameter("slice count L must be >= 1".into()));
        }
        let slices = (0..=slice_count)
            .map(|l| path.at(l as f64 / slice_count as f64))
            .collect();
        Ok(Self { path, slices })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn at(&self, s: f64) -> ParameterVector {
        self.path.at(s)
    }

    /// `L`.
    pub fn slice_count(&self) -> usize {
        self.slices.len() - 1
    }

    /// `lambda(l / L)` for `l = 0..=L`.
    pub fn slices(&self) -> &[ParameterVector] {
        &self.slices
    }

    pub fn start(&self) -> &ParameterVector {
        &self.slices[0]
    }

    pub fn end(&self) -> &ParameterVector {
        &self.slices[self.slices.len() - 1]
    }

    /// `(lambda_l, lambda_{l+1} - lambda_l)`.
    pub fn step(&self, l: usize) -> (&ParameterVector, ParameterVector) {
        (&self.slices[l], self.slices[l + 1].sub(&self.slices[l]))
    }

    pub fn with_slice_count(&self, slice_count: usize) -> Result<Self> {
        Self::new(self.path.clone(), slice_count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelLabel {
    TwoLevel {
        hx0: f64,
        hz0: f64,
    },
    PSpin {
        n: usize,
        p: u32,
        coupling: f64,
        transverse: f64,
    },
}

/// Affine family `H(lambda) = offset + sum_c lambda_c gradient[c]`.
#[derive(Clone, Debug)]
pub struct HamiltonianFamily {
    label: ModelLabel,
    offset: HermitianOperator,
    gradient: Vec<HermitianOperator>,
}

impl HamiltonianFamily {
    pub fn label(&self) -> &ModelLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn parameter_count(&self) -> usize {
        self.gradient.len()
    }

    fn check_parameters(&self, lambda: &ParameterVector) -> Result<()> {
        if lambda.len() != self.gradient.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gradient.len(),
                found: lambda.len(),
            });
        }
        Ok(())
    }

    pub fn hamiltonian_at(&self, lambda: &ParameterVector) -> Result<HermitianOperator> {
        self.check_parameters(lambda)?;
        let mut h = self.offset.clone();
        for (g, &x) in self.gradient.iter().zip(lambda.components()) {
            h = h.add_scaled(g, x)?;
        }
        Ok(h)
    }

    /// One operator per parameter component.
    pub fn gradient_at(&self, lambda: &ParameterVector) -> Result<&[HermitianOperator]> {
        self.check_parameters(lambda)?;
        Ok(&self.gradient)
    }

    /// `delta . grad H(lambda)`.
    pub fn directional_derivative(
        &self,
        lambda: &ParameterVector,
        delta: &ParameterVector,
    ) -> Result<HermitianOperator> {
        let gradient = self.gradient_at(lambda)?;
        self.check_parameters(delta)?;
        let mut out = HermitianOperator::zeros(self.dim());
        for (g, &d) in gradient.iter().zip(delta.components()) {
            out = out.add_scaled(g, d)?;
        }
        Ok(out)
    }

    /// Sparse form for propagators that re-evaluate `H(lambda)` many times.
    pub fn affine_sparse(&self) -> AffineSparse {
        AffineSparse::new(&self.offset, &self.gradient).expect("family operators share one dimension")
    }

    /// Final-state ground-space window; the p = 2 endpoint is two-fold degenerate.
    pub fn ground_space_window(&self) -> f64 {
        GROUND_SPACE_WINDOW
    }
}

fn pauli_x() -> HermitianOperator {
    HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).expect("Pauli X is Hermitian")
}

fn pauli_z() -> HermitianOperator {
    HermitianOperator::diagonal(&[1.0, -1.0])
}

/// `H(h_x, h_z) = -h_x X - h_z Z` for the spin flip.
pub fn two_level_family(hx0: f64, hz0: f64) -> Result<HamiltonianFamily> {
    if !(hx0 > 0.0 && hz0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fields must be positive, got h0x = {hx0}, h0z = {hz0}"
        )));
    }
    if hx0 / hz0 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "h0x / h0z must be <= 1, got {}",
            hx0 / hz0
        )));
    }
    Ok(HamiltonianFamily {
        label: ModelLabel::TwoLevel { hx0, hz0 },
        offset: HermitianOperator::zeros(2),
        gradient: vec![pauli_x().scaled(-1.0), pauli_z().scaled(-1.0)],
    })
}

/// `lambda_i = (0, h0z)` to `lambda_f = (0, -h0z)` along a half circle.
pub fn two_level_schedule(hx0: f64, hz0: f64, slice_count: usize) -> Result<Schedule> {
    Schedule::new(Path::SpinFlip { hx0, hz0 }, slice_count)
}

/// Collective `sum_i Z_i` on the Dicke sector: `(N - 2k)` on `|k>`.
pub fn dicke_sum_z(n: usize) -> Vec<f64> {
    (0..=n).map(|k| n as f64 - 2.0 * k as f64).collect()
}

/// Collective `sum_i X_i` on the Dicke sector: couples `|k>` and `|k+1>` with
/// `sqrt((k + 1)(N - k))`.
pub fn dicke_sum_x(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let c = (((k + 1) * (n - k)) as f64).sqrt();
        m[(k, k + 1)] = c;
        m[(k + 1, k)] = c;
    }
    m
}

/// `H(lambda) = -lambda (J / N^(p-1)) (sum Z)^p - (1 - lambda) Gamma sum X`.
pub fn pspin_family(n: usize, p: u32, coupling: f64, transverse: f64) -> Result<HamiltonianFamily> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be >= 2, got {n}")));
    }
    if !(p == 2 || p == 3) {
        return Err(Error::InvalidParameter(format!("p must be 2 or 3, got {p}")));
    }
    if !coupling.is_finite() || !transverse.is_finite() {
        return Err(Error::InvalidParameter("couplings must be finite".into()));
    }
    let scale = coupling / (n as f64).powi(p as i32 - 1);
    let interaction: Vec<f64> = dicke_sum_z(n).into_iter().map(|z| -scale * z.powi(p as i32)).collect();
    let sum_x = HermitianOperator::from_real(dicke_sum_x(n))?;
    let transverse_term = sum_x.scaled(-transverse);
    let gradient = HermitianOperator::diagonal(&interaction).sub(&transverse_term)?;
    Ok(HamiltonianFamily {
        label: ModelLabel::PSpin {
            n,
            p,
            coupling,
            transverse,
        },
        offset: transverse_term,
        gradient: vec![gradient],
    })
}

/// Linear annealing path `lambda(s) = s`.
pub fn pspin_schedule(slice_count: usize) -> Result<Schedule> {
    Schedule::new(Path::Linear { start: 0.0, end: 1.0 }, slice_count)
}

/// Location and size of the smallest `E_1 - E_0` along a schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapMinimum {
    pub gap: f64,
    pub s: f64,
}

fn gap_at(family: &HamiltonianFamily, schedule: &Schedule, s: f64) -> Result<f64> {
    let e = eigenvalues(&family.hamiltonian_at(&schedule.at(s))?);
    Ok(if e.len() < 2 { f64::INFINITY } else { e[1] - e[0] })
}

/// Minimum of `E_1 - E_0` over a uniform `s` grid, refined by golden-section
/// search between the neighbours of the best grid point. Resolution-limited
/// by the grid: a minimum narrower than the spacing may be missed.
pub fn min_gap_location(family: &HamiltonianFamily, schedule: &Schedule, grid: usize) -> Result<GapMinimum> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "gap grid must have >= 2 points, got {grid}"
        )));
    }
    let mut best = GapMinimum {
        gap: f64::INFINITY,
        s: 0.0,
    };
    let mut best_index = 0;
    for i in 0..grid {
        let s = i as f64 / (grid - 1) as f64;
        let gap = gap_at(family, schedule, s)?;
        if gap < best.gap {
            best = GapMinimum { gap, s };
            best_index = i;
        }
    }
    let h = 1.0 / (grid - 1) as f64;
    let mut a = (best_index as f64 - 1.0).max(0.0) * h;
    let mut b = ((best_index + 1) as f64 * h).min(1.0);
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = gap_at(family, schedule, c)?;
    let mut fd = gap_at(family, schedule, d)?;
    for _ in 0..200 {
        if (b - a) < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = gap_at(family, schedule, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = gap_at(family, schedule, d)?;
        }
    }
    for (gap, s) in [(fc, c), (fd, d)] {
        if gap < best.gap {
            best = GapMinimum { gap, s };
        }
    }
    Ok(best)
}

pub fn min_gap(family: &HamiltonianFamily, schedule: &Schedule, grid: usize) -> Result<f64> {
    Ok(min_gap_location(family, schedule, grid)?.gap)
}
