//! Alternating-unitary approximation of parallel transport.
//!
//! One transport step `|n(lambda)> -> |n(lambda + dlambda)>` is the product
//! `u U u` of exponentials of `H = H(lambda)` and `G = dlambda . grad H(lambda)`:
//!
//! ```text
//! u = exp(+(i/eta) ln(1/M) H)
//! U = prod_{m=-1}^{-M+1} [exp(-i G/(2 eta M)) exp(-(i/eta) ln(m/(m-1)) H)]
//!   * prod_{m=M-1}^{1}  [exp(-(i/eta) ln(m/(m+1)) H) exp(+i G/(2 eta M))]
//! ```
//!
//! Products are ordered left to right as written, so the rightmost factor
//! (`m = 1` of the second block, its `G` exponential) acts on the state first.
//! It is the first-order Trotterization of `exp(-i dlambda . A)` with `A` the
//! trapezoid-discretized regularized gauge potential.
//!
//! The work is done in the eigenbasis of `H`, where every `H` factor is a
//! diagonal phase and the two `G` factors `exp(-/+ i G/(2 eta M))` are fixed
//! dense unitaries.

use nalgebra::{DMatrix, DVector};

use crate::agp::Regularizer;
use crate::error::{Error, Result};
use crate::linalg::{check_dim, spectral_decompose, HermitianOperator, SpectralDecomposition, StateVector, C64};
use crate::models::{HamiltonianFamily, ParameterVector, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `L` sequential steps, each `u U u`.
    Standard,
    /// Steps paired as `U^dag(lambda + dlambda, -dlambda) U(lambda, dlambda)` with
    /// the outer `u` factors of neighbouring steps merged into exponentials of
    /// `dlambda . grad H` and the first and last ones dropped.
    Reduced,
}

/// Where `H` and `grad H` are evaluated inside each parameter slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvaluationPoint {
    LeftEndpoint,
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternatingParams {
    pub eta: Regularizer,
    /// Trapezoid step count `M`.
    pub steps: usize,
    /// Parameter slice count `L`.
    pub slices: usize,
    pub variant: Variant,
    pub evaluation: EvaluationPoint,
}

impl AlternatingParams {
    pub fn new(eta: f64, steps: usize, slices: usize, variant: Variant) -> Result<Self> {
        let params = Self {
            eta: Regularizer::new(eta)?,
            steps,
            slices,
            variant,
            evaluation: EvaluationPoint::LeftEndpoint,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_evaluation(mut self, evaluation: EvaluationPoint) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!("M must be >= 2, got {}", self.steps)));
        }
        if self.slices < 1 {
            return Err(Error::InvalidParameter("L must be >= 1".into()));
        }
        if self.variant == Variant::Reduced && self.slices % 2 == 1 {
            return Err(Error::OddSliceCount(self.slices));
        }
        Ok(())
    }

    pub fn effective_time(&self) -> f64 {
        let (eta, m, l) = (self.eta.value(), self.steps as u64, self.slices as u64);
        match self.variant {
            Variant::Standard => effective_time(eta, m, l),
            Variant::Reduced => effective_time_reduced(eta, m, l).expect("validated even L"),
        }
    }
}

/// Output of a transfer along a schedule (alternating or adiabatic).
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub final_state: StateVector,
    /// `L + 1` states, index 0 the initial state.
    pub slice_states: Vec<StateVector>,
    /// `T_eff` for alternating transfers, the physical time `T` for adiabatic ones.
    pub effective_time: f64,
    /// Largest `| |psi| - 1 |` seen before any renormalization.
    pub norm_drift: f64,
}

/// `T_eff = (4L/eta) ln M + (L/eta)(1 - 1/M)`.
pub fn effective_time(eta: f64, steps: u64, slices: u64) -> f64 {
    let (m, l) = (steps as f64, slices as f64);
    4.0 * l / eta * m.ln() + l / eta * (1.0 - 1.0 / m)
}

/// `T_eff^r = ((3L - 1)/eta) ln M + (L/eta)(1 - 1/M)`; `L` must be even.
pub fn effective_time_reduced(eta: f64, steps: u64, slices: u64) -> Result<f64> {
    if slices % 2 == 1 {
        return Err(Error::OddSliceCount(slices as usize));
    }
    let (m, l) = (steps as f64, slices as f64);
    Ok((3.0 * l - 1.0) / eta * m.ln() + l / eta * (1.0 - 1.0 / m))
}

/// One exponential in application order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `exp(-i c H)`.
    Hamiltonian(f64),
    /// `exp(-i c G)`.
    Derivative(f64),
}

impl Factor {
    fn adjoint(self) -> Self {
        match self {
            Factor::Hamiltonian(c) => Factor::Hamiltonian(-c),
            Factor::Derivative(c) => Factor::Derivative(-c),
        }
    }
}

/// The outer factor `u = exp(-i (ln M / eta) H)`.
pub fn outer_factor(eta: f64, steps: usize) -> Factor {
    Factor::Hamiltonian((steps as f64).ln() / eta)
}

/// Factors of `U` in the order they act on the state.
pub fn core_factors(eta: f64, steps: usize) -> Vec<Factor> {
    let theta = 1.0 / (2.0 * eta * steps as f64);
    let mut factors = Vec::with_capacity(4 * (steps - 1));
    // right block, m = 1 acts first: exp(+i theta G) then exp(-(i/eta) ln(m/(m+1)) H)
    for m in 1..steps {
        factors.push(Factor::Derivative(-theta));
        factors.push(Factor::Hamiltonian((m as f64 / (m + 1) as f64).ln() / eta));
    }
    // left block, m = -M+1 acts first: exp(-(i/eta) ln(m/(m-1)) H) then exp(-i theta G)
    for j in (1..steps).rev() {
        factors.push(Factor::Hamiltonian((j as f64 / (j + 1) as f64).ln() / eta));
        factors.push(Factor::Derivative(theta));
    }
    factors
}

/// Factors of the full step `u U u` in the order they act on the state.
pub fn step_factors(eta: f64, steps: usize) -> Vec<Factor> {
    let outer = outer_factor(eta, steps);
    let mut factors = vec![outer];
    factors.extend(core_factors(eta, steps));
    factors.push(outer);
    factors
}

/// `H(lambda)` and `G` prepared for applying factor sequences.
struct StepKernel {
    decomposition: SpectralDecomposition,
    theta: f64,
    /// `V^dag exp(-i theta G) V`.
    forward: DMatrix<C64>,
    /// `V^dag exp(+i theta G) V`.
    backward: DMatrix<C64>,
}

impl StepKernel {
    fn new(h: &HermitianOperator, g: &HermitianOperator, eta: f64, steps: usize) -> Self {
        let decomposition = spectral_decompose(h);
        let theta = 1.0 / (2.0 * eta * steps as f64);
        let g_exp = spectral_decompose(g).propagator(theta);
        let v = decomposition.eigenvectors();
        let forward = v.ad_mul(&(g_exp * v));
        let backward = forward.adjoint();
        Self {
            decomposition,
            theta,
            forward,
            backward,
        }
    }

    /// Applies `factors` to eigenbasis coordinates `x`.
    fn apply(&self, factors: &[Factor], x: &mut DVector<C64>, buffer: &mut DVector<C64>) {
        let energies = self.decomposition.eigenvalues();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        for factor in factors {
            match *factor {
                Factor::Hamiltonian(c) => {
                    for (xk, &e) in x.iter_mut().zip(energies) {
                        *xk *= C64::new(0.0, -c * e).exp();
                    }
                }
                Factor::Derivative(c) => {
                    let matrix = if c > 0.0 { &self.forward } else { &self.backward };
                    debug_assert!((c.abs() - self.theta).abs() <= 1e-12 * self.theta);
                    buffer.gemv(one, matrix, x, zero);
                    std::mem::swap(x, buffer);
                }
            }
        }
    }

    fn apply_to_state(&self, factors: &[Factor], psi: &StateVector) -> DVector<C64> {
        let mut x = self.decomposition.to_eigenbasis(psi.amplitudes());
        let mut buffer = DVector::zeros(x.len());
        self.apply(factors, &mut x, &mut buffer);
        self.decomposition.from_eigenbasis(&x)
    }
}

fn renormalized(amplitudes: DVector<C64>, drift: &mut f64) -> Result<StateVector> {
    *drift = drift.max((amplitudes.norm() - 1.0).abs());
    StateVector::normalized(amplitudes)
}

/// `u U u |psi>` with `H`, `grad H` taken at `lambda`; the output is renormalized.
pub fn apply_parallel_step(
    family: &HamiltonianFamily,
    lambda: &ParameterVector,
    delta: &ParameterVector,
    eta: Regularizer,
    steps: usize,
    psi: &StateVector,
) -> Result<StateVector> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("M must be >= 2, got {steps}")));
    }
    check_dim(family.dim(), psi.dim())?;
    let h = family.hamiltonian_at(lambda)?;
    let g = family.directional_derivative(lambda, delta)?;
    let kernel = StepKernel::new(&h, &g, eta.value(), steps);
    let mut drift = 0.0;
    renormalized(
        kernel.apply_to_state(&step_factors(eta.value(), steps), psi),
        &mut drift,
    )
}

/// Transports the ground state of `H(lambda_i)` along `schedule`, re-sliced to
/// `params.slices` slices.
pub fn run_transfer(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    params: &AlternatingParams,
) -> Result<TransferResult> {
    let initial = spectral_decompose(&family.hamiltonian_at(schedule.start())?).ground_state();
    run_transfer_from(family, schedule, params, initial)
}

/// As [`run_transfer`] from an arbitrary normalized initial state.
pub fn run_transfer_from(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    params: &AlternatingParams,
    initial: StateVector,
) -> Result<TransferResult> {
    params.validate()?;
    check_dim(family.dim(), initial.dim())?;
    let schedule = if schedule.slice_count() == params.slices {
        schedule.clone()
    } else {
        schedule.with_slice_count(params.slices)?
    };
    match params.variant {
        Variant::Standard => run_standard(family, &schedule, params, initial),
        Variant::Reduced => run_reduced(family, &schedule, params, initial),
    }
}

fn evaluation_point(schedule: &Schedule, params: &AlternatingParams, l: usize) -> ParameterVector {
    match params.evaluation {
        EvaluationPoint::LeftEndpoint => schedule.slices()[l].clone(),
        EvaluationPoint::Midpoint => schedule.at((l as f64 + 0.5) / schedule.slice_count() as f64),
    }
}

fn kernel_for(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    params: &AlternatingParams,
    l: usize,
    direction: f64,
) -> Result<StepKernel> {
    let at = evaluation_point(schedule, params, l);
    let (_, delta) = schedule.step(l);
    let h = family.hamiltonian_at(&at)?;
    let g = family.directional_derivative(&at, &delta.scaled(direction))?;
    Ok(StepKernel::new(&h, &g, params.eta.value(), params.steps))
}

fn run_standard(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    params: &AlternatingParams,
    initial: StateVector,
) -> Result<TransferResult> {
    let factors = step_factors(params.eta.value(), params.steps);
    let mut drift = 0.0;
    let mut psi = initial;
    let mut slice_states = vec![psi.clone()];
    for l in 0..schedule.slice_count() {
        let kernel = kernel_for(family, schedule, params, l, 1.0)?;
        psi = renormalized(kernel.apply_to_state(&factors, &psi), &mut drift)?;
        slice_states.push(psi.clone());
    }
    Ok(TransferResult {
        final_state: psi,
        slice_states,
        effective_time: params.effective_time(),
        norm_drift: drift,
    })
}

/// `exp(-i c dlambda_l . grad H(lambda_l))`, standing in for a product of two
/// outer factors at neighbouring slices.
fn merged_outer(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    l: usize,
    coefficient: f64,
    psi: &StateVector,
) -> Result<DVector<C64>> {
    let (lambda, delta) = schedule.step(l);
    let d = family.directional_derivative(lambda, &delta)?;
    Ok(spectral_decompose(&d).evolve(coefficient, psi)?.into_amplitudes())
}

fn run_reduced(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    params: &AlternatingParams,
    initial: StateVector,
) -> Result<TransferResult> {
    let eta = params.eta.value();
    let log_m = (params.steps as f64).ln() / eta;
    let forward = core_factors(eta, params.steps);
    let adjoint: Vec<Factor> = forward.iter().rev().map(|f| f.adjoint()).collect();

    let mut drift = 0.0;
    let mut psi = initial;
    let mut slice_states = vec![psi.clone()];
    for pair in 0..schedule.slice_count() / 2 {
        let (a, b) = (2 * pair, 2 * pair + 1);
        if pair > 0 {
            // u(lambda_a) u^dag(lambda_{a-1}) ~ exp(+(i/eta) ln(1/M) dlambda . grad H)
            psi = renormalized(merged_outer(family, schedule, a - 1, log_m, &psi)?, &mut drift)?;
            slice_states.push(psi.clone());
        }
        let kernel = kernel_for(family, schedule, params, a, 1.0)?;
        psi = renormalized(kernel.apply_to_state(&forward, &psi), &mut drift)?;

        // u^dag(lambda_b) u(lambda_a) ~ exp(-(i/eta) ln(1/M) dlambda . grad H)
        psi = renormalized(merged_outer(family, schedule, a, -log_m, &psi)?, &mut drift)?;
        slice_states.push(psi.clone());

        let kernel = kernel_for(family, schedule, params, b, -1.0)?;
        psi = renormalized(kernel.apply_to_state(&adjoint, &psi), &mut drift)?;
    }
    slice_states.push(psi.clone());
    Ok(TransferResult {
        final_state: psi,
        slice_states,
        effective_time: params.effective_time(),
        norm_drift: drift,
    })
}
