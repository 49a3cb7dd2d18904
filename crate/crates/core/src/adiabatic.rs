//! Reference adiabatic evolution `i d/dt psi = H(lambda(t/T)) psi`.
//!
//! Time is cut into `K` equal steps, each an exact exponential of `H` at the
//! step midpoint; `K` is doubled until two successive runs agree.

use nalgebra::DVector;

use crate::alternating::TransferResult;
use crate::error::{Error, Result};
use crate::linalg::chebyshev::ChebyshevPropagator;
use crate::linalg::{check_dim, fidelity, spectral_decompose, StateVector, C64};
use crate::models::{HamiltonianFamily, Schedule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationConfig {
    pub total_time: f64,
    pub initial_steps: usize,
    /// Convergence is declared once `1 - F(psi_K, psi_2K) <= tolerance`.
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl PropagationConfig {
    pub fn new(total_time: f64) -> Result<Self> {
        let config = Self {
            total_time,
            initial_steps: 64,
            tolerance: 1e-8,
            max_doublings: 20,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "total time must be finite and >= 0, got {}",
                self.total_time
            )));
        }
        if self.initial_steps < 8 {
            return Err(Error::InvalidParameter("initial step count must be >= 8".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// Step count of the accepted run.
    pub steps: usize,
    /// `(K, 1 - F(psi_K, psi_2K))` for each comparison made.
    pub history: Vec<(usize, f64)>,
}

/// One run with exactly `steps` midpoint steps (rounded up to a multiple of
/// the slice count so that slice states land on step boundaries).
pub fn propagate_fixed(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    total_time: f64,
    steps: usize,
    initial: &StateVector,
) -> Result<TransferResult> {
    check_dim(family.dim(), initial.dim())?;
    let slices = schedule.slice_count();
    let steps = steps.max(1).div_ceil(slices) * slices;
    let per_slice = steps / slices;
    let dt = total_time / steps as f64;

    let affine = family.affine_sparse();
    let mut h = affine.evaluate(schedule.start().components())?;
    let mut propagator = ChebyshevPropagator::new(family.dim());
    let mut psi: DVector<C64> = initial.amplitudes().clone();
    let mut drift: f64 = 0.0;
    let mut slice_states = vec![initial.clone()];
    for i in 0..steps {
        let s = (i as f64 + 0.5) / steps as f64;
        affine.evaluate_into(schedule.at(s).components(), &mut h)?;
        propagator.evolve(&h, dt, &mut psi);
        let norm = psi.norm();
        drift = drift.max((norm - 1.0).abs());
        psi.unscale_mut(norm);
        if (i + 1) % per_slice == 0 {
            slice_states.push(StateVector::from_amplitudes(psi.clone()));
        }
    }
    Ok(TransferResult {
        final_state: StateVector::from_amplitudes(psi),
        slice_states,
        effective_time: total_time,
        norm_drift: drift,
    })
}

/// Step-doubling evolution from `initial` together with its convergence history.
pub fn evolve_adiabatic_from(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    config: &PropagationConfig,
    initial: &StateVector,
) -> Result<(TransferResult, ConvergenceReport)> {
    config.validate()?;
    let mut steps = config.initial_steps;
    let mut coarse = propagate_fixed(family, schedule, config.total_time, steps, initial)?;
    let mut history = Vec::new();
    for _ in 0..config.max_doublings {
        let fine = propagate_fixed(family, schedule, config.total_time, 2 * steps, initial)?;
        let deviation = (1.0 - fidelity(&coarse.final_state, &fine.final_state)?).max(0.0);
        history.push((steps, deviation));
        steps *= 2;
        coarse = fine;
        if deviation <= config.tolerance {
            log::debug!("adiabatic T = {} converged at K = {steps}", config.total_time);
            return Ok((coarse, ConvergenceReport { steps, history }));
        }
    }
    let deviation = history.last().map_or(f64::NAN, |h| h.1);
    Err(Error::NotConverged { steps, deviation })
}

/// Evolves the ground state of `H(lambda_i)` for time `config.total_time`.
pub fn evolve_adiabatic(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    config: &PropagationConfig,
) -> Result<TransferResult> {
    let initial = spectral_decompose(&family.hamiltonian_at(schedule.start())?).ground_state();
    Ok(evolve_adiabatic_from(family, schedule, config, &initial)?.0)
}
