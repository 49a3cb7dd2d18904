use std::fmt;

use rayon::prelude::*;

use crate::adiabatic::{evolve_adiabatic, PropagationConfig};
use crate::alternating::{run_transfer, AlternatingParams, TransferResult};
use crate::bench::config::{ModelSpec, SweepSpec, TimePolicy};
use crate::bench::grid::{resolve_grid, GridPoint};
use crate::error::{Error, Result};
use crate::linalg::{ground_space_fidelity, populations, spectral_decompose};
use crate::models::{pspin_family, pspin_schedule, two_level_family, two_level_schedule, HamiltonianFamily, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Alternating,
    Adiabatic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Alternating => "alternating",
            Method::Adiabatic => "adiabatic",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "alternating" => Ok(Method::Alternating),
            "adiabatic" => Ok(Method::Adiabatic),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// One benchmark point. Integer fields are -1 and `eta` is `None` where they
/// do not apply (adiabatic records).
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub j: i64,
    pub k: i64,
    pub slices: i64,
    pub eta: Option<f64>,
    pub steps: i64,
    /// `T_eff` for alternating records, `T` for adiabatic ones.
    pub time: f64,
    pub fidelity: f64,
    /// `L + 1` rows of eigenstate populations when recorded.
    pub slice_populations: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub method: Method,
    pub j: i64,
    pub k: i64,
    pub slices: i64,
    pub time: f64,
    pub non_convergence: bool,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<PointFailure>,
    /// Largest pre-renormalization norm drift over all runs.
    pub max_norm_drift: f64,
}

impl SweepOutcome {
    pub fn alternating(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| r.method == Method::Alternating)
    }

    pub fn adiabatic(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| r.method == Method::Adiabatic)
    }
}

pub fn build_family(model: &ModelSpec) -> Result<HamiltonianFamily> {
    match *model {
        ModelSpec::TwoLevel { hx0, hz0 } => two_level_family(hx0, hz0),
        ModelSpec::Pspin {
            n,
            p,
            coupling,
            transverse,
        } => pspin_family(n, p, coupling, transverse),
    }
}

pub fn build_schedule(model: &ModelSpec, slices: usize) -> Result<Schedule> {
    match *model {
        ModelSpec::TwoLevel { hx0, hz0 } => two_level_schedule(hx0, hz0, slices),
        ModelSpec::Pspin { .. } => pspin_schedule(slices),
    }
}

/// Populations of each slice state in the eigenbasis of `H` at that slice,
/// ascending in energy.
pub fn slice_populations(
    family: &HamiltonianFamily,
    schedule: &Schedule,
    result: &TransferResult,
) -> Result<Vec<Vec<f64>>> {
    if result.slice_states.len() != schedule.slice_count() + 1 {
        return Err(Error::MissingSlices);
    }
    schedule
        .slices()
        .iter()
        .zip(&result.slice_states)
        .map(|(lambda, state)| populations(&spectral_decompose(&family.hamiltonian_at(lambda)?), state))
        .collect()
}

fn final_fidelity(family: &HamiltonianFamily, schedule: &Schedule, result: &TransferResult) -> Result<f64> {
    let d = spectral_decompose(&family.hamiltonian_at(schedule.end())?);
    ground_space_fidelity(&d, &result.final_state, family.ground_space_window())
}

/// Runs one alternating grid point; returns the record and the run's norm drift.
pub fn alternating_record(
    spec: &SweepSpec,
    family: &HamiltonianFamily,
    point: &GridPoint,
    record_populations: bool,
) -> Result<(RunRecord, f64)> {
    let schedule = build_schedule(&spec.model, point.slices)?;
    let params = AlternatingParams::new(point.eta, point.steps, point.slices, spec.run.variant.into())?
        .with_evaluation(spec.run.evaluation.into());
    let result = run_transfer(family, &schedule, &params)?;
    let slice_populations = if record_populations {
        Some(slice_populations(family, &schedule, &result)?)
    } else {
        None
    };
    log::info!(
        "alternating j={} k={} L={} T_eff={:.2}",
        point.j,
        point.k,
        point.slices,
        result.effective_time
    );
    let record = RunRecord {
        method: Method::Alternating,
        j: point.j,
        k: point.k,
        slices: point.slices as i64,
        eta: Some(point.eta),
        steps: point.steps as i64,
        time: result.effective_time,
        fidelity: final_fidelity(family, &schedule, &result)?,
        slice_populations,
    };
    Ok((record, result.norm_drift))
}

/// Runs adiabatic driving for time `time`, recording `slices + 1` states.
pub fn adiabatic_record(
    spec: &SweepSpec,
    family: &HamiltonianFamily,
    time: f64,
    slices: usize,
    record_populations: bool,
) -> Result<(RunRecord, f64)> {
    let schedule = build_schedule(&spec.model, slices)?;
    let a = &spec.adiabatic;
    let config = PropagationConfig {
        total_time: time,
        initial_steps: a.initial_steps,
        tolerance: a.tolerance,
        max_doublings: a.max_doublings,
    };
    let result = evolve_adiabatic(family, &schedule, &config)?;
    let slice_populations = if record_populations {
        Some(slice_populations(family, &schedule, &result)?)
    } else {
        None
    };
    log::info!("adiabatic T={time:.2}");
    let record = RunRecord {
        method: Method::Adiabatic,
        j: -1,
        k: -1,
        slices: -1,
        eta: None,
        steps: -1,
        time,
        fidelity: final_fidelity(family, &schedule, &result)?,
        slice_populations,
    };
    Ok((record, result.norm_drift))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Adiabatic times for the sweep: the sorted distinct `T_eff` values of the
/// alternating records, an explicit list, or nothing.
pub fn adiabatic_times(spec: &SweepSpec, alternating: &[RunRecord]) -> Vec<f64> {
    let mut times = match spec.adiabatic.policy {
        TimePolicy::Mirror => alternating.iter().map(|r| r.time).collect(),
        TimePolicy::Explicit => spec.adiabatic.times.clone(),
        TimePolicy::None => Vec::new(),
    };
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// Runs every grid point and then the adiabatic reference points on `workers`
/// threads. Output order is fixed: alternating records in `(j, k, L)` order,
/// then adiabatic records by ascending `T`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepOutcome> {
    let points = resolve_grid(spec)?;
    let family = build_family(&spec.model)?;
    let record = spec.run.record_populations;
    let pool = pool(workers)?;

    let alternating: Vec<Result<(RunRecord, f64)>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| alternating_record(spec, &family, p, record))
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut drift: f64 = 0.0;
    for (point, outcome) in points.iter().zip(alternating) {
        match outcome {
            Ok((record, d)) => {
                drift = drift.max(d);
                records.push(record);
            }
            Err(e) => failures.push(PointFailure {
                method: Method::Alternating,
                j: point.j,
                k: point.k,
                slices: point.slices as i64,
                time: f64::NAN,
                non_convergence: matches!(e, Error::NotConverged { .. }),
                message: e.to_string(),
            }),
        }
    }

    let times = adiabatic_times(spec, &records);
    let adiabatic: Vec<Result<(RunRecord, f64)>> = pool.install(|| {
        times
            .par_iter()
            .map(|&t| adiabatic_record(spec, &family, t, 1, record))
            .collect()
    });
    for (&time, outcome) in times.iter().zip(adiabatic) {
        match outcome {
            Ok((record, d)) => {
                drift = drift.max(d);
                records.push(record);
            }
            Err(e) => failures.push(PointFailure {
                method: Method::Adiabatic,
                j: -1,
                k: -1,
                slices: -1,
                time,
                non_convergence: matches!(e, Error::NotConverged { .. }),
                message: e.to_string(),
            }),
        }
    }
    Ok(SweepOutcome {
        records,
        failures,
        max_norm_drift: drift,
    })
}
