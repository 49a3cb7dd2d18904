//! Python bindings: model families, alternating-unitary transfer, adiabatic
//! driving, gaps, grids and sweeps.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use altu_core::adiabatic::{evolve_adiabatic as core_evolve, PropagationConfig};
use altu_core::alternating::{self, AlternatingParams, EvaluationPoint, TransferResult, Variant};
use altu_core::bench::{self, RunRecord};
use altu_core::linalg::{eigenvalues, ground_space_fidelity, spectral_decompose};
use altu_core::models::{self, HamiltonianFamily, ModelLabel, ParameterVector, Schedule};
use altu_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } | Error::Degenerate { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn schedule_for(family: &HamiltonianFamily, slices: usize) -> altu_core::Result<Schedule> {
    match *family.label() {
        ModelLabel::TwoLevel { hx0, hz0 } => models::two_level_schedule(hx0, hz0, slices),
        ModelLabel::PSpin { .. } => models::pspin_schedule(slices),
    }
}

/// An affine Hamiltonian family with its annealing path.
#[pyclass(frozen)]
struct Family {
    inner: HamiltonianFamily,
}

#[pymethods]
impl Family {
    /// `H = -hx X - hz Z` along the spin-flip path.
    #[staticmethod]
    #[pyo3(signature = (hx0, hz0=1.0))]
    fn two_level(hx0: f64, hz0: f64) -> PyResult<Self> {
        Ok(Self {
            inner: models::two_level_family(hx0, hz0).map_err(to_py)?,
        })
    }

    /// p-spin model in the Dicke basis, annealed linearly in lambda.
    #[staticmethod]
    #[pyo3(signature = (n, p, coupling=1.0, transverse=1.0))]
    fn pspin(n: usize, p: u32, coupling: f64, transverse: f64) -> PyResult<Self> {
        Ok(Self {
            inner: models::pspin_family(n, p, coupling, transverse).map_err(to_py)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Parameter vector at path position `s` in [0, 1].
    fn path_at(&self, s: f64) -> PyResult<Vec<f64>> {
        Ok(schedule_for(&self.inner, 1).map_err(to_py)?.at(s).components().to_vec())
    }

    fn hamiltonian(&self, lam: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        let lam = ParameterVector::new(lam).map_err(to_py)?;
        let h = self.inner.hamiltonian_at(&lam).map_err(to_py)?;
        let m = h.matrix();
        Ok((0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect())
    }

    fn eigenvalues(&self, lam: Vec<f64>) -> PyResult<Vec<f64>> {
        let lam = ParameterVector::new(lam).map_err(to_py)?;
        Ok(eigenvalues(&self.inner.hamiltonian_at(&lam).map_err(to_py)?))
    }

    fn ground_state(&self, lam: Vec<f64>) -> PyResult<Vec<Complex64>> {
        let lam = ParameterVector::new(lam).map_err(to_py)?;
        let h = self.inner.hamiltonian_at(&lam).map_err(to_py)?;
        Ok(spectral_decompose(&h)
            .ground_state()
            .amplitudes()
            .iter()
            .copied()
            .collect())
    }
}

/// Final and per-slice states of a transfer plus its ground-space fidelity.
#[pyclass(frozen, get_all)]
struct Transfer {
    final_state: Vec<Complex64>,
    slice_states: Vec<Vec<Complex64>>,
    effective_time: f64,
    fidelity: f64,
}

fn transfer(family: &HamiltonianFamily, schedule: &Schedule, r: TransferResult) -> PyResult<Transfer> {
    let d = spectral_decompose(&family.hamiltonian_at(schedule.end()).map_err(to_py)?);
    let fidelity = ground_space_fidelity(&d, &r.final_state, family.ground_space_window()).map_err(to_py)?;
    Ok(Transfer {
        final_state: r.final_state.amplitudes().iter().copied().collect(),
        slice_states: r
            .slice_states
            .iter()
            .map(|s| s.amplitudes().iter().copied().collect())
            .collect(),
        effective_time: r.effective_time,
        fidelity,
    })
}

#[pyfunction]
fn effective_time(eta: f64, steps: u64, slices: u64) -> f64 {
    alternating::effective_time(eta, steps, slices)
}

#[pyfunction]
fn effective_time_reduced(eta: f64, steps: u64, slices: u64) -> PyResult<f64> {
    alternating::effective_time_reduced(eta, steps, slices).map_err(to_py)
}

/// Alternating-unitary transfer of the initial ground state along the path.
#[pyfunction]
#[pyo3(signature = (family, eta, steps, slices, variant="standard", midpoint=false))]
fn run_transfer(
    family: &Family,
    eta: f64,
    steps: usize,
    slices: usize,
    variant: &str,
    midpoint: bool,
) -> PyResult<Transfer> {
    let variant = match variant {
        "standard" => Variant::Standard,
        "reduced" => Variant::Reduced,
        other => return Err(PyValueError::new_err(format!("unknown variant `{other}`"))),
    };
    let evaluation = if midpoint {
        EvaluationPoint::Midpoint
    } else {
        EvaluationPoint::LeftEndpoint
    };
    let params = AlternatingParams::new(eta, steps, slices, variant)
        .map_err(to_py)?
        .with_evaluation(evaluation);
    let schedule = schedule_for(&family.inner, slices).map_err(to_py)?;
    let r = alternating::run_transfer(&family.inner, &schedule, &params).map_err(to_py)?;
    transfer(&family.inner, &schedule, r)
}

/// Adiabatic driving for time `total_time` with step doubling.
#[pyfunction]
#[pyo3(signature = (family, total_time, slices=1, tolerance=1e-8))]
fn evolve_adiabatic(family: &Family, total_time: f64, slices: usize, tolerance: f64) -> PyResult<Transfer> {
    let mut config = PropagationConfig::new(total_time).map_err(to_py)?;
    config.tolerance = tolerance;
    let schedule = schedule_for(&family.inner, slices).map_err(to_py)?;
    let r = core_evolve(&family.inner, &schedule, &config).map_err(to_py)?;
    transfer(&family.inner, &schedule, r)
}

/// `(gap, s)` of the smallest ground-state gap along the path.
#[pyfunction]
#[pyo3(signature = (family, grid=2001))]
fn min_gap(family: &Family, grid: usize) -> PyResult<(f64, f64)> {
    let schedule = schedule_for(&family.inner, 1).map_err(to_py)?;
    let m = models::min_gap_location(&family.inner, &schedule, grid).map_err(to_py)?;
    Ok((m.gap, m.s))
}

/// `(j, k, L, eta, M)` for each point of a TOML sweep config.
#[pyfunction]
#[pyo3(signature = (config, overrides=Vec::new()))]
fn resolve_grid(config: &str, overrides: Vec<String>) -> PyResult<Vec<(i64, i64, usize, f64, usize)>> {
    let spec = bench::SweepSpec::from_toml(config, &overrides).map_err(to_py)?;
    Ok(bench::resolve_grid(&spec)
        .map_err(to_py)?
        .into_iter()
        .map(|p| (p.j, p.k, p.slices, p.eta, p.steps))
        .collect())
}

/// One sweep record; `eta` is None and the integers are -1 for adiabatic runs.
#[pyclass(frozen, get_all, from_py_object)]
#[derive(Clone)]
struct Record {
    method: String,
    j: i64,
    k: i64,
    slices: i64,
    eta: Option<f64>,
    steps: i64,
    time: f64,
    fidelity: f64,
}

impl From<&RunRecord> for Record {
    fn from(r: &RunRecord) -> Self {
        Self {
            method: r.method.to_string(),
            j: r.j,
            k: r.k,
            slices: r.slices,
            eta: r.eta,
            steps: r.steps,
            time: r.time,
            fidelity: r.fidelity,
        }
    }
}

impl Record {
    fn to_core(&self) -> PyResult<RunRecord> {
        Ok(RunRecord {
            method: self.method.parse().map_err(PyValueError::new_err)?,
            j: self.j,
            k: self.k,
            slices: self.slices,
            eta: self.eta,
            steps: self.steps,
            time: self.time,
            fidelity: self.fidelity,
            slice_populations: None,
        })
    }
}

#[pymethods]
impl Record {
    fn __repr__(&self) -> String {
        format!(
            "Record(method={}, j={}, k={}, L={}, time={:.2}, F_GS={:.4})",
            self.method, self.j, self.k, self.slices, self.time, self.fidelity
        )
    }
}

/// Runs a TOML sweep config and returns its records in output order.
#[pyfunction]
#[pyo3(signature = (config, overrides=Vec::new(), workers=1))]
fn run_sweep(config: &str, overrides: Vec<String>, workers: usize) -> PyResult<Vec<Record>> {
    let spec = bench::SweepSpec::from_toml(config, &overrides).map_err(to_py)?;
    let outcome = bench::run_sweep(&spec, workers).map_err(to_py)?;
    if let Some(f) = outcome.failures.first() {
        return Err(PyRuntimeError::new_err(f.message.clone()));
    }
    Ok(outcome.records.iter().map(Record::from).collect())
}

/// Best alternating records by fidelity, ties to the shorter time.
#[pyfunction]
fn top_k(records: Vec<Record>, k: usize) -> PyResult<Vec<Record>> {
    let core = records.iter().map(Record::to_core).collect::<PyResult<Vec<_>>>()?;
    Ok(bench::top_k(&core, k).iter().map(Record::from).collect())
}

#[pymodule]
fn altu(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Family>()?;
    m.add_class::<Transfer>()?;
    m.add_class::<Record>()?;
    m.add_function(wrap_pyfunction!(effective_time, m)?)?;
    m.add_function(wrap_pyfunction!(effective_time_reduced, m)?)?;
    m.add_function(wrap_pyfunction!(run_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_adiabatic, m)?)?;
    m.add_function(wrap_pyfunction!(min_gap, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(top_k, m)?)?;
    m.add("TABLE1_CONFIG", bench::TABLE1_CONFIG)?;
    Ok(())
}
