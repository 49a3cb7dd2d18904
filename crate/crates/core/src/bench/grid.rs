use crate::bench::config::{ModelSpec, SweepSpec};
use crate::error::{Error, Result};

/// One resolved `(j, k, L)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub j: i64,
    pub k: i64,
    pub slices: usize,
    pub eta: f64,
    pub steps: usize,
}

/// `eta = scale (0.8 + 0.04 j) delta_ref`.
pub fn grid_eta(spec: &SweepSpec, j: i64) -> f64 {
    spec.eta_scale() * (0.8 + 0.04 * j as f64) * spec.delta_ref()
}

/// `floor((1 + 0.2 k)/eta)` for the spin flip, `floor(N (1 + 0.2 k)/eta)` for the p-spin model.
pub fn grid_steps(model: &ModelSpec, eta: f64, k: i64) -> i64 {
    let numerator = 1.0 + 0.2 * k as f64;
    let value = match model {
        ModelSpec::TwoLevel { .. } => numerator / eta,
        ModelSpec::Pspin { n, .. } => *n as f64 * numerator / eta,
    };
    value.floor() as i64
}

fn sorted(values: &[i64]) -> Vec<i64> {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// All grid points in lexicographic `(j, k, L)` order; points with `M < 2`
/// are dropped with a warning.
pub fn resolve_grid(spec: &SweepSpec) -> Result<Vec<GridPoint>> {
    spec.validate()?;
    let slices: Vec<i64> = sorted(&spec.grid.slices.iter().map(|&l| l as i64).collect::<Vec<_>>());
    let mut points = Vec::new();
    for j in sorted(&spec.grid.j) {
        let eta = grid_eta(spec, j);
        if !(eta > 0.0) {
            log::warn!("dropping j = {j}: eta = {eta} is not positive");
            continue;
        }
        for k in sorted(&spec.grid.k) {
            let steps = grid_steps(&spec.model, eta, k);
            if steps < 2 {
                log::warn!("dropping j = {j}, k = {k}: M = {steps} < 2");
                continue;
            }
            for &l in &slices {
                points.push(GridPoint {
                    j,
                    k,
                    slices: l as usize,
                    eta,
                    steps: steps as usize,
                });
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid("every (j, k) gives M < 2".into()));
    }
    Ok(points)
}
