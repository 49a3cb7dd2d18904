//! Limit and property checks of the gauge-potential constructions, reported
//! as named pass/fail outcomes.

use crate::agp::{discretized_agp, exact_agp, regularized_agp, AgpComponents, Regularizer};
use crate::error::Result;
use crate::linalg::{eigenvalues, fidelity, spectral_decompose};
use crate::models::{dicke_sum_x, dicke_sum_z, HamiltonianFamily, ParameterVector};
use crate::oracle;

pub const HERMITIAN_LIMIT: f64 = 1e-10;
pub const FINITE_DIFFERENCE_LIMIT: f64 = 1e-5;
pub const SLOPE_TARGET: f64 = 2.0;
pub const SLOPE_TOLERANCE: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Smallest separation between adjacent levels of `H(lambda)`.
pub fn min_level_spacing(family: &HamiltonianFamily, lambda: &ParameterVector) -> Result<f64> {
    let e = eigenvalues(&family.hamiltonian_at(lambda)?);
    Ok(e.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

fn max_hermiticity_defect(agp: &AgpComponents) -> f64 {
    agp.components
        .iter()
        .map(|a| a.hermiticity_defect())
        .fold(0.0, f64::max)
}

/// Runs the suite at `lambda`, which must have a non-degenerate spectrum.
pub fn agp_properties(family: &HamiltonianFamily, lambda: &ParameterVector) -> Result<Vec<PropertyOutcome>> {
    let gap = min_level_spacing(family, lambda)?;
    let exact = exact_agp(family, lambda)?;
    let mut out = Vec::new();

    let fd = oracle::finite_difference_agp(family, lambda, 1e-6)?;
    let dev = exact
        .components
        .iter()
        .zip(&fd)
        .map(|(a, b)| a.max_deviation(b))
        .fold(0.0, f64::max);
    out.push(PropertyOutcome::new(
        "exact-matches-finite-difference",
        dev <= FINITE_DIFFERENCE_LIMIT,
        format!("max deviation {dev:.3e} (limit {FINITE_DIFFERENCE_LIMIT:e})"),
    ));

    let regularized = regularized_agp(family, lambda, Regularizer::new(0.1 * gap)?)?;
    let discretized = discretized_agp(family, lambda, Regularizer::new(gap)?, 64)?;
    let defect = [&exact, &regularized, &discretized]
        .iter()
        .map(|a| max_hermiticity_defect(a))
        .fold(0.0, f64::max);
    out.push(PropertyOutcome::new(
        "hermitian",
        defect <= HERMITIAN_LIMIT,
        format!("max |A - A^dag| {defect:.3e}"),
    ));

    let etas: Vec<f64> = (0..5).map(|i| gap * 1e-3 * 10f64.powf(0.5 * i as f64)).collect();
    let errors = etas
        .iter()
        .map(|&eta| Ok(regularized_agp(family, lambda, Regularizer::new(eta)?)?.max_deviation(&exact)))
        .collect::<Result<Vec<f64>>>()?;
    let slope = log_log_slope(&etas, &errors);
    out.push(PropertyOutcome::new(
        "regularized-to-exact-slope",
        (slope - SLOPE_TARGET).abs() <= SLOPE_TOLERANCE,
        format!("slope {slope:.3} over eta/gap in [1e-3, 1e-1]"),
    ));

    let eta = Regularizer::new(gap)?;
    let errors = [10, 100, 1000]
        .iter()
        .map(|&m| Ok(discretized_agp(family, lambda, eta, m)?.max_deviation(&regularized_agp(family, lambda, eta)?)))
        .collect::<Result<Vec<f64>>>()?;
    out.push(PropertyOutcome::new(
        "discretized-to-regularized-monotone",
        errors.windows(2).all(|w| w[1] < w[0]),
        format!(
            "errors at M = 10, 100, 1000: {:.3e}, {:.3e}, {:.3e}",
            errors[0], errors[1], errors[2]
        ),
    ));

    let direction = ParameterVector::new(vec![1.0 / (lambda.len() as f64).sqrt(); lambda.len()])?;
    let ground = spectral_decompose(&family.hamiltonian_at(lambda)?).ground_state();
    let steps: Vec<f64> = (0..5).map(|i| 0.02 / 2f64.powi(i)).collect();
    let deviations = steps
        .iter()
        .map(|&h| {
            let delta = direction.scaled(h);
            let moved = spectral_decompose(&exact.contract(&delta)?).evolve(1.0, &ground)?;
            let target = spectral_decompose(&family.hamiltonian_at(&lambda.add(&delta))?).ground_state();
            Ok((1.0 - fidelity(&moved, &target)?).max(0.0).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = log_log_slope(&steps, &deviations);
    out.push(PropertyOutcome::new(
        "exact-transport-second-order",
        (slope - SLOPE_TARGET).abs() <= SLOPE_TOLERANCE,
        format!("slope {slope:.3} of sqrt(1 - F) against |dlambda|"),
    ));
    Ok(out)
}

/// Collective operators in the Dicke basis against the `2^N` construction.
pub fn dicke_sector_property(max_n: usize) -> PropertyOutcome {
    let mut worst: f64 = 0.0;
    for n in 1..=max_n {
        let (z, x) = oracle::brute_force_collective(n);
        let diagonal = dicke_sum_z(n);
        for r in 0..=n {
            for c in 0..=n {
                let dz = if r == c { diagonal[r] } else { 0.0 };
                worst = worst.max((z[(r, c)] - dz).abs());
            }
        }
        worst = worst.max((x - dicke_sum_x(n)).amax());
    }
    PropertyOutcome::new(
        "dicke-sector-matches-brute-force",
        worst <= 1e-10,
        format!("max deviation {worst:.3e} for N <= {max_n}"),
    )
}
