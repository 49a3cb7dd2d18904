//! Chebyshev expansion of `exp(-i H theta) psi` using only products with a
//! sparse `H`, accurate to roundoff.
//!
//! `exp(-i H theta) = exp(-i c theta) * sum_k (2 - delta_k0) (-i)^k J_k(r theta) T_k((H - c) / r)`
//! with `[c - r, c + r]` enclosing the spectrum.

use nalgebra::DVector;

use crate::linalg::sparse::SparseHermitian;
use crate::linalg::C64;

/// Largest `r * theta` handled in one expansion; longer spans are split into
/// equal sub-spans with the same operator.
const MAX_ARGUMENT: f64 = 40.0;

/// Expansion terms with `|J_k|` below this are dropped.
const COEFFICIENT_CUTOFF: f64 = 1e-18;

/// Bessel functions `J_0(x) ..= J_n(x)` for `x >= 0` by Miller's backward
/// recurrence, normalized with `J_0 + 2 sum_k J_2k = 1`.
pub fn bessel_j_sequence(x: f64, n: usize) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "bessel argument must be finite and non-negative"
    );
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let reach = n.max(x.ceil() as usize);
    let start = 2 * ((reach + 20 + (40.0 * reach as f64).sqrt() as usize) / 2 + 1);

    let mut next = 0.0;
    let mut current = 1e-30;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        if k <= n {
            out[k] = current;
        }
        if k % 2 == 0 {
            sum += 2.0 * current;
        }
        let previous = (2.0 * k as f64 / x) * current - next;
        next = current;
        current = previous;
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            sum *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    out[0] = current;
    sum += current;
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// Reusable buffers for repeated propagation with operators of one dimension.
#[derive(Clone, Debug)]
pub struct ChebyshevPropagator {
    previous: Vec<C64>,
    current: Vec<C64>,
    scratch: Vec<C64>,
    accumulator: Vec<C64>,
}

impl ChebyshevPropagator {
    pub fn new(dim: usize) -> Self {
        let zero = vec![C64::new(0.0, 0.0); dim];
        Self {
            previous: zero.clone(),
            current: zero.clone(),
            scratch: zero.clone(),
            accumulator: zero,
        }
    }

    /// Replaces `psi` by `exp(-i H theta) psi`.
    pub fn evolve(&mut self, h: &SparseHermitian, theta: f64, psi: &mut DVector<C64>) {
        assert_eq!(h.dim(), psi.len(), "operator and state dimensions differ");
        assert_eq!(h.dim(), self.current.len(), "propagator built for another dimension");
        if theta == 0.0 {
            return;
        }
        let (lo, hi) = h.spectral_bounds();
        let center = 0.5 * (lo + hi);
        let radius = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);
        let span = radius * theta.abs();
        let pieces = (span / MAX_ARGUMENT).ceil().max(1.0) as usize;
        let sub = theta / pieces as f64;
        for _ in 0..pieces {
            self.expand(h, center, radius, sub, psi);
        }
    }

    fn expand(&mut self, h: &SparseHermitian, center: f64, radius: f64, theta: f64, psi: &mut DVector<C64>) {
        let x = radius * theta.abs();
        let n_max = (x + 25.0 + 10.0 * x.cbrt()).ceil() as usize;
        let bessel = bessel_j_sequence(x, n_max);
        let last = bessel.iter().rposition(|b| b.abs() > COEFFICIENT_CUTOFF).unwrap_or(0);
        let sign = theta.signum();

        // (-i)^k, with J_k(-x) = (-1)^k J_k(x) folded in for negative theta
        let coefficient = |k: usize| -> C64 {
            let weight = if k == 0 { 1.0 } else { 2.0 } * bessel[k] * sign.powi(k as i32);
            let phase = match k % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, -1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, 1.0),
            };
            phase * weight
        };

        let scaled_apply = |src: &[C64], dst: &mut [C64]| {
            h.mul_into(src, dst);
            for (d, s) in dst.iter_mut().zip(src) {
                *d = (*d - s * center) / radius;
            }
        };

        self.previous.copy_from_slice(psi.as_slice());
        let c0 = coefficient(0);
        for (a, p) in self.accumulator.iter_mut().zip(&self.previous) {
            *a = c0 * p;
        }
        if last >= 1 {
            scaled_apply(&self.previous, &mut self.current);
            let c1 = coefficient(1);
            for (a, v) in self.accumulator.iter_mut().zip(&self.current) {
                *a += c1 * v;
            }
        }
        for k in 2..=last {
            scaled_apply(&self.current, &mut self.scratch);
            for (s, p) in self.scratch.iter_mut().zip(&self.previous) {
                *s = *s * 2.0 - p;
            }
            std::mem::swap(&mut self.previous, &mut self.current);
            std::mem::swap(&mut self.current, &mut self.scratch);
            let ck = coefficient(k);
            for (a, v) in self.accumulator.iter_mut().zip(&self.current) {
                *a += ck * v;
            }
        }
        let global = C64::new(0.0, -center * theta).exp();
        for (dst, a) in psi.iter_mut().zip(&self.accumulator) {
            *dst = a * global;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{evolve, HermitianOperator, StateVector};
    use nalgebra::DMatrix;

    #[test]
    fn bessel_reference_values() {
        let j = bessel_j_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        let j = bessel_j_sequence(10.0, 5);
        assert!((j[0] - (-0.245_935_764_451_348_32)).abs() < 1e-14);
        assert!((j[5] - (-0.234_061_528_186_793_6)).abs() < 1e-14);
        let j = bessel_j_sequence(35.0, 40);
        assert!((j[0] - (-0.126_845_682_756_312_56)).abs() < 1e-13, "{}", j[0]);
    }

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_j_sequence(0.0, 2), vec![1.0, 0.0, 0.0]);
    }

    fn tridiagonal(n: usize) -> HermitianOperator {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (i as f64 - 3.0).powi(3) / 9.0;
            if i + 1 < n {
                let c = ((i + 1) as f64 * (n - i) as f64).sqrt();
                m[(i, i + 1)] = c;
                m[(i + 1, i)] = c;
            }
        }
        HermitianOperator::from_real(m).unwrap()
    }

    #[test]
    fn agrees_with_spectral_route() {
        let h = tridiagonal(12);
        let sparse = SparseHermitian::from_dense(&h);
        let psi0 = StateVector::from_real(&(0..12).map(|i| 1.0 + i as f64).collect::<Vec<_>>()).unwrap();
        let mut prop = ChebyshevPropagator::new(12);
        for &theta in &[1e-3, 0.37, -2.2, 9.5] {
            let mut amps = psi0.amplitudes().clone();
            prop.evolve(&sparse, theta, &mut amps);
            let exact = evolve(&h, theta, &psi0).unwrap();
            let err = (amps - exact.amplitudes()).norm();
            assert!(err < 1e-12, "theta {theta}: {err:e}");
        }
    }

    #[test]
    fn complex_operator_agrees_with_spectral_route() {
        let h = HermitianOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.3, 0.0),
                C64::new(0.2, -0.7),
                C64::new(0.2, 0.7),
                C64::new(-1.1, 0.0),
            ],
        ))
        .unwrap();
        let psi0 = StateVector::basis(2, 0);
        let mut amps = psi0.amplitudes().clone();
        ChebyshevPropagator::new(2).evolve(&SparseHermitian::from_dense(&h), 3.3, &mut amps);
        let exact = evolve(&h, 3.3, &psi0).unwrap();
        assert!((amps - exact.amplitudes()).norm() < 1e-13);
    }
}
