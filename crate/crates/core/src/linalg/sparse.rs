//! Compressed-row view of Hermitian operators for propagators that only need
//! matrix-vector products.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, HermitianOperator, C64};

#[derive(Clone, Debug)]
pub struct SparseHermitian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl SparseHermitian {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(h: &HermitianOperator) -> Self {
        let dim = h.dim();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let z = h.entry(i, j);
                if z != C64::new(0.0, 0.0) {
                    cols.push(j);
                    values.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = H x`.
    pub fn mul_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * x[self.cols[idx]];
            }
            *yi = acc;
        }
    }

    /// Gershgorin enclosure of the (real) spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let mut center = 0.0;
            let mut radius = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[idx] == i {
                    center = self.values[idx].re;
                } else {
                    radius += self.values[idx].norm();
                }
            }
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        (lo, hi)
    }
}

/// `offset + sum_c coefficient[c] * term[c]` on the union sparsity pattern,
/// re-evaluated cheaply for each new coefficient vector.
#[derive(Clone, Debug)]
pub struct AffineSparse {
    pattern: SparseHermitian,
    terms: Vec<Vec<C64>>,
}

impl AffineSparse {
    pub fn new(offset: &HermitianOperator, terms: &[HermitianOperator]) -> Result<Self> {
        let dim = offset.dim();
        for t in terms {
            check_dim(dim, t.dim())?;
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut base = Vec::new();
        let mut term_values: Vec<Vec<C64>> = vec![Vec::new(); terms.len()];
        let zero = C64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                let used = offset.entry(i, j) != zero || terms.iter().any(|t| t.entry(i, j) != zero);
                if used {
                    cols.push(j);
                    base.push(offset.entry(i, j));
                    for (values, t) in term_values.iter_mut().zip(terms) {
                        values.push(t.entry(i, j));
                    }
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            pattern: SparseHermitian {
                dim,
                row_ptr,
                cols,
                values: base,
            },
            terms: term_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.pattern.dim
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn evaluate(&self, coefficients: &[f64]) -> Result<SparseHermitian> {
        let mut out = self.pattern.clone();
        self.evaluate_into(coefficients, &mut out)?;
        Ok(out)
    }

    /// Overwrites `out` (which must come from this pattern) with the combination.
    pub fn evaluate_into(&self, coefficients: &[f64], out: &mut SparseHermitian) -> Result<()> {
        if coefficients.len() != self.terms.len() {
            return Err(Error::DimensionMismatch {
                expected: self.terms.len(),
                found: coefficients.len(),
            });
        }
        out.values.copy_from_slice(&self.pattern.values);
        for (values, &coef) in self.terms.iter().zip(coefficients) {
            for (o, v) in out.values.iter_mut().zip(values) {
                *o += v * coef;
            }
        }
        Ok(())
    }
}
