use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Orthonormal DCT-II basis truncated to the first `num_coeffs` rows.
#[derive(Debug, Clone)]
pub struct Dct {
    len: usize,
    basis: Vec<Vec<f64>>,
}

impl Dct {
    pub fn new(len: usize, num_coeffs: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::config("DCT length must be positive"));
        }
        if num_coeffs > len {
            return Err(Error::config(format!(
                "cannot take {num_coeffs} DCT coefficients of a length-{len} vector"
            )));
        }
        let n = len as f64;
        let basis = (0..num_coeffs)
            .map(|k| {
                let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
                (0..len)
                    .map(|m| scale * (PI * k as f64 * (2 * m + 1) as f64 / (2.0 * n)).cos())
                    .collect()
            })
            .collect();
        Ok(Self { len, basis })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_coeffs(&self) -> usize {
        self.basis.len()
    }

    /// Row `k` of the basis matrix.
    pub fn basis_row(&self, k: usize) -> &[f64] {
        &self.basis[k]
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.basis) {
            *o = row.iter().zip(v).map(|(b, x)| b * x).sum();
        }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: v.len(),
            });
        }
        let mut out = vec![0.0; self.num_coeffs()];
        self.apply_into(v, &mut out);
        Ok(out)
    }
}

/// Orthonormal DCT-II of `v`, keeping the first `num_coeffs` coefficients.
pub fn dct_ii(v: &[f64], num_coeffs: usize) -> Result<Vec<f64>> {
    Dct::new(v.len(), num_coeffs)?.apply(v)
}
