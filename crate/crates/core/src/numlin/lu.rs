//! LU factorization with partial pivoting.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::logval::LogValue;

pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Self {
        let n = a.dim();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (piv, _) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= factor * u;
                }
            }
        }
        Lu { n, lu, perm, swaps }
    }

    pub fn log_det(&self) -> LogValue {
        let mut acc = if self.swaps % 2 == 1 {
            LogValue::new(0.0, std::f64::consts::PI)
        } else {
            LogValue::ONE
        };
        for k in 0..self.n {
            acc = acc * LogValue::from_complex(self.lu[k * self.n + k]);
        }
        acc
    }

    pub fn is_singular(&self) -> bool {
        (0..self.n).any(|k| self.lu[k * self.n + k] == Complex64::new(0.0, 0.0))
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) -> Result<()> {
        if self.is_singular() {
            return Err(Error::Singular);
        }
        let n = self.n;
        let permuted: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            col[j] = Complex64::new(1.0, 0.0);
            self.solve_in_place(&mut col)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Determinant of `a` in log domain.
pub fn log_det(a: &ComplexMatrix) -> LogValue {
    Lu::new(a).log_det()
}
