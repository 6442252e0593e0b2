//! Cyclic Jacobi rotations for Hermitian eigenproblems and one-sided Jacobi
//! for singular values.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const TOLERANCE: f64 = 1e-14;
const MAX_SWEEPS: usize = 30;

/// Unitary 2×2 rotation `V` with `V^H [[a, b], [conj b, d]] V` diagonal.
///
/// Returned as `(v00, v01, v10, v11)`.
fn hermitian_rotation(a: f64, d: f64, b: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let g = b.norm();
    // phase that makes the off-diagonal entry real and positive
    let phase = b.conj() / g;
    let theta = (d - a) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    (Complex64::new(c, 0.0), Complex64::new(s, 0.0), -phase * s, phase * c)
}

/// Eigen-decomposition of a Hermitian matrix.
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    h.ensure_nonempty()?;
    let n = h.dim();
    let mut a = h.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                if b.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (v00, v01, v10, v11) = hermitian_rotation(a[(p, p)].re, a[(q, q)].re, b);
                for i in 0..n {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = x * v00 + y * v10;
                    a[(i, q)] = x * v01 + y * v11;
                }
                for j in 0..n {
                    let (x, y) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = v00.conj() * x + v10.conj() * y;
                    a[(q, j)] = v01.conj() * x + v11.conj() * y;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * v00 + y * v10;
                    v[(i, q)] = x * v01 + y * v11;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_SWEEPS,
            iterate: Box::new(a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular values by one-sided Jacobi: rotate column pairs of `A` until
/// they are mutually orthogonal, i.e. implicitly diagonalise `A*A`.
/// Returned non-increasing.
pub fn singular_values_jacobi(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.ensure_nonempty()?;
    let n = a.dim();
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                if gamma.norm() <= TOLERANCE * (alpha * beta).sqrt() || gamma.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let (v00, v01, v10, v11) = hermitian_rotation(alpha, beta, gamma);
                let (cp, cq) = {
                    let (lo, hi) = cols.split_at_mut(q);
                    (&mut lo[p], &mut hi[0])
                };
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * v00 + yq * v10;
                    *y = xp * v01 + yq * v11;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_SWEEPS,
            iterate: Box::new(ComplexMatrix::from_fn(n, |i, j| cols[j][i])),
        });
    }
    let mut s: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}
