//! Dense complex linear algebra for finite stand-ins of compact operators.

mod eigen;
mod jacobi;
mod lu;
mod matrix;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{eigenvalues_unsorted, hessenberg};
pub use jacobi::{hermitian_eigen, singular_values_jacobi, HermitianEigen};
pub use lu::{log_det, Lu};
pub use matrix::{ComplexMatrix, MAX_DIM};

/// Tolerance for the Hermitian precondition of [`dissipative_split`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues and singular values of one matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralData {
    /// Descending modulus, ties by ascending argument.
    pub eigenvalues: Vec<Complex64>,
    /// Non-increasing.
    pub singular_values: Vec<f64>,
}

impl SpectralData {
    pub fn of(a: &ComplexMatrix) -> Result<Self> {
        Ok(SpectralData {
            eigenvalues: eigenvalues(a)?,
            singular_values: singular_values(a)?,
        })
    }
}

/// `G = (A + A*)/2`, `H = (A - A*)/(2i)`, so that `A = G + iH`.
pub fn hermitian_parts(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    a.ensure_nonempty()?;
    let n = a.dim();
    let g = ComplexMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let h = ComplexMatrix::from_fn(n, |i, j| (a[(i, j)] - a[(j, i)].conj()) * Complex64::new(0.0, -0.5));
    Ok((g, h))
}

/// Sort by descending modulus; moduli equal to 1e-10 relative are ordered by
/// ascending principal argument.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let mut start = 0;
    while start < values.len() {
        let lead = values[start].norm();
        let mut end = start + 1;
        while end < values.len() && (lead - values[end].norm()) <= 1e-10 * lead.max(f64::MIN_POSITIVE) {
            end += 1;
        }
        values[start..end].sort_by(|a, b| principal_arg(*a).total_cmp(&principal_arg(*b)));
        start = end;
    }
}

/// Argument in (-π, π]; `atan2` returns -π for negative reals with `-0.0`
/// imaginary part, which is folded to π here.
fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let mut e = eigenvalues_unsorted(a)?;
    sort_spectrum(&mut e);
    Ok(e)
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    singular_values_jacobi(a)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut v = hermitian_eigen(h)?.values;
    v.reverse();
    Ok(v)
}

fn check_exponent(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `(Σ s_k^p)^{1/p}` for a given list of singular values.
pub fn schatten_from_singular(s: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    let top = s.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = s.iter().map(|&x| (x / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Schatten `p`-norm, `1 <= p < ∞`.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    schatten_from_singular(&singular_values(a)?, p)
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Positive and negative parts of a Hermitian `H` through its spectral
/// projectors. Zero eigenvalues belong to `P₊`.
#[derive(Debug, Clone)]
pub struct DissipativeSplit {
    pub h_plus: ComplexMatrix,
    pub h_minus: ComplexMatrix,
    pub h_one: ComplexMatrix,
    pub p_plus: ComplexMatrix,
    pub p_minus: ComplexMatrix,
}

pub fn dissipative_split(h: &ComplexMatrix) -> Result<DissipativeSplit> {
    h.ensure_nonempty()?;
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            asymmetry: h.hermitian_defect(),
        });
    }
    let n = h.dim();
    let eig = hermitian_eigen(h)?;
    let mut h_plus = ComplexMatrix::zeros(n);
    let mut h_minus = ComplexMatrix::zeros(n);
    let mut p_plus = ComplexMatrix::zeros(n);
    let mut p_minus = ComplexMatrix::zeros(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let (proj, part, weight) = if lambda >= 0.0 {
            (&mut p_plus, &mut h_plus, lambda)
        } else {
            (&mut p_minus, &mut h_minus, -lambda)
        };
        for i in 0..n {
            for j in 0..n {
                let vv = eig.vectors[(i, k)] * eig.vectors[(j, k)].conj();
                proj[(i, j)] += vv;
                part[(i, j)] += vv * weight;
            }
        }
    }
    let h_plus = h_plus.hermitize();
    let h_minus = h_minus.hermitize();
    let h_one = (&h_plus + &h_minus).hermitize();
    Ok(DissipativeSplit {
        h_plus,
        h_minus,
        h_one,
        p_plus: p_plus.hermitize(),
        p_minus: p_minus.hermitize(),
    })
}

/// `R_G(z) = (I - zG)^{-1}`.
///
/// Rejects `z` when `1/z` lies within `1e-12·‖g‖` of an eigenvalue of `g`.
pub fn resolvent(g: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix> {
    g.ensure_nonempty()?;
    let n = g.dim();
    if z == Complex64::new(0.0, 0.0) {
        return Ok(ComplexMatrix::identity(n));
    }
    let scale = g.frobenius_norm();
    let inv_z = 1.0 / z;
    if scale > 0.0 {
        let eigs = eigenvalues_unsorted(g)?;
        if let Some((mu, dist)) = eigs
            .iter()
            .map(|&mu| (mu, (mu - inv_z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        {
            if dist <= 1e-12 * scale {
                return Err(Error::NearSingular {
                    inverse_point: inv_z,
                    eigenvalue: mu,
                    distance: dist,
                });
            }
        }
    }
    let lu = Lu::new(&g.identity_minus(z));
    lu.inverse().map_err(|_| Error::NearSingular {
        inverse_point: inv_z,
        eigenvalue: inv_z,
        distance: 0.0,
    })
}

/// Diagonal (multiplication) operator `(A_w a)(k) = w(k) a(k)`.
pub fn diagonal_operator(w: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(w)
}
