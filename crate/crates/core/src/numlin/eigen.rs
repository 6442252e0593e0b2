//! General complex eigenvalues: Householder reduction to upper Hessenberg
//! form followed by single-shift QR sweeps with deflation.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Subdiagonal entries below `DEFLATION_TOL · ‖A‖_F` are set to zero.
const DEFLATION_TOL: f64 = 1e-13;
/// Iteration budget per unit dimension.
const ITERATIONS_PER_DIM: usize = 60;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Reduce to upper Hessenberg form by unitary similarity.
pub fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..(n - 2) {
        let tail: f64 = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        // v = x - alpha e1
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I - 2 v v*/|v|²) H
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * f;
            }
        }
        // H ← H (I - 2 v v*/|v|²)
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| h[(i, k + 1 + r)] * vr).sum();
            let f = dot * (2.0 / vnorm2);
            for (r, vr) in v.iter().enumerate() {
                h[(i, k + 1 + r)] -= f * vr.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = zero();
        }
    }
    h
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues with multiplicity, unsorted.
pub fn eigenvalues_unsorted(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    a.ensure_nonempty()?;
    let n = a.dim();
    let mut h = hessenberg(a);
    let scale = a.frobenius_norm();
    let mut eig = vec![zero(); n];
    if scale == 0.0 {
        return Ok(eig);
    }
    let tol = DEFLATION_TOL * scale;
    let budget = ITERATIONS_PER_DIM * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    loop {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)].norm() > tol {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = zero();
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            since_deflation = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if total >= budget {
            return Err(Error::NoConvergence {
                iterations: total,
                iterate: Box::new(h),
            });
        }
        total += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.25 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a0 = h[(k, k)];
            let b0 = h[(k + 1, k)];
            let r = (a0.norm_sqr() + b0.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero())
            } else {
                (a0 / r, b0 / r)
            };
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rotations.push((c, s));
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eig)
}
