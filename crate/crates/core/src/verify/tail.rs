use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{hermitian_eigenvalues, ComplexMatrix, HERMITIAN_TOL};
use crate::quad::{Integrator, QuadratureResult};

/// Step function `ν(t; H)` and samples of `T(η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailData {
    pub nu_samples: Vec<(f64, u64)>,
    pub t_eta: Vec<(f64, f64)>,
}

/// Nonzero singular values of a Hermitian matrix, non-increasing.
pub fn hermitian_singular_values(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            asymmetry: h.hermitian_defect(),
        });
    }
    let mut s: Vec<f64> = hermitian_eigenvalues(h)?
        .into_iter()
        .map(f64::abs)
        .filter(|&x| x > 0.0)
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `ν(t; H) = #{k : 1/s_k(H) <= t}`
pub fn inverse_singular_counting(h: &ComplexMatrix, t: f64) -> Result<u64> {
    Ok(counting_from_singular(&hermitian_singular_values(h)?, t))
}

pub fn counting_from_singular(s: &[f64], t: f64) -> u64 {
    s.iter().filter(|&&x| x > 0.0 && 1.0 / x <= t).count() as u64
}

/// `T(η) = Σ ½ log(1 + η² s_k²)`
pub fn tail_from_singular(s: &[f64], eta: f64) -> f64 {
    s.iter().map(|&x| 0.5 * (eta * eta * x * x).ln_1p()).sum()
}

pub fn tail_transform(h: &ComplexMatrix, eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Precondition(format!("η must be positive, got {eta}")));
    }
    Ok(tail_from_singular(&hermitian_singular_values(h)?, eta))
}

/// `η² ∫₀^∞ ν(t)/(t(t² + η²)) dt` by quadrature over the steps of `ν`.
pub fn tail_by_quadrature(s: &[f64], eta: f64) -> QuadratureResult {
    let jumps: Vec<f64> = s.iter().filter(|&&x| x > 0.0).map(|&x| 1.0 / x).collect();
    let Some(first) = jumps.iter().cloned().reduce(f64::min) else {
        return QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 0,
            converged: true,
        };
    };
    let f = |t: f64| eta * eta * counting_from_singular(s, t) as f64 / (t * (t * t + eta * eta));
    let last = jumps.iter().cloned().fold(0.0, f64::max);
    let integ = Integrator::with_tol(1e-13, 1e-12);
    let body = integ.integrate(f, first, 2.0 * last, &jumps);
    let tail = integ.integrate_tail(f, 2.0 * last, 2.0);
    QuadratureResult {
        value: body.value + tail.value,
        error_estimate: body.error_estimate + tail.error_estimate,
        panels_used: body.panels_used + tail.panels_used,
        converged: body.converged && tail.converged,
    }
}

pub fn tail_data(h: &ComplexMatrix, t_points: &[f64], etas: &[f64]) -> Result<TailData> {
    let s = hermitian_singular_values(h)?;
    Ok(TailData {
        nu_samples: t_points.iter().map(|&t| (t, counting_from_singular(&s, t))).collect(),
        t_eta: etas.iter().map(|&e| (e, tail_from_singular(&s, e))).collect(),
    })
}

/// `∫₀^∞ T(η)/η^{p+1} dη` by quadrature, `0 < p < 2`.
pub fn tail_moment(s: &[f64], p: f64) -> Result<QuadratureResult> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    let top = s.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 0,
            converged: true,
        });
    }
    let f = |eta: f64| tail_from_singular(s, eta) / eta.powf(p + 1.0);
    let integ = Integrator::with_tol(1e-13, 1e-11);
    let split = 1.0 / top;
    let near = integ.integrate_power_endpoint(f, 0.0, split, 1.0 - p, &[]);
    let far = integ.integrate_tail(f, split, (2.0 / p).max(2.0));
    Ok(QuadratureResult {
        value: near.value + far.value,
        error_estimate: near.error_estimate + far.error_estimate,
        panels_used: near.panels_used + far.panels_used,
        converged: near.converged && far.converged,
    })
}

/// `π / (2p sin(πp/2)) ‖H‖_p^p` from the singular values.
pub fn tail_moment_closed_form(s: &[f64], p: f64) -> f64 {
    PI / (2.0 * p * (PI * p / 2.0).sin()) * s.iter().map(|x| x.powf(p)).sum::<f64>()
}

/// `∫₀^∞ log|1 - s e^{-2iθ}| / s^{p/2+1} ds` for `1 <= p < 2`, either
/// `(2π/(p sin(πp/2))) cos(p(|θ| - π/2))` or by quadrature.
pub fn kernel_integral(theta: f64, p: f64, closed_form: bool) -> Result<f64> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidExponent(p));
    }
    if !(-PI..=PI).contains(&theta) {
        return Err(Error::Precondition(format!("θ = {theta} outside [-π, π]")));
    }
    if closed_form {
        return Ok(2.0 * PI / (p * (PI * p / 2.0).sin()) * (p * (theta.abs() - PI / 2.0)).cos());
    }
    let w = Complex64::from_polar(1.0, -2.0 * theta);
    // log|1 - ws|² as log1p near s = 0, as a sum of squares near s = 1
    let f = |s: f64| {
        let x = s * (s - 2.0 * w.re);
        let log_sq = if x > -0.5 {
            x.ln_1p()
        } else {
            ((1.0 - s * w.re).powi(2) + (s * w.im).powi(2)).ln()
        };
        0.5 * log_sq / s.powf(p / 2.0 + 1.0)
    };
    let integ = Integrator::with_tol(1e-13, 1e-11);
    let near = integ.integrate_power_endpoint(f, 0.0, 0.5, -p / 2.0, &[]);
    let mid = integ.integrate(f, 0.5, 2.0, &[1.0]);
    let far = integ.integrate_tail(f, 2.0, 2.0);
    Ok(near.value + mid.value + far.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h_with(s: &[f64]) -> ComplexMatrix {
        let d: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        ComplexMatrix::from_diagonal(&d)
    }

    #[test]
    fn counting_examples() {
        let h = h_with(&[1.0, -0.5]);
        assert_eq!(inverse_singular_counting(&h, 1.5).unwrap(), 1);
        assert_eq!(inverse_singular_counting(&h, 3.0).unwrap(), 2);
        assert_eq!(inverse_singular_counting(&h, 0.5).unwrap(), 0);
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(inverse_singular_counting(&skew, 1.0).is_err());
    }

    #[test]
    fn tail_single_step() {
        let h = h_with(&[1.0]);
        assert_relative_eq!(tail_transform(&h, 1.0).unwrap(), 0.5 * 2f64.ln(), max_relative = 1e-15);
        let q = tail_by_quadrature(&[1.0], 1.0);
        assert!((q.value - 0.5 * 2f64.ln()).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn tail_small_eta() {
        let s = [0.9, 0.4, 0.1];
        let eta = 1e-5;
        let ratio = tail_from_singular(&s, eta) / (eta * eta);
        assert_relative_eq!(ratio, 0.5 * s.iter().map(|x| x * x).sum::<f64>(), max_relative = 1e-8);
    }

    #[test]
    fn tail_moment_identity() {
        let s = [1.3, 0.7, 0.2, 0.05];
        let q = tail_moment(&s, 1.5).unwrap();
        assert!(q.converged, "{q:?}");
        assert_relative_eq!(q.value, tail_moment_closed_form(&s, 1.5), max_relative = 1e-5);
    }

    #[test]
    fn kernel_examples() {
        assert_relative_eq!(
            kernel_integral(PI / 2.0, 1.0, true).unwrap(),
            2.0 * PI,
            max_relative = 1e-15
        );
        assert!(kernel_integral(0.0, 1.0, true).unwrap().abs() < 1e-15);
        assert_relative_eq!(
            kernel_integral(PI / 4.0, 1.0, true).unwrap(),
            PI * 2f64.sqrt(),
            max_relative = 1e-14
        );
        for &theta in &[0.0, PI / 4.0, PI / 2.0, -2.0] {
            let closed = kernel_integral(theta, 1.0, true).unwrap();
            let quad = kernel_integral(theta, 1.0, false).unwrap();
            assert!(
                (closed - quad).abs() <= 1e-6 * closed.abs().max(1.0),
                "{theta}: {closed} vs {quad}"
            );
        }
    }
}
