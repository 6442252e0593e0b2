use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::product::CanonicalProduct;
use crate::error::{Error, Result};
use crate::quad::Integrator;
use crate::verify::CheckResult;

/// Both sides of Carleman's formula for the upper half-plane on the
/// half-disc of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub line_term: f64,
    pub arc_term: f64,
    pub radius: f64,
    pub perturbed: bool,
}

/// `2 Σ (1/r_k - r_k/R²) sin θ_k` over zeros in the upper half-disc against
/// `(1/π)∫_{-R}^{R} (1/t² - 1/R²) log|Π(t)| dt + (2/πR)∫_0^π log|Π(Re^{iθ})| sin θ dθ`.
pub fn carleman_formula_residual(prod: &CanonicalProduct, radius: f64) -> Result<CarlemanResidual> {
    let zs = prod.zero_set();
    if !(radius > 2.0 * zs.max_modulus()) {
        return Err(Error::Precondition(format!(
            "radius {radius} must exceed twice the largest zero modulus {}",
            zs.max_modulus()
        )));
    }
    let on_contour = zs.iter().any(|z| (z.modulus - radius).abs() <= 1e-12 * radius);
    let r = if on_contour { radius * (1.0 + 1e-3) } else { radius };
    let r2 = r * r;

    let lhs: f64 = zs
        .iter()
        .filter(|z| z.value.im > 0.0 && z.modulus < r)
        .map(|z| 2.0 * z.mult() * (1.0 / z.modulus - z.modulus / r2) * z.angle.sin())
        .sum();

    let integ = Integrator::with_tol(1e-11, 1e-11);
    let line = |t: f64| (1.0 / (t * t) - 1.0 / r2) * (prod.log_modulus_real(t) + prod.log_modulus_real(-t));
    let breaks: Vec<f64> = zs.iter().map(|z| z.value.re.abs()).collect();
    let line_term = integ.integrate(line, 0.0, r, &breaks).value / PI;
    let arc = |theta: f64| prod.log_modulus(Complex64::from_polar(r, theta)) * theta.sin();
    let arc_term = 2.0 / (PI * r) * integ.integrate(arc, 0.0, PI, &[]).value;
    let rhs = line_term + arc_term;
    Ok(CarlemanResidual {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        line_term,
        arc_term,
        radius: r,
        perturbed: on_contour,
    })
}

/// Harmonic test functions on the closed upper half-disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicTest {
    /// `Im z`
    ImZ,
    /// `Re z²`
    ReZSquared,
    /// `Im(z - w)/|z - w|²` with the pole `w` in the lower half-plane
    Poisson { pole: Complex64 },
}

impl HarmonicTest {
    pub fn eval(&self, z: Complex64) -> f64 {
        match *self {
            HarmonicTest::ImZ => z.im,
            HarmonicTest::ReZSquared => (z * z).re,
            HarmonicTest::Poisson { pole } => {
                let d = z - pole;
                d.im / d.norm_sqr()
            }
        }
    }
}

/// Arc kernel `K₁(Re^{iφ}, z)`.
pub fn arc_kernel(radius: f64, z: Complex64, phi: f64) -> f64 {
    let w = Complex64::from_polar(radius, phi);
    (radius * radius - z.norm_sqr()) / (2.0 * PI) * (1.0 / (w - z).norm_sqr() - 1.0 / (w - z.conj()).norm_sqr())
}

/// Diameter kernel `K₂(t, z)`.
pub fn line_kernel(radius: f64, z: Complex64, t: f64) -> f64 {
    let r2 = radius * radius;
    z.im / PI * (1.0 / (t - z).norm_sqr() - r2 / (Complex64::new(r2, 0.0) - z * t).norm_sqr())
}

/// Recover `u(z)` from its boundary values on the half-disc of radius
/// `radius`.
pub fn nevanlinna_green_reconstruct(u: &HarmonicTest, radius: f64, z: Complex64) -> Result<f64> {
    if !(z.im > 0.0) || !(z.norm() < radius) {
        return Err(Error::Precondition(format!(
            "{z} is not inside the upper half-disc of radius {radius}"
        )));
    }
    let margin = 1e-3 * radius;
    if z.im < margin || radius - z.norm() < margin {
        return Err(Error::Precondition(format!("{z} lies within {margin} of the boundary")));
    }
    let integ = Integrator::with_tol(1e-12, 1e-12);
    let arc = integ
        .integrate(
            |phi| arc_kernel(radius, z, phi) * u.eval(Complex64::from_polar(radius, phi)),
            0.0,
            PI,
            &[z.arg()],
        )
        .value;
    let line = integ
        .integrate(
            |t| line_kernel(radius, z, t) * u.eval(Complex64::new(t, 0.0)),
            -radius,
            radius,
            &[z.re],
        )
        .value;
    Ok(arc + line)
}

/// Pointwise check of `K₁ <= 12 sin φ/π` and
/// `K₂ <= (48r/(π sin θ))(1/t² - 1/R²)` at `z = re^{iθ}`, `R = 2r`.
///
/// `lhs` is the largest kernel-to-bound ratio over both grids.
pub fn half_disc_kernel_bounds(r: f64, theta: f64, samples: usize) -> Result<CheckResult> {
    if !(theta > 0.0 && theta < PI) || !(r > 0.0) || samples == 0 {
        return Err(Error::Precondition(format!(
            "need r > 0, 0 < θ < π, samples > 0; got r={r}, θ={theta}"
        )));
    }
    let radius = 2.0 * r;
    let z = Complex64::from_polar(r, theta);
    let mut worst: f64 = 0.0;
    let mut violations = 0usize;
    let mut min_kernel = f64::INFINITY;
    let mut record = |kernel: f64, bound: f64| {
        min_kernel = min_kernel.min(kernel);
        if kernel > bound * (1.0 + 1e-12) + 1e-300 {
            violations += 1;
        }
        if bound > 0.0 {
            worst = worst.max(kernel / bound);
        }
    };
    for j in 0..samples {
        let phi = PI * (j as f64 + 0.5) / samples as f64;
        record(arc_kernel(radius, z, phi), 12.0 * phi.sin() / PI);
    }
    for j in 0..samples {
        let t = -radius + 2.0 * radius * (j as f64 + 0.5) / samples as f64;
        let bound = 48.0 * r / (PI * theta.sin()) * (1.0 / (t * t) - 1.0 / (radius * radius));
        record(line_kernel(radius, z, t), bound);
    }
    let mut result = CheckResult::inequality("APPENDIX_KERNELS", worst, 1.0, 0.0)
        .with("violations", violations as f64)
        .with("min_kernel", min_kernel);
    if violations > 0 || min_kernel < 0.0 {
        result.passed = false;
    }
    Ok(result)
}
