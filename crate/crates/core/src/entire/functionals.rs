use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::product::{golden_max, CanonicalProduct};
use super::zeros::ZeroSet;
use crate::error::{Error, Result};
use crate::quad::{fit_linear_slope, geometric_grid, Integrator, SlopeFit};

/// `|Σ Re(1/z_k)|` below this multiple of `max(1, Σ 1/|z_k|)` counts as 0.
pub const CARTWRIGHT_TOL: f64 = 1e-10;
/// Weighted real-line integrals above this value are reported divergent.
pub const DIVERGENCE_CAP: f64 = 1e6;
/// Fit residuals above this are flagged in diagnostics.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

const TYPE_DIRECTIONS: usize = 64;
const TYPE_SAMPLES: usize = 16;

/// Which part of `log|Π|` a real-line functional integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `log⁺|Π|`, giving `α_p(Π)`
    Plus,
    /// `log⁻|Π|`, giving `α_p(Π⁻¹)`
    Minus,
    /// `log|Π|`, giving `α_p(Π) - α_p(Π⁻¹)`
    Signed,
}

impl Side {
    fn apply(self, v: f64) -> f64 {
        match self {
            Side::Plus => v.max(0.0),
            Side::Minus => (-v).max(0.0),
            Side::Signed => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaValue {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub divergent: bool,
}

impl AlphaValue {
    fn divergent() -> Self {
        AlphaValue {
            value: f64::INFINITY,
            error_estimate: f64::INFINITY,
            converged: false,
            divergent: true,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.converged && !self.divergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSums {
    pub gamma_p: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

/// `γ_p = Σ m_k |Im(1/z_k)|^p`, split by the sign of `Im z_k`.
pub fn gamma_sums(zs: &ZeroSet, p: f64) -> GammaSums {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for z in zs.iter() {
        let term = z.mult() * (1.0 / z.value).im.abs().powf(p);
        if z.value.im > 0.0 {
            plus += term;
        } else if z.value.im < 0.0 {
            minus += term;
        }
    }
    GammaSums {
        gamma_p: plus + minus,
        gamma_plus: plus,
        gamma_minus: minus,
    }
}

/// `|Σ Re(1/z_k)|` is negligible, so `log|Π(t)|` grows only
/// logarithmically on the real line.
pub fn has_balanced_real_growth(zs: &ZeroSet) -> bool {
    zs.reciprocal_sum().re.abs() <= CARTWRIGHT_TOL * zs.reciprocal_abs_sum().max(1.0)
}

/// `(1/π) ∫_ℝ side(log|Π(t)|) / |t|^{p+1} dt` for `1 <= p < 2`.
pub fn alpha_p(prod: &CanonicalProduct, p: f64, side: Side) -> Result<AlphaValue> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidExponent(p));
    }
    let zs = prod.zero_set();
    if zs.is_empty() {
        return Ok(AlphaValue {
            value: 0.0,
            error_estimate: 0.0,
            converged: true,
            divergent: false,
        });
    }
    if p == 1.0 && !has_balanced_real_growth(zs) {
        return Ok(AlphaValue::divergent());
    }
    let symmetric =
        |t: f64| (side.apply(prod.log_modulus_real(t)) + side.apply(prod.log_modulus_real(-t))) / t.powf(p + 1.0);
    // |t| < min|z_k| keeps log|Π(t)| = O(t²) analytic.
    let t1 = 0.5 * zs.min_modulus();
    let t2 = 4.0 * zs.max_modulus();
    // Geometric panels keep isolated log spikes from hiding inside one wide
    // panel where the Gauss and Kronrod estimates agree by accident.
    let mut breaks: Vec<f64> = zs.iter().map(|z| z.value.re.abs()).filter(|&x| x > t1).collect();
    breaks.extend((1..).map(|k| t1 * 2f64.powf(0.5 * k as f64)).take_while(|&t| t < t2));
    let integ = Integrator::with_tol(1e-11, 1e-10);
    let near = integ.integrate_power_endpoint(symmetric, 0.0, t1, 1.0 - p, &[]);
    let mid = integ.integrate(symmetric, t1, t2, &breaks);
    // Linear growth of log|Π| leaves a t^{-p} tail.
    let tail_power = if p > 1.0 {
        (1.0 / (p - 1.0)).clamp(2.0, 20.0)
    } else {
        2.0
    };
    let far = integ.integrate_tail(symmetric, t2, tail_power);
    let value = (near.value + mid.value + far.value) / PI;
    let error_estimate = (near.error_estimate + mid.error_estimate + far.error_estimate) / PI;
    let converged = near.converged && mid.converged && far.converged;
    Ok(AlphaValue {
        value,
        error_estimate,
        converged,
        divergent: !value.is_finite() || value.abs() > DIVERGENCE_CAP,
    })
}

/// Exponential types with the closed forms for a finite product:
/// the type along `e^{iφ}` is `Re(e^{iφ} S)`, `S = Σ m_k / z_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    pub sigma: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    /// `|S|`
    pub sigma_closed_form: f64,
    /// `-Im S = γ₊ - γ₋` at `p = 1`
    pub sigma_plus_closed_form: f64,
    pub max_fit_residual: f64,
    pub fit_flagged: bool,
}

/// Slope of `log|Π(y e^{iφ})|` against `y`, fitted as
/// `σ y + c₁ log y + c₀` on `y = 2R₀ … 2^16 R₀`.
pub fn direction_slope(prod: &CanonicalProduct, phi: f64) -> Result<SlopeFit> {
    let r0 = prod.zero_set().max_modulus().max(1.0);
    let dir = Complex64::from_polar(1.0, phi);
    let samples: Vec<(f64, f64)> = geometric_grid(2.0 * r0, 2.0, TYPE_SAMPLES)
        .into_iter()
        .map(|y| (y, prod.log_modulus(dir * y)))
        .collect();
    fit_linear_slope(&samples)
}

pub fn exponential_type(prod: &CanonicalProduct) -> Result<TypeEstimate> {
    let zs = prod.zero_set();
    let s = zs.reciprocal_sum();
    if zs.is_empty() {
        return Ok(TypeEstimate {
            sigma: 0.0,
            sigma_plus: 0.0,
            sigma_minus: 0.0,
            sigma_closed_form: 0.0,
            sigma_plus_closed_form: 0.0,
            max_fit_residual: 0.0,
            fit_flagged: false,
        });
    }
    let plus = direction_slope(prod, PI / 2.0)?;
    let minus = direction_slope(prod, -PI / 2.0)?;
    let step = 2.0 * PI / TYPE_DIRECTIONS as f64;
    let mut fits = Vec::with_capacity(TYPE_DIRECTIONS);
    for j in 0..TYPE_DIRECTIONS {
        fits.push(direction_slope(prod, j as f64 * step)?);
    }
    let best = (0..TYPE_DIRECTIONS)
        .max_by(|&i, &j| fits[i].slope.total_cmp(&fits[j].slope))
        .unwrap_or(0);
    let centre = best as f64 * step;
    let slope_at = |phi: f64| direction_slope(prod, phi).map(|f| f.slope).unwrap_or(f64::NEG_INFINITY);
    // The type of a polynomial-like product is 0, never negative.
    let sigma = golden_max(&slope_at, centre - step, centre + step)
        .max(fits[best].slope)
        .max(0.0);
    let max_fit_residual = fits
        .iter()
        .chain([&plus, &minus])
        .map(|f| f.residual)
        .fold(0.0, f64::max);
    Ok(TypeEstimate {
        sigma,
        sigma_plus: plus.slope,
        sigma_minus: minus.slope,
        sigma_closed_form: s.norm(),
        sigma_plus_closed_form: -s.im,
        max_fit_residual,
        fit_flagged: max_fit_residual > FIT_RESIDUAL_LIMIT * (1.0 + s.norm()),
    })
}

/// Initial uniform panels of the circle quadrature.
const PROXIMITY_PANELS: usize = 64;

/// `m(r, Π) = (1/2π) ∫ log⁺|Π(re^{iθ})| dθ`, or `m(r, 1/Π)` with `log⁻`.
pub fn proximity(prod: &CanonicalProduct, r: f64, inverse: bool) -> f64 {
    let zs = prod.zero_set();
    if zs.is_empty() {
        return 0.0;
    }
    let side = if inverse { Side::Minus } else { Side::Plus };
    let f = |theta: f64| side.apply(prod.log_modulus(Complex64::from_polar(r, theta)));
    let mut breaks: Vec<f64> = zs
        .iter()
        .filter(|z| (z.modulus - r).abs() < 0.05 * r)
        .map(|z| z.angle.rem_euclid(2.0 * PI))
        .collect();
    breaks.extend((1..PROXIMITY_PANELS).map(|k| 2.0 * PI * k as f64 / PROXIMITY_PANELS as f64));
    Integrator::with_tol(1e-10, 1e-10)
        .integrate(f, 0.0, 2.0 * PI, &breaks)
        .value
        / (2.0 * PI)
}

/// Growth data for one product; map keys are the exponents `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartwrightReport {
    pub sigma: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub alpha_p: BTreeMap<String, f64>,
    pub alpha_inv_p: BTreeMap<String, f64>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_p: BTreeMap<String, f64>,
    pub is_cartwright: bool,
    pub residuals: BTreeMap<String, f64>,
}

pub fn p_key(p: f64) -> String {
    format!("{p}")
}

pub fn analyze(prod: &CanonicalProduct, p_values: &[f64]) -> Result<CartwrightReport> {
    let zs = prod.zero_set();
    let ty = exponential_type(prod)?;
    let gamma1 = gamma_sums(zs, 1.0);
    let mut ps = vec![1.0];
    ps.extend(p_values.iter().copied().filter(|&p| p != 1.0));
    let mut alpha = BTreeMap::new();
    let mut alpha_inv = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut alpha1_finite = false;
    for &p in &ps {
        let plus = alpha_p(prod, p, Side::Plus)?;
        let minus = alpha_p(prod, p, Side::Minus)?;
        if p == 1.0 {
            alpha1_finite = plus.is_finite() && minus.is_finite() && plus.error_estimate < 1e-4;
        }
        alpha.insert(p_key(p), plus.value);
        alpha_inv.insert(p_key(p), minus.value);
        gamma.insert(p_key(p), gamma_sums(zs, p).gamma_p);
        residuals.insert(
            format!("alpha_error_{}", p_key(p)),
            plus.error_estimate + minus.error_estimate,
        );
        residuals.insert(
            format!("alpha_divergent_{}", p_key(p)),
            (plus.divergent || minus.divergent) as u8 as f64,
        );
    }
    let s = zs.reciprocal_sum();
    residuals.insert("reciprocal_sum_re".into(), s.re);
    residuals.insert("reciprocal_sum_im".into(), s.im);
    residuals.insert("sigma_closed_form".into(), ty.sigma_closed_form);
    residuals.insert("sigma_plus_closed_form".into(), ty.sigma_plus_closed_form);
    residuals.insert("max_fit_residual".into(), ty.max_fit_residual);
    residuals.insert("fit_flagged".into(), ty.fit_flagged as u8 as f64);
    Ok(CartwrightReport {
        sigma: ty.sigma,
        sigma_plus: ty.sigma_plus,
        sigma_minus: ty.sigma_minus,
        alpha_p: alpha,
        alpha_inv_p: alpha_inv,
        gamma_plus: gamma1.gamma_plus,
        gamma_minus: gamma1.gamma_minus,
        gamma_p: gamma,
        is_cartwright: has_balanced_real_growth(zs) && alpha1_finite,
        residuals,
    })
}
