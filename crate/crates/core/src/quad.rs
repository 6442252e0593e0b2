//! Adaptive Gauss-Kronrod (7/15) quadrature for improper integrals with
//! logarithmic and algebraic endpoint singularities, and the asymptotic slope
//! fit used for exponential types.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_PANELS: usize = 20_000;

// Kronrod abscissae; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

/// Error assigned to panels whose integrand produced NaN or ±∞.
const POISONED: f64 = 1e300;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    poisoned: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// QUADPACK error rescaling.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    if value.is_finite() && error.is_finite() {
        Panel {
            a,
            b,
            value,
            error,
            poisoned: false,
        }
    } else {
        Panel {
            a,
            b,
            value: 0.0,
            error: POISONED,
            poisoned: true,
        }
    }
}

/// Adaptive integrator. Converges when the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: DEFAULT_TOL,
            rel_tol: 0.0,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

impl Integrator {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    /// Integrate `f` over `[a, b]`, `b` possibly `+∞`, splitting at the
    /// listed interior points.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, singularities: &[f64]) -> QuadratureResult {
        assert!(a.is_finite(), "lower limit must be finite");
        if !(a < b) {
            return QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                panels_used: 0,
                converged: a == b,
            };
        }
        if b == f64::INFINITY {
            // t = a + s/(1-s), s ∈ [0, 1)
            let g = |s: f64| {
                let one_minus = 1.0 - s;
                let t = a + s / one_minus;
                f(t) / (one_minus * one_minus)
            };
            let mapped: Vec<f64> = singularities
                .iter()
                .filter(|&&t| t > a && t.is_finite())
                .map(|&t| (t - a) / (1.0 + t - a))
                .collect();
            return self.integrate_finite(&g, 0.0, 1.0, &mapped);
        }
        self.integrate_finite(&f, a, b, singularities)
    }

    fn integrate_finite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, singularities: &[f64]) -> QuadratureResult {
        let mut cuts: Vec<f64> = singularities
            .iter()
            .cloned()
            .filter(|&s| s > a && s < b && s.is_finite())
            .collect();
        cuts.sort_by(|x, y| x.total_cmp(y));
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(1.0));
        let mut edges = vec![a];
        edges.extend(cuts);
        edges.push(b);

        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Panel> = Vec::new();
        let mut total_value = 0.0;
        let mut total_error = 0.0;
        let mut poisoned = 0usize;
        for w in edges.windows(2) {
            if w[1] > w[0] {
                let p = kronrod15(f, w[0], w[1]);
                total_value += p.value;
                total_error += p.error;
                poisoned += p.poisoned as usize;
                heap.push(p);
            }
        }
        let mut panels = heap.len();

        loop {
            let target = self.abs_tol.max(self.rel_tol * total_value.abs());
            if (total_error <= target && poisoned == 0) || panels >= self.max_panels {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
                frozen.push(worst);
                continue;
            }
            let left = kronrod15(f, worst.a, mid);
            let right = kronrod15(f, mid, worst.b);
            total_value += left.value + right.value - worst.value;
            total_error += left.error + right.error - worst.error;
            poisoned = poisoned + left.poisoned as usize + right.poisoned as usize - worst.poisoned as usize;
            heap.push(left);
            heap.push(right);
            panels += 1;
        }

        // resum to shed drift in the running totals
        let all: Vec<&Panel> = heap.iter().chain(frozen.iter()).collect();
        let value: f64 = all.iter().map(|p| p.value).sum();
        let error: f64 = all.iter().map(|p| p.error).sum();
        let target = self.abs_tol.max(self.rel_tol * value.abs());
        if poisoned > 0 {
            return QuadratureResult {
                value: f64::NAN,
                error_estimate: f64::INFINITY,
                panels_used: panels,
                converged: false,
            };
        }
        QuadratureResult {
            value,
            error_estimate: error,
            panels_used: panels,
            converged: error <= target,
        }
    }

    /// Integrate over `[a, b]` (finite) an `f` behaving like `(t - a)^beta`
    /// near `a`, `beta > -1`, via `t = a + (b - a) u^m` with `m = 1/(1+beta)`.
    pub fn integrate_power_endpoint<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        beta: f64,
        singularities: &[f64],
    ) -> QuadratureResult {
        assert!(beta > -1.0, "endpoint exponent must exceed -1");
        let m = 1.0 / (1.0 + beta);
        let width = b - a;
        let g = |u: f64| {
            let um1 = u.powf(m - 1.0);
            f(a + width * um1 * u) * width * m * um1
        };
        let mapped: Vec<f64> = singularities
            .iter()
            .filter(|&&t| t > a && t < b)
            .map(|&t| ((t - a) / width).powf(1.0 / m))
            .collect();
        self.integrate(g, 0.0, 1.0, &mapped)
    }
}

impl Integrator {
    /// Integrate over `[a, ∞)`, `a > 0`, an `f` decaying like a power of
    /// `t`, via `t = a·u^{-m}`. An `f ~ t^{-q}` maps to `u^{m(q-1)-1}`.
    pub fn integrate_tail<F: Fn(f64) -> f64>(&self, f: F, a: f64, m: f64) -> QuadratureResult {
        assert!(a > 0.0 && m > 0.0, "tail start and exponent must be positive");
        let g = |u: f64| {
            let t = a * u.powf(-m);
            f(t) * m * t / u
        };
        self.integrate(g, 0.0, 1.0, &[])
    }
}

/// `∫_a^b f` with absolute tolerance `tol` and the default panel budget.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, singularities: &[f64], tol: f64) -> QuadratureResult {
    Integrator::with_tol(tol, 0.0).integrate(f, a, b, singularities)
}

/// Least-squares fit `value ≈ slope·y + log_coefficient·ln y + constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub log_coefficient: f64,
    pub constant: f64,
    /// Max absolute deviation on the samples.
    pub residual: f64,
}

pub const MIN_FIT_SAMPLES: usize = 8;

pub fn fit_linear_slope(samples: &[(f64, f64)]) -> Result<SlopeFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateGrid(format!(
            "{} samples, need at least {MIN_FIT_SAMPLES}",
            samples.len()
        )));
    }
    if samples
        .iter()
        .any(|&(y, v)| !(y > 0.0) || !y.is_finite() || !v.is_finite())
    {
        return Err(Error::DegenerateGrid(
            "samples need finite y > 0 and finite values".into(),
        ));
    }
    let mut ys: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ys.sort_by(|a, b| a.total_cmp(b));
    ys.dedup();
    if ys.len() < 3 {
        return Err(Error::DegenerateGrid("fewer than three distinct abscissae".into()));
    }

    let m = samples.len();
    let mut cols: Vec<Vec<f64>> = vec![
        samples.iter().map(|s| s.0).collect(),
        samples.iter().map(|s| s.0.ln()).collect(),
        vec![1.0; m],
    ];
    let scales: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    for (c, s) in cols.iter_mut().zip(&scales) {
        c.iter_mut().for_each(|x| *x /= s);
    }
    let mut rhs: Vec<f64> = samples.iter().map(|s| s.1).collect();

    // Householder QR on the m×3 design
    let mut r = [[0.0f64; 3]; 3];
    for k in 0..3 {
        let norm = cols[k][k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateGrid("rank-deficient design".into()));
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in k..3 {
            let dot: f64 = v.iter().zip(&cols[j][k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                cols[j][k + i] -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[k..]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vnorm2;
        for (i, vi) in v.iter().enumerate() {
            rhs[k + i] -= f * vi;
        }
        for j in k..3 {
            r[k][j] = cols[j][k];
        }
    }
    if (0..3).any(|k| r[k][k].abs() <= 1e-13 * r[0][0].abs()) {
        return Err(Error::DegenerateGrid("rank-deficient design".into()));
    }
    let mut coef = [0.0f64; 3];
    for k in (0..3).rev() {
        let s: f64 = ((k + 1)..3).map(|j| r[k][j] * coef[j]).sum();
        coef[k] = (rhs[k] - s) / r[k][k];
    }
    for k in 0..3 {
        coef[k] /= scales[k];
    }
    let residual = samples
        .iter()
        .map(|&(y, v)| (v - (coef[0] * y + coef[1] * y.ln() + coef[2])).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        slope: coef[0],
        log_coefficient: coef[1],
        constant: coef[2],
        residual,
    })
}

/// `start·ratio^k`, `k = 0..count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn log_one_minus_t_squared_over_t_squared_vanishes() {
        let r = integrate(
            |t: f64| (1.0 - t * t).abs().ln() / (t * t),
            0.0,
            f64::INFINITY,
            &[1.0],
            1e-10,
        );
        assert!(r.converged, "{r:?}");
        assert!(r.value.abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn tail_substitution() {
        let integ = Integrator::with_tol(1e-13, 1e-12);
        let r = integ.integrate_tail(|t: f64| t.powf(-1.5), 2.0, 2.0);
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0 / 2f64.sqrt()).abs() < 1e-11, "{r:?}");
        let r = integ.integrate_tail(|t: f64| t.ln() / (t * t), 1.0, 2.0);
        assert!((r.value - 1.0).abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn arctan_integral() {
        let r = integrate(|s: f64| 1.0 / (s * s + 1.0), 0.0, f64::INFINITY, &[], 1e-12);
        assert!((r.value - PI / 2.0).abs() < 1e-11, "{r:?}");
        assert!((r.value - PI / 2.0).abs() <= r.error_estimate.max(1e-15));
    }

    #[test]
    fn weighted_p_one_integral() {
        // ∫ ds / (s^{p-1}(s²+1)) at p = 1
        let p = 1.0f64;
        let r = integrate(
            |s: f64| 1.0 / (s.powf(p - 1.0) * (s * s + 1.0)),
            0.0,
            f64::INFINITY,
            &[],
            1e-12,
        );
        assert!((r.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn power_endpoint_substitution() {
        // ∫_0^1 t^{-0.9} dt = 10
        let r = Integrator::with_tol(1e-12, 0.0).integrate_power_endpoint(|t: f64| t.powf(-0.9), 0.0, 1.0, -0.9, &[]);
        assert!((r.value - 10.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn budget_exhaustion_reports_non_convergence() {
        let tight = Integrator {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_panels: 4,
        };
        let r = tight.integrate(|t: f64| (t.sin() * 50.0).cos(), 0.0, 10.0, &[]);
        assert!(!r.converged);
        assert!(r.value.is_finite());
    }

    #[test]
    fn slope_fit_exact_on_model() {
        let samples: Vec<(f64, f64)> = geometric_grid(2.0, 2.0, 16)
            .into_iter()
            .map(|y| (y, 1.7 * y - 3.0 * y.ln() + 0.25))
            .collect();
        let fit = fit_linear_slope(&samples).unwrap();
        assert!((fit.slope - 1.7).abs() < 1e-12);
        assert!((fit.log_coefficient + 3.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn slope_of_single_imaginary_zero() {
        // log|(1-y) e^y| on y ∈ [8, 4096]
        let samples: Vec<(f64, f64)> = geometric_grid(8.0, 2.0, 10)
            .into_iter()
            .map(|y| (y, (1.0 - y).abs().ln() + y))
            .collect();
        let fit = fit_linear_slope(&samples).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn slope_of_polynomial_growth() {
        let samples: Vec<(f64, f64)> = geometric_grid(8.0, 2.0, 10)
            .into_iter()
            .map(|y| (y, (1.0 + y * y).ln()))
            .collect();
        let fit = fit_linear_slope(&samples).unwrap();
        assert!(fit.slope.abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn degenerate_grids_rejected() {
        let few: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 0.0)).collect();
        assert!(fit_linear_slope(&few).is_err());
        let repeated = vec![(2.0, 1.0); 10];
        assert!(fit_linear_slope(&repeated).is_err());
        let negative: Vec<(f64, f64)> = (0..10).map(|k| (k as f64 - 3.0, 0.0)).collect();
        assert!(fit_linear_slope(&negative).is_err());
    }
}
