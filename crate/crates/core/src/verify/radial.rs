use serde::{Deserialize, Serialize};

use crate::entire::{proximity, CanonicalProduct, ZeroSet};
use crate::error::{Error, Result};

/// Grid points per octave in `r`.
pub const POINTS_PER_OCTAVE: usize = 8;
/// Values of the radial function below this start the analytic lower tail.
const LOWER_FLOOR: f64 = 1e-12;
const UPPER_OCTAVES: i32 = 12;

/// `∫₀^∞ f(r)/r^{p+1} dr` split into the sampled body and the two tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegral {
    pub value: f64,
    pub body: f64,
    pub lower_tail: f64,
    pub upper_tail: f64,
    /// Fitted small-`r` exponent `q` in `f(r) ≈ c r^q`.
    pub lower_exponent: f64,
    pub points: usize,
}

/// Samples of a radial function on `r_k = r₀ 2^{k/8}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialSamples {
    /// Sample `f` from below the smallest zero, where `f` first drops under
    /// `1e-12`, up to `2^12` times the largest zero modulus.
    pub fn collect<F: Fn(f64) -> f64>(zs: &ZeroSet, f: F) -> Self {
        let ratio = 2f64.powf(1.0 / POINTS_PER_OCTAVE as f64);
        let r_small = zs.min_modulus();
        let r_big = zs.max_modulus();
        let mut lower = Vec::new();
        let mut r = 0.5 * r_small;
        for _ in 0..(40 * POINTS_PER_OCTAVE) {
            let v = f(r);
            lower.push((r, v));
            if v < LOWER_FLOOR {
                break;
            }
            r /= ratio;
        }
        lower.reverse();
        let top = r_big * 2f64.powi(UPPER_OCTAVES);
        let mut radii: Vec<f64> = lower.iter().map(|&(r, _)| r).collect();
        let mut values: Vec<f64> = lower.iter().map(|&(_, v)| v).collect();
        let mut r = 0.5 * r_small * ratio;
        while r <= top * (1.0 + 1e-12) {
            radii.push(r);
            values.push(f(r));
            r *= ratio;
        }
        RadialSamples { radii, values }
    }

    /// Integrate against `r^{-p-1}`: Simpson's rule in `log r`, a power law
    /// `c r^q` below the grid and `a + b r + c log r` above it.
    pub fn integrate(&self, p: f64) -> Result<RadialIntegral> {
        if !(p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let n = self.radii.len();
        if n < 8 {
            return Err(Error::DegenerateGrid(format!("{n} radial samples")));
        }
        let h = (self.radii[1] / self.radii[0]).ln();
        let weighted: Vec<f64> = self
            .radii
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| v * r.powf(-p))
            .collect();
        // Simpson over an even number of intervals; a leftover interval
        // at the start gets the trapezoid rule.
        let intervals = n - 1;
        let start = intervals % 2;
        let mut body = if start == 1 {
            0.5 * h * (weighted[0] + weighted[1])
        } else {
            0.0
        };
        for k in (start..intervals).step_by(2) {
            body += h / 3.0 * (weighted[k] + 4.0 * weighted[k + 1] + weighted[k + 2]);
        }

        let (r0, v0, v1) = (self.radii[0], self.values[0], self.values[1]);
        let (lower_tail, lower_exponent) = if v0 <= 0.0 {
            (0.0, f64::NAN)
        } else {
            let q = (v1 / v0).ln() / h;
            if !(q > p) {
                return Err(Error::Precondition(format!(
                    "radial function grows like r^{q:.3} near 0; the r^-{:.3} weight is not integrable",
                    p + 1.0
                )));
            }
            (v0 * r0.powf(-p) / (q - p), q)
        };

        let upper_tail = upper_tail(&self.radii[n - 17..], &self.values[n - 17..], p)?;
        Ok(RadialIntegral {
            value: body + lower_tail + upper_tail,
            body,
            lower_tail,
            upper_tail,
            lower_exponent,
            points: n,
        })
    }
}

/// `∫_R^∞ (a + b r + c log r) r^{-p-1} dr` with `(a, b, c)` matched at
/// the last sample and the samples one and two octaves below it.
fn upper_tail(radii: &[f64], values: &[f64], p: f64) -> Result<f64> {
    let m = radii.len() - 1;
    let idx = [m - 2 * POINTS_PER_OCTAVE, m - POINTS_PER_OCTAVE, m];
    let rows: Vec<[f64; 4]> = idx.iter().map(|&i| [1.0, radii[i], radii[i].ln(), values[i]]).collect();
    let [a, b, c] = solve3(rows).ok_or_else(|| Error::DegenerateGrid("upper tail fit".into()))?;
    let big_r = radii[m];
    let lr = big_r.ln();
    Ok(a * big_r.powf(-p) / p + b * big_r.powf(1.0 - p) / (p - 1.0) + c * big_r.powf(-p) * (p * lr + 1.0) / (p * p))
}

/// Gaussian elimination with partial pivoting on a 3×4 augmented system.
fn solve3(mut rows: Vec<[f64; 4]>) -> Option<[f64; 3]> {
    // equilibrate columns: 1, r, log r live on very different scales
    let scale: Vec<f64> = (0..3)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].abs())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE)
        })
        .collect();
    for r in rows.iter_mut() {
        for j in 0..3 {
            r[j] /= scale[j];
        }
    }
    for k in 0..3 {
        let piv = (k..3).max_by(|&i, &j| rows[i][k].abs().total_cmp(&rows[j][k].abs()))?;
        rows.swap(k, piv);
        if rows[k][k].abs() < 1e-14 {
            return None;
        }
        for i in (k + 1)..3 {
            let f = rows[i][k] / rows[k][k];
            for j in k..4 {
                rows[i][j] -= f * rows[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = ((k + 1)..3).map(|j| rows[k][j] * x[j]).sum();
        x[k] = (rows[k][3] - s) / rows[k][k];
    }
    Some([x[0] / scale[0], x[1] / scale[1], x[2] / scale[2]])
}

/// `∫₀^∞ log M(r, Π)/r^{p+1} dr`
pub fn log_max_modulus_integral(prod: &CanonicalProduct, p: f64) -> Result<RadialIntegral> {
    RadialSamples::collect(prod.zero_set(), |r| prod.max_modulus(r)).integrate(p)
}

/// `∫₀^∞ m(r, 1/Π)/r^{p+1} dr`
pub fn inverse_proximity_integral(prod: &CanonicalProduct, p: f64) -> Result<RadialIntegral> {
    RadialSamples::collect(prod.zero_set(), |r| proximity(prod, r, true)).integrate(p)
}

/// `r (∫₀^r n(t)/t² dt + r ∫_r^∞ n(t)/t³ dt)` in closed form.
pub fn borel_majorant(zs: &ZeroSet, r: f64) -> f64 {
    let mut inner = 0.0;
    let mut outer = 0.0;
    for z in zs.iter() {
        if z.modulus <= r {
            inner += z.mult() * (1.0 / z.modulus - 1.0 / r);
            outer += z.mult() / (2.0 * r * r);
        } else {
            outer += z.mult() / (2.0 * z.modulus * z.modulus);
        }
    }
    r * (inner + r * outer)
}
