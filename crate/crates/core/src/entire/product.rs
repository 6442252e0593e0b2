use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::zeros::ZeroSet;
use crate::error::{Error, Result};
use crate::logval::LogValue;

/// Angles in the initial scan of `max_modulus`.
pub const MAX_MODULUS_ANGLES: usize = 256;
const GOLDEN_ITERATIONS: usize = 36;

/// `log E(w) = log(1 - w) + w` as a log-domain pair.
///
/// Near the origin the series `-Σ_{j≥2} w^j / j` keeps full relative
/// accuracy of the `O(w²)` result.
pub fn primary_factor(w: Complex64) -> LogValue {
    if w.norm() < 0.25 {
        let s = log_primary_series(w);
        return LogValue::new(s.re, s.im);
    }
    let one_minus = Complex64::new(1.0, 0.0) - w;
    if one_minus.norm() == 0.0 {
        return LogValue::new(f64::NEG_INFINITY, 0.0);
    }
    LogValue::new(one_minus.norm().ln() + w.re, one_minus.arg() + w.im)
}

/// `log|E(w)|`
pub fn log_primary_modulus(w: Complex64) -> f64 {
    if w.norm_sqr() < 0.01 {
        return log_primary_series_re(w);
    }
    let one_minus = Complex64::new(1.0, 0.0) - w;
    0.5 * one_minus.norm_sqr().ln() + w.re
}

fn log_primary_series(w: Complex64) -> Complex64 {
    let mut power = w;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 2..64 {
        power *= w;
        let term = power / j as f64;
        sum -= term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `Re(-Σ_{j≥2} w^j / j)` for `|w| < 0.1`.
fn log_primary_series_re(w: Complex64) -> f64 {
    let r = w.norm();
    let mut power = w * w;
    let mut magnitude = r * r;
    let mut sum = -0.5 * power.re;
    for j in 3..40 {
        power *= w;
        magnitude *= r;
        sum -= power.re * (1.0 / j as f64);
        if magnitude <= 1e-17 * (0.5 * r * r) {
            break;
        }
    }
    sum
}

/// Genus-one canonical product `Π(z) = ∏ E(z/z_k)^{m_k}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalProduct {
    zero_set: ZeroSet,
}

impl CanonicalProduct {
    pub fn new(zero_set: ZeroSet) -> Self {
        CanonicalProduct { zero_set }
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zero_set
    }

    pub fn log_value(&self, z: Complex64) -> LogValue {
        self.zero_set.iter().fold(LogValue::ONE, |acc, zk| {
            acc * primary_factor(z / zk.value).powi(zk.multiplicity as i32)
        })
    }

    /// `log|Π(z)|`, `-∞` exactly at zeros.
    pub fn log_modulus(&self, z: Complex64) -> f64 {
        self.zero_set
            .iter()
            .map(|zk| zk.mult() * log_primary_modulus(z * zk.reciprocal))
            .sum()
    }

    pub fn log_modulus_real(&self, t: f64) -> f64 {
        self.log_modulus(Complex64::new(t, 0.0))
    }

    /// `log M(r) = max_{|z|=r} log|Π(z)|`.
    pub fn max_modulus(&self, r: f64) -> f64 {
        if self.zero_set.is_empty() || r == 0.0 {
            return 0.0;
        }
        let f = |theta: f64| self.log_modulus(Complex64::from_polar(r, theta));
        let step = 2.0 * PI / MAX_MODULUS_ANGLES as f64;
        let scan: Vec<f64> = (0..MAX_MODULUS_ANGLES).map(|j| f(j as f64 * step)).collect();
        let mut order: Vec<usize> = (0..MAX_MODULUS_ANGLES).collect();
        order.sort_by(|&i, &j| scan[j].total_cmp(&scan[i]));
        let mut best = scan[order[0]];
        for &j in order.iter().take(3) {
            let centre = j as f64 * step;
            best = best.max(golden_max(&f, centre - step, centre + step));
        }
        best
    }
}

/// Maximum of `f` on `[a, b]` by golden-section search, assuming a single
/// interior hump.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// `n(r)`: zeros in `|z| <= r` with multiplicity.
pub fn counting_function(zs: &ZeroSet, r: f64) -> u64 {
    zs.iter()
        .filter(|z| z.modulus <= r)
        .map(|z| z.multiplicity as u64)
        .sum()
}

/// Signed real-axis count: zeros in `(0, t]` for `t > 0`, minus the zeros
/// in `[t, 0)` for `t < 0`.
pub fn signed_counting(zs: &ZeroSet, t: f64) -> Result<i64> {
    if let Some(z) = zs.iter().find(|z| !z.is_real()) {
        return Err(Error::NonRealZero(z.value));
    }
    let count = |pred: &dyn Fn(f64) -> bool| -> i64 {
        zs.iter()
            .filter(|z| pred(z.value.re))
            .map(|z| z.multiplicity as i64)
            .sum()
    };
    Ok(if t > 0.0 {
        count(&|x| x > 0.0 && x <= t)
    } else if t < 0.0 {
        -count(&|x| x < 0.0 && x >= t)
    } else {
        0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn product(zeros: &[Complex64]) -> CanonicalProduct {
        CanonicalProduct::new(ZeroSet::new(zeros).unwrap())
    }

    #[test]
    fn primary_factor_values() {
        assert_eq!(primary_factor(c(0.0, 0.0)).log_modulus, 0.0);
        assert_eq!(primary_factor(c(1.0, 0.0)).log_modulus, f64::NEG_INFINITY);
        assert_abs_diff_eq!(
            primary_factor(c(-1.0, 0.0)).modulus(),
            2.0 / 1f64.exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn series_matches_closed_form_off_the_origin() {
        for &w in &[c(0.2, 0.1), c(-0.24, 0.0), c(0.0, 0.2)] {
            let direct = (c(1.0, 0.0) - w).ln() + w;
            let s = primary_factor(w);
            assert!((s.log_modulus - direct.re).abs() < 1e-15);
            assert!((s.argument - direct.im).abs() < 1e-15);
        }
    }

    #[test]
    fn log_modulus_examples() {
        let p = product(&[c(0.0, 1.0)]);
        for &t in &[-3.0, 0.5, 7.0] {
            assert_abs_diff_eq!(p.log_modulus_real(t), 0.5 * (1.0 + t * t).ln(), epsilon = 1e-13);
        }
        let p = product(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let z = c(0.7, -1.3);
        assert_abs_diff_eq!(p.log_modulus(z), (c(1.0, 0.0) + z * z).norm().ln(), epsilon = 1e-13);
        assert_eq!(p.log_modulus(c(0.0, 0.0)), 0.0);
        assert_eq!(p.log_modulus(c(0.0, 1.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn log_value_at_origin_is_one() {
        let p = product(&[c(1.0, 2.0), c(-3.0, 0.5)]);
        assert_eq!(p.log_value(c(0.0, 0.0)), LogValue::ONE);
    }

    #[test]
    fn max_modulus_examples() {
        assert_abs_diff_eq!(product(&[c(0.0, 1.0)]).max_modulus(1.0), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(
            product(&[c(1.0, 0.0), c(-1.0, 0.0)]).max_modulus(2.0),
            5f64.ln(),
            epsilon = 1e-9
        );
        assert!(product(&[c(0.0, 1.0)]).max_modulus(1e-4).abs() < 1e-7);
    }

    #[test]
    fn counting_examples() {
        let zs = ZeroSet::with_multiplicities(&[c(0.0, 1.0), c(3.0, 0.0)], &[2, 1]).unwrap();
        assert_eq!(counting_function(&zs, 2.0), 2);
        let zs = ZeroSet::new(&[c(0.0, 1.0)]).unwrap();
        assert_eq!(counting_function(&zs, 0.5), 0);
        assert_eq!(counting_function(&zs, 1.0), 1);
    }

    #[test]
    fn signed_counting_examples() {
        let zs = ZeroSet::new(&[c(-1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(signed_counting(&zs, 2.0).unwrap(), 1);
        assert_eq!(signed_counting(&zs, 1.0).unwrap(), 0);
        assert_eq!(signed_counting(&zs, -1.0).unwrap(), -1);
        let zs = ZeroSet::new(&[c(1.0, 1.0)]).unwrap();
        assert!(matches!(signed_counting(&zs, 1.0), Err(Error::NonRealZero(_))));
    }
}
