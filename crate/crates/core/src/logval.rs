use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number stored as `(log |w|, arg w)`.
///
/// Products of hundreds of factors stay representable; `log_modulus` may be
/// `-inf` for an exact zero, in which case the argument is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log_modulus: f64,
    pub argument: f64,
}

impl LogValue {
    pub const ONE: LogValue = LogValue {
        log_modulus: 0.0,
        argument: 0.0,
    };

    pub fn new(log_modulus: f64, argument: f64) -> Self {
        if log_modulus == f64::NEG_INFINITY {
            return LogValue {
                log_modulus,
                argument: 0.0,
            };
        }
        LogValue {
            log_modulus,
            argument: wrap_angle(argument),
        }
    }

    pub fn from_complex(w: Complex64) -> Self {
        if w == Complex64::new(0.0, 0.0) {
            return LogValue::new(f64::NEG_INFINITY, 0.0);
        }
        LogValue::new(w.norm().ln(), w.arg())
    }

    /// `e^w` for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        LogValue::new(w.re, w.im)
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.log_modulus.exp(), self.argument)
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    pub fn inv(&self) -> Self {
        LogValue::new(-self.log_modulus, -self.argument)
    }

    pub fn powi(&self, k: i32) -> Self {
        LogValue::new(self.log_modulus * k as f64, self.argument * k as f64)
    }

    /// Difference of arguments reduced to (-π, π].
    pub fn argument_gap(&self, other: &LogValue) -> f64 {
        wrap_angle(self.argument - other.argument).abs()
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::new(self.log_modulus + rhs.log_modulus, self.argument + rhs.argument)
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.inv()
    }
}

/// Reduce an angle to (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    if !theta.is_finite() {
        return theta;
    }
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_products() {
        let a = Complex64::new(-3.0, 4.0);
        let b = Complex64::new(0.5, -0.25);
        let la = LogValue::from_complex(a);
        let lb = LogValue::from_complex(b);
        let prod = (la * lb).to_complex();
        assert!((prod - a * b).norm() < 1e-14);
        let quot = (la / lb).to_complex();
        assert!((quot - a / b).norm() < 1e-13);
    }

    #[test]
    fn zero_has_zero_argument() {
        let z = LogValue::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.argument, 0.0);
    }

    #[test]
    fn wrap_stays_in_half_open_interval() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }
}
