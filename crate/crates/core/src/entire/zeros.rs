use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Imaginary parts below this fraction of the modulus count as real.
pub const REAL_AXIS_TOL: f64 = 1e-12;

/// One zero with multiplicity and cached polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub value: Complex64,
    pub multiplicity: u32,
    /// `|z|`
    pub modulus: f64,
    /// `arg z` in (-π, π]
    pub angle: f64,
    /// `1/z`
    pub reciprocal: Complex64,
}

impl Zero {
    fn new(value: Complex64, multiplicity: u32) -> Self {
        Zero {
            value,
            multiplicity,
            modulus: value.norm(),
            angle: value.arg(),
            reciprocal: value.inv(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.value.im.abs() <= REAL_AXIS_TOL * self.modulus
    }

    pub fn mult(&self) -> f64 {
        self.multiplicity as f64
    }
}

/// Finite multiset of nonzero complex numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroSet {
    zeros: Vec<Zero>,
}

impl ZeroSet {
    pub fn empty() -> Self {
        ZeroSet::default()
    }

    pub fn new(values: &[Complex64]) -> Result<Self> {
        Self::with_multiplicities(values, &vec![1; values.len()])
    }

    pub fn with_multiplicities(values: &[Complex64], multiplicities: &[u32]) -> Result<Self> {
        if values.len() != multiplicities.len() {
            return Err(Error::InvalidZeroSet(format!(
                "{} zeros but {} multiplicities",
                values.len(),
                multiplicities.len()
            )));
        }
        let mut zeros = Vec::with_capacity(values.len());
        for (&z, &m) in values.iter().zip(multiplicities) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidZeroSet("non-finite zero".into()));
            }
            if z == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroAtOrigin);
            }
            if m == 0 {
                return Err(Error::InvalidZeroSet("multiplicity must be at least 1".into()));
            }
            zeros.push(Zero::new(z, m));
        }
        Ok(ZeroSet { zeros })
    }

    /// Zeros `1/μ_k` of the Carleman determinant of an operator with
    /// eigenvalues `μ_k`; eigenvalues with `|μ| <= cutoff·max|μ|` give the
    /// factor `E(0) = 1` and are dropped.
    pub fn from_eigenvalues(eigenvalues: &[Complex64], cutoff: f64) -> Self {
        let top = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let zeros = eigenvalues
            .iter()
            .filter(|mu| mu.norm() > cutoff * top && mu.norm() > 0.0)
            .map(|&mu| Zero::new(1.0 / mu, 1))
            .collect();
        ZeroSet { zeros }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Zero> {
        self.zeros.iter()
    }

    /// Number of distinct entries.
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Number of zeros counted with multiplicity.
    pub fn count(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }

    /// `Σ m_k / z_k`
    pub fn reciprocal_sum(&self) -> Complex64 {
        self.zeros.iter().map(|z| z.mult() / z.value).sum()
    }

    /// `Σ m_k / |z_k|`
    pub fn reciprocal_abs_sum(&self) -> f64 {
        self.zeros.iter().map(|z| z.mult() / z.modulus).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.modulus).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.modulus).fold(f64::INFINITY, f64::min)
    }

    pub fn is_real(&self) -> bool {
        self.zeros.iter().all(Zero::is_real)
    }

    pub fn conjugate(&self) -> ZeroSet {
        ZeroSet {
            zeros: self
                .zeros
                .iter()
                .map(|z| Zero::new(z.value.conj(), z.multiplicity))
                .collect(),
        }
    }

    pub fn scaled(&self, lambda: f64) -> ZeroSet {
        ZeroSet {
            zeros: self
                .zeros
                .iter()
                .map(|z| Zero::new(z.value * lambda, z.multiplicity))
                .collect(),
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.zeros.iter().map(|z| z.value).collect()
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.zeros.iter().map(|z| z.multiplicity).collect()
    }
}

/// Wire form: `{"zeros": [[re, im], ...], "multiplicities": [int, ...]}`,
/// multiplicities optional (default 1).
#[derive(Serialize, Deserialize)]
struct ZeroSetWire {
    zeros: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<u32>>,
}

impl Serialize for ZeroSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let all_simple = self.zeros.iter().all(|z| z.multiplicity == 1);
        ZeroSetWire {
            zeros: self.zeros.iter().map(|z| [z.value.re, z.value.im]).collect(),
            multiplicities: (!all_simple).then(|| self.multiplicities()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZeroSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ZeroSetWire::deserialize(d)?;
        let values: Vec<Complex64> = wire.zeros.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let mult = wire.multiplicities.unwrap_or_else(|| vec![1; values.len()]);
        ZeroSet::with_multiplicities(&values, &mult).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_rejected() {
        assert!(matches!(
            ZeroSet::new(&[Complex64::new(0.0, 0.0)]),
            Err(Error::ZeroAtOrigin)
        ));
        let json = r#"{"zeros": [[1, 0], [0, 0]]}"#;
        assert!(serde_json::from_str::<ZeroSet>(json).is_err());
    }

    #[test]
    fn json_multiplicities_default_to_one() {
        let zs: ZeroSet = serde_json::from_str(r#"{"zeros": [[0, 1], [3, 0]]}"#).unwrap();
        assert_eq!(zs.count(), 2);
        let zs: ZeroSet = serde_json::from_str(r#"{"zeros": [[0, 1], [3, 0]], "multiplicities": [2, 1]}"#).unwrap();
        assert_eq!(zs.count(), 3);
        let back = serde_json::to_string(&zs).unwrap();
        assert_eq!(back, r#"{"zeros":[[0.0,1.0],[3.0,0.0]],"multiplicities":[2,1]}"#);
    }

    #[test]
    fn polar_cache_consistent() {
        let zs = ZeroSet::new(&[Complex64::new(-1.0, 1e-3), Complex64::new(0.0, -2.0)]).unwrap();
        for z in zs.iter() {
            assert!((Complex64::from_polar(z.modulus, z.angle) - z.value).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenvalue_conversion_drops_zeros() {
        let zs = ZeroSet::from_eigenvalues(&[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], 1e-13);
        assert_eq!(zs.len(), 1);
        assert_eq!(zs.values()[0], Complex64::new(0.5, 0.0));
    }
}
