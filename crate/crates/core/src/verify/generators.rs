use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::entire::ZeroSet;
use crate::error::{Error, Result};
use crate::numlin::{hermitian_eigen, operator_norm, ComplexMatrix};

/// One generated or loaded input to a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    Matrix(ComplexMatrix),
    /// `A = G + iH` and `B = G + iF`
    Pair(ComplexMatrix, ComplexMatrix),
    Zeros(ZeroSet),
    /// Checks that need no input.
    Empty,
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Matrix(_) => "matrix",
            Instance::Pair(..) => "pair",
            Instance::Zeros(_) => "zeros",
            Instance::Empty => "empty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// strictly upper-triangular complex Gaussian
    Nilpotent,
    /// complex Gaussian shifted to trace zero
    Traceless,
    /// `A = G + iH`, `H = B*B/n`, `B = G + iF` with `F = H^{1/2}CH^{1/2}`, `‖C‖ <= 1`
    Dissipative,
    /// Hermitian Gaussian shifted to trace zero
    HermitianTraceless,
    /// zero sets closed under `z ↦ -z̄`
    Cartwright,
    /// rings of at least six equally spaced zeros
    Rotational,
    /// no instance
    None,
}

impl GeneratorKind {
    fn name(self) -> &'static str {
        match self {
            GeneratorKind::Nilpotent => "nilpotent",
            GeneratorKind::Traceless => "traceless",
            GeneratorKind::Dissipative => "dissipative",
            GeneratorKind::HermitianTraceless => "hermitian-traceless",
            GeneratorKind::Cartwright => "cartwright",
            GeneratorKind::Rotational => "rotational",
            GeneratorKind::None => "none",
        }
    }

    /// Default size range: matrix dimension, zero count, or ring count.
    fn default_range(self) -> (usize, usize) {
        match self {
            GeneratorKind::Nilpotent | GeneratorKind::Traceless | GeneratorKind::HermitianTraceless => (6, 6),
            GeneratorKind::Dissipative => (4, 4),
            GeneratorKind::Cartwright => (1, 40),
            GeneratorKind::Rotational => (1, 3),
            GeneratorKind::None => (0, 0),
        }
    }
}

/// A generator family with its size range, written `name` or
/// `name:size` or `name:min-max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub min: usize,
    pub max: usize,
}

impl Generator {
    pub fn new(kind: GeneratorKind) -> Self {
        let (min, max) = kind.default_range();
        Generator { kind, min, max }
    }

    pub fn sized(kind: GeneratorKind, min: usize, max: usize) -> Self {
        Generator { kind, min, max }
    }

    pub fn instance_kind(&self) -> &'static str {
        match self.kind {
            GeneratorKind::Nilpotent | GeneratorKind::Traceless | GeneratorKind::HermitianTraceless => "matrix",
            GeneratorKind::Dissipative => "pair",
            GeneratorKind::Cartwright | GeneratorKind::Rotational => "zeros",
            GeneratorKind::None => "empty",
        }
    }

    /// Instance `index` of the stream for `seed`. Each index owns an
    /// independent ChaCha8 stream keyed by [`instance_seed`], so the result
    /// does not depend on evaluation order.
    pub fn generate(&self, seed: u64, index: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, index));
        let size = if self.max > self.min {
            rng.random_range(self.min..=self.max)
        } else {
            self.min
        };
        match self.kind {
            GeneratorKind::Nilpotent => Instance::Matrix(nilpotent(&mut rng, size)),
            GeneratorKind::Traceless => Instance::Matrix(traceless(&mut rng, size)),
            GeneratorKind::HermitianTraceless => Instance::Matrix(hermitian_traceless(&mut rng, size)),
            GeneratorKind::Dissipative => {
                let (a, b) = dissipative_pair(&mut rng, size);
                Instance::Pair(a, b)
            }
            GeneratorKind::Cartwright => Instance::Zeros(cartwright_zeros(&mut rng, size)),
            GeneratorKind::Rotational => Instance::Zeros(rotational_zeros(&mut rng, size)),
            GeneratorKind::None => Instance::Empty,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.min == self.max {
            write!(f, "{}:{}", self.kind.name(), self.min)
        } else {
            write!(f, "{}:{}-{}", self.kind.name(), self.min, self.max)
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, size) = match s.split_once(':') {
            Some((n, sz)) => (n, Some(sz)),
            None => (s, None),
        };
        let kind = match name {
            "nilpotent" => GeneratorKind::Nilpotent,
            "traceless" => GeneratorKind::Traceless,
            "dissipative" => GeneratorKind::Dissipative,
            "hermitian-traceless" => GeneratorKind::HermitianTraceless,
            "cartwright" => GeneratorKind::Cartwright,
            "rotational" => GeneratorKind::Rotational,
            "none" => GeneratorKind::None,
            _ => return Err(Error::UnknownGenerator(s.to_string())),
        };
        let Some(size) = size else {
            return Ok(Generator::new(kind));
        };
        let bad = || Error::UnknownGenerator(s.to_string());
        let (min, max) = match size.split_once('-') {
            Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None => {
                let v = size.parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if min > max || (kind != GeneratorKind::None && min == 0) {
            return Err(bad());
        }
        Ok(Generator { kind, min, max })
    }
}

/// SplitMix64 finalizer.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the stream for instance `index` under run seed `seed`.
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index)
}

/// Complex Gaussian with `E|w|² = 1`.
fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| gaussian(rng))
}

fn remove_trace(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let shift = a.trace() / n as f64;
    let mut out = a.clone();
    for i in 0..n {
        out[(i, i)] -= shift;
    }
    out
}

fn nilpotent(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            a[(i, j)] = gaussian(rng);
        }
    }
    a
}

fn traceless(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    remove_trace(&gaussian_matrix(rng, n))
}

fn hermitian_traceless(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    remove_trace(&gaussian_matrix(rng, n).hermitize())
}

fn hermitian_sqrt(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.dim();
    let eig = hermitian_eigen(h).expect("Jacobi sweeps converge on small Hermitian input");
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let root = lambda.max(0.0).sqrt();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() * root;
            }
        }
    }
    out.hermitize()
}

fn dissipative_pair(rng: &mut ChaCha8Rng, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let g = gaussian_matrix(rng, n).hermitize();
    let b = gaussian_matrix(rng, n);
    let h = b.adjoint().matmul(&b).scale_real(1.0 / n as f64).hermitize();
    let w = gaussian_matrix(rng, n).hermitize();
    let norm = operator_norm(&w).unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let shrink: f64 = rng.random_range(0.0..=1.0);
    let contraction = w.scale_real(shrink / norm);
    let root = hermitian_sqrt(&h);
    let f = root.matmul(&contraction).matmul(&root).hermitize();
    let i = Complex64::new(0.0, 1.0);
    (&g + &h.scale(i), &g + &f.scale(i))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Imaginary zeros, pairs `{z, -z̄}`, quadruples `{±z, ±z̄}` and real pairs
/// `{±x}`; each block has `Σ Re(1/z) = 0`.
fn cartwright_zeros(rng: &mut ChaCha8Rng, target: usize) -> ZeroSet {
    let mut zeros: Vec<Complex64> = Vec::with_capacity(target);
    while zeros.len() < target {
        let room = target - zeros.len();
        let kind = match room {
            1 => 0,
            2 | 3 => [0u8, 1, 3][rng.random_range(0..3usize)],
            _ => rng.random_range(0..4u8),
        };
        let rho = log_uniform(rng, 0.5, 5.0);
        match kind {
            0 => {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                zeros.push(Complex64::new(0.0, sign * rho));
            }
            1 => {
                let phi = rng.random_range(-PI..PI);
                let z = Complex64::from_polar(rho, phi);
                zeros.extend([z, -z.conj()]);
            }
            2 => {
                let phi = rng.random_range(0.0..PI / 2.0);
                let z = Complex64::from_polar(rho, phi);
                zeros.extend([z, -z, z.conj(), -z.conj()]);
            }
            _ => zeros.extend([Complex64::new(rho, 0.0), Complex64::new(-rho, 0.0)]),
        }
    }
    ZeroSet::new(&zeros).expect("generated zeros are finite and nonzero")
}

/// `rings` circles, each carrying `m ∈ {6, 7, 8}` equally spaced zeros, so
/// `Σ z_k^{-j} = 0` for `j < 6` and `log M(r) = O(r^6)` near 0.
fn rotational_zeros(rng: &mut ChaCha8Rng, rings: usize) -> ZeroSet {
    let mut zeros = Vec::new();
    for _ in 0..rings {
        let m = rng.random_range(6..=8usize);
        let rho = log_uniform(rng, 0.5, 5.0);
        let phase = rng.random_range(0.0..2.0 * PI / m as f64);
        for j in 0..m {
            zeros.push(Complex64::from_polar(rho, phase + 2.0 * PI * j as f64 / m as f64));
        }
    }
    ZeroSet::new(&zeros).expect("generated zeros are finite and nonzero")
}
