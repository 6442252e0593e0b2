//! Carleman, perturbation and ratio determinants in log domain, and the
//! factorizations linking them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entire::primary_factor;
use crate::error::{Error, Result};
use crate::logval::LogValue;
use crate::numlin::{
    dissipative_split, eigenvalues, hermitian_eigenvalues, hermitian_parts, log_det, operator_norm, singular_values,
    ComplexMatrix, Lu,
};
use crate::verify::CheckResult;

pub type DeterminantValue = LogValue;

/// Points with `|1 - zμ| < POLE_GAP` for an inverted factor are skipped.
pub const POLE_GAP: f64 = 1e-8;
pub const FACTOR_TOL: f64 = 1e-8;
pub const LIVSIC_TOL: f64 = 1e-10;
pub const SLOPE_TOL: f64 = 1e-5;
/// Relative tolerance for the order conditions `H ⪰ 0`, `-H ⪯ F ⪯ H`.
const ORDER_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `C(z) = ∏ E(zμ_k)`
pub fn carleman_from_eigenvalues(eigenvalues: &[Complex64], z: Complex64) -> DeterminantValue {
    eigenvalues
        .iter()
        .fold(LogValue::ONE, |acc, &mu| acc * primary_factor(z * mu))
}

pub fn carleman_determinant(a: &ComplexMatrix, z: Complex64) -> Result<DeterminantValue> {
    Ok(carleman_from_eigenvalues(&eigenvalues(a)?, z))
}

fn inverse_of(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::new(m).inverse()
}

/// `Δ_{X/Y}(z) = det[(I - zX)(I - zY)^{-1}]` from the explicit product.
pub fn perturbation_determinant(x: &ComplexMatrix, y: &ComplexMatrix, z: Complex64) -> Result<DeterminantValue> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let ry = inverse_of(&y.identity_minus(z))?;
    Ok(log_det(&x.identity_minus(z).matmul(&ry)))
}

/// `I + z²(H R_G(z))²`
fn ratio_matrix(g: &ComplexMatrix, h: &ComplexMatrix, z: Complex64) -> Result<ComplexMatrix> {
    let hr = h.matmul(&inverse_of(&g.identity_minus(z))?);
    Ok(&ComplexMatrix::identity(g.dim()) + &hr.matmul(&hr).scale(z * z))
}

/// `D(z) = det[I + z²(H R_G(z))²]`
pub fn ratio_determinant(a: &ComplexMatrix, z: Complex64) -> Result<DeterminantValue> {
    let (g, h) = hermitian_parts(a)?;
    Ok(log_det(&ratio_matrix(&g, &h, z)?))
}

/// A matrix together with everything the determinant identities need.
#[derive(Debug, Clone)]
pub struct OperatorModel {
    pub a: ComplexMatrix,
    pub g: ComplexMatrix,
    pub h: ComplexMatrix,
    /// `|H| = H₊ + H₋`
    pub h_one: ComplexMatrix,
    /// `A₁ = G + i|H|`
    pub a_one: ComplexMatrix,
    pub eig_a: Vec<Complex64>,
    pub eig_g: Vec<Complex64>,
    pub eig_a_one: Vec<Complex64>,
}

impl OperatorModel {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let (g, h) = hermitian_parts(a)?;
        let split = dissipative_split(&h)?;
        let h_one = split.h_one;
        let a_one = &g + &h_one.scale(c(0.0, 1.0));
        let eig_a = eigenvalues(a)?;
        let eig_g = hermitian_eigenvalues(&g)?.into_iter().map(|x| c(x, 0.0)).collect();
        let eig_a_one = eigenvalues(&a_one)?;
        Ok(OperatorModel {
            a: a.clone(),
            g,
            h,
            h_one,
            a_one,
            eig_a,
            eig_g,
            eig_a_one,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn eig_a_star(&self) -> Vec<Complex64> {
        self.eig_a.iter().map(|m| m.conj()).collect()
    }

    /// `z` stays `POLE_GAP` away from every pole of the inverted factors.
    pub fn is_regular(&self, z: Complex64) -> bool {
        self.eig_a
            .iter()
            .chain(&self.eig_g)
            .chain(&self.eig_a_one)
            .all(|&mu| (c(1.0, 0.0) - z * mu).norm() >= POLE_GAP)
    }

    pub fn c_a(&self, z: Complex64) -> DeterminantValue {
        carleman_from_eigenvalues(&self.eig_a, z)
    }

    pub fn c_a_star(&self, z: Complex64) -> DeterminantValue {
        carleman_from_eigenvalues(&self.eig_a_star(), z)
    }

    pub fn c_g(&self, z: Complex64) -> DeterminantValue {
        carleman_from_eigenvalues(&self.eig_g, z)
    }

    pub fn c_a_one(&self, z: Complex64) -> DeterminantValue {
        carleman_from_eigenvalues(&self.eig_a_one, z)
    }

    pub fn ratio_determinant(&self, z: Complex64) -> Result<DeterminantValue> {
        Ok(log_det(&ratio_matrix(&self.g, &self.h, z)?))
    }
}

/// Relative residuals of the three factorizations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResiduals {
    /// `I + z²(HR_G)² = (I - zA*)R_G(I - zA)R_G` in operator norm
    pub matrix: f64,
    /// `D = C_A C_{A*} / C_G²`, log modulus and argument
    pub ratio: f64,
    /// `C_G = Δ_{G/A₁} Δ_{A₁/A} C_A e^{-iz tr H}`, log modulus
    pub chain: f64,
}

impl FactorizationResiduals {
    pub fn max(&self) -> f64 {
        self.matrix.max(self.ratio).max(self.chain)
    }
}

fn log_gap(x: &LogValue, y: &LogValue) -> f64 {
    let scale = x.log_modulus.abs().max(1.0);
    ((x.log_modulus - y.log_modulus).abs() + x.argument_gap(y)) / scale
}

/// Residuals at `z`, or `None` when `z` is too close to a pole.
pub fn factorization_at(model: &OperatorModel, z: Complex64) -> Result<Option<FactorizationResiduals>> {
    if !model.is_regular(z) {
        return Ok(None);
    }
    let n = model.dim();
    let rg = inverse_of(&model.g.identity_minus(z))?;
    let hr = model.h.matmul(&rg);
    let lhs = &ComplexMatrix::identity(n) + &hr.matmul(&hr).scale(z * z);
    let rhs = model
        .a
        .adjoint()
        .identity_minus(z)
        .matmul(&rg)
        .matmul(&model.a.identity_minus(z))
        .matmul(&rg);
    let matrix = operator_norm(&(&lhs - &rhs))? / operator_norm(&lhs)?.max(1.0);

    let d = log_det(&lhs);
    let product = model.c_a(z) * model.c_a_star(z) / model.c_g(z).powi(2);
    let ratio = log_gap(&d, &product);

    let tr_h = model.h.trace();
    let chain_value = perturbation_determinant(&model.g, &model.a_one, z)?
        * perturbation_determinant(&model.a_one, &model.a, z)?
        * model.c_a(z)
        * LogValue::exp(c(0.0, -1.0) * z * tr_h);
    let c_g = model.c_g(z);
    let chain = (c_g.log_modulus - chain_value.log_modulus).abs() / c_g.log_modulus.abs().max(1.0);
    Ok(Some(FactorizationResiduals { matrix, ratio, chain }))
}

/// All three factorizations at one point, as a check.
pub fn factorization_residuals(a: &ComplexMatrix, z: Complex64) -> Result<CheckResult> {
    factorization_check(&OperatorModel::new(a)?, &[z])
}

/// Worst residual over `grid`; skipped points are counted.
pub fn factorization_check(model: &OperatorModel, grid: &[Complex64]) -> Result<CheckResult> {
    let mut worst = FactorizationResiduals {
        matrix: 0.0,
        ratio: 0.0,
        chain: 0.0,
    };
    let mut skipped = 0;
    for &z in grid {
        match factorization_at(model, z)? {
            Some(r) => {
                worst.matrix = worst.matrix.max(r.matrix);
                worst.ratio = worst.ratio.max(r.ratio);
                worst.chain = worst.chain.max(r.chain);
            }
            None => skipped += 1,
        }
    }
    let residual = worst.max();
    Ok(CheckResult::identity("FACTOR", residual, 0.0, residual, FACTOR_TOL)
        .with("matrix_identity", worst.matrix)
        .with("ratio_identity", worst.ratio)
        .with("chain_identity", worst.chain)
        .with_skipped(skipped, grid.len()))
}

fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(&h.hermitize())?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

fn require_psd(m: &ComplexMatrix, what: &str, scale: f64) -> Result<()> {
    let lambda = min_eigenvalue(m)?;
    if lambda < -ORDER_TOL * scale.max(1.0) {
        return Err(Error::Precondition(format!("{what} has eigenvalue {lambda:.6e} < 0")));
    }
    Ok(())
}

/// `max |Δ_{B/A}(z)|` over upper half-plane points, against 1, for
/// `A = G + iH`, `H ⪰ 0`, `B = G + iF`, `-H ⪯ F ⪯ H`.
pub fn livsic_bound(a: &ComplexMatrix, b: &ComplexMatrix, grid: &[Complex64]) -> Result<CheckResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (g, h) = hermitian_parts(a)?;
    let (g_b, f) = hermitian_parts(b)?;
    let scale = h.frobenius_norm().max(g.frobenius_norm());
    let real_gap = (&g - &g_b).max_abs();
    if real_gap > ORDER_TOL * scale.max(1.0) {
        return Err(Error::Precondition(format!(
            "A and B have different real parts (gap {real_gap:.3e})"
        )));
    }
    require_psd(&h, "H", scale)?;
    require_psd(&(&h - &f), "H - F", scale)?;
    require_psd(&(&h + &f), "H + F", scale)?;
    if let Some(z) = grid.iter().find(|z| !(z.im > 0.0)) {
        return Err(Error::Precondition(format!(
            "grid point {z} is not in the upper half-plane"
        )));
    }
    let eig_a = eigenvalues(a)?;
    let mut worst = f64::NEG_INFINITY;
    let mut skipped = 0;
    for &z in grid {
        if eig_a.iter().any(|&mu| (c(1.0, 0.0) - z * mu).norm() < POLE_GAP) {
            skipped += 1;
            continue;
        }
        worst = worst.max(perturbation_determinant(b, a, z)?.log_modulus);
    }
    let max_modulus = worst.exp();
    Ok(CheckResult::inequality("LIVSIC", max_modulus, 1.0, LIVSIC_TOL).with_skipped(skipped, grid.len()))
}

/// `|(1 - z w₁)/(1 - z w₂)|` for `Re w₁ = Re w₂`, `|Im w₁| <= Im w₂`,
/// `Im z > 0`.
pub fn scalar_livsic(w1: Complex64, w2: Complex64, z: Complex64) -> Result<f64> {
    let scale = w1.norm().max(w2.norm()).max(1.0);
    if (w1.re - w2.re).abs() > 1e-12 * scale {
        return Err(Error::Precondition(format!(
            "Re w1 = {} differs from Re w2 = {}",
            w1.re, w2.re
        )));
    }
    if w1.im.abs() > w2.im {
        return Err(Error::Precondition(format!(
            "|Im w1| = {} exceeds Im w2 = {}",
            w1.im.abs(),
            w2.im
        )));
    }
    if !(z.im > 0.0) {
        return Err(Error::Precondition(format!("z = {z} is not in the upper half-plane")));
    }
    let den = c(1.0, 0.0) - z * w2;
    if den.norm() == 0.0 {
        return Err(Error::Singular);
    }
    Ok((c(1.0, 0.0) - z * w1).norm() / den.norm())
}

/// Abscissae of the boundary-slope probe.
pub const SLOPE_PROBES: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `lim_{y↓0} log|Δ_{G/A₁}(iy)|/y` by Richardson extrapolation over
/// `SLOPE_PROBES`, against `-tr H₁`.
pub fn boundary_slope(model: &OperatorModel) -> Result<CheckResult> {
    let mut q = [0.0; 3];
    for (k, &y) in SLOPE_PROBES.iter().enumerate() {
        q[k] = perturbation_determinant(&model.g, &model.a_one, c(0.0, y))?.log_modulus / y;
    }
    // q(y) = L + c₁y + c₂y² + …, probes a factor 10 apart
    let r1 = (10.0 * q[1] - q[0]) / 9.0;
    let r2 = (10.0 * q[2] - q[1]) / 9.0;
    let estimate = (100.0 * r2 - r1) / 99.0;
    let expected = -model.h_one.trace().re;
    let residual = (estimate - expected).abs() / expected.abs().max(1.0);
    Ok(
        CheckResult::identity("LIVSIC_SLOPE", estimate, expected, residual, SLOPE_TOL)
            .with("raw_quotient_smallest_y", q[2]),
    )
}

/// Logarithms of the successive bounds for `|D(re^{iθ})|`:
/// `∏|1 + z²μ_k²|`, `∏(1 + r²|μ_k|²)`, `∏(1 + r²s_k²)`,
/// `∏(1 + r²‖R_G‖²s_k(H)²)`, `∏(1 + r²s_k(H)²/sin²θ)`
/// with `μ_k`, `s_k` the eigenvalues and singular values of `HR_G(z)`.
pub fn weyl_chain(model: &OperatorModel, z: Complex64) -> Result<[f64; 5]> {
    let rg = inverse_of(&model.g.identity_minus(z))?;
    let hr = model.h.matmul(&rg);
    let r2 = z.norm_sqr();
    let sin2 = (z.im * z.im) / r2;
    let mu = eigenvalues(&hr)?;
    let s = singular_values(&hr)?;
    let s_h = singular_values(&model.h)?;
    let resolvent_norm = operator_norm(&rg)?;
    let log_d = model.ratio_determinant(z)?.log_modulus;
    let eig: f64 = mu.iter().map(|m| (r2 * m.norm_sqr()).ln_1p()).sum();
    let sing: f64 = s.iter().map(|x| (r2 * x * x).ln_1p()).sum();
    let res: f64 = s_h
        .iter()
        .map(|x| (r2 * resolvent_norm * resolvent_norm * x * x).ln_1p())
        .sum();
    let sine: f64 = s_h.iter().map(|x| (r2 * x * x / sin2).ln_1p()).sum();
    Ok([log_d, eig, sing, res, sine])
}
