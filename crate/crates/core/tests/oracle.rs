//! Cross-checks of the hand-written linear algebra against nalgebra.

use carleman::dets::carleman_determinant;
use carleman::numlin::{eigenvalues, hermitian_eigenvalues, hermitian_parts, log_det, singular_values};
use carleman::verify::{Generator, Instance};
use carleman::{Complex64, ComplexMatrix};
use nalgebra::DMatrix;

fn to_nalgebra(a: &ComplexMatrix) -> DMatrix<Complex64> {
    let n = a.dim();
    DMatrix::from_row_slice(n, n, a.as_slice())
}

fn instances(spec: &str, count: u64) -> Vec<ComplexMatrix> {
    let g: Generator = spec.parse().unwrap();
    (0..count)
        .map(|k| match g.generate(5, k) {
            Instance::Matrix(a) | Instance::Pair(a, _) => a,
            _ => unreachable!(),
        })
        .collect()
}

/// Greedy matching distance between two spectra of equal size.
fn spectrum_gap(ours: &[Complex64], theirs: &[Complex64]) -> f64 {
    let mut left: Vec<Complex64> = theirs.to_vec();
    let mut worst: f64 = 0.0;
    for &m in ours {
        let (i, d) = left
            .iter()
            .enumerate()
            .map(|(i, t)| (i, (t - m).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        left.swap_remove(i);
    }
    worst
}

#[test]
fn eigenvalues_match_schur() {
    for a in instances("traceless:2-12", 40) {
        let ours = eigenvalues(&a).unwrap();
        let theirs: Vec<Complex64> = to_nalgebra(&a).schur().eigenvalues().unwrap().iter().copied().collect();
        let gap = spectrum_gap(&ours, &theirs);
        assert!(gap < 1e-9 * a.frobenius_norm().max(1.0), "gap {gap}");
    }
}

#[test]
fn singular_values_match_svd() {
    for a in instances("traceless:2-12", 40) {
        let ours = singular_values(&a).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&a).singular_values().iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-11 * theirs[0].max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn hermitian_spectra_match_symmetric_eigen() {
    for a in instances("traceless:2-12", 40) {
        let (g, h) = hermitian_parts(&a).unwrap();
        for m in [g, h] {
            let ours = hermitian_eigenvalues(&m).unwrap();
            let mut theirs: Vec<f64> = to_nalgebra(&m).symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            let mut sorted = ours.clone();
            sorted.sort_by(f64::total_cmp);
            for (x, y) in sorted.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-11, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn log_determinant_matches_lu() {
    for a in instances("nilpotent:2-16", 20)
        .into_iter()
        .chain(instances("traceless:6", 20))
    {
        let m = a.identity_minus(Complex64::new(0.4, -0.3));
        let ours = log_det(&m);
        let theirs = to_nalgebra(&m).determinant();
        assert!((ours.log_modulus - theirs.norm().ln()).abs() < 1e-10);
    }
}

#[test]
fn carleman_matches_regularized_determinant() {
    // C_A(z) = det(I - zA) · exp(z tr A)
    for a in instances("traceless:2-10", 30) {
        for z in [
            Complex64::new(0.3, 0.2),
            Complex64::new(-1.1, 0.7),
            Complex64::new(0.0, -2.0),
        ] {
            let m = to_nalgebra(&a.identity_minus(z));
            let log_mod = m.determinant().norm().ln() + (z * a.trace()).re;
            let ours = carleman_determinant(&a, z).unwrap().log_modulus;
            assert!(
                (ours - log_mod).abs() < 1e-8 * log_mod.abs().max(1.0),
                "{ours} vs {log_mod}"
            );
        }
    }
}
