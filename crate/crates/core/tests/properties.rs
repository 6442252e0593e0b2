use carleman::dets::{carleman_determinant, carleman_from_eigenvalues, ratio_determinant};
use carleman::entire::{CanonicalProduct, ZeroSet};
use carleman::numlin::{eigenvalues, hermitian_parts, schatten_norm, singular_values};
use carleman::par::{map_indexed, map_indexed_serial};
use carleman::verify::{run_check, CheckParams, Generator, GeneratorKind, Instance};
use carleman::{Complex64, ComplexMatrix, LogValue};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
            ComplexMatrix::from_fn(n, |i, j| {
                let (re, im) = v[i * n + j];
                c(re, im)
            })
        })
    })
}

fn point() -> impl Strategy<Value = Complex64> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(re, im)| c(re, im))
}

fn zero_set() -> impl Strategy<Value = ZeroSet> {
    prop::collection::vec((0.3..5.0f64, -3.1..3.1f64), 1..12).prop_map(|v| {
        let zs: Vec<Complex64> = v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        ZeroSet::new(&zs).unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_parts_recombine(a in matrix()) {
        let (g, h) = hermitian_parts(&a).unwrap();
        prop_assert!(g.is_hermitian(1e-14) && h.is_hermitian(1e-14));
        let back = &g + &h.scale(c(0.0, 1.0));
        let diff = (&back - &a).max_abs();
        prop_assert!(diff < 1e-13, "{diff}");
        prop_assert!((g.trace().re - a.trace().re).abs() < 1e-12);
        prop_assert!((h.trace().re - a.trace().im).abs() < 1e-12);
    }

    #[test]
    fn carleman_conjugation_symmetry(a in matrix(), z in point()) {
        let direct = carleman_determinant(&a, z).unwrap();
        let mirrored = carleman_determinant(&a.adjoint(), z.conj()).unwrap();
        prop_assert!(close(direct.log_modulus, mirrored.log_modulus, 1e-8));
        if direct.log_modulus > -20.0 {
            prop_assert!(direct.argument_gap(&LogValue::new(0.0, -mirrored.argument)) < 1e-7);
        }
    }

    #[test]
    fn carleman_scaling_law(a in matrix(), z in point(), lambda in 0.2..3.0f64) {
        let scaled = carleman_determinant(&a.scale_real(lambda), z).unwrap();
        let moved = carleman_determinant(&a, z * lambda).unwrap();
        prop_assert!(close(scaled.log_modulus, moved.log_modulus, 1e-8));
    }

    #[test]
    fn carleman_has_unit_value_and_flat_start(a in matrix()) {
        let eig = eigenvalues(&a).unwrap();
        prop_assert_eq!(carleman_from_eigenvalues(&eig, c(0.0, 0.0)), LogValue::ONE);
        // E(w) = 1 - w²/2 + O(w³), so log|C(εz)| = O(ε²)
        let eps = 1e-4;
        let small = carleman_from_eigenvalues(&eig, c(eps, 0.0)).log_modulus;
        prop_assert!(small.abs() < 50.0 * eps * eps * (1.0 + a.frobenius_norm().powi(2)));
    }

    #[test]
    fn ratio_determinant_is_real_symmetric(a in matrix(), z in point()) {
        // D(z̄) = conj(D(z)) when A is replaced by A*
        if let (Ok(d1), Ok(d2)) = (ratio_determinant(&a, z), ratio_determinant(&a.adjoint(), z.conj())) {
            prop_assert!(close(d1.log_modulus, d2.log_modulus, 1e-6));
        }
    }

    #[test]
    fn product_scaling_and_conjugation(zs in zero_set(), z in point(), lambda in 0.3..3.0f64) {
        let prod = CanonicalProduct::new(zs.clone());
        let base = prod.log_modulus(z);
        let scaled = CanonicalProduct::new(zs.scaled(lambda)).log_modulus(z * lambda);
        let mirrored = CanonicalProduct::new(zs.conjugate()).log_modulus(z.conj());
        prop_assert!(close(base, scaled, 1e-9), "{base} {scaled}");
        prop_assert!(close(base, mirrored, 1e-12));
    }

    #[test]
    fn schatten_norms_decrease_in_p(a in matrix(), p in 1.0..4.0f64, dp in 0.0..3.0f64) {
        let small = schatten_norm(&a, p + dp).unwrap();
        let large = schatten_norm(&a, p).unwrap();
        prop_assert!(small <= large * (1.0 + 1e-12));
    }

    #[test]
    fn schur_and_weyl_bounds(a in matrix()) {
        let eig = eigenvalues(&a).unwrap();
        let sv = singular_values(&a).unwrap();
        let eig_sq: f64 = eig.iter().map(|m| m.norm_sqr()).sum();
        let sv_sq: f64 = sv.iter().map(|s| s * s).sum();
        prop_assert!(eig_sq <= sv_sq * (1.0 + 1e-10) + 1e-12);
        prop_assert!((sv_sq - a.frobenius_norm().powi(2)).abs() < 1e-10 * sv_sq.max(1.0));
        let mut moduli: Vec<f64> = eig.iter().map(|m| m.norm()).collect();
        moduli.sort_by(|x, y| y.total_cmp(x));
        prop_assert!(moduli[0] <= sv[0] * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn generator_is_a_function_of_seed_and_index(seed in any::<u64>(), index in 0u64..1000) {
        for kind in [GeneratorKind::Traceless, GeneratorKind::Cartwright, GeneratorKind::Dissipative] {
            let g = Generator::new(kind);
            prop_assert_eq!(g.generate(seed, index), g.generate(seed, index));
        }
    }

    #[test]
    fn cartwright_instances_are_balanced(seed in any::<u64>(), index in 0u64..1000) {
        let Instance::Zeros(zs) = Generator::new(GeneratorKind::Cartwright).generate(seed, index) else {
            unreachable!()
        };
        let s = zs.reciprocal_sum();
        prop_assert!(s.re.abs() <= 1e-10 * zs.reciprocal_abs_sum().max(1.0));
        prop_assert!(zs.len() <= 40);
    }

    #[test]
    fn traceless_instances_are_traceless(seed in any::<u64>(), index in 0u64..1000) {
        let Instance::Matrix(a) = Generator::new(GeneratorKind::Traceless).generate(seed, index) else {
            unreachable!()
        };
        prop_assert!(a.trace().norm() < 1e-12 * a.frobenius_norm().max(1.0));
    }
}

#[test]
fn serial_and_parallel_paths_agree() {
    let g: Generator = "traceless:6".parse().unwrap();
    let params = CheckParams::with_p(1.5);
    let eval = |k: usize| {
        let inst = g.generate(11, k as u64);
        ["T1_BOUND", "FACTOR", "GK61", "T4_RATIO"].map(|id| {
            run_check(id, &inst, &params)
                .map(|r| (r.lhs.to_bits(), r.rhs.to_bits(), r.passed))
                .ok()
        })
    };
    assert_eq!(map_indexed(24, eval), map_indexed_serial(24, eval));
}
