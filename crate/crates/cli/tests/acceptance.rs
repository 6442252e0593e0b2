//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when a criterion fails for a reason not recorded in `KNOWN`.

use std::process::Command;
use std::time::{Duration, Instant};

use carleman::entire::ZeroSet;
use carleman::quad::Integrator;
use carleman::verify::{run_check, run_ensemble, CheckParams, EnsembleStats, Generator, Instance};
use carleman::Complex64;

const SEED: u64 = 7;

/// Criteria whose failure is understood: the stated constant of the
/// cosine-sum bound is too small by a factor 2π, and the bound holds with
/// `p·sin(πp/2)` on every instance. The suite still reports FAIL for them,
/// and verifies the corrected bound instead of skipping the check.
const KNOWN: &[usize] = &[6];

struct Criterion {
    id: usize,
    passed: bool,
    detail: String,
    /// Explains an expected failure; must itself hold for the run to succeed.
    known_cause: Option<bool>,
}

fn ensemble(check: &str, generator: &str, n: usize, p: f64) -> EnsembleStats {
    let generator: Generator = generator.parse().expect("generator spec");
    run_ensemble(check, &generator, n, SEED, &CheckParams::with_p(p)).expect("ensemble runs")
}

fn clean(s: &EnsembleStats) -> bool {
    s.failures == 0 && s.errors == 0
}

fn summary(s: &EnsembleStats) -> String {
    format!(
        "{}@p={} n={} failures={} errors={} worst={:.3e}",
        s.check_id, s.p, s.n_instances, s.failures, s.errors, s.ratio_max
    )
}

fn criterion_1() -> Criterion {
    let start = Instant::now();
    let s = ensemble("FACTOR", "traceless:6", 200, 1.5);
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    Criterion {
        id: 1,
        passed: clean(&s) && s.ratio_max < 1e-8 && fast,
        detail: format!("factorizations, {} in {:.1}s", summary(&s), elapsed.as_secs_f64()),
        known_cause: None,
    }
}

fn criterion_2() -> Criterion {
    let identity = ensemble("T3_IDENTITY", "cartwright:1-40", 100, 1.5);
    let half = ensemble("T3_HALF", "cartwright:1-40", 100, 1.5);
    let zeros = ZeroSet::new(&[Complex64::new(0.0, 1.0)]).unwrap();
    let single = run_check("T3_IDENTITY", &Instance::Zeros(zeros), &CheckParams::default()).unwrap();
    let curated = (single.lhs - 2.0).abs() < 2e-3 && (single.rhs - 2.0).abs() < 2e-3;
    Criterion {
        id: 2,
        passed: clean(&identity) && clean(&half) && curated,
        detail: format!(
            "type identities, {}; {}; zeros {{i}}: lhs={:.6} rhs={:.6}",
            summary(&identity),
            summary(&half),
            single.lhs,
            single.rhs
        ),
        known_cause: None,
    }
}

fn criterion_3() -> Criterion {
    let f = |t: f64| {
        let x = t * t;
        let log = if t < 1.0 { (-x).ln_1p() } else { (x - 1.0).ln() };
        log / x
    };
    let integ = Integrator::with_tol(1e-13, 0.0);
    let body = integ.integrate(f, 0.0, 2.0, &[1.0]);
    let tail = integ.integrate_tail(f, 2.0, 2.0);
    let integral = body.value + tail.value;
    let integral_ok = body.converged && tail.converged && integral.abs() < 1e-7;

    let kernels: Vec<EnsembleStats> = [1.25, 1.5, 1.75].map(|p| ensemble("KERNEL_FORM", "none", 1, p)).into();
    let kernels_ok = kernels.iter().all(|s| clean(s) && s.ratio_max < 1e-6);
    let worst_kernel = kernels.iter().map(|s| s.ratio_max).fold(0.0, f64::max);

    let tail_identity = ensemble("TAIL_IDENTITY", "traceless:6", 50, 1.5);
    let tail_ok = clean(&tail_identity) && tail_identity.ratio_max < 1e-5;
    Criterion {
        id: 3,
        passed: integral_ok && kernels_ok && tail_ok,
        detail: format!(
            "explicit integrals, log|1-t^2|/t^2 integral={integral:.2e}; kernel worst rel={worst_kernel:.2e}; {}",
            summary(&tail_identity)
        ),
        known_cause: None,
    }
}

fn criterion_4() -> Criterion {
    let sakh = ensemble("SAKH_EQ", "nilpotent:2-16", 200, 1.5);
    let p2 = ensemble("P2_CASE", "nilpotent:2-16", 200, 1.5);
    let norm_ok = p2.per_instance.iter().all(|r| {
        r.result
            .as_ref()
            .is_some_and(|c| c.diagnostics["norm2_a"] <= 2.0 * c.diagnostics["norm2_h"] * (1.0 + 1e-12))
    });
    Criterion {
        id: 4,
        passed: clean(&sakh) && clean(&p2) && norm_ok,
        detail: format!(
            "Hilbert-Schmidt case, {}; {}; ||A||_2 <= 2||H||_2: {norm_ok}",
            summary(&sakh),
            summary(&p2)
        ),
        known_cause: None,
    }
}

fn criterion_5() -> Criterion {
    let bound = ensemble("LIVSIC", "dissipative:4", 200, 1.5);
    let slope = ensemble("LIVSIC_SLOPE", "traceless:6", 200, 1.5);
    let scalar = ensemble("LIVSIC_SCALAR", "none", 1, 1.5);
    let samples = scalar.per_instance[0]
        .result
        .as_ref()
        .map_or(0.0, |r| r.diagnostics["samples"]);
    Criterion {
        id: 5,
        passed: clean(&bound) && clean(&slope) && clean(&scalar) && samples >= 1e4,
        detail: format!(
            "dissipative bounds, {}; {}; scalar max={:.6} over {samples} samples",
            summary(&bound),
            summary(&slope),
            scalar.ratio_max
        ),
        known_cause: None,
    }
}

fn criterion_6() -> Criterion {
    let mut runs = vec![
        ensemble("T1_BOUND", "traceless:6", 200, 1.5),
        ensemble("T2_QN", "nilpotent:6", 200, 1.5),
        ensemble("WEYL", "traceless:6", 200, 1.5),
        ensemble("D_BOUND", "traceless:6", 200, 1.5),
        ensemble("JENSEN", "cartwright:1-40", 200, 1.5),
        ensemble("SHARP18", "cartwright:1-40", 200, 1.5),
    ];
    for p in [1.25, 1.5, 1.75] {
        runs.push(ensemble("GK61", "traceless:6", 200, p));
    }
    let claims: Vec<EnsembleStats> = [1.25, 1.5, 1.75]
        .map(|p| ensemble("CLAIM33", "cartwright:1-40", 200, p))
        .into();
    let others_ok = runs.iter().all(clean);
    let claims_ok = claims.iter().all(clean);
    let derived_ok = claims.iter().all(|s| {
        s.errors == 0
            && s.per_instance.iter().all(|r| {
                r.result
                    .as_ref()
                    .is_some_and(|c| c.diagnostics["passes_derived_constant"] == 1.0)
            })
    });
    let mut detail = String::from("constant-free inequalities");
    for s in runs.iter().chain(&claims) {
        if !clean(s) {
            detail.push_str(&format!("; {}", summary(s)));
        }
    }
    if others_ok {
        detail.push_str("; all but CLAIM33 clean");
    }
    if !claims_ok {
        detail.push_str(&format!(
            "; with constant p*sin(pi*p/2) in place of p*sin(pi*p/2)/(2pi) CLAIM33 has zero violations: {derived_ok}"
        ));
    }
    Criterion {
        id: 6,
        passed: others_ok && claims_ok,
        detail,
        known_cause: (!claims_ok).then_some(others_ok && derived_ok),
    }
}

fn criterion_7() -> Criterion {
    let runs: Vec<EnsembleStats> = [1.25, 1.5, 1.75]
        .into_iter()
        .flat_map(|p| {
            [
                ensemble("FUBINI316", "hermitian-traceless:6", 50, p),
                ensemble("NORM_SPLIT", "hermitian-traceless:6", 50, p),
            ]
        })
        .collect();
    let worst = runs.iter().map(|s| s.ratio_max).fold(0.0, f64::max);
    Criterion {
        id: 7,
        passed: runs.iter().all(|s| clean(s) && s.ratio_max < 1e-4),
        detail: format!("real-spectrum identities, 6 ensembles of 50, worst rel={worst:.2e}"),
        known_cause: None,
    }
}

fn criterion_8() -> Criterion {
    let green = ensemble("GREEN", "none", 1, 1.5);
    let kernels = ensemble("KERNELS", "none", 1, 1.5);
    let carleman = ensemble("CARLEMAN", "cartwright:1-40", 20, 1.5);
    Criterion {
        id: 8,
        passed: clean(&green) && green.ratio_max < 1e-6 && clean(&kernels) && clean(&carleman),
        detail: format!(
            "half-disc representations, GREEN worst={:.2e}; {}; {}",
            green.ratio_max,
            summary(&kernels),
            summary(&carleman)
        ),
        known_cause: None,
    }
}

fn criterion_9() -> Criterion {
    let cases = [
        ("KREIN_WEAKTYPE", "nilpotent:6"),
        ("MATSAEV_RATIO", "nilpotent:6"),
        ("T4_RATIO", "traceless:6"),
        ("T5_RATIO", "cartwright:1-40"),
        ("T7_RATIO", "rotational:1-3"),
        ("T8_RATIO", "traceless:6"),
    ];
    let mut passed = true;
    let mut detail = String::from("ratio stability");
    for (check, generator) in cases {
        let large = ensemble(check, generator, 400, 1.5);
        // instance k depends only on (seed, k): the first 200 are the n=200 ensemble
        let small_max = large.per_instance[..200]
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| r.ratio)
            .fold(f64::NAN, f64::max);
        let rerun = ensemble(check, generator, 20, 1.5);
        let deterministic = rerun
            .per_instance
            .iter()
            .zip(&large.per_instance)
            .all(|(a, b)| a.ratio.to_bits() == b.ratio.to_bits() && a.error == b.error);
        let shift = (large.ratio_max - small_max).abs() / small_max;
        let ok = large.ratio_max.is_finite() && deterministic && shift < 0.2;
        passed &= ok;
        detail.push_str(&format!(
            "; {check} max200={small_max:.4} max400={:.4} shift={shift:.3} errors={}",
            large.ratio_max, large.errors
        ));
    }
    Criterion {
        id: 9,
        passed,
        detail,
        known_cause: None,
    }
}

fn criterion_10() -> Criterion {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_carleman"))
            .args(["verify", "--suite", "all", "--seed", "7", "--no-timestamp"])
            .output()
            .expect("binary runs");
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let identical = !a.stdout.is_empty() && a.stdout == b.stdout;
    let slowest = ta.max(tb);
    Criterion {
        id: 10,
        passed: identical && slowest < Duration::from_secs(600),
        detail: format!(
            "determinism, identical={identical} bytes={} slowest run {:.1}s",
            a.stdout.len(),
            slowest.as_secs_f64()
        ),
        known_cause: None,
    }
}

fn main() {
    let criteria: [fn() -> Criterion; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut unexpected = Vec::new();
    for run in criteria {
        let c = run();
        println!(
            "{} criterion {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.detail
        );
        let explained = KNOWN.contains(&c.id) && c.known_cause == Some(true);
        if !c.passed && !explained {
            unexpected.push(c.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
