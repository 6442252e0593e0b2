use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use carleman::dets::OperatorModel;
use carleman::entire::{analyze, CanonicalProduct, CartwrightReport, ZeroSet};
use carleman::numlin::{
    eigenvalues, hermitian_eigenvalues, hermitian_parts, schatten_from_singular, singular_values, ComplexMatrix,
};
use carleman::verify::{
    check_spec, default_generator, estimate_constant, generator_fits, plane_grid, run_check, run_ensemble, CheckKind,
    CheckParams, CheckResult, ConstantEstimate, EnsembleStats, Generator, GeneratorKind, Instance, PWindow, CHECKS,
};
use carleman::{Complex64, Error};
use serde::Serialize;

use crate::output::{fmt_f64, to_csv, to_json};
use crate::{Common, Format, Suite};

pub enum Outcome {
    Success,
    CheckFailure(Vec<String>),
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or arguments.
    Input(String),
    /// The numerics could not produce a value.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::NearSingular { .. } | Error::Singular | Error::DegenerateGrid(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub const DEFAULT_P: [f64; 3] = [1.25, 1.5, 1.75];
pub const DEFAULT_P_WIDE: [f64; 3] = [1.5, 2.5, 4.0];
const DEFAULT_N: usize = 50;

#[derive(Debug, Serialize)]
struct RunConfig {
    command: String,
    inputs: Vec<String>,
    seed: u64,
    n: Option<usize>,
    p_values: Option<Vec<f64>>,
    /// Overrides given with `--tol`.
    tolerance_overrides: BTreeMap<String, f64>,
    /// Effective tolerance of every check the run touched.
    tolerances: BTreeMap<String, f64>,
    format: Format,
    output: Option<String>,
    library_version: &'static str,
    parallel: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

impl RunConfig {
    fn new(common: &Common, command: &str, inputs: Vec<String>) -> Self {
        RunConfig {
            command: command.to_string(),
            inputs,
            seed: common.seed,
            n: common.n,
            p_values: common.p.as_ref().map(|p| p.0.clone()),
            tolerance_overrides: overrides(common).clone(),
            tolerances: BTreeMap::new(),
            format: common.format.unwrap_or(Format::Json),
            output: common.out.as_ref().map(|p| p.display().to_string()),
            library_version: carleman::VERSION,
            parallel: carleman::par::is_parallel(),
            timestamp: (!common.no_timestamp).then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }

    fn touch(&mut self, check_id: &str) -> CliResult<f64> {
        let tol = match self.tolerance_overrides.get(check_id) {
            Some(&t) => t,
            None => check_spec(check_id)?.tolerance,
        };
        self.tolerances.insert(check_id.to_string(), tol);
        Ok(tol)
    }
}

fn overrides(common: &Common) -> &BTreeMap<String, f64> {
    static EMPTY: BTreeMap<String, f64> = BTreeMap::new();
    common.tol.as_ref().map(|t| &t.0).unwrap_or(&EMPTY)
}

fn validate_overrides(common: &Common) -> CliResult<()> {
    for id in overrides(common).keys() {
        check_spec(id)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Report<T: Serialize> {
    config: RunConfig,
    #[serde(flatten)]
    body: T,
    results: Vec<CheckResult>,
    stats: Vec<EnsembleStats>,
}

fn emit<T: Serialize>(common: &Common, report: &Report<T>) -> CliResult<()> {
    let bytes = match common.format.unwrap_or(Format::Json) {
        Format::Json => to_json(report).map_err(|e| CliError::Numerical(e.to_string()))?,
        Format::Csv => {
            let value = serde_json::to_value(report).map_err(|e| CliError::Numerical(e.to_string()))?;
            to_csv(&value).map_err(|e| CliError::Input(e.to_string()))?
        }
    };
    write_bytes(common, &bytes)
}

fn write_bytes(common: &Common, bytes: &[u8]) -> CliResult<()> {
    match &common.out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn params(config: &mut RunConfig, check_id: &str, p: f64, seed: u64) -> CliResult<CheckParams> {
    Ok(CheckParams {
        p,
        tolerance: Some(config.touch(check_id)?),
        grid_points: None,
        seed,
    })
}

/// Failing identity and inequality results.
fn failures(results: &[CheckResult], stats: &[EnsembleStats]) -> Vec<String> {
    let mut ids: Vec<String> = results
        .iter()
        .filter(|r| r.kind != CheckKind::Ratio && !r.passed)
        .map(|r| r.check_id.clone())
        .chain(stats.iter().filter(|s| s.failures > 0).map(|s| s.check_id.clone()))
        .collect();
    ids.dedup();
    ids
}

fn outcome(ids: Vec<String>) -> Outcome {
    if ids.is_empty() {
        Outcome::Success
    } else {
        Outcome::CheckFailure(ids)
    }
}

#[derive(Debug, Serialize)]
struct ZeroSamples {
    /// `(r, log M(r))`
    log_max_modulus: Vec<[f64; 2]>,
    /// `(t, log|Π(t)|)`
    log_modulus_real: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct ZerosBody {
    zeros: ZeroSet,
    report: CartwrightReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<ZeroSamples>,
    /// Checks that were not applicable, with the reason.
    not_applicable: BTreeMap<String, String>,
}

pub fn analyze_zeros(common: &Common, path: &Path, samples: Option<usize>) -> CliResult<Outcome> {
    validate_overrides(common)?;
    let zs: ZeroSet = read_json(path)?;
    let mut config = RunConfig::new(common, "analyze-zeros", vec![path.display().to_string()]);
    let p_values = common
        .p
        .as_ref()
        .map(|p| p.0.clone())
        .unwrap_or_else(|| DEFAULT_P.to_vec());
    if let Some(&bad) = p_values.iter().find(|&&p| !(1.0..2.0).contains(&p)) {
        return Err(Error::InvalidExponent(bad).into());
    }
    let prod = CanonicalProduct::new(zs.clone());
    let report = analyze(&prod, &p_values)?;
    let mut results = Vec::new();
    let mut not_applicable = BTreeMap::new();
    let instance = Instance::Zeros(zs.clone());
    for id in ["T3_IDENTITY", "T3_HALF", "SHARP18", "JENSEN", "CARLEMAN"] {
        let ps = params(&mut config, id, 1.5, common.seed)?;
        match run_check(id, &instance, &ps) {
            Ok(r) => results.push(r),
            Err(e @ (Error::Precondition(_) | Error::NonRealZero(_))) => {
                not_applicable.insert(id.to_string(), e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let samples = samples.filter(|_| !zs.is_empty()).map(|count| {
        let hi = 8.0 * zs.max_modulus();
        let count = count.max(2);
        let lo = 0.01 * zs.min_modulus();
        ZeroSamples {
            log_max_modulus: (0..count)
                .map(|k| {
                    let r = lo * (hi / lo).powf(k as f64 / (count - 1) as f64);
                    [r, prod.max_modulus(r)]
                })
                .collect(),
            log_modulus_real: (0..count)
                .map(|k| {
                    let t = -hi + 2.0 * hi * k as f64 / (count - 1) as f64;
                    [t, prod.log_modulus_real(t)]
                })
                .collect(),
        }
    });
    let ids = failures(&results, &[]);
    emit(
        common,
        &Report {
            config,
            body: ZerosBody {
                zeros: zs,
                report,
                samples,
                not_applicable,
            },
            results,
            stats: Vec::new(),
        },
    )?;
    Ok(outcome(ids))
}

#[derive(Debug, Serialize)]
struct Norms {
    a: f64,
    g: f64,
    h: f64,
}

#[derive(Debug, Serialize)]
struct MatrixBody {
    dim: usize,
    trace: Complex64,
    eigenvalues: Vec<Complex64>,
    singular_values: Vec<f64>,
    eigenvalues_g: Vec<f64>,
    singular_values_h: Vec<f64>,
    schatten: BTreeMap<String, Norms>,
    carleman_a: CartwrightReport,
    carleman_g: CartwrightReport,
    /// `max |log|D(z)||` over the plane grid; zero exactly when `H = 0`.
    ratio_determinant_max_log: f64,
    hermitian: bool,
    not_applicable: BTreeMap<String, String>,
}

pub fn analyze_matrix(common: &Common, path: &Path) -> CliResult<Outcome> {
    validate_overrides(common)?;
    let a: ComplexMatrix = read_json(path)?;
    let mut config = RunConfig::new(common, "analyze-matrix", vec![path.display().to_string()]);
    let p_values = common
        .p
        .as_ref()
        .map(|p| p.0.clone())
        .unwrap_or_else(|| DEFAULT_P.to_vec());
    let (g, h) = hermitian_parts(&a)?;
    let eig = eigenvalues(&a)?;
    let s_a = singular_values(&a)?;
    let s_g = singular_values(&g)?;
    let s_h = singular_values(&h)?;
    let mut schatten = BTreeMap::new();
    for &p in std::iter::once(&1.0).chain(&p_values).chain(std::iter::once(&2.0)) {
        schatten.insert(
            format!("{p}"),
            Norms {
                a: schatten_from_singular(&s_a, p)?,
                g: schatten_from_singular(&s_g, p)?,
                h: schatten_from_singular(&s_h, p)?,
            },
        );
    }
    let eig_g = hermitian_eigenvalues(&g)?;
    let c_a = CanonicalProduct::new(ZeroSet::from_eigenvalues(&eig, 1e-13));
    let c_g = CanonicalProduct::new(ZeroSet::from_eigenvalues(
        &eig_g.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
        1e-13,
    ));
    let alpha_ps: Vec<f64> = p_values.iter().copied().filter(|p| (1.0..2.0).contains(p)).collect();
    let carleman_a = analyze(&c_a, &alpha_ps)?;
    let carleman_g = analyze(&c_g, &alpha_ps)?;
    let hermitian = h.max_abs() == 0.0;
    let model = OperatorModel::new(&a)?;
    let mut d_max: f64 = 0.0;
    for z in plane_grid(40) {
        if model.is_regular(z) {
            d_max = d_max.max(model.ratio_determinant(z)?.log_modulus.abs());
        }
    }

    let instance = Instance::Matrix(a.clone());
    let mut results = Vec::new();
    let mut not_applicable = BTreeMap::new();
    let ids = [
        "T1_BOUND",
        "T1_EQUALITY",
        "T2_QN",
        "P2_CASE",
        "SAKH_EQ",
        "T4_RATIO",
        "T8_RATIO",
        "GK61",
        "FACTOR",
    ];
    for id in ids {
        let spec = check_spec(id)?;
        let ps: Vec<f64> = if spec.window == PWindow::Unused {
            vec![1.5]
        } else {
            p_values.iter().copied().filter(|&p| spec.window.contains(p)).collect()
        };
        for p in ps {
            let params = params(&mut config, id, p, common.seed)?;
            match run_check(id, &instance, &params) {
                Ok(r) => results.push(r),
                Err(e @ Error::Precondition(_)) => {
                    not_applicable.insert(id.to_string(), e.to_string());
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let failing = failures(&results, &[]);
    emit(
        common,
        &Report {
            config,
            body: MatrixBody {
                dim: a.dim(),
                trace: a.trace(),
                eigenvalues: eig,
                singular_values: s_a,
                eigenvalues_g: eig_g,
                singular_values_h: s_h,
                schatten,
                carleman_a,
                carleman_g,
                ratio_determinant_max_log: d_max,
                hermitian,
                not_applicable,
            },
            results,
            stats: Vec::new(),
        },
    )?;
    Ok(outcome(failing))
}

/// Exponents to run `check_id` at: the requested ones inside its window, or
/// the default grid.
fn p_grid(common: &Common, check_id: &str) -> CliResult<Vec<f64>> {
    let spec = check_spec(check_id)?;
    if spec.window == PWindow::Unused {
        return Ok(vec![1.5]);
    }
    let requested = match &common.p {
        Some(p) => p.0.clone(),
        None if check_id == "T7_RATIO" => DEFAULT_P_WIDE.to_vec(),
        None => DEFAULT_P.to_vec(),
    };
    Ok(requested.into_iter().filter(|&p| spec.window.contains(p)).collect())
}

fn in_suite(kind: CheckKind, suite: Suite) -> bool {
    match suite {
        Suite::All => true,
        Suite::Identities => kind == CheckKind::Identity,
        Suite::Inequalities => kind == CheckKind::Inequality,
    }
}

#[derive(Debug, Serialize)]
struct VerifyBody {
    suite: Suite,
    failing: Vec<String>,
}

pub fn verify(common: &Common, suite: Suite, inject: Option<&str>) -> CliResult<Outcome> {
    validate_overrides(common)?;
    if let Some(id) = inject {
        check_spec(id)?;
    }
    let mut config = RunConfig::new(common, "verify", Vec::new());
    let n = common.n.unwrap_or(DEFAULT_N);
    let mut stats = Vec::new();
    for spec in CHECKS.iter().filter(|c| in_suite(c.kind, suite)) {
        let generator = default_generator(spec.id)?;
        let count = if generator.kind == GeneratorKind::None { 1 } else { n };
        for p in p_grid(common, spec.id)? {
            let mut ps = params(&mut config, spec.id, p, common.seed)?;
            if inject == Some(spec.id) {
                ps.tolerance = Some(-1.0);
            }
            let mut s = run_ensemble(spec.id, &generator, count, common.seed, &ps)?;
            if inject == Some(spec.id) {
                s.failures = s.failures.max(1);
            }
            stats.push(s);
        }
    }
    let failing = failures(&[], &stats);
    emit(
        common,
        &Report {
            config,
            body: VerifyBody {
                suite,
                failing: failing.clone(),
            },
            results: Vec::new(),
            stats,
        },
    )?;
    Ok(outcome(failing))
}

#[derive(Debug, Serialize)]
struct EnsembleBody {}

fn resolve_generator(check_id: &str, name: Option<&str>) -> CliResult<Generator> {
    let generator = match name {
        Some(g) => g.parse()?,
        None => default_generator(check_id)?,
    };
    if !generator_fits(check_id, &generator)? {
        return Err(Error::InstanceMismatch {
            check: check_id.to_string(),
            instance: generator.instance_kind().to_string(),
        }
        .into());
    }
    Ok(generator)
}

pub fn ensemble(common: &Common, check_id: &str, generator: Option<&str>, summary_only: bool) -> CliResult<Outcome> {
    validate_overrides(common)?;
    let generator = resolve_generator(check_id, generator)?;
    let mut config = RunConfig::new(common, "ensemble", Vec::new());
    let spec = check_spec(check_id)?;
    let ps = match &common.p {
        Some(p) if spec.window != PWindow::Unused => {
            if let Some(&bad) = p.0.iter().find(|&&x| !spec.window.contains(x)) {
                return Err(Error::InvalidExponent(bad).into());
            }
            p.0.clone()
        }
        _ => p_grid(common, check_id)?,
    };
    let n = common.n.unwrap_or(DEFAULT_N);
    let mut stats = Vec::new();
    for p in ps {
        let params = params(&mut config, check_id, p, common.seed)?;
        let mut s = run_ensemble(check_id, &generator, n, common.seed, &params)?;
        if summary_only {
            s.per_instance.clear();
        }
        stats.push(s);
    }
    let failing = failures(&[], &stats);
    emit(
        common,
        &Report {
            config,
            body: EnsembleBody {},
            results: Vec::new(),
            stats,
        },
    )?;
    Ok(outcome(failing))
}

#[derive(Debug, Serialize)]
struct ConstantsBody {
    constants: Vec<ConstantEstimate>,
}

pub fn constants(common: &Common, checks: &str, generator: Option<&str>) -> CliResult<Outcome> {
    validate_overrides(common)?;
    let ids: Vec<&str> = checks.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let p_values = common
        .p
        .as_ref()
        .map(|p| p.0.clone())
        .unwrap_or_else(|| DEFAULT_P.to_vec());
    let n = common.n.unwrap_or(DEFAULT_N);
    let mut estimates = Vec::new();
    for id in &ids {
        let spec = check_spec(id)?;
        if spec.kind != CheckKind::Ratio {
            return Err(CliError::Input(format!("{id} is not a ratio check")));
        }
        let generator = resolve_generator(id, generator)?;
        let count = if generator.kind == GeneratorKind::None { 1 } else { n };
        for &p in &p_values {
            if !spec.window.contains(p) {
                return Err(Error::InvalidExponent(p).into());
            }
            estimates.push(estimate_constant(id, p, &generator, count, common.seed)?);
        }
    }
    estimates.sort_by(|a, b| a.p.total_cmp(&b.p).then_with(|| a.check_id.cmp(&b.check_id)));
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Input(e.to_string());
            w.write_record(["p", "check_id", "ratio_max", "reference"])
                .map_err(io)?;
            for e in &estimates {
                w.write_record([
                    fmt_f64(e.p),
                    e.check_id.clone(),
                    fmt_f64(e.estimate),
                    e.reference.map(fmt_f64).unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
            write_bytes(common, &bytes)?;
        }
        Format::Json => {
            let config = RunConfig::new(common, "constants", Vec::new());
            emit(
                common,
                &Report {
                    config,
                    body: ConstantsBody { constants: estimates },
                    results: Vec::new(),
                    stats: Vec::new(),
                },
            )?;
        }
    }
    Ok(Outcome::Success)
}
