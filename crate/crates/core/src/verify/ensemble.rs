use serde::{Deserialize, Serialize};

use super::checks::{check_spec, generator_fits, pichorides_constant, run_check, CheckParams};
use super::generators::Generator;
use super::result::{CheckKind, CheckResult};
use crate::error::{Error, Result};
use crate::par;

/// Outcome on one generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: u64,
    pub ratio: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<CheckResult>,
    /// Set when the check could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub check_id: String,
    pub generator: String,
    pub n_instances: usize,
    pub seed: u64,
    pub p: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
    /// Identity or inequality violations; ratio checks never fail.
    pub failures: usize,
    /// Instances on which the check raised an error.
    pub errors: usize,
    pub per_instance: Vec<InstanceRecord>,
}

impl EnsembleStats {
    /// Ratios of the evaluated instances, in index order.
    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_instance.iter().filter(|r| r.error.is_none()).map(|r| r.ratio)
    }
}

/// Run `check_id` over `n` instances drawn from `generator`.
///
/// Instance `k` is generated from `(seed, k)` alone, so the statistics do
/// not depend on whether the instances are evaluated in parallel.
pub fn run_ensemble(
    check_id: &str,
    generator: &Generator,
    n: usize,
    seed: u64,
    params: &CheckParams,
) -> Result<EnsembleStats> {
    let spec = check_spec(check_id)?;
    if n == 0 {
        return Err(Error::Precondition("ensemble size must be at least 1".into()));
    }
    if !generator_fits(check_id, generator)? {
        return Err(Error::InstanceMismatch {
            check: check_id.to_string(),
            instance: generator.instance_kind().to_string(),
        });
    }
    if !spec.window.contains(params.p) {
        return Err(Error::InvalidExponent(params.p));
    }
    let records = par::map_indexed(n, |k| {
        let index = k as u64;
        let instance = generator.generate(seed, index);
        let params = CheckParams { seed, ..params.clone() };
        match run_check(check_id, &instance, &params) {
            Ok(r) => InstanceRecord {
                index,
                ratio: r.ratio_value(),
                passed: r.passed,
                result: Some(r),
                error: None,
            },
            Err(e) => InstanceRecord {
                index,
                ratio: f64::NAN,
                passed: false,
                result: None,
                error: Some(e.to_string()),
            },
        }
    });
    Ok(summarize(check_id, spec.kind, generator, seed, params.p, records))
}

fn summarize(
    check_id: &str,
    kind: CheckKind,
    generator: &Generator,
    seed: u64,
    p: f64,
    records: Vec<InstanceRecord>,
) -> EnsembleStats {
    let evaluated: Vec<f64> = records.iter().filter(|r| r.error.is_none()).map(|r| r.ratio).collect();
    let ratio_max = evaluated.iter().copied().fold(f64::NAN, f64::max);
    let ratio_mean = if evaluated.is_empty() {
        f64::NAN
    } else {
        evaluated.iter().sum::<f64>() / evaluated.len() as f64
    };
    let failures = match kind {
        CheckKind::Ratio => 0,
        _ => records.iter().filter(|r| r.error.is_none() && !r.passed).count(),
    };
    EnsembleStats {
        check_id: check_id.to_string(),
        generator: generator.to_string(),
        n_instances: records.len(),
        seed,
        p,
        ratio_max,
        ratio_mean,
        failures,
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        per_instance: records,
    }
}

/// Empirical constant of a ratio check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub check_id: String,
    pub p: f64,
    pub estimate: f64,
    /// Known or conjectured optimal value for comparison, when there is one.
    pub reference: Option<f64>,
    pub n_instances: usize,
    pub errors: usize,
}

/// Largest ratio over the ensemble.
pub fn estimate_constant(
    check_id: &str,
    p: f64,
    generator: &Generator,
    n: usize,
    seed: u64,
) -> Result<ConstantEstimate> {
    let spec = check_spec(check_id)?;
    if spec.kind != CheckKind::Ratio {
        return Err(Error::Precondition(format!("{check_id} is not a ratio check")));
    }
    let stats = run_ensemble(check_id, generator, n, seed, &CheckParams::with_p(p))?;
    let reference = match check_id {
        "MATSAEV_G_RATIO" | "MATSAEV_RATIO" => Some(pichorides_constant(p)),
        "COS_INEQ" => Some(1.0),
        _ => None,
    };
    Ok(ConstantEstimate {
        check_id: check_id.to_string(),
        p,
        estimate: stats.ratio_max,
        reference,
        n_instances: stats.n_instances,
        errors: stats.errors,
    })
}
