use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How `passed` is decided from the other fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `residual <= tolerance`
    Identity,
    /// `lhs - rhs <= tolerance·max(1, |rhs|)`
    Inequality,
    /// `lhs / rhs` reported; passes when finite.
    Ratio,
}

/// Outcome of one check on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub skipped_points: usize,
    pub diagnostics: BTreeMap<String, f64>,
}

impl CheckResult {
    pub fn identity(check_id: &str, lhs: f64, rhs: f64, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            check_id: check_id.to_string(),
            kind: CheckKind::Identity,
            lhs,
            rhs,
            residual,
            tolerance,
            passed: residual <= tolerance,
            skipped_points: 0,
            diagnostics: BTreeMap::new(),
        }
    }

    /// Identity with residual `|lhs - rhs| / max(1, |rhs|)`.
    pub fn relative_identity(check_id: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
        Self::identity(check_id, lhs, rhs, residual, tolerance)
    }

    pub fn inequality(check_id: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let residual = lhs - rhs;
        CheckResult {
            check_id: check_id.to_string(),
            kind: CheckKind::Inequality,
            lhs,
            rhs,
            residual,
            tolerance,
            passed: residual <= tolerance * rhs.abs().max(1.0),
            skipped_points: 0,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn ratio(check_id: &str, lhs: f64, rhs: f64) -> Self {
        let ratio = lhs / rhs;
        CheckResult {
            check_id: check_id.to_string(),
            kind: CheckKind::Ratio,
            lhs,
            rhs,
            residual: ratio,
            tolerance: f64::INFINITY,
            passed: ratio.is_finite(),
            skipped_points: 0,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    /// Record skipped grid points; more than 10% skipped fails the check.
    pub fn with_skipped(mut self, skipped: usize, total: usize) -> Self {
        self.skipped_points = skipped;
        if exceeds_skip_budget(skipped, total) {
            self.passed = false;
        }
        self
    }

    /// Force a failure, keeping the numbers for the report.
    pub fn fail(mut self, reason_key: &str) -> Self {
        self.passed = false;
        self.diagnostics.insert(reason_key.to_string(), 1.0);
        self
    }

    /// Ratio statistic for ensembles: `lhs/rhs` for ratio and inequality
    /// checks, the residual for identities.
    pub fn ratio_value(&self) -> f64 {
        match self.kind {
            CheckKind::Ratio | CheckKind::Identity => self.residual,
            CheckKind::Inequality => {
                if self.rhs != 0.0 {
                    self.lhs / self.rhs
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn exceeds_skip_budget(skipped: usize, total: usize) -> bool {
    total > 0 && skipped * 10 > total
}
