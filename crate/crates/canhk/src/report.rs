//! Structured verification output shared by the test suites and the CLI.
//!
//! Reports are plain serde structs serialized as JSON; field order is the
//! declaration order, so identical runs produce identical bytes.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_ratios: Option<Vec<f64>>,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn scalar(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            residuals: vec![residual],
            steps: None,
            convergence_ratios: None,
            threshold,
            pass: residual < threshold,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Default thresholds; operator identities are tight, extrapolated field
/// residuals looser.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub operator_identity: f64,
    pub quaternion_algebra: f64,
    pub normalization: f64,
    pub extrapolated_field: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            operator_identity: 1e-10,
            quaternion_algebra: 1e-12,
            normalization: 1e-10,
            extrapolated_field: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub title: String,
    pub model: String,
    pub seed: u64,
    pub truncation_order: usize,
    pub thresholds: Thresholds,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionEvidence>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>, model: impl Into<String>, seed: u64, order: usize) -> Self {
        VerificationReport {
            title: title.into(),
            model: model.into(),
            seed,
            truncation_order: order,
            thresholds: Thresholds::default(),
            checks: Vec::new(),
            selection: None,
            pass: true,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Outcome of the empirical variant selection.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionEvidence {
    pub candidates: Vec<CandidateEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner_variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner_slot: Option<String>,
    pub unique: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateEvidence {
    pub variant: String,
    pub slot: String,
    pub normalization_max: f64,
    pub nijenhuis_orders: Vec<f64>,
    pub nijenhuis_extrapolated: Vec<f64>,
    pub singular_points: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reject_reason: Option<String>,
}
