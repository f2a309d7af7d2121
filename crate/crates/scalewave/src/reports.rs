//! JSON report documents. Their schemas live in `schemas/`.

use serde::{Deserialize, Serialize};

use scalewave_core::analysis::{DecayFit, LogCorrection};
use scalewave_core::odi::OdiProblem;
use scalewave_core::{CheckReport, ModelParams};

/// Output of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub params: Option<ModelParams>,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn new(
        suite: &str,
        seed: u64,
        params: Option<ModelParams>,
        checks: Vec<CheckReport>,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        VerifyReport {
            suite: suite.into(),
            seed,
            params,
            pass,
            checks,
        }
    }
}

/// Output of `odi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdiReport {
    pub problem: OdiProblem,
    pub nu: f64,
    /// `(ν₁, ν₂)`; the admissible range is `0 < ν < min(ν₁, ν₂)`.
    pub nu_bounds: (f64, f64),
    pub t0: f64,
    /// Blow-up time of the integrated `F`, if it blew up within the horizon.
    pub blowup_time: Option<f64>,
    pub comparison: CheckReport,
}

/// Output of `decay-fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub input: String,
    pub column: String,
    pub correction: LogCorrection,
    pub fit: DecayFit,
}
