use crate::error::{EXIT_CHECKS, EXIT_INVALID, EXIT_NUMERICAL, EXIT_PASS};
use crate::stage::Stage;
use kdv_scatter::scenario::Scenario;
use kdv_scatter::verify::Check;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCheck {
    pub stage: Stage,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

/// A stage that stopped with an error instead of producing checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
    pub numerical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_hash: String,
    pub pattern: String,
    pub scenario: Scenario,
    pub stages: Vec<Stage>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<StageCheck>,
    pub timing: Vec<StageTiming>,
    pub failure: Option<StageFailure>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.check.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &StageCheck> {
        self.checks.iter().filter(|c| !c.check.passed)
    }

    pub fn exit_code(&self) -> i32 {
        match &self.failure {
            Some(f) if f.numerical => EXIT_NUMERICAL,
            Some(_) => EXIT_INVALID,
            None if self.passed() => EXIT_PASS,
            None => EXIT_CHECKS,
        }
    }
}
