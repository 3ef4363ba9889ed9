use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One verified quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Non-finite residuals are written as `null` and never pass.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Machine-readable output of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub values: Value,
    /// The only field that varies between identical runs.
    pub wall_time_ms: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// Pretty JSON with `wall_time_ms` zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        r.to_json()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Collects checks, applying the global `--tol` override to every
/// threshold when one was given.
#[derive(Clone, Debug, Default)]
pub struct Checks {
    tol: Option<f64>,
    items: Vec<Check>,
}

impl Checks {
    pub fn new(tol: Option<f64>) -> Self {
        Self { tol, items: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, default_threshold: f64) {
        let threshold = self.tol.unwrap_or(default_threshold);
        let pass = residual <= threshold;
        self.items.push(Check {
            name: name.into(),
            residual: residual.is_finite().then_some(residual),
            threshold,
            pass,
        });
    }

    /// Records an evaluation failure as a failed check.
    pub fn push_result(&mut self, name: impl Into<String>, residual: qslice_core::Result<f64>, default_threshold: f64) {
        self.push(name, residual.unwrap_or(f64::INFINITY), default_threshold);
    }

    /// Appends an already evaluated check unchanged.
    pub fn push_check(&mut self, c: Check) {
        self.items.push(c);
    }

    pub fn tol(&self) -> Option<f64> {
        self.tol
    }

    pub fn into_vec(self) -> Vec<Check> {
        self.items
    }
}

pub fn summarize(checks: &[Check]) -> Summary {
    let passed = checks.iter().filter(|c| c.pass).count();
    Summary {
        total: checks.len(),
        passed,
        failed: checks.len() - passed,
    }
}
