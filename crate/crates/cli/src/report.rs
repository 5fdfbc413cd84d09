//! The verification report and its timing sidecar.

use crate::error::{CliError, CliResult};
use crate::scenario::SCHEMA_VERSION;
use psg_core::fields::GridSpec;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub task: String,
    /// What was compared, e.g. a route pair or a power.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Library module that computed `measured`.
    pub module: String,
}

impl Check {
    pub fn at_most(name: &str, task: &str, module: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            task: task.into(),
            detail: None,
            measured,
            tolerance,
            comparison: Comparison::AtMost,
            pass: measured <= tolerance,
            module: module.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskFailure {
    pub task: String,
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub scenario: String,
    pub seed: u64,
    pub system: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub checks: Vec<Check>,
    /// Files written next to the report, relative to the output directory.
    pub artifacts: Vec<String>,
    pub errors: Vec<TaskFailure>,
    pub pass: bool,
}

impl Report {
    pub fn new(scenario: &str, seed: u64, system: String, grid: Option<GridSpec>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            scenario: scenario.into(),
            seed,
            system,
            grid,
            checks: Vec::new(),
            artifacts: Vec::new(),
            errors: Vec::new(),
            pass: true,
        }
    }

    pub fn finish(&mut self) {
        self.pass = self.errors.is_empty() && self.checks.iter().all(|c| c.pass);
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let detail = c.detail.as_deref().map(|d| format!(" [{d}]")).unwrap_or_default();
            out.push_str(&format!(
                "{} {}/{}{}: {:.3e} {op} {:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.task,
                c.name,
                detail,
                c.measured,
                c.tolerance
            ));
        }
        for e in &self.errors {
            out.push_str(&format!("ERROR {} (task {}): {}\n", e.task, e.index, e.message));
        }
        out.push_str(&format!("overall: {}\n", if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub tasks: Vec<TaskTiming>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskTiming {
    pub task: String,
    pub seconds: f64,
}

pub fn write_json(dir: &Path, file: &str, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    write_text(dir, file, &text)
}

pub fn write_text(dir: &Path, file: &str, text: &str) -> CliResult<()> {
    let path = dir.join(file);
    std::fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_every_check_and_no_errors() {
        let mut r = Report::new("s", 0, "laplacian:2".into(), None);
        r.finish();
        assert!(r.pass);
        r.checks.push(Check::at_most("semigroup", "semigroup_check", "generator", 2e-5, 1e-5));
        r.finish();
        assert!(!r.pass);
        assert!(r.summary().starts_with("FAIL semigroup_check/semigroup"));
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", "t", "m", f64::NAN, 1.0).pass);
    }
}
