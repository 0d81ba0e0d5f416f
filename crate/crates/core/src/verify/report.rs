use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// How an empirical statistic is compared with its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|empirical / target − 1| ≤ tolerance`.
    Relative,
    /// `|empirical − target| ≤ tolerance`.
    Absolute,
    /// `empirical ≤ target + tolerance`.
    AtMost,
    /// `empirical ≥ target − tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Statistic {
    pub name: String,
    pub empirical: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Statistic {
    pub fn new(name: impl Into<String>, empirical: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = empirical.is_finite()
            && match comparison {
                Comparison::Relative => (empirical / target - 1.0).abs() <= tolerance,
                Comparison::Absolute => (empirical - target).abs() <= tolerance,
                Comparison::AtMost => empirical <= target + tolerance,
                Comparison::AtLeast => empirical >= target - tolerance,
            };
        Self {
            name: name.into(),
            empirical,
            target,
            tolerance,
            comparison,
            pass,
        }
    }
}

/// Outcome of one named check. Statistics are only ever appended, and the
/// check passes exactly when every statistic does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub statistics: Vec<Statistic>,
    pub trials: usize,
    pub wall_time_s: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, trials: usize) -> Self {
        Self {
            check: check.into(),
            parameters: BTreeMap::new(),
            statistics: Vec::new(),
            trials,
            wall_time_s: 0.0,
            pass: true,
            note: None,
            started: Some(Instant::now()),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, stat: Statistic) {
        self.pass &= stat.pass;
        self.statistics.push(stat);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub(crate) fn finish(mut self) -> Self {
        if let Some(t) = self.started.take() {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        self
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let failing: Vec<String> = self
            .statistics
            .iter()
            .filter(|s| !s.pass)
            .map(|s| format!("{}={} (target {}, tol {})", s.name, s.empirical, s.target, s.tolerance))
            .collect();
        format!(
            "{} {} [{}] {:.2}s{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            params.join(", "),
            self.wall_time_s,
            if failing.is_empty() {
                String::new()
            } else {
                format!(" :: {}", failing.join("; "))
            }
        )
    }
}
