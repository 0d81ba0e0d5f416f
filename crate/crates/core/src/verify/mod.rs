//! Statistical verification: every testable property of the process, the
//! mechanism and the simulator as a named check with an explicit tolerance.

mod checks;
mod report;
pub mod stats;

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

pub use checks::{preset_groups, Verifier, ALPHA, MARGINAL_DOMAIN};
pub use report::{Comparison, Statistic, VerificationReport};
pub use stats::{ks_critical, ks_statistic};

use crate::error::{Error, Result};

/// Seed used by CI and the shipped suites.
pub const SHIPPED_SEED: u64 = 20_170_301;
/// Second seed for independent confirmation.
pub const CONFIRMATION_SEED: u64 = 1_234_567;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Default,
    Full,
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(SuiteKind::Default),
            "full" => Ok(SuiteKind::Full),
            other => Err(Error::param(format!("unknown suite {other:?} (expected default|full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub seed: u64,
    pub jump_bias: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub checks: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Budget {
    moments: usize,
    counts: usize,
    increments: usize,
    complexity: usize,
    magnitude_traces: usize,
    coalition: usize,
}

impl SuiteKind {
    fn budget(self) -> Budget {
        match self {
            SuiteKind::Default => Budget {
                moments: 100_000,
                counts: 100_000,
                increments: 100_000,
                complexity: 20_000,
                magnitude_traces: 20_000,
                coalition: 20_000,
            },
            SuiteKind::Full => Budget {
                moments: 1_000_000,
                counts: 100_000,
                increments: 1_000_000,
                complexity: 100_000,
                magnitude_traces: 20_000,
                coalition: 100_000,
            },
        }
    }
}

/// Runs every check, calling `progress` after each one.
pub fn run_suite(kind: SuiteKind, verifier: &Verifier, mut progress: impl FnMut(&VerificationReport)) -> Result<SuiteReport> {
    let start = Instant::now();
    let b = kind.budget();
    let mut checks = Vec::new();
    let mut record = |r: VerificationReport| {
        progress(&r);
        checks.push(r);
    };
    for (n, eps) in [(1, 1.0), (2, 2.0), (20, 1.0)] {
        record(verifier.check_variance_law(n, eps, b.moments)?);
    }
    for (n, e1, e2) in [(1, 1.0, 2.0), (20, 1.0, 2.0), (2, 0.5, 15.0)] {
        record(verifier.check_jump_poisson(n, e1, e2, b.counts)?);
    }
    for (n, e1, e2) in [(1, 1.0, 1.2), (1, 1.0, std::f64::consts::E), (1, 1.0, 1.0)] {
        record(verifier.check_no_jump(n, e1, e2, b.counts)?);
    }
    for n in [1, 2] {
        for eps in [0.5, 2.0, 15.0] {
            record(verifier.check_marginal(n, eps, b.counts)?);
        }
    }
    for (n, e1, e2) in [(1, 0.5, 15.0), (2, 1.0, 2.0)] {
        record(verifier.check_increment_independence(n, e1, e2, b.increments)?);
    }
    record(verifier.check_jump_magnitude_n1(b.magnitude_traces, 100_000)?);
    for (e1, e2) in [(1.0, 1.0), (1.0, 1.2), (1.0, 1.35)] {
        record(verifier.check_privacy_ratio_1d(e1, e2)?);
    }
    for n in [1, 2, 20] {
        record(verifier.check_complexity_scaling(n, &[2.0, 4.0, 8.0, 16.0], b.complexity)?);
    }
    record(verifier.check_resistance(20)?);
    record(verifier.check_gossip()?);
    record(verifier.check_coalition(b.coalition)?);
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        suite: kind,
        seed: verifier.seed(),
        jump_bias: verifier.jump_bias(),
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
        checks,
    })
}
