//! Structured verification reports.
//!
//! Every sweep and fixture suite funnels its outcome through
//! [`VerificationReport`] so the CLI can emit one stable, machine-diffable
//! JSON schema.  Verdicts are pure functions of `(value, threshold)`;
//! nothing in here consults the clock except the externally assigned
//! `timing_ms` field, which consumers must ignore when comparing runs.

use serde::Serialize;

/// What a check's `value` measures and which direction passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `value` must stay at or below `threshold`.
    Residual,
    /// `value` must stay at or above `threshold`.
    Slack,
    /// Reported for context; never fails.
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub residual: f64,
    pub slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: crate::tol::RESIDUAL,
            slack: crate::tol::SLACK,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Tool name and version, e.g. `statgeo 0.1.0`.
    pub tool: String,
    /// The logical command this report answers (CLI subcommand or suite name).
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    /// True iff no check failed.  Info rows never count.
    pub passed: bool,
    /// Wall-clock milliseconds; excluded from the determinism contract.
    pub timing_ms: u128,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>, seed: u64, tolerances: Tolerances) -> Self {
        VerificationReport {
            tool: format!("statgeo {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            seed,
            tolerances,
            checks: Vec::new(),
            passed: true,
            timing_ms: 0,
        }
    }

    fn push(&mut self, check: Check) {
        if check.verdict == Verdict::Fail {
            self.passed = false;
        }
        self.checks.push(check);
    }

    /// A residual check: passes iff `value ≤ threshold` and `value` is finite.
    pub fn residual(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> &mut Self {
        let verdict = if value.is_finite() && value <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.push(Check {
            name: name.into(),
            kind: CheckKind::Residual,
            value,
            threshold: Some(threshold),
            samples: None,
            verdict,
            detail: None,
        });
        self
    }

    /// A slack check: passes iff `value ≥ threshold` and `value` is finite.
    pub fn slack(&mut self, name: impl Into<String>, value: f64, threshold: f64) -> &mut Self {
        let verdict = if value.is_finite() && value >= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.push(Check {
            name: name.into(),
            kind: CheckKind::Slack,
            value,
            threshold: Some(threshold),
            samples: None,
            verdict,
            detail: None,
        });
        self
    }

    /// A context row that never affects the overall verdict.
    pub fn value(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.push(Check {
            name: name.into(),
            kind: CheckKind::Value,
            value,
            threshold: None,
            samples: None,
            verdict: Verdict::Info,
            detail: None,
        });
        self
    }

    /// An explicit failure row (e.g. a precondition that could not be met).
    pub fn failure(&mut self, name: impl Into<String>, detail: impl Into<String>) -> &mut Self {
        self.push(Check {
            name: name.into(),
            kind: CheckKind::Value,
            value: f64::NAN,
            threshold: None,
            samples: None,
            verdict: Verdict::Fail,
            detail: Some(detail.into()),
        });
        self
    }

    /// Attach a sample count to the most recently pushed check.
    pub fn with_samples(&mut self, samples: u64) -> &mut Self {
        if let Some(last) = self.checks.last_mut() {
            last.samples = Some(samples);
        }
        self
    }

    /// Attach a free-form detail string to the most recently pushed check.
    pub fn with_detail(&mut self, detail: impl Into<String>) -> &mut Self {
        if let Some(last) = self.checks.last_mut() {
            last.detail = Some(detail.into());
        }
        self
    }

    /// Merge another report's checks (used by multi-suite commands).
    pub fn absorb(&mut self, other: VerificationReport) {
        for check in other.checks {
            self.push(check);
        }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serialization cannot fail")
        } else {
            serde_json::to_string(self).expect("report serialization cannot fail")
        }
    }

    /// Fixed-width table for terminal consumption.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} — {}\n", self.tool, self.command));
        out.push_str(&format!(
            "seed {}   tol residual {:.1e}   tol slack {:.1e}\n",
            self.seed, self.tolerances.residual, self.tolerances.slack
        ));
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        out.push_str(&format!(
            "{:<width$}  {:>13}  {:>13}  {:>8}  verdict\n",
            "name", "value", "threshold", "samples"
        ));
        for c in &self.checks {
            let threshold = c
                .threshold
                .map(|t| format!("{t:.6e}"))
                .unwrap_or_else(|| "-".into());
            let samples = c
                .samples
                .map(|s| s.to_string())
                .unwrap_or_else(|| "-".into());
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Info => "info",
            };
            out.push_str(&format!(
                "{:<width$}  {:>13.6e}  {:>13}  {:>8}  {}",
                c.name, c.value, threshold, samples, verdict
            ));
            if let Some(d) = &c.detail {
                out.push_str(&format!("  ({d})"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed { "PASSED\n" } else { "FAILED\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_directions() {
        let mut r = VerificationReport::new("unit", 0, Tolerances::default());
        r.residual("small", 1e-12, 1e-8);
        r.slack("positive", 0.5, -1e-9);
        r.value("context", 42.0);
        assert!(r.passed);
        r.residual("too_big", 1.0, 1e-8);
        assert!(!r.passed);
        assert_eq!(r.checks[3].verdict, Verdict::Fail);
    }

    #[test]
    fn json_is_stable_between_identical_runs() {
        let build = || {
            let mut r = VerificationReport::new("unit", 7, Tolerances::default());
            r.slack("min_slack", 1.25e-3, 0.0).with_samples(1000);
            r.to_json(false)
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn non_finite_values_fail() {
        let mut r = VerificationReport::new("unit", 0, Tolerances::default());
        r.residual("nan", f64::NAN, 1e-8);
        assert!(!r.passed);
    }
}
