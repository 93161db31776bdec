//! Deterministic reports: human text on stdout, JSON on request.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    /// Every internal equivalence held.
    pub consistent: bool,
    /// Ordered `(key, value)` lines.
    pub details: Vec<(String, String)>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport { pass: true, consistent: true, details: Vec::new() }
    }

    pub fn line(&mut self, key: impl Into<String>, value: impl ToString) {
        self.details.push((key.into(), value.to_string()));
    }

    pub fn verdict(&mut self, key: &str, ok: bool) {
        self.line(key, if ok { "pass" } else { "fail" });
        self.pass &= ok;
    }

    pub fn invariant(&mut self, key: &str, ok: bool) {
        self.line(key, if ok { "holds" } else { "VIOLATED" });
        self.consistent &= ok;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub job: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: BTreeMap<String, CheckReport>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn consistent(&self) -> bool {
        self.checks.values().all(|c| c.consistent)
    }

    pub fn exit_code(&self) -> i32 {
        if !self.consistent() {
            3
        } else if !self.pass() {
            1
        } else {
            0
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "job: {}", self.job);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "samples: {}", self.samples);
        for (name, c) in &self.checks {
            let _ = writeln!(s, "[{name}] {}", if c.pass { "PASS" } else { "FAIL" });
            for (k, v) in &c.details {
                let _ = writeln!(s, "  {k}: {v}");
            }
        }
        let verdict = match self.exit_code() {
            0 => "PASS",
            1 => "FAIL",
            _ => "INVARIANT VIOLATION",
        };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
