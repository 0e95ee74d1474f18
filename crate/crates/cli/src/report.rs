//! Run reports. The JSON form is a pure function of the scenario bytes, the
//! command and the flags; wall time only ever appears in the human rendering.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    NotFrame,
    Refuted,
    Violated,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_sha256: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub status: Status,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &str, scenario_sha256: Option<String>, seed: u64, samples: usize) -> Self {
        Report {
            command: command.to_string(),
            scenario_sha256,
            seed,
            samples,
            status: Status::Ok,
            results: Map::new(),
            checks: Vec::new(),
            error: None,
        }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, check: Check) {
        if !check.passed {
            self.escalate(Status::Failed);
        }
        self.checks.push(check);
    }

    /// Raise the status; the more severe outcome always wins.
    pub fn escalate(&mut self, status: Status) {
        self.status = self.status.max(status);
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.error = Some(message.into());
        self.escalate(Status::Error);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self, wall_ms: Option<f64>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command   {}", self.command);
        if let Some(d) = &self.scenario_sha256 {
            let _ = writeln!(out, "scenario  sha256:{d}");
        }
        let _ = writeln!(out, "seed      {}   samples {}", self.seed, self.samples);
        if !self.results.is_empty() {
            let _ = writeln!(out, "results");
            for (k, v) in &self.results {
                let _ = writeln!(out, "  {k:<22} {}", render(v));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks");
            for c in &self.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "  [{mark}] {:<36} {}", c.name, c.detail);
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error     {e}");
        }
        if let Some(ms) = wall_ms {
            let _ = writeln!(out, "wall time {ms:.1} ms");
        }
        let _ = writeln!(out, "status    {}", status_label(self.status));
        out
    }
}

pub fn status_label(s: Status) -> &'static str {
    match s {
        Status::Ok => "OK",
        Status::Failed => "FAILED",
        Status::NotFrame => "NOT_FRAME",
        Status::Refuted => "REFUTED",
        Status::Violated => "VIOLATED",
        Status::Error => "ERROR",
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
