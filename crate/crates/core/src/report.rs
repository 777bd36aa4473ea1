//! Machine-readable run reports written by `comblab --json <path>`.
//!
//! A report is a JSON object with a fixed `schema` tag:
//!
//! ```text
//! {
//!   "schema": "comblab-report/1",
//!   "command": ["comblab", "verify", "w-comb.json"],
//!   "inputs": [{"path": "w-comb.json", "sha256": "..."}],
//!   "tolerances": { ... },
//!   "seeds": [],
//!   "verdict": "pass",
//!   "exit_code": 0,
//!   "results": { ... },
//!   "timing": {"elapsed_s": 0.002}
//! }
//! ```
//!
//! `results` is specific to the subcommand and carries every value a verdict
//! is based on. Apart from `timing` the report is a pure function of the
//! inputs, flags and seeds.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Tolerances;
use crate::constructions::sha256_hex;

pub const SCHEMA: &str = "comblab-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &Path, bytes: &[u8]) -> InputDigest {
        InputDigest { path: path.display().to_string(), sha256: sha256_hex(bytes) }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_s: f64,
}

/// Outcome class of a command, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The check passed or a verdict was reached.
    Pass,
    /// The check failed, or no verdict could be reached.
    Fail,
    Inconclusive,
    /// A solver or decomposition broke down.
    Numerical,
    /// The input could not be read or does not have the required shape.
    Malformed,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail | Verdict::Inconclusive => 2,
            Verdict::Numerical => 3,
            Verdict::Malformed => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub tolerances: Tolerances,
    pub seeds: Vec<u64>,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub results: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: Vec<String>) -> Report {
        Report {
            schema: SCHEMA,
            command,
            inputs: Vec::new(),
            tolerances: Tolerances::default(),
            seeds: Vec::new(),
            verdict: Verdict::Pass,
            exit_code: 0,
            results: Value::Null,
            timing: Timing { elapsed_s: 0.0 },
        }
    }

    pub fn set_verdict(&mut self, v: Verdict) {
        self.verdict = v;
        self.exit_code = v.exit_code();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation cannot fail")
    }
}
