//! The JSON envelope every command emits.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_NAME: &str = "transversal-run-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Published schema for [`RunReport`].
pub const SCHEMA: &str = include_str!("../schema/run_report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Violation,
    /// Nothing to test, e.g. a scene without transversals.
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Violation => 1,
            Verdict::Pass | Verdict::Inconclusive => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    /// Fully resolved configuration, including defaults and environment
    /// overrides.
    pub config: Value,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub summary: String,
    pub result: Value,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    /// Only present when requested: wall-clock times differ between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn new(command: &str, config: Value, verdict: Verdict, summary: String, result: Value) -> Self {
        Self {
            schema: SCHEMA_NAME,
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            verdict,
            exit_code: verdict.exit_code(),
            summary,
            result,
            artifacts: Vec::new(),
            warnings: Vec::new(),
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }
}
