use std::collections::BTreeMap;
use std::time::Instant;

use nullag_core::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_NONTRIVIAL: i32 = 10;
pub const EXIT_INCONCLUSIVE: i32 = 20;

/// Machine-readable result of one command. Everything except `timings_ms` is a pure function
/// of the inputs and flags.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs_digest: String,
    pub verdict: String,
    /// Library operation that produced the verdict.
    pub produced_by: String,
    pub exit_code: i32,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<Value>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, inputs: &Value) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(inputs).expect("serializable"));
        Self {
            tool: "nullag",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs_digest: format!("sha256:{:x}", h.finalize()),
            verdict: String::new(),
            produced_by: String::new(),
            exit_code: EXIT_OK,
            details: Value::Null,
            artifact: None,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn finish(mut self, verdict: &str, produced_by: &str, exit_code: i32, details: Value) -> Self {
        self.verdict = verdict.to_string();
        self.produced_by = produced_by.to_string();
        self.exit_code = exit_code;
        self.details = details;
        self
    }

    pub fn fail(self, produced_by: &str, err: &Error) -> Self {
        let code = exit_code_for(err);
        self.finish("error", produced_by, code, serde_json::json!({ "error": err.to_string() }))
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::Schema(_)
        | Error::DimensionMismatch(_)
        | Error::DependentBasis(_)
        | Error::UnknownFixture(_)
        | Error::IndexOutOfRange(_)
        | Error::OrderOutOfRange { .. } => EXIT_SCHEMA,
        Error::Precondition(_) | Error::NonConvergence(_) | Error::NonTransversal(_) | Error::Unsupported(_) => {
            EXIT_PRECONDITION
        }
        Error::ZeroScale | Error::Verification(_) => EXIT_FAILED,
    }
}

/// Wall-clock stopwatch feeding `timings_ms`.
pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn record(&self, report: &mut RunReport, label: &str) {
        report.timings_ms.insert(label.to_string(), self.0.elapsed().as_secs_f64() * 1e3);
    }
}
