//! The JSON record every run emits.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub report: Value,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(subcommand: impl Into<String>) -> Self {
        Self {
            tool: "dscatter",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
            report: Value::Null,
            wall_time_s: 0.0,
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest { path: path.into(), sha256: hex::encode(Sha256::digest(bytes)) });
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    /// Records `value <= limit` as a named check.
    pub fn check_at_most(&mut self, name: &str, value: f64, limit: f64) {
        self.checks.push(CheckResult { name: name.into(), passed: value <= limit, value, limit });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}
