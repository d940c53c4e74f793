//! Run reports: stable-order JSON records echoing the command, the problem
//! hash, the effective configuration, and the per-check results.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One CLI invocation's output. Field order is fixed by the struct and inner
/// maps are sorted, so identical inputs serialize byte-identically. Timings
/// are attached only on request, keeping default output deterministic.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem_hash: Option<String>,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<serde_json::Value>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            version: setopt::VERSION.into(),
            problem_hash: None,
            config: serde_json::Value::Null,
            results: serde_json::Value::Null,
            timings_ms: None,
        }
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }

    /// Print to stdout and optionally persist to `--out`.
    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render();
        print!("{text}");
        if let Some(path) = out {
            fs::write(path, text)?;
        }
        Ok(())
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV rendering of a ratio curve: one row per radius with the verdict's
/// witness coordinates repeated in the last column.
pub fn curve_csv(curve: &[(f64, f64)], witness: Option<&[f64]>) -> String {
    let mut text = String::from("radius,worst_ratio,witness\n");
    let w = witness
        .map(|p| {
            p.iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default();
    for (r, v) in curve {
        text.push_str(&format!("{r},{v},{w}\n"));
    }
    text
}
