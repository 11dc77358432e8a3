//! JSON reports for the command line.
//!
//! Field order is fixed by the struct layout and timing is opt-in, so runs
//! on identical inputs produce byte-identical output.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub verdict: bool,
    /// Which pipeline produced the verdict: `memoryless-direct`,
    /// `memoryless-reduction`, `windowed(k)`, or `qctl-structure`.
    pub engine: String,
    pub witnesses: Vec<String>,
    pub stats: Stats,
    pub inputs: Inputs,
}

#[derive(Debug, Default, Serialize)]
pub struct Stats {
    pub states_explored: usize,
    pub tables_enumerated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct Inputs {
    pub game_sha256: String,
    pub formula_sha256: String,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    use std::fmt::Write;
    let digest = Sha256::digest(bytes.as_ref());
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}
