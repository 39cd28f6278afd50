//! Machine-readable run reports.
//!
//! Field order is the struct order below and never changes; two runs on the
//! same inputs differ at most in `timings`, which is why the digest covers
//! the canonicalized input instead of the report bytes.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Witness {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}

pub fn verdict(check: impl Into<String>, ok: bool) -> Verdict {
    Verdict { check: check.into(), ok, detail: None }
}

pub fn verdict_with(check: impl Into<String>, ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { check: check.into(), ok, detail: Some(detail.into()) }
}

pub fn witness(label: impl Into<String>, value: impl Into<String>) -> Witness {
    Witness { label: label.into(), value: value.into() }
}

/// FNV-1a, 64 bit, over the canonical compact input bytes.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a64:{h:016x}")
}
