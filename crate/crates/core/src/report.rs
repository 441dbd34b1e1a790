//! Versioned JSON reports emitted by every command.
//!
//! A report is written as pretty JSON with a trailing newline. Parsing a
//! written report and writing it again reproduces it byte for byte; only
//! [`SCHEMA_VERSION`] is accepted on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{CenteredCheck, FamilyFile};
use crate::error::{Error, Result};
use crate::generators::sweep::{SweepRow, SweepSpec};
use crate::generators::InstanceSpec;
use crate::intersection::{BruteForceResult, IntersectionCertificate};
use crate::kelley::{ClassVerdict, CoverCertificate, MnReport, SynthesizedMeasure};
use crate::rational::Rational;

pub const SCHEMA_VERSION: &str = "kelleyscope.report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub instance: Instance,
    pub result: CommandResult,
    /// Milliseconds per phase; empty unless timings were requested.
    pub timings: BTreeMap<String, u64>,
    pub budget_events: Vec<BudgetEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    Family(FamilyFile),
    Spec(InstanceSpec),
    Sweep(SweepSpec),
}

/// Work spent against a budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetEvent {
    pub stage: String,
    pub limit: u64,
    pub used: u64,
    pub unit: String,
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResult {
    Inum(InumResult),
    Mn(MnResult),
    Cover(CoverResult),
    KelleyVerify(KelleyVerifyResult),
    Gen(GenResult),
    Sweep(SweepResult),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InumResult {
    #[serde(flatten)]
    pub certificate: IntersectionCertificate,
    /// Both witnesses recomputed and equal to `value`.
    pub certificate_verified: bool,
    pub centered: CenteredCheck,
    pub brute_force: Option<BruteForceResult>,
    pub oracle: Option<OracleVerdict>,
}

/// Brute force against the exact value: never below it, and equal once the
/// length bound reaches the exact witness length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub max_len: u64,
    pub brute_value: Rational,
    pub exact_value: Rational,
    pub witness_length: u64,
    pub dominates: bool,
    pub equality_expected: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnResult {
    #[serde(flatten)]
    pub report: MnReport,
    /// Every class's intersection number recomputed from scratch clears
    /// `1 - epsilon`.
    pub reverified: bool,
}

/// Exact intersection number of one class, recomputed by LP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub class: usize,
    pub threshold: Rational,
    pub value: Rational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub grid: Vec<Rational>,
    pub certificate: CoverCertificate,
    pub verdicts: Vec<ClassVerdict>,
    pub class_checks: Vec<ClassCheck>,
    pub all_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KelleyVerifyResult {
    pub covers_all: bool,
    pub verdicts: Vec<ClassVerdict>,
    pub synthesized: SynthesizedMeasure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenResult {
    pub family: FamilyFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl Report {
    pub fn new(command: &str, instance: Instance, result: CommandResult) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            instance,
            result,
            timings: BTreeMap::new(),
            budget_events: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Parses a report, rejecting any other schema version before looking at
    /// the rest of the document.
    pub fn from_json(text: &str) -> Result<Report> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema_version").and_then(|v| v.as_str()) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "unsupported schema_version {other:?}, expected {SCHEMA_VERSION:?}"
                )))
            }
            None => {
                return Err(Error::Schema(
                    "schema_version: missing or not a string".into(),
                ))
            }
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
    }
}
