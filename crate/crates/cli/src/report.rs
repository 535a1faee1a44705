//! Machine-readable reports. Output is a pure function of the inputs and
//! the seed: no timestamps, no hash-ordered maps.

use obsrel_core::channel::CheckReport;
use obsrel_core::relations::{HierarchyReport, Robustness};
use obsrel_core::{Certificate, Subsystem, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::document::Document;

pub const TOOL: &str = "obsrel";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub seed: u64,
    pub result: Value,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64, result: Value) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            seed,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Non-finite residuals become strings so the JSON stays valid.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format!("{x}"))
    }
}

pub fn side_name(s: Subsystem) -> &'static str {
    match s {
        Subsystem::First => "first",
        Subsystem::Second => "second",
    }
}

pub fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::Joint(j) => json!({ "type": "joint", "document": Document::from(j) }),
        Certificate::Channel(ch) => json!({ "type": "channel", "document": Document::from(ch) }),
        Certificate::Instrument { instrument, measured } => json!({
            "type": "instrument",
            "measures": side_name(*measured),
            "document": Document::from(instrument),
        }),
        Certificate::InstrumentPair { measure_a, measure_b } => json!({
            "type": "instrument-pair",
            "measure_a": Document::from(measure_a),
            "measure_b": Document::from(measure_b),
        }),
        Certificate::Reason(r) => json!({ "type": "reason", "reason": r }),
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "relation": v.relation.as_str(),
        "status": v.status.as_str(),
        "residual": number(v.residual),
        "flags": v.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        "note": v.note,
        "certificate": v.certificate.as_ref().map(certificate_json),
    })
}

pub fn hierarchy_json(r: &HierarchyReport, classifier: &str) -> Value {
    json!({
        "classifier": classifier,
        "dim": r.dim,
        "mutual_commutator": number(r.mutual_commutator),
        "qubit_case": r.qubit_case.map(|c| c.as_str()),
        "monotone": r.is_monotone(),
        "verdicts": r.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
    })
}

pub fn check_json(c: &CheckReport) -> Value {
    json!({
        "passed": c.passed,
        "tolerance": c.tol,
        "max_residual": number(c.max_residual()),
        "conditions": c.conditions.iter().map(|k| json!({
            "name": k.name,
            "residual": number(k.residual),
            "passed": k.passed,
        })).collect::<Vec<_>>(),
    })
}

pub fn robustness_json(r: &Robustness, precision: f64) -> Value {
    json!({
        "lambda": r.lambda,
        "upper": r.upper,
        "upper_refuted": r.upper_refuted,
        "precision": precision,
        "probes": r.probes.iter().map(|(l, s)| json!({ "lambda": l, "status": s.as_str() })).collect::<Vec<_>>(),
    })
}
