//! JSON report and certificate schemas.
//!
//! Rationals serialize as strings (`"7"`, `"-1/2"`) so reports survive any
//! JSON reader without float lossiness; both `p` and `p/q` forms are accepted
//! on input. Reports are byte-deterministic for identical inputs and flags
//! except for the `timingMs` field, which comparisons must exclude.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use gnta_core::linalg::RationalVector;
use gnta_core::parser::{ParseDiagnostic, Severity};
use gnta_core::rational::Rational;
use gnta_core::synth::{AttemptReason, LambdaAttempt};
use gnta_core::witness::{Gnta, RecurrenceCheckReport, RecurrenceSet, WitnessPrefix};

pub fn rational_strings(v: &RationalVector) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

pub fn parse_rational_strings(items: &[String], what: &str) -> Result<RationalVector> {
    let mut out = Vec::with_capacity(items.len());
    for s in items {
        let r: Rational = s
            .parse()
            .with_context(|| format!("bad rational `{s}` in {what}"))?;
        out.push(r);
    }
    Ok(RationalVector::new(out))
}

/// Certificate file schema: `{"x0": [...], "x1": [...], "y": [...],
/// "lambda": "p/q"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonGnta {
    pub x0: Vec<String>,
    pub x1: Vec<String>,
    pub y: Vec<String>,
    pub lambda: String,
}

impl JsonGnta {
    pub fn from_gnta(g: &Gnta) -> Self {
        JsonGnta {
            x0: rational_strings(&g.x0),
            x1: rational_strings(&g.x1),
            y: rational_strings(&g.y),
            lambda: g.lambda.to_string(),
        }
    }

    pub fn to_gnta(&self) -> Result<Gnta> {
        let x0 = parse_rational_strings(&self.x0, "x0")?;
        let x1 = parse_rational_strings(&self.x1, "x1")?;
        let y = parse_rational_strings(&self.y, "y")?;
        if x0.dim() != x1.dim() || x1.dim() != y.dim() {
            bail!("certificate vectors have mismatched dimensions");
        }
        let lambda: Rational = self
            .lambda
            .parse()
            .with_context(|| format!("bad rational `{}` in lambda", self.lambda))?;
        Ok(Gnta::new(x0, x1, y, lambda))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonInequality {
    pub normal: Vec<String>,
    pub bound: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonEquality {
    pub normal: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonRecurrenceSet {
    pub ineqs: Vec<JsonInequality>,
    pub eqs: Vec<JsonEquality>,
}

impl JsonRecurrenceSet {
    pub fn from_set(set: &RecurrenceSet) -> Self {
        JsonRecurrenceSet {
            ineqs: set
                .inequalities
                .iter()
                .map(|i| JsonInequality {
                    normal: rational_strings(&i.normal),
                    bound: i.bound.to_string(),
                })
                .collect(),
            eqs: set
                .equalities
                .iter()
                .map(|e| JsonEquality {
                    normal: rational_strings(&e.normal),
                    value: e.value.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonRecurrenceCheck {
    pub reachable: bool,
    #[serde(rename = "samplesChecked")]
    pub samples_checked: usize,
    /// Human-readable refutations; empty means no sample was refuted.
    pub failures: Vec<String>,
    /// Sampling falsifies, it does not prove.
    pub note: String,
}

impl JsonRecurrenceCheck {
    pub fn from_report(r: &RecurrenceCheckReport) -> Self {
        JsonRecurrenceCheck {
            reachable: r.reachable,
            samples_checked: r.samples_checked,
            failures: r
                .failures
                .iter()
                .map(|f| format!("sample {} at {}: {:?}", f.index, f.point, f.reason))
                .collect(),
            note: "sampling-based falsifier, not a proof".to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonLambdaAttempt {
    pub lambda: String,
    /// `lp-infeasible`, `integer-infeasible`, or `depth-limit`.
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub farkas: Option<Vec<String>>,
}

impl JsonLambdaAttempt {
    pub fn from_attempt(a: &LambdaAttempt) -> Self {
        let (reason, farkas) = match &a.reason {
            AttemptReason::LpInfeasible(cert) => (
                "lp-infeasible".to_string(),
                Some(rational_strings(cert.multipliers())),
            ),
            AttemptReason::IntegerInfeasible => ("integer-infeasible".to_string(), None),
            AttemptReason::DepthLimit => ("depth-limit".to_string(), None),
        };
        JsonLambdaAttempt {
            lambda: a.lambda.to_string(),
            reason,
            farkas,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: String,
    pub message: String,
}

impl JsonDiagnostic {
    pub fn from_diag(d: &ParseDiagnostic) -> Self {
        JsonDiagnostic {
            line: d.line,
            column: d.column,
            severity: match d.severity {
                Severity::Error => "error".to_string(),
                Severity::Warning => "warning".to_string(),
            },
            message: d.message.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonClosureNote {
    pub gnta: JsonGnta,
    #[serde(rename = "strictRecheckValid")]
    pub strict_recheck_valid: bool,
    #[serde(rename = "firstFailure", skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum JsonOutcome {
    #[serde(rename = "nonterminating")]
    Nonterminating {
        lambda: String,
        #[serde(rename = "fixedPointUsed")]
        fixed_point_used: bool,
        gnta: JsonGnta,
        #[serde(rename = "witnessPrefix")]
        witness_prefix: Vec<Vec<String>>,
        #[serde(rename = "recurrenceSet", skip_serializing_if = "Option::is_none")]
        recurrence_set: Option<JsonRecurrenceSet>,
        #[serde(rename = "recurrenceCheck", skip_serializing_if = "Option::is_none")]
        recurrence_check: Option<JsonRecurrenceCheck>,
    },
    #[serde(rename = "unknown")]
    Unknown {
        #[serde(rename = "perLambda")]
        per_lambda: Vec<JsonLambdaAttempt>,
        #[serde(skip_serializing_if = "Option::is_none")]
        closure: Option<JsonClosureNote>,
    },
    #[serde(rename = "rejected")]
    Rejected { diagnostics: Vec<JsonDiagnostic> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonTiming {
    #[serde(rename = "parseMs")]
    pub parse_ms: u64,
    #[serde(rename = "synthesisMs")]
    pub synthesis_ms: u64,
    #[serde(rename = "certificationMs")]
    pub certification_ms: u64,
    #[serde(rename = "totalMs")]
    pub total_ms: u64,
}

/// Top-level run report. Identical inputs and flags produce byte-identical
/// serializations once `timingMs` is dropped.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonReport {
    #[serde(rename = "programDigest")]
    pub program_digest: String,
    pub mode: String,
    #[serde(rename = "closureApplied")]
    pub closure_applied: bool,
    pub outcome: JsonOutcome,
    #[serde(rename = "timingMs", skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<JsonTiming>,
}

pub fn witness_states(w: &WitnessPrefix) -> Vec<Vec<String>> {
    w.states().iter().map(rational_strings).collect()
}
