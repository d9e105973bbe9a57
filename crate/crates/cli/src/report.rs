//! JSON reports and exit codes.

use serde::Serialize;
use serde_json::Value;

use rlab_core::{Error, Field, FieldDesc};

use crate::config::fingerprint;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

/// Why a command could not produce its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Domain(String),
    Precision(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Domain(_) => EXIT_USAGE,
            Failure::Precision(_) => EXIT_PRECISION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Domain(_) => "domain",
            Failure::Precision(_) => "precision",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Precision(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precision(_) | Error::NonIntegralTrace { .. } | Error::NoQuadraticConvergence { .. } | Error::Singular => {
                Failure::Precision(e.to_string())
            }
            Error::InvalidField(_) | Error::NoRootOfUnity { .. } | Error::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for Failure {
    fn from(e: crate::config::ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<crate::expr::ParseError> for Failure {
    fn from(e: crate::expr::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub fingerprint: String,
    pub p: u64,
    pub n: u32,
    pub e: usize,
    pub f: usize,
}

impl FieldInfo {
    pub fn of(desc: &FieldDesc) -> Self {
        FieldInfo { fingerprint: fingerprint(desc), p: desc.p, n: desc.n, e: desc.degree_e(), f: desc.degree_f() }
    }
}

/// Precision used and the outcome of rerunning at `working + 10`.
#[derive(Clone, Debug, Serialize)]
pub struct PrecisionInfo {
    pub working: i64,
    pub recheck: Option<i64>,
    pub recheck_agrees: Option<bool>,
}

impl PrecisionInfo {
    pub fn unchecked(field: &Field) -> Self {
        PrecisionInfo { working: field.work_prec(), recheck: None, recheck_agrees: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub args: Value,
    pub field: Option<FieldInfo>,
    pub inputs: Value,
    pub outputs: Value,
    pub precision: Option<PrecisionInfo>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

impl Report {
    pub fn failure(command: &str, args: Value, field: Option<FieldInfo>, failure: &Failure) -> Self {
        Report {
            command: command.into(),
            args,
            field,
            inputs: Value::Null,
            outputs: Value::Null,
            precision: None,
            status: "error",
            error: Some(ErrorInfo { kind: failure.kind(), message: failure.message().into() }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// A finished command: the report and the process exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: i32,
}
