//! Instance files, reports and the command implementations behind the CLI.

pub mod commands;
pub mod instance;
pub mod report;

use std::io::Read;

use thiserror::Error;

use crate::algebra::Field;

pub use commands::{
    cmd_classify, cmd_cover_build, cmd_factor, cmd_pushforward, cmd_selftest, error_outcome, Options, Outcome,
};
pub use instance::{Instance, InstanceFile};
pub use report::{Report, ReportBody, Status};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("ParseError at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("{command} expects a {expected} instance, found {found}")]
    WrongKind { command: String, expected: String, found: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("degree {degree} exceeds the limit {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("{0}")]
    Usage(String),
}

impl IoError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Parse { location: location.into(), message: message.into() }
    }

    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        IoError::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    }

    /// Short error name used in machine reports.
    pub fn name(&self) -> &'static str {
        match self {
            IoError::Parse { .. } => "ParseError",
            IoError::Read { .. } => "ReadError",
            IoError::WrongKind { .. } => "WrongKind",
            IoError::InvalidInstance(_) => "InvalidInstance",
            IoError::DegreeTooLarge { .. } => "DegreeTooLarge",
            IoError::Usage(_) => "UsageError",
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    /// A mathematical check failed; the report carries the witness.
    Fail = 1,
    InputError = 2,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Reads an instance from a path, or from stdin when the path is `-`.
pub fn read_instance(path: &str) -> Result<InstanceFile, IoError> {
    let read_err = |e: std::io::Error| IoError::Read { path: path.to_string(), message: e.to_string() };
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(read_err)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(read_err)?
    };
    InstanceFile::from_json(&text)
}

/// Accepts `Q`, `GF(p)`, `Fp:p`, `Fp` followed by digits, or a bare prime.
pub fn parse_field_flag(text: &str) -> Result<Field, IoError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Field::Rationals);
    }
    let digits = t
        .strip_prefix("GF(")
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| t.strip_prefix("Fp:"))
        .or_else(|| t.strip_prefix("Fp"))
        .or_else(|| t.strip_prefix('F'))
        .unwrap_or(t);
    let p: u64 = digits.parse().map_err(|_| IoError::Usage(format!("unknown field {text:?}")))?;
    Field::prime(p).map_err(|e| IoError::Usage(e.to_string()))
}
