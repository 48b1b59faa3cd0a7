//! Crate-wide error type and parser diagnostics.

use std::fmt;

use thiserror::Error;

/// A parse or validation diagnostic with a stable code and source position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic { line, col, code, message: message.into() }
    }

    /// Renders as `file:line:col: code: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{}:{}:{}: {}: {}", file, self.line, self.col, self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.col, self.code, self.message)
    }
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("arity mismatch for `{pred}`: declared {declared}, got {got}")]
    ArityMismatch { pred: String, declared: usize, got: usize },
    #[error("parse failed with {} diagnostic(s)", .0.len())]
    Parse(Vec<Diagnostic>),
    #[error("contradictory update: {0}")]
    ContradictoryUpdate(String),
    #[error("world universe has {size} candidate atoms, cap is {cap}")]
    UniverseCapExceeded { size: usize, cap: usize },
    #[error("database with constraints is inconsistent")]
    Inconsistent,
    #[error("deductive database is inconsistent")]
    InconsistentDeductive,
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("instance has no request")]
    NoRequest,
    #[error("{0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error: 2 invalid input, 3 budget, 1 semantic.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::UnknownPredicate(_)
            | Error::DuplicatePredicate(_)
            | Error::ArityMismatch { .. }
            | Error::ContradictoryUpdate(_)
            | Error::NoRequest
            | Error::Io(_) => 2,
            Error::UniverseCapExceeded { .. }
            | Error::BudgetExhausted(_)
            | Error::Unsupported(_) => 3,
            Error::Inconsistent | Error::InconsistentDeductive => 1,
        }
    }
}
