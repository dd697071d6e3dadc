//! Text and JSON front ends for bond-graph models.

mod dsl;
mod json;
mod validate;

use std::fmt;

use crate::model::BondGraphModel;

pub use dsl::{parse, print_dsl};
pub use json::{from_json, to_json};
pub use validate::validate_labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

/// Labelling rule a diagnostic refers to, or the document schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleId {
    Rule(u8),
    Schema,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Rule(n) => write!(f, "rule {n}"),
            RuleId::Schema => write!(f, "schema"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub rule: RuleId,
    /// Bond the diagnostic is about, when there is one.
    pub label: Option<u32>,
}

impl Diagnostic {
    pub fn error(rule: RuleId, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, line: 0, column: 0, message: message.into(), rule, label: None }
    }

    pub fn at(mut self, line: usize, column: usize) -> Self {
        self.line = line;
        self.column = column;
        self
    }

    pub fn on(mut self, label: u32) -> Self {
        self.label = Some(label);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}:{}: {}", self.rule, self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseReport {
    pub model: Option<BondGraphModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseReport {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub(crate) fn finish(model: BondGraphModel, mut diagnostics: Vec<Diagnostic>) -> Self {
        diagnostics.sort_by_key(|d| (d.line, d.column));
        let ok = !diagnostics.iter().any(Diagnostic::is_error);
        ParseReport { model: ok.then_some(model), diagnostics }
    }
}
