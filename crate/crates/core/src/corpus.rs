//! Built-in example models.

use crate::model::BondGraphModel;
use crate::parser::{parse, ParseReport};

pub const NAMES: [&str; 3] = ["rlc", "fig6", "hand-index"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "rlc" => Some(include_str!("../corpus/rlc.bg")),
        "fig6" => Some(include_str!("../corpus/fig6.bg")),
        "hand-index" => Some(include_str!("../corpus/hand-index.bg")),
        _ => None,
    }
}

pub fn parse_builtin(name: &str) -> Option<ParseReport> {
    source(name).map(parse)
}

/// Parses a built-in model, panicking if it is missing or invalid.
pub fn builtin(name: &str) -> BondGraphModel {
    let report = parse_builtin(name).unwrap_or_else(|| panic!("no built-in model {name}"));
    report.model.unwrap_or_else(|| panic!("built-in model {name} is invalid: {:?}", report.diagnostics))
}
