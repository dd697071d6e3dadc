use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{validate_labels, Diagnostic, ParseReport, RuleId};
use crate::expr::{format_rational, is_identifier, parse_rational, ParamExpr};
use crate::model::{
    Bond, BondGraphModel, Branch, BranchRef, Causality, ElementType, Junction, JunctionKind, Modulus, PowerDirection,
};

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        if c == '"' {
            quoted = !quoted;
        }
        if c.is_whitespace() && !quoted {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], col: s + 1 });
    }
    out
}

struct Parser {
    model: BondGraphModel,
    diags: Vec<Diagnostic>,
    branch: Option<Branch>,
    junction: Option<Junction>,
    graph_seen: bool,
    graph_closed: bool,
    lines: BTreeMap<u32, (usize, usize)>,
}

impl Parser {
    fn err(&mut self, rule: RuleId, line: usize, col: usize, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(rule, msg).at(line, col));
    }

    fn close_junction(&mut self) {
        if let Some(j) = self.junction.take() {
            if let Some(b) = self.branch.as_mut() {
                b.junctions.push(j);
            }
        }
    }

    fn close_branch(&mut self) {
        self.close_junction();
        if let Some(b) = self.branch.take() {
            self.model.branches.push(b);
        }
    }

    fn line(&mut self, no: usize, toks: &[Token<'_>]) {
        let head = &toks[0];
        if self.graph_closed {
            self.err(RuleId::Schema, no, head.col, "content after the closing end");
            return;
        }
        if !self.graph_seen && head.text != "graph" {
            self.err(RuleId::Schema, no, head.col, "model must start with graph \"<name>\"");
            self.graph_seen = true;
        }
        match head.text {
            "graph" => self.graph(no, toks),
            "param" => self.param(no, toks),
            "branch" => self.open_branch(no, toks),
            "junction" => self.open_junction(no, toks),
            "bond" => self.bond(no, toks),
            "end" => {
                if toks.len() > 1 {
                    self.err(RuleId::Schema, no, toks[1].col, "unexpected text after end");
                }
                if self.junction.is_some() {
                    self.close_junction();
                } else if self.branch.is_some() {
                    self.close_branch();
                } else {
                    self.graph_closed = true;
                }
            }
            other => self.err(RuleId::Schema, no, head.col, format!("unknown keyword {other}")),
        }
    }

    fn graph(&mut self, no: usize, toks: &[Token<'_>]) {
        if self.graph_seen {
            self.err(RuleId::Schema, no, toks[0].col, "graph declared twice");
            return;
        }
        self.graph_seen = true;
        let rest = toks.get(1);
        match rest.map(|t| t.text) {
            Some(t) if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') && toks.len() == 2 => {
                self.model.name = t[1..t.len() - 1].to_string();
            }
            _ => self.err(RuleId::Schema, no, rest.map_or(toks[0].col, |t| t.col), "expected a quoted graph name"),
        }
    }

    fn param(&mut self, no: usize, toks: &[Token<'_>]) {
        if self.branch.is_some() {
            self.err(RuleId::Schema, no, toks[0].col, "parameters must be declared before the first branch");
        }
        let joined: String = toks[1..].iter().map(|t| t.text).collect::<Vec<_>>().join(" ");
        let col = toks.get(1).map_or(toks[0].col, |t| t.col);
        let (name, value) = match joined.split_once('=') {
            Some((n, v)) => (n.trim().to_string(), Some(v.trim().to_string())),
            None => (joined.trim().to_string(), None),
        };
        if !is_identifier(&name) {
            self.err(RuleId::Schema, no, col, format!("invalid parameter name '{name}'"));
            return;
        }
        let value = match value {
            None => None,
            Some(v) => match parse_rational(&v) {
                Some(r) => Some(r),
                None => {
                    self.err(RuleId::Schema, no, col, format!("parameter {name}: '{v}' is not a rational"));
                    return;
                }
            },
        };
        if self.model.parameters.insert(name.clone(), value).is_some() {
            self.err(RuleId::Schema, no, col, format!("parameter {name} declared twice"));
        }
    }

    fn open_branch(&mut self, no: usize, toks: &[Token<'_>]) {
        if self.branch.is_some() {
            self.err(RuleId::Rule(8), no, toks[0].col, "branch opened before the previous one was closed");
            self.close_branch();
        }
        let id = match toks.get(1).map(|t| t.text.parse::<u32>()) {
            Some(Ok(id)) if id > 0 && toks.len() == 2 => id,
            _ => {
                self.err(RuleId::Rule(8), no, toks[0].col, "expected: branch <positive integer>");
                0
            }
        };
        self.branch = Some(Branch { id, junctions: Vec::new() });
    }

    fn open_junction(&mut self, no: usize, toks: &[Token<'_>]) {
        if self.branch.is_none() {
            self.err(RuleId::Rule(8), no, toks[0].col, "junction outside a branch");
            return;
        }
        if self.junction.is_some() {
            self.err(RuleId::Rule(8), no, toks[0].col, "junction opened before the previous one was closed");
            self.close_junction();
        }
        let number = match toks.get(1).map(|t| t.text.parse::<u32>()) {
            Some(Ok(n)) => n,
            _ => {
                self.err(RuleId::Rule(8), no, toks[0].col, "expected: junction <number> kind=<0|1>");
                0
            }
        };
        let mut kind = None;
        for t in toks.iter().skip(2) {
            match t.text {
                "kind=0" => kind = Some(JunctionKind::Zero),
                "kind=1" => kind = Some(JunctionKind::One),
                _ if t.text.starts_with("kind=") => {
                    self.err(RuleId::Rule(7), no, t.col, format!("junction kind must be 0 or 1, got '{}'", &t.text[5..]))
                }
                _ => self.err(RuleId::Schema, no, t.col, format!("unexpected '{}'", t.text)),
            }
        }
        if kind.is_none() && !toks.iter().skip(2).any(|t| t.text.starts_with("kind=")) {
            self.err(RuleId::Rule(7), no, toks[0].col, "junction needs kind=0 or kind=1");
        }
        self.junction = Some(Junction { number, kind: kind.unwrap_or(JunctionKind::Zero), bonds: Vec::new() });
    }

    fn bond(&mut self, no: usize, toks: &[Token<'_>]) {
        if self.junction.is_none() {
            self.err(RuleId::Rule(8), no, toks[0].col, "bond outside a junction");
            return;
        }
        let label = match toks.get(1).map(|t| t.text.parse::<u32>()) {
            Some(Ok(l)) if l >= 100 => l,
            _ => {
                let col = toks.get(1).map_or(toks[0].col, |t| t.col);
                self.err(RuleId::Rule(2), no, col, "expected a bond label of the form pqr");
                return;
            }
        };
        let mut fields: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
        for t in &toks[2..] {
            match t.text.split_once('=') {
                Some((k, v)) => {
                    if fields.insert(k, (v, t.col)).is_some() {
                        self.err(RuleId::Schema, no, t.col, format!("bond {label}: {k} given twice"));
                    }
                }
                None => self.err(RuleId::Schema, no, t.col, format!("bond {label}: expected key=value, got '{}'", t.text)),
            }
        }
        let known: BTreeSet<&str> =
            ["element", "stroke", "power", "branch", "modulus", "param", "p0", "q0"].into_iter().collect();
        for (k, (_, col)) in &fields {
            if !known.contains(k) {
                self.err(RuleId::Schema, no, *col, format!("bond {label}: unknown attribute {k}"));
            }
        }
        let head_col = toks[0].col;
        let mut ok = true;
        let element = match fields.get("element") {
            None => {
                self.err(RuleId::Rule(3), no, head_col, format!("bond {label}: element= is required"));
                ok = false;
                ElementType::ConnectingBond
            }
            Some((v, col)) => match *v {
                "bond" => ElementType::ConnectingBond,
                "se" | "sf" => ElementType::Source,
                "i" => ElementType::Inertance,
                "c" => ElementType::Compliance,
                "r" => ElementType::Resistor,
                "tf" => ElementType::Transformer,
                "gy" => ElementType::Gyrator,
                other => {
                    self.err(RuleId::Rule(3), no, *col, format!("bond {label}: unknown element '{other}'"));
                    ok = false;
                    ElementType::ConnectingBond
                }
            },
        };
        let stroke = match fields.get("stroke") {
            Some(("junction", _)) => Some(true),
            Some(("element", _)) => Some(false),
            Some((v, col)) => {
                self.err(RuleId::Rule(4), no, *col, format!("bond {label}: stroke must be junction or element, got '{v}'"));
                None
            }
            None => {
                self.err(RuleId::Rule(4), no, head_col, format!("bond {label}: stroke= is required"));
                None
            }
        };
        let toward = stroke.unwrap_or_else(|| {
            ok = false;
            true
        });
        if let (Some((kw @ ("se" | "sf"), col)), Some(t)) = (fields.get("element"), stroke) {
            let want = *kw == "se";
            if t != want {
                let need = if want { "junction" } else { "element" };
                self.err(RuleId::Rule(4), no, *col, format!("bond {label}: {kw} requires stroke={need}"));
                ok = false;
            }
        }
        let power = match fields.get("power") {
            Some(("in", _)) => PowerDirection::IN,
            Some(("out", _)) => PowerDirection::OUT,
            Some((v, col)) => {
                self.err(RuleId::Rule(5), no, *col, format!("bond {label}: power must be in or out, got '{v}'"));
                ok = false;
                PowerDirection::IN
            }
            None => {
                self.err(RuleId::Rule(5), no, head_col, format!("bond {label}: power= is required"));
                ok = false;
                PowerDirection::IN
            }
        };
        let causality = Causality { stroke_toward_junction: toward };
        let mut bond = Bond::new(label, element, causality, power);
        if let Some((v, col)) = fields.get("branch") {
            match v.parse::<u32>() {
                Ok(l) if l > 0 => bond.branch = BranchRef::to(l),
                _ => {
                    self.err(RuleId::Rule(9), no, *col, format!("bond {label}: branch= must name a bond label"));
                    ok = false;
                }
            }
        }
        match fields.get("modulus") {
            Some((v, col)) => {
                let inner = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(v);
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 2 || parts.iter().any(|p| p.trim().is_empty()) {
                    self.err(RuleId::Rule(6), no, *col, format!("bond {label}: modulus arity must be 2"));
                    ok = false;
                } else {
                    match (ParamExpr::parse(parts[0]), ParamExpr::parse(parts[1])) {
                        (Ok(e), Ok(f)) => bond.modulus = Modulus::new(e, f),
                        (Err(e), _) | (_, Err(e)) => {
                            self.err(RuleId::Rule(6), no, *col, format!("bond {label}: bad modulus expression: {e}"));
                            ok = false;
                        }
                    }
                }
            }
            None if matches!(element, ElementType::Transformer | ElementType::Gyrator) => {
                self.err(RuleId::Rule(6), no, head_col, format!("bond {label}: {element} bond requires modulus="));
                ok = false;
            }
            None => {}
        }
        if let Some((v, col)) = fields.get("param") {
            if is_identifier(v) {
                bond.param = Some(v.to_string());
            } else {
                self.err(RuleId::Schema, no, *col, format!("bond {label}: invalid parameter name '{v}'"));
                ok = false;
            }
        }
        for (key, slot) in [("p0", &mut bond.p0), ("q0", &mut bond.q0)] {
            if let Some((v, col)) = fields.get(key) {
                match parse_rational(v) {
                    Some(r) => *slot = r,
                    None => {
                        self.diags.push(
                            Diagnostic::error(RuleId::Schema, format!("bond {label}: {key} must be rational")).at(no, *col),
                        );
                        ok = false;
                    }
                }
            }
        }
        if ok {
            self.lines.insert(label, (no, toks[1].col));
            if let Some(j) = self.junction.as_mut() {
                j.bonds.push(bond);
            }
        }
    }
}

/// Parses the line-oriented model language and validates the result.
pub fn parse(text: &str) -> ParseReport {
    let mut p = Parser {
        model: BondGraphModel::default(),
        diags: Vec::new(),
        branch: None,
        junction: None,
        graph_seen: false,
        graph_closed: false,
        lines: BTreeMap::new(),
    };
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let toks = tokens(strip_comment(raw));
        last_line = i + 1;
        if !toks.is_empty() {
            p.line(i + 1, &toks);
        }
    }
    if p.junction.is_some() || p.branch.is_some() {
        p.err(RuleId::Rule(8), last_line, 1, "unterminated block: every junction and branch needs an end");
        p.close_branch();
    }
    if !p.graph_seen {
        p.err(RuleId::Schema, 1, 1, "empty model");
    }
    if !p.diags.iter().any(Diagnostic::is_error) {
        for d in validate_labels(&p.model) {
            let (line, col) = d.label.and_then(|l| p.lines.get(&l).copied()).unwrap_or((0, 0));
            p.diags.push(d.at(line, col));
        }
    }
    ParseReport::finish(p.model, p.diags)
}

fn element_keyword(b: &Bond) -> &'static str {
    match b.element {
        ElementType::ConnectingBond => "bond",
        ElementType::Source if b.causality.stroke_toward_junction => "se",
        ElementType::Source => "sf",
        ElementType::Inertance => "i",
        ElementType::Compliance => "c",
        ElementType::Resistor => "r",
        ElementType::Transformer => "tf",
        ElementType::Gyrator => "gy",
    }
}

/// Canonical text form; `parse` reads it back to an identical model.
pub fn print_dsl(model: &BondGraphModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph \"{}\"", model.name);
    for (name, value) in &model.parameters {
        match value {
            Some(v) => _ = writeln!(s, "param {name} = {}", format_rational(v)),
            None => _ = writeln!(s, "param {name}"),
        }
    }
    for branch in &model.branches {
        let _ = writeln!(s, "branch {}", branch.id);
        for j in &branch.junctions {
            let _ = writeln!(s, "  junction {} kind={}", j.number, u8::from(j.kind.as_bool()));
            for b in &j.bonds {
                let _ = write!(
                    s,
                    "    bond {} element={} stroke={} power={}",
                    b.label,
                    element_keyword(b),
                    if b.causality.stroke_toward_junction { "junction" } else { "element" },
                    if b.direction.toward_junction { "in" } else { "out" },
                );
                if b.branch.present {
                    let _ = write!(s, " branch={}", b.branch.common_bond_label);
                }
                if !b.modulus.is_unit() || matches!(b.element, ElementType::Transformer | ElementType::Gyrator) {
                    let _ = write!(s, " modulus={},{}", b.modulus.effort_modulus, b.modulus.flow_modulus);
                }
                if let Some(p) = &b.param {
                    let _ = write!(s, " param={p}");
                }
                if !num::Zero::is_zero(&b.p0) {
                    let _ = write!(s, " p0={}", format_rational(&b.p0));
                }
                if !num::Zero::is_zero(&b.q0) {
                    let _ = write!(s, " q0={}", format_rational(&b.q0));
                }
                s.push('\n');
            }
            s.push_str("  end\n");
        }
        s.push_str("end\n");
    }
    s
}
