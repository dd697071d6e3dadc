use std::collections::{BTreeMap, BTreeSet};

use super::{Diagnostic, RuleId};
use crate::model::{Bond, BondGraphModel, ElementType};
use crate::ratfunc::RatFunc;

fn rule(n: u8, label: u32, msg: String) -> Diagnostic {
    Diagnostic::error(RuleId::Rule(n), msg).on(label)
}

fn product_is_one(a: &crate::ParamExpr, b: &crate::ParamExpr) -> bool {
    match (RatFunc::from_expr(a), RatFunc::from_expr(b)) {
        (Ok(x), Ok(y)) => x.mul(&y).is_one(),
        _ => false,
    }
}

fn check_bond(b: &Bond, declared: &BTreeSet<&str>, out: &mut Vec<Diagnostic>) {
    let needs_param = matches!(b.element, ElementType::Inertance | ElementType::Compliance | ElementType::Resistor);
    match (&b.param, needs_param) {
        (None, true) => out.push(rule(3, b.label, format!("bond {}: element {} needs param=", b.label, b.element))),
        (Some(_), false) if b.element.is_link() => {
            out.push(rule(3, b.label, format!("bond {}: element {} takes no parameter", b.label, b.element)))
        }
        _ => {}
    }
    if let Some(p) = &b.param {
        if !declared.contains(p.as_str()) {
            out.push(Diagnostic::error(RuleId::Schema, format!("bond {}: undeclared parameter {p}", b.label)).on(b.label));
        }
    }
    for e in [&b.modulus.effort_modulus, &b.modulus.flow_modulus] {
        for p in e.params() {
            if !declared.contains(p.as_str()) {
                out.push(
                    Diagnostic::error(RuleId::Schema, format!("bond {}: undeclared parameter {p}", b.label)).on(b.label),
                );
            }
        }
    }
    match b.element {
        ElementType::Transformer | ElementType::Gyrator => {
            if !product_is_one(&b.modulus.effort_modulus, &b.modulus.flow_modulus) {
                out.push(rule(6, b.label, format!("bond {}: modulus entries are not reciprocal", b.label)));
            }
        }
        _ => {
            if !b.modulus.is_unit() {
                out.push(rule(6, b.label, format!("bond {}: only tf and gy bonds carry a modulus", b.label)));
            }
        }
    }
    if !b.branch.present && b.branch.common_bond_label != 0 {
        out.push(rule(9, b.label, format!("bond {}: absent branch reference must be 0", b.label)));
    }
}

/// Checks the two bonds of a link or a branch pair for matching type and reciprocal moduli.
fn check_pair(x: &Bond, y: &Bond, what: &str, out: &mut Vec<Diagnostic>) {
    if x.element != y.element {
        out.push(rule(1, x.label, format!("{what} {}-{}: element types differ ({} vs {})", x.label, y.label, x.element, y.element)));
        return;
    }
    let (mx, my) = (&x.modulus, &y.modulus);
    let ok = match x.element {
        ElementType::Gyrator => {
            product_is_one(&mx.effort_modulus, &my.flow_modulus) && product_is_one(&mx.flow_modulus, &my.effort_modulus)
        }
        _ => product_is_one(&mx.effort_modulus, &my.effort_modulus) && product_is_one(&mx.flow_modulus, &my.flow_modulus),
    };
    if !ok {
        out.push(rule(6, x.label, format!("{what} {}-{}: moduli are not reciprocal", x.label, y.label)));
    }
}

/// Structural checks on labels, connector placement, junction numbering and cross-branch references.
pub fn validate_labels(model: &BondGraphModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let declared: BTreeSet<&str> = model.parameters.keys().map(String::as_str).collect();
    let mut seen_labels: BTreeMap<u32, usize> = BTreeMap::new();
    let mut branch_ids = BTreeSet::new();
    if model.branches.is_empty() {
        out.push(Diagnostic::error(RuleId::Rule(8), "model has no branches"));
    }
    for branch in &model.branches {
        if !branch_ids.insert(branch.id) {
            out.push(Diagnostic::error(RuleId::Rule(8), format!("branch {} declared twice", branch.id)));
        }
        if branch.junctions.is_empty() {
            out.push(Diagnostic::error(RuleId::Rule(8), format!("branch {} has no junctions", branch.id)));
        }
        let mut numbers = BTreeSet::new();
        let n = branch.junctions.len();
        for (i, j) in branch.junctions.iter().enumerate() {
            if !numbers.insert(j.number) {
                out.push(Diagnostic::error(
                    RuleId::Rule(8),
                    format!("junction number {} repeated in branch {}", j.number, branch.id),
                ));
            }
            if j.bonds.len() < 3 {
                out.push(Diagnostic::error(
                    RuleId::Rule(1),
                    format!("junction {} of branch {} has fewer than three bonds", j.number, branch.id),
                ));
            }
            let expect = format!("{}{}", branch.id, j.number);
            for (k, b) in j.bonds.iter().enumerate() {
                *seen_labels.entry(b.label).or_default() += 1;
                if seen_labels[&b.label] == 2 {
                    out.push(rule(2, b.label, format!("duplicate bond label {}", b.label)));
                }
                let prefix = (b.label / 10).to_string();
                if prefix != expect {
                    let msg = if prefix.starts_with(&branch.id.to_string()) {
                        format!("label/junction mismatch: bond {} in junction {}", b.label, j.number)
                    } else {
                        format!("label/branch mismatch: bond {} in branch {}", b.label, branch.id)
                    };
                    out.push(rule(2, b.label, msg));
                }
                if (b.label % 10) as usize != k + 1 {
                    out.push(rule(2, b.label, format!("label/position mismatch: bond {} listed at position {}", b.label, k + 1)));
                }
                check_bond(b, &declared, &mut out);
                let m = j.bonds.len();
                let link_slot = (i > 0 && k + 2 == m) || (i + 1 < n && k + 1 == m);
                if link_slot && (!b.element.is_link() || b.branch.present) {
                    out.push(rule(1, b.label, format!("bond {}: the final bonds of a junction must link to its neighbours", b.label)));
                }
                if !link_slot && b.element.is_link() && !b.branch.present {
                    out.push(rule(1, b.label, format!("bond {}: connector must be listed last", b.label)));
                }
            }
            if let Some(next) = branch.junctions.get(i + 1) {
                if j.bonds.len() >= 3 && next.bonds.len() >= 3 {
                    let x = &j.bonds[j.bonds.len() - 1];
                    let y = &next.bonds[next.bonds.len() - 2];
                    if x.element.is_link() && y.element.is_link() {
                        check_pair(x, y, "link", &mut out);
                    }
                }
            }
        }
    }
    let bonds: Vec<&Bond> = model.bonds().collect();
    let mut groups: BTreeMap<u32, Vec<&Bond>> = BTreeMap::new();
    for b in bonds.iter().filter(|b| b.branch.present) {
        groups.entry(b.branch.common_bond_label).or_default().push(b);
    }
    for (common, members) in groups {
        if !bonds.iter().any(|b| b.label == common) {
            for b in &members {
                out.push(rule(9, b.label, format!("bond {}: dangling branch reference {common}", b.label)));
            }
            continue;
        }
        if members.len() != 2 || !members.iter().any(|b| b.label == common) {
            out.push(rule(
                9,
                members[0].label,
                format!("branch reference {common} must join exactly two bonds, one of them labelled {common}"),
            ));
            continue;
        }
        if !members[0].element.is_link() {
            out.push(rule(9, members[0].label, format!("branch bonds on {common} must be connectors")));
            continue;
        }
        check_pair(members[0], members[1], "branch pair", &mut out);
    }
    out
}
