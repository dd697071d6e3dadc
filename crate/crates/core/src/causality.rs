//! Strong bonds and causal completeness.

use std::collections::BTreeMap;

use crate::constitutive::is_integral;
use crate::model::{Bond, BondGraphModel, ElementType, Junction};

/// Highest 1-based position whose stroke orientation equals `toward`.
pub fn strong_bond(junction: &Junction, toward: bool) -> Option<usize> {
    junction
        .bonds
        .iter()
        .rposition(|b| b.causality.stroke_toward_junction == toward)
        .map(|i| i + 1)
}

/// Zero-based index of the bond that fixes the junction's common variable.
pub fn strong_index(junction: &Junction) -> Option<usize> {
    strong_bond(junction, junction.kind.strong_stroke()).map(|p| p - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CausalityReport {
    pub complete: bool,
    /// Keyed by (branch id, junction number).
    pub strong_bonds: BTreeMap<(u32, u32), Option<u32>>,
    pub differential_storage_bonds: Vec<u32>,
    pub violations: Vec<String>,
}

impl CausalityReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.complete { "causality: complete\n" } else { "causality: incomplete\n" });
        for ((b, j), s) in &self.strong_bonds {
            match s {
                Some(l) => out.push_str(&format!("strong(j={b}{j}): {l}\n")),
                None => out.push_str(&format!("strong(j={b}{j}): none\n")),
            }
        }
        for l in &self.differential_storage_bonds {
            out.push_str(&format!("differential storage: {l}\n"));
        }
        for v in &self.violations {
            out.push_str(&format!("violation: {v}\n"));
        }
        out
    }
}

fn link_consistent(x: &Bond, y: &Bond) -> bool {
    let same = x.causality == y.causality;
    if x.element == ElementType::Gyrator {
        same
    } else {
        !same
    }
}

fn check_link(x: &Bond, y: &Bond, violations: &mut Vec<String>) {
    if !link_consistent(x, y) {
        violations.push(format!("bonds {} and {}: causal strokes disagree across the link", x.label, y.label));
    }
    if x.direction == y.direction {
        violations.push(format!("bonds {} and {}: power directions disagree across the link", x.label, y.label));
    }
}

pub fn check_causal_completeness(model: &BondGraphModel) -> CausalityReport {
    let mut report = CausalityReport::default();
    for branch in &model.branches {
        for (i, j) in branch.junctions.iter().enumerate() {
            let want = j.kind.strong_stroke();
            let strong: Vec<&Bond> = j.bonds.iter().filter(|b| b.causality.stroke_toward_junction == want).collect();
            let what = match j.kind {
                crate::model::JunctionKind::One => "flow",
                crate::model::JunctionKind::Zero => "effort",
            };
            match strong.len() {
                1 => {}
                0 => report
                    .violations
                    .push(format!("junction {} of branch {}: no bond determines the {what}", j.number, branch.id)),
                n => report.violations.push(format!(
                    "junction {} of branch {}: {n} {what}-determining bonds ({})",
                    j.number,
                    branch.id,
                    strong.iter().map(|b| b.label.to_string()).collect::<Vec<_>>().join(", ")
                )),
            }
            report.strong_bonds.insert((branch.id, j.number), (strong.len() == 1).then(|| strong[0].label));
            for b in &j.bonds {
                if b.element.is_storage() && !is_integral(b) {
                    report.differential_storage_bonds.push(b.label);
                }
            }
            if let Some(next) = branch.junctions.get(i + 1) {
                if j.bonds.len() >= 2 && next.bonds.len() >= 2 {
                    let x = &j.bonds[j.bonds.len() - 1];
                    let y = &next.bonds[next.bonds.len() - 2];
                    check_link(x, y, &mut report.violations);
                }
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for b in model.bonds().filter(|b| b.branch.present) {
        if !seen.insert(b.branch.common_bond_label) {
            continue;
        }
        let pair: Vec<&Bond> = model
            .bonds()
            .filter(|o| o.branch.present && o.branch.common_bond_label == b.branch.common_bond_label)
            .collect();
        if pair.len() == 2 {
            check_link(pair[0], pair[1], &mut report.violations);
        }
    }
    report.complete = report.violations.is_empty();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Causality, JunctionKind, PowerDirection};

    fn junction(strokes: &[bool]) -> Junction {
        Junction {
            number: 1,
            kind: JunctionKind::One,
            bonds: strokes
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let c = if *t { Causality::TOWARD } else { Causality::AWAY };
                    Bond::new(111 + i as u32, ElementType::Resistor, c, PowerDirection::OUT)
                })
                .collect(),
        }
    }

    #[test]
    fn scan_from_top() {
        assert_eq!(strong_bond(&junction(&[true, false, true, true]), false), Some(2));
        assert_eq!(strong_bond(&junction(&[true, true, true]), true), Some(3));
        assert_eq!(strong_bond(&junction(&[true, true, true]), false), None);
        assert_eq!(strong_index(&junction(&[true, false, true])), Some(1));
    }
}
