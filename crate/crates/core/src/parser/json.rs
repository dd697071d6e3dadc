use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{validate_labels, Diagnostic, ParseReport, RuleId};
use crate::expr::{format_rational, parse_rational, ParamExpr};
use crate::model::{
    Bond, BondGraphModel, Branch, BranchRef, Causality, ElementType, Junction, JunctionKind, Modulus, PowerDirection,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    name: String,
    parameters: BTreeMap<String, Option<String>>,
    branches: Vec<BranchDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchDoc {
    id: u32,
    junctions: Vec<JunctionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JunctionDoc {
    number: u32,
    kind: bool,
    bonds: Vec<BondDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchRefDoc {
    present: bool,
    common: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BondDoc {
    label: u32,
    causality: bool,
    direction: bool,
    branch: BranchRefDoc,
    element: u64,
    modulus: Vec<String>,
    param: Option<String>,
    p0: String,
    q0: String,
}

pub fn to_json(model: &BondGraphModel) -> String {
    let doc = ModelDoc {
        name: model.name.clone(),
        parameters: model.parameters.iter().map(|(k, v)| (k.clone(), v.as_ref().map(format_rational))).collect(),
        branches: model
            .branches
            .iter()
            .map(|b| BranchDoc {
                id: b.id,
                junctions: b
                    .junctions
                    .iter()
                    .map(|j| JunctionDoc {
                        number: j.number,
                        kind: j.kind.as_bool(),
                        bonds: j
                            .bonds
                            .iter()
                            .map(|b| BondDoc {
                                label: b.label,
                                causality: b.causality.stroke_toward_junction,
                                direction: b.direction.toward_junction,
                                branch: BranchRefDoc { present: b.branch.present, common: b.branch.common_bond_label },
                                element: u64::from(b.element.code()),
                                modulus: vec![b.modulus.effort_modulus.to_string(), b.modulus.flow_modulus.to_string()],
                                param: b.param.clone(),
                                p0: format_rational(&b.p0),
                                q0: format_rational(&b.q0),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

fn schema(msg: String) -> Diagnostic {
    Diagnostic::error(RuleId::Schema, msg)
}

fn bond_from_doc(d: BondDoc, diags: &mut Vec<Diagnostic>) -> Option<Bond> {
    let label = d.label;
    let Some(element) = ElementType::from_code(d.element) else {
        diags.push(schema(format!("bond {label}: element code {} is outside 0..6", d.element)).on(label));
        return None;
    };
    if d.modulus.len() != 2 {
        diags.push(Diagnostic::error(RuleId::Rule(6), format!("bond {label}: modulus arity must be 2")).on(label));
        return None;
    }
    let modulus = match (ParamExpr::parse(&d.modulus[0]), ParamExpr::parse(&d.modulus[1])) {
        (Ok(e), Ok(f)) => Modulus::new(e, f),
        (Err(e), _) | (_, Err(e)) => {
            diags.push(Diagnostic::error(RuleId::Rule(6), format!("bond {label}: bad modulus: {e}")).on(label));
            return None;
        }
    };
    let (Some(p0), Some(q0)) = (parse_rational(&d.p0), parse_rational(&d.q0)) else {
        diags.push(schema(format!("bond {label}: p0 and q0 must be rationals")).on(label));
        return None;
    };
    if !d.branch.present && d.branch.common != 0 {
        diags.push(Diagnostic::error(RuleId::Rule(9), format!("bond {label}: absent branch must have common = 0")).on(label));
        return None;
    }
    Some(Bond {
        label,
        causality: Causality { stroke_toward_junction: d.causality },
        direction: PowerDirection { toward_junction: d.direction },
        branch: BranchRef { present: d.branch.present, common_bond_label: d.branch.common },
        element,
        modulus,
        param: d.param,
        p0,
        q0,
    })
}

pub fn from_json(text: &str) -> ParseReport {
    let doc: ModelDoc = match serde_json::from_str(text) {
        Ok(d) => d,
        Err(e) => {
            let d = schema(format!("malformed model document: {e}")).at(e.line(), e.column());
            return ParseReport { model: None, diagnostics: vec![d] };
        }
    };
    let mut diags = Vec::new();
    let mut parameters = BTreeMap::new();
    for (k, v) in doc.parameters {
        let value = match v {
            None => None,
            Some(s) => match parse_rational(&s) {
                Some(r) => Some(r),
                None => {
                    diags.push(schema(format!("parameter {k}: '{s}' is not a rational")));
                    None
                }
            },
        };
        parameters.insert(k, value);
    }
    let branches = doc
        .branches
        .into_iter()
        .map(|b| Branch {
            id: b.id,
            junctions: b
                .junctions
                .into_iter()
                .map(|j| Junction {
                    number: j.number,
                    kind: JunctionKind::from_bool(j.kind),
                    bonds: j.bonds.into_iter().filter_map(|d| bond_from_doc(d, &mut diags)).collect(),
                })
                .collect(),
        })
        .collect();
    let model = BondGraphModel { name: doc.name, parameters, branches };
    if diags.is_empty() {
        diags.extend(validate_labels(&model));
    }
    ParseReport::finish(model, diags)
}
