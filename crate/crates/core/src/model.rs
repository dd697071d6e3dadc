//! Bond-graph model: branches of junctions of bonds.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::expr::ParamExpr;
use crate::signal::{SignalKind, SignalVar};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementType {
    ConnectingBond = 0,
    Source = 1,
    Inertance = 2,
    Compliance = 3,
    Resistor = 4,
    Transformer = 5,
    Gyrator = 6,
}

impl ElementType {
    pub const ALL: [ElementType; 7] = [
        ElementType::ConnectingBond,
        ElementType::Source,
        ElementType::Inertance,
        ElementType::Compliance,
        ElementType::Resistor,
        ElementType::Transformer,
        ElementType::Gyrator,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u64) -> Option<Self> {
        Self::ALL.get(usize::try_from(code).ok()?).copied()
    }

    /// Two-port or connector: carries a link to a neighbouring junction.
    pub fn is_link(self) -> bool {
        matches!(self, ElementType::ConnectingBond | ElementType::Transformer | ElementType::Gyrator)
    }

    pub fn is_storage(self) -> bool {
        matches!(self, ElementType::Inertance | ElementType::Compliance)
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementType::ConnectingBond => "bond",
            ElementType::Source => "source",
            ElementType::Inertance => "i",
            ElementType::Compliance => "c",
            ElementType::Resistor => "r",
            ElementType::Transformer => "tf",
            ElementType::Gyrator => "gy",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Causality {
    pub stroke_toward_junction: bool,
}

impl Causality {
    pub const TOWARD: Causality = Causality { stroke_toward_junction: true };
    pub const AWAY: Causality = Causality { stroke_toward_junction: false };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PowerDirection {
    pub toward_junction: bool,
}

impl PowerDirection {
    pub const IN: PowerDirection = PowerDirection { toward_junction: true };
    pub const OUT: PowerDirection = PowerDirection { toward_junction: false };

    /// +1 for power flowing into the junction, -1 otherwise.
    pub fn sign(self) -> i64 {
        if self.toward_junction {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BranchRef {
    pub present: bool,
    pub common_bond_label: u32,
}

impl BranchRef {
    pub const NONE: BranchRef = BranchRef { present: false, common_bond_label: 0 };

    pub fn to(label: u32) -> Self {
        BranchRef { present: true, common_bond_label: label }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub effort_modulus: ParamExpr,
    pub flow_modulus: ParamExpr,
}

impl Modulus {
    pub fn unit() -> Self {
        Modulus { effort_modulus: ParamExpr::one(), flow_modulus: ParamExpr::one() }
    }

    pub fn new(effort_modulus: ParamExpr, flow_modulus: ParamExpr) -> Self {
        Modulus { effort_modulus, flow_modulus }
    }

    pub fn is_unit(&self) -> bool {
        self.effort_modulus.is_one() && self.flow_modulus.is_one()
    }
}

impl Default for Modulus {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    pub label: u32,
    pub causality: Causality,
    pub direction: PowerDirection,
    pub branch: BranchRef,
    pub element: ElementType,
    pub modulus: Modulus,
    pub param: Option<String>,
    pub p0: Rational,
    pub q0: Rational,
}

impl Bond {
    pub fn new(label: u32, element: ElementType, causality: Causality, direction: PowerDirection) -> Self {
        Bond {
            label,
            causality,
            direction,
            branch: BranchRef::NONE,
            element,
            modulus: Modulus::unit(),
            param: None,
            p0: Rational::zero(),
            q0: Rational::zero(),
        }
    }

    pub fn with_param(mut self, name: &str) -> Self {
        self.param = Some(name.to_string());
        self
    }

    pub fn with_modulus(mut self, m: Modulus) -> Self {
        self.modulus = m;
        self
    }

    pub fn with_branch(mut self, label: u32) -> Self {
        self.branch = BranchRef::to(label);
        self
    }

    pub fn effort(&self) -> SignalVar {
        SignalVar::new(SignalKind::Effort, self.label)
    }

    pub fn flow(&self) -> SignalVar {
        SignalVar::new(SignalKind::Flow, self.label)
    }

    pub fn signal(&self, kind: SignalKind) -> SignalVar {
        SignalVar::new(kind, self.label)
    }

    pub fn position(&self) -> u32 {
        self.label % 10
    }

    /// Modulus entry picked by the stroke: flow modulus when the stroke faces the junction.
    pub fn modulus_select(&self) -> &ParamExpr {
        if self.causality.stroke_toward_junction {
            &self.modulus.flow_modulus
        } else {
            &self.modulus.effort_modulus
        }
    }

    pub fn sign(&self) -> i64 {
        self.direction.sign()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JunctionKind {
    /// Common effort, flows sum to zero.
    Zero,
    /// Common flow, efforts sum to zero.
    One,
}

impl JunctionKind {
    pub fn from_bool(one: bool) -> Self {
        if one {
            JunctionKind::One
        } else {
            JunctionKind::Zero
        }
    }

    pub fn as_bool(self) -> bool {
        self == JunctionKind::One
    }

    pub fn common(self) -> SignalKind {
        match self {
            JunctionKind::Zero => SignalKind::Effort,
            JunctionKind::One => SignalKind::Flow,
        }
    }

    pub fn summed(self) -> SignalKind {
        match self {
            JunctionKind::Zero => SignalKind::Flow,
            JunctionKind::One => SignalKind::Effort,
        }
    }

    /// Stroke orientation of the bond that fixes the common variable.
    pub fn strong_stroke(self) -> bool {
        self == JunctionKind::Zero
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Junction {
    pub number: u32,
    pub kind: JunctionKind,
    pub bonds: Vec<Bond>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub id: u32,
    pub junctions: Vec<Junction>,
}

/// Zero-based location of a bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BondLoc {
    pub branch: usize,
    pub junction: usize,
    pub bond: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BondGraphModel {
    pub name: String,
    pub parameters: BTreeMap<String, Option<Rational>>,
    pub branches: Vec<Branch>,
}

impl BondGraphModel {
    pub fn locations(&self) -> impl Iterator<Item = BondLoc> + '_ {
        self.branches.iter().enumerate().flat_map(|(b, br)| {
            br.junctions.iter().enumerate().flat_map(move |(j, jn)| {
                (0..jn.bonds.len()).map(move |k| BondLoc { branch: b, junction: j, bond: k })
            })
        })
    }

    pub fn bonds(&self) -> impl Iterator<Item = &Bond> + '_ {
        self.branches.iter().flat_map(|b| b.junctions.iter().flat_map(|j| j.bonds.iter()))
    }

    pub fn bond(&self, loc: BondLoc) -> &Bond {
        &self.branches[loc.branch].junctions[loc.junction].bonds[loc.bond]
    }

    pub fn junction(&self, loc: BondLoc) -> &Junction {
        &self.branches[loc.branch].junctions[loc.junction]
    }

    pub fn find(&self, label: u32) -> Option<BondLoc> {
        self.locations().find(|l| self.bond(*l).label == label)
    }

    pub fn junction_count(&self) -> usize {
        self.branches.iter().map(|b| b.junctions.len()).sum()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds().count()
    }

    /// Default values of all parameters, if each one has one.
    pub fn default_bindings(&self) -> BTreeMap<String, Rational> {
        self.parameters.iter().filter_map(|(k, v)| Some((k.clone(), v.clone()?))).collect()
    }
}
