//! Junction laws and causal path traversal.

use std::cell::Cell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::causality::{check_causal_completeness, strong_index};
use crate::constitutive::{constitutive_equation, derivative_law, ConstitutiveError};
use crate::equation::{Equation, Provenance};
use crate::linform::LinearForm;
use crate::model::{Bond, BondGraphModel, BondLoc, Branch, ElementType, Junction, JunctionKind};
use crate::ratfunc::RatFunc;
use crate::signal::{SignalKind, SignalVar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("model has no branches")]
    EmptyModel,
    #[error("model is not causally complete: {0}")]
    Incomplete(String),
    #[error("position {0} is out of range or repeated")]
    Position(usize),
    #[error("junction {0} has fewer than three bonds")]
    TooFewBonds(u32),
    #[error("causal conflict at bond {0}")]
    CausalConflict(u32),
    #[error("path recursion exceeded {0} junctions")]
    RecursionLimit(usize),
    #[error("no junction numbered {0} in the branch")]
    JunctionMatch(u32),
    #[error("bond {label}: no case covers ({kind:?}, {element}, stroke toward junction = {stroke})")]
    Uncovered { label: u32, kind: JunctionKind, element: ElementType, stroke: bool },
    #[error("bond {0}: no partner bond shares its branch label")]
    PartnerNotFound(u32),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Prev,
    Next,
}

/// Variable value produced by a path, together with the kind it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathValue {
    pub kind: SignalKind,
    pub form: LinearForm,
}

fn sign(b: &Bond) -> RatFunc {
    RatFunc::from_int(b.sign())
}

fn modulus_of(b: &Bond, kind: SignalKind) -> RatFunc {
    let m = match kind {
        SignalKind::Effort => &b.modulus.effort_modulus,
        _ => &b.modulus.flow_modulus,
    };
    RatFunc::from_expr(m).expect("modulus has a nonzero denominator")
}

/// Modulus entry chosen by the bond's stroke.
pub fn modulus_select(b: &Bond) -> RatFunc {
    RatFunc::from_expr(b.modulus_select()).expect("modulus has a nonzero denominator")
}

/// `e_k1 = e_k2` on a 0-junction, `f_k1 = f_k2` on a 1-junction (1-based positions).
pub fn equality_law(junction: &Junction, k1: usize, k2: usize) -> Result<Equation, DeriveError> {
    let n = junction.bonds.len();
    for k in [k1, k2] {
        if k == 0 || k > n {
            return Err(DeriveError::Position(k));
        }
    }
    if k1 == k2 {
        return Err(DeriveError::Position(k1));
    }
    let kind = junction.kind.common();
    let a = junction.bonds[k1 - 1].signal(kind);
    let b = junction.bonds[k2 - 1].signal(kind);
    Ok(Equation::define(a, LinearForm::var(b), Provenance::EqualityLaw))
}

/// Signed sum of the summed variable over every bond except the final two.
pub fn summation_core(junction: &Junction) -> Result<LinearForm, DeriveError> {
    let n = junction.bonds.len();
    if n < 3 {
        return Err(DeriveError::TooFewBonds(junction.number));
    }
    let kind = junction.kind.summed();
    let mut f = LinearForm::zero();
    for b in &junction.bonds[..n - 2] {
        f.add_term(&sign(b), b.signal(kind));
    }
    Ok(f)
}

/// Path traversal along one branch.
pub struct PathEngine<'a> {
    model: &'a BondGraphModel,
    branch: &'a Branch,
    depth: Cell<usize>,
    max_depth: Cell<usize>,
}

impl<'a> PathEngine<'a> {
    pub fn new(model: &'a BondGraphModel, branch: usize) -> Self {
        PathEngine { model, branch: &model.branches[branch], depth: Cell::new(0), max_depth: Cell::new(0) }
    }

    pub fn model(&self) -> &BondGraphModel {
        self.model
    }

    /// Deepest chain of junction hops seen so far.
    pub fn max_depth(&self) -> usize {
        self.max_depth.get()
    }

    fn junctions(&self) -> &[Junction] {
        &self.branch.junctions
    }

    fn last_index(&self) -> usize {
        self.junctions().len() - 1
    }

    fn strong(&self, i: usize) -> Result<usize, DeriveError> {
        let j = &self.junctions()[i];
        strong_index(j).ok_or(DeriveError::Incomplete(format!("junction {} has no strong bond", j.number)))
    }

    /// Index of the link bond on `side` of junction `i`, if there is a neighbour there.
    pub fn link_slot(&self, i: usize, side: Side) -> Option<usize> {
        let n = self.junctions()[i].bonds.len();
        match side {
            Side::Prev if i > 0 => Some(n - 2),
            Side::Next if i < self.last_index() => Some(n - 1),
            _ => None,
        }
    }

    fn slot_side(&self, i: usize, k: usize) -> Option<Side> {
        if self.link_slot(i, Side::Prev) == Some(k) {
            Some(Side::Prev)
        } else if self.link_slot(i, Side::Next) == Some(k) {
            Some(Side::Next)
        } else {
            None
        }
    }

    /// Value of the `kind` variable of the link on `side` of junction `i`, read off the neighbour.
    pub fn across(&self, i: usize, side: Side, kind: SignalKind) -> Result<PathValue, DeriveError> {
        let depth = self.depth.get() + 1;
        if depth > self.junctions().len() {
            return Err(DeriveError::RecursionLimit(self.junctions().len()));
        }
        self.depth.set(depth);
        self.max_depth.set(self.max_depth.get().max(depth));
        let out = self.across_inner(i, side, kind);
        self.depth.set(depth - 1);
        out
    }

    fn across_inner(&self, i: usize, side: Side, kind: SignalKind) -> Result<PathValue, DeriveError> {
        let x_slot = self.link_slot(i, side).ok_or(DeriveError::Position(i))?;
        let x = &self.junctions()[i].bonds[x_slot];
        let (far, back) = match side {
            Side::Prev => (i - 1, Side::Next),
            Side::Next => (i + 1, Side::Prev),
        };
        let y_slot = self.link_slot(far, back).ok_or(DeriveError::Position(far))?;
        let y = &self.junctions()[far].bonds[y_slot];
        let ky = if x.element == ElementType::Gyrator { kind.dual() } else { kind };
        let m = modulus_of(y, ky);
        let inner = self.at_link(far, y_slot, ky)?;
        debug_assert_eq!(inner.kind, ky);
        debug_assert_eq!(m, modulus_select(y), "modulus choice disagrees with the stroke of bond {}", y.label);
        Ok(PathValue { kind, form: inner.form.scale(&m) })
    }

    /// Value of the `kind` variable of bond `y` at junction `f`, as fixed by that junction.
    fn at_link(&self, f: usize, y: usize, kind: SignalKind) -> Result<PathValue, DeriveError> {
        let j = &self.junctions()[f];
        let s = self.strong(f)?;
        let label = j.bonds[y].label;
        if kind == j.kind.common() {
            if s == y {
                return Err(DeriveError::CausalConflict(label));
            }
            return match self.slot_side(f, s) {
                Some(side) => self.across(f, side, kind),
                None => Ok(PathValue { kind, form: LinearForm::var(j.bonds[s].signal(kind)) }),
            };
        }
        if s != y {
            return Err(DeriveError::CausalConflict(label));
        }
        let mut sum = LinearForm::zero();
        for (k, b) in j.bonds.iter().enumerate() {
            if k == y {
                continue;
            }
            let v = match self.slot_side(f, k) {
                Some(side) => self.across(f, side, kind)?.form,
                None => LinearForm::var(b.signal(kind)),
            };
            sum = sum.add(&v.scale(&sign(b)));
        }
        Ok(PathValue { kind, form: sum.scale(&sign(&j.bonds[y]).neg()) })
    }

    /// Summed variable of the previous-link bond of junction `i`, zero for the first junction.
    pub fn backward_path(&self, i: usize) -> Result<LinearForm, DeriveError> {
        if i == 0 {
            return Ok(LinearForm::zero());
        }
        let kind = self.junctions()[i].kind.summed();
        Ok(self.across(i, Side::Prev, kind)?.form)
    }

    /// Maps a position in the reversed junction list back to the forward index by junction number.
    pub fn jun_num_match(&self, i_rev: usize) -> Result<usize, DeriveError> {
        let rev: Vec<&Junction> = self.junctions().iter().rev().collect();
        let number = rev.get(i_rev).ok_or(DeriveError::Position(i_rev))?.number;
        self.junctions().iter().position(|j| j.number == number).ok_or(DeriveError::JunctionMatch(number))
    }

    /// Summed variable of the next-link bond, indexed in the reversed junction list.
    pub fn forward_path(&self, i_rev: usize) -> Result<LinearForm, DeriveError> {
        if i_rev == 0 {
            return Ok(LinearForm::zero());
        }
        let i = self.jun_num_match(i_rev)?;
        let kind = self.junctions()[i].kind.summed();
        Ok(self.across(i, Side::Next, kind)?.form)
    }

    fn rev(&self, i: usize) -> usize {
        self.last_index() - i
    }

    fn signal_at(&self, i: usize, k: usize, kind: SignalKind) -> LinearForm {
        LinearForm::var(self.junctions()[i].bonds[k].signal(kind))
    }

    fn final_backward(&self, i: usize, kind: SignalKind) -> Result<LinearForm, DeriveError> {
        if self.junctions().len() == 1 {
            let n = self.junctions()[i].bonds.len();
            return Ok(self.signal_at(i, n - 2, kind));
        }
        self.backward_path(i)
    }

    fn final_forward(&self, i: usize, kind: SignalKind) -> Result<LinearForm, DeriveError> {
        if self.junctions().len() == 1 {
            let n = self.junctions()[i].bonds.len();
            return Ok(self.signal_at(i, n - 1, kind));
        }
        self.forward_path(self.rev(i))
    }

    /// Contribution of the two link bonds of a middle junction.
    pub fn causal_paths(&self, i: usize) -> Result<LinearForm, DeriveError> {
        let j = &self.junctions()[i];
        let n = j.bonds.len();
        let fwd = self.forward_path(self.rev(i))?.scale(&sign(&j.bonds[n - 1]));
        let bwd = self.backward_path(i)?.scale(&sign(&j.bonds[n - 2]));
        Ok(fwd.add(&bwd))
    }

    /// Contribution of the final two bonds of a first or last junction; zero elsewhere.
    pub fn search_path(&self, i: usize, kind: SignalKind) -> Result<LinearForm, DeriveError> {
        let j = &self.junctions()[i];
        let n = j.bonds.len();
        let (last, snd) = (&j.bonds[n - 1], &j.bonds[n - 2]);
        if i == 0 {
            let own = self.signal_at(i, n - 2, kind).scale(&sign(snd));
            return Ok(own.add(&self.final_forward(i, kind)?.scale(&sign(last))));
        }
        if i == self.last_index() {
            let own = self.signal_at(i, n - 1, kind).scale(&sign(last));
            return Ok(own.add(&self.final_backward(i, kind)?.scale(&sign(snd))));
        }
        Ok(LinearForm::zero())
    }

    pub fn is_side(&self, i: usize) -> bool {
        i == 0 || i == self.last_index()
    }

    /// The complete signed sum of junction `i` with link variables expanded.
    pub fn jun_sum(&self, i: usize) -> Result<LinearForm, DeriveError> {
        let j = &self.junctions()[i];
        let core = summation_core(j)?;
        let rest = if self.is_side(i) { self.search_path(i, j.kind.summed())? } else { self.causal_paths(i)? };
        Ok(core.add(&rest))
    }

    /// Value of the common variable of junction `i`, traced to the bond that fixes it.
    pub fn path_select(&self, i: usize, kind: SignalKind) -> Result<LinearForm, DeriveError> {
        let s = self.strong(i)?;
        match self.slot_side(i, s) {
            Some(side) => Ok(self.across(i, side, kind)?.form),
            None => Ok(self.signal_at(i, s, kind)),
        }
    }

    fn junction_tag(&self, i: usize) -> (u32, u32) {
        (self.branch.id, self.junctions()[i].number)
    }

    /// `sum = 0`, defining the summed variable of bond `k`.
    pub fn junction_sum(&self, i: usize, k: usize) -> Result<Equation, DeriveError> {
        let j = &self.junctions()[i];
        let (b, n) = self.junction_tag(i);
        Ok(Equation {
            target: Some(j.bonds[k].signal(j.kind.summed())),
            ..Equation::new(self.jun_sum(i)?, LinearForm::zero(), Provenance::SummationLaw).at(b, n)
        })
    }

    pub fn junction_sum_der(&self, i: usize, k: usize) -> Result<Equation, DeriveError> {
        Ok(self.junction_sum(i, k)?.differentiated())
    }

    /// The common variable of bond `k` equated with its causal source.
    pub fn path_selection(&self, i: usize, k: usize) -> Result<Equation, DeriveError> {
        let j = &self.junctions()[i];
        let kind = j.kind.common();
        let (b, n) = self.junction_tag(i);
        Ok(Equation::define(j.bonds[k].signal(kind), self.path_select(i, kind)?, Provenance::EqualityLaw).at(b, n))
    }

    pub fn path_selection_der(&self, i: usize, k: usize) -> Result<Equation, DeriveError> {
        Ok(self.path_selection(i, k)?.differentiated())
    }

    pub fn resistive_path_selection(&self, i: usize, k: usize) -> Result<Equation, DeriveError> {
        let j = &self.junctions()[i];
        let toward = j.bonds[k].causality.stroke_toward_junction;
        match (toward, j.kind) {
            (false, JunctionKind::Zero) | (true, JunctionKind::One) => self.path_selection(i, k),
            (false, JunctionKind::One) | (true, JunctionKind::Zero) => self.junction_sum(i, k),
        }
    }
}

/// Equations tying a pair of bonds that share a branch label, oriented by their strokes.
pub fn coupling_equations(x: &Bond, y: &Bond, provenance: Provenance) -> Vec<Equation> {
    let (e, f) = (SignalKind::Effort, SignalKind::Flow);
    let def = |t: &Bond, tk: SignalKind, s: &Bond, sk: SignalKind, m: RatFunc| {
        Equation::define(t.signal(tk), LinearForm::term(m, s.signal(sk)), provenance)
    };
    let toward = x.causality.stroke_toward_junction;
    if x.element == ElementType::Gyrator {
        if toward {
            vec![def(x, e, y, f, modulus_of(y, f)), def(y, e, x, f, modulus_of(x, f))]
        } else {
            vec![def(x, f, y, e, modulus_of(y, e)), def(y, f, x, e, modulus_of(x, e))]
        }
    } else if toward {
        vec![def(x, e, y, e, modulus_of(y, e)), def(y, f, x, f, modulus_of(x, f))]
    } else {
        vec![def(y, e, x, e, modulus_of(x, e)), def(x, f, y, f, modulus_of(y, f))]
    }
}

fn branch_pairs<'m>(parent: &'m Branch, child: &'m Branch) -> Vec<(&'m Bond, &'m Bond)> {
    let bonds = |b: &'m Branch| b.junctions.iter().flat_map(|j| j.bonds.iter()).filter(|b| b.branch.present);
    let mut out = Vec::new();
    for x in bonds(parent) {
        for y in bonds(child) {
            if x.label != y.label && x.branch.common_bond_label == y.branch.common_bond_label {
                out.push((x, y));
            }
        }
    }
    out
}

/// Couplings between every bond of `parent` and every bond of `child` that share a branch label.
pub fn branch_coupling(parent: &Branch, child: &Branch) -> Vec<Equation> {
    if parent.junctions.is_empty() || child.junctions.is_empty() {
        return Vec::new();
    }
    branch_pairs(parent, child)
        .into_iter()
        .flat_map(|(x, y)| {
            let (a, b) = if x.label <= y.label { (x, y) } else { (y, x) };
            coupling_equations(a, b, Provenance::BranchCoupling)
        })
        .collect()
}

/// Finds the partner of a labelled bond anywhere in the model and couples the two.
pub fn causal_loop(model: &BondGraphModel, loc: BondLoc) -> Result<Vec<Equation>, DeriveError> {
    let bond = model.bond(loc);
    if !bond.branch.present || bond.branch.common_bond_label == 0 {
        return Ok(Vec::new());
    }
    let partner = model
        .locations()
        .filter(|l| *l != loc)
        .map(|l| model.bond(l))
        .find(|b| b.branch.present && b.branch.common_bond_label == bond.branch.common_bond_label)
        .ok_or(DeriveError::PartnerNotFound(bond.label))?;
    let (a, b) = if bond.label <= partner.label { (bond, partner) } else { (partner, bond) };
    Ok(coupling_equations(a, b, Provenance::LoopCoupling))
}

/// Equations contributed by the bond at `loc` according to its junction kind, element and stroke.
pub fn case_selection(model: &BondGraphModel, loc: BondLoc) -> Result<Vec<Equation>, DeriveError> {
    let engine = PathEngine::new(model, loc.branch);
    case_selection_with(&engine, loc)
}

fn case_selection_with(engine: &PathEngine<'_>, loc: BondLoc) -> Result<Vec<Equation>, DeriveError> {
    use ElementType::*;
    use JunctionKind::*;
    let model = engine.model();
    let j = model.junction(loc);
    let b = model.bond(loc);
    let (i, k) = (loc.junction, loc.bond);
    let t = b.causality.stroke_toward_junction;
    let strong = strong_index(j) == Some(k);
    match (j.kind, b.element, t) {
        (One, Inertance, false) | (Zero, Compliance, true) => Ok(vec![engine.junction_sum(i, k)?]),
        (One, Compliance, true) | (Zero, Inertance, false) => Ok(vec![engine.path_selection(i, k)?]),
        (_, Resistor, _) => Ok(vec![engine.resistive_path_selection(i, k)?]),
        (One, Compliance, false) | (Zero, Inertance, true) => Ok(vec![engine.junction_sum_der(i, k)?]),
        (_, ConnectingBond | Transformer | Gyrator, _) if b.branch.present && strong => {
            let mut out = vec![engine.junction_sum(i, k)?];
            out.extend(causal_loop(model, loc)?);
            Ok(out)
        }
        (_, ConnectingBond | Source | Transformer | Gyrator, _) => Ok(Vec::new()),
        (kind, element, stroke) => Err(DeriveError::Uncovered { label: b.label, kind, element, stroke }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EquationSystem {
    pub equations: Vec<Equation>,
}

fn same_relation(a: &Equation, b: &Equation) -> bool {
    a.lhs == b.lhs && a.rhs == b.rhs && a.lhs_derivative == b.lhs_derivative && a.rhs_derivative == b.rhs_derivative
}

impl EquationSystem {
    fn push(&mut self, eq: Equation) {
        if !self.equations.iter().any(|e| same_relation(e, &eq)) {
            self.equations.push(eq);
        }
    }

    pub fn by_provenance(&self, p: Provenance) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(move |e| e.provenance == p)
    }

    /// Deterministic text listing, one relation per line.
    pub fn dump(&self) -> String {
        let mut out = Vec::new();
        let tag = |e: &Equation| e.target.map(|t| t.bond.to_string()).unwrap_or_default();
        let jtag = |e: &Equation| e.junction.map(|(b, j)| format!("j={b}{j}")).unwrap_or_default();
        for e in self.by_provenance(Provenance::Constitutive) {
            out.push(format!("law({}): {e}", tag(e)));
        }
        for e in self.by_provenance(Provenance::SummationLaw) {
            let body = e.lhs.signed_terms();
            if e.lhs_derivative {
                out.push(format!("sum({}): d/dt ({body}) = 0", jtag(e)));
            } else {
                out.push(format!("sum({}): {body} = 0", jtag(e)));
            }
        }
        let mut chains: Vec<(Option<(Option<(u32, u32)>, SignalVar)>, Vec<String>)> = Vec::new();
        for e in self.by_provenance(Provenance::EqualityLaw) {
            match (e.lhs.as_unit_var(), e.rhs.as_unit_var(), e.is_differential()) {
                (Some(l), Some(r), false) => {
                    let key = Some((e.junction, r));
                    match chains.iter_mut().find(|(k, _)| *k == key) {
                        Some((_, v)) => v.push(l.to_string()),
                        None => chains.push((key, vec![r.to_string(), l.to_string()])),
                    }
                }
                _ => chains.push((None, vec![format!("eq({}): {e}", jtag(e))])),
            }
        }
        for (key, items) in chains {
            match key {
                Some((j, _)) => {
                    let j = j.map(|(b, n)| format!("j={b}{n}")).unwrap_or_default();
                    out.push(format!("eq({j}): {}", items.join(" = ")));
                }
                None => out.extend(items),
            }
        }
        for e in self.by_provenance(Provenance::BranchCoupling) {
            out.push(format!("couple({}): {e}", tag(e)));
        }
        for e in self.by_provenance(Provenance::LoopCoupling) {
            out.push(format!("loop({}): {e}", tag(e)));
        }
        for e in self.by_provenance(Provenance::DerivativeLaw) {
            out.push(format!("state({}): {e}", tag(e)));
        }
        let mut s = out.join("\n");
        s.push('\n');
        s
    }
}

fn needs_closure(j: &Junction, k: usize) -> bool {
    let b = &j.bonds[k];
    let strong = strong_index(j) == Some(k);
    !strong && (b.element == ElementType::Source || (b.branch.present && b.element.is_link()))
}

/// Derives every junction, element, coupling and state law of the model.
pub fn derive_system(model: &BondGraphModel) -> Result<EquationSystem, DeriveError> {
    if model.branches.is_empty() || model.branches.iter().all(|b| b.junctions.is_empty()) {
        return Err(DeriveError::EmptyModel);
    }
    let report = check_causal_completeness(model);
    if !report.complete {
        return Err(DeriveError::Incomplete(report.violations.join("; ")));
    }
    for j in model.branches.iter().flat_map(|b| b.junctions.iter()) {
        if j.bonds.len() < 3 {
            return Err(DeriveError::TooFewBonds(j.number));
        }
    }
    let mut sys = EquationSystem::default();
    for (p, parent) in model.branches.iter().enumerate() {
        for child in &model.branches[p + 1..] {
            for eq in branch_coupling(parent, child) {
                sys.push(eq);
            }
        }
    }
    let mut engines = BTreeMap::new();
    for loc in model.locations() {
        let engine = engines.entry(loc.branch).or_insert_with(|| PathEngine::new(model, loc.branch));
        let bond = model.bond(loc);
        if matches!(bond.element, ElementType::Source | ElementType::Inertance | ElementType::Compliance | ElementType::Resistor)
        {
            sys.push(constitutive_equation(bond)?);
        }
        for eq in case_selection_with(engine, loc)? {
            sys.push(eq);
        }
        if needs_closure(model.junction(loc), loc.bond) {
            sys.push(engine.path_selection(loc.junction, loc.bond)?);
        }
        if let Some(eq) = derivative_law(bond) {
            sys.push(eq);
        }
    }
    Ok(sys)
}
