//! Brute-force reference implementations for cross-checking the main engines.
//!
//! Nothing here shares code paths with the engines under test. Junction laws are written out in full
//! and eliminated by dense Gauss-Jordan; polynomial roots come from companion-matrix eigenvalues.

use std::collections::{BTreeMap, BTreeSet};

use bograph::model::{
    Bond, BondGraphModel, Branch, BranchRef, Causality, ElementType, Junction, JunctionKind, Modulus, PowerDirection,
};
use bograph::{ParamExpr, Rational, SignalKind, SignalVar};
use nalgebra::DMatrix;
use num::complex::Complex64;
use num::Zero;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    SizeCap(usize),
    DegenerateJunction(u32),
    MissingBinding(String),
    DivisionByZero,
    Singular(String),
    Precision(f64),
}

/// A signal or the time derivative of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OVar {
    Sig(SignalVar),
    Der(SignalVar),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    Equality,
    Summation,
    Link,
    Constitutive,
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: BTreeMap<OVar, Rational>,
    pub tag: RowTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseLinearSystem {
    pub variables: Vec<OVar>,
    pub rows: Vec<Row>,
}

impl DenseLinearSystem {
    pub fn count(&self, tag: RowTag) -> usize {
        self.rows.iter().filter(|r| r.tag == tag).count()
    }
}

fn int(k: i64) -> Rational {
    Rational::from_integer(k.into())
}

fn eval(e: &ParamExpr, bindings: &BTreeMap<String, Rational>) -> Result<Rational, OracleError> {
    e.evaluate(&|p: &str| bindings.get(p).cloned()).map_err(|err| match err {
        bograph::ExprError::MissingBinding(p) => OracleError::MissingBinding(p),
        _ => OracleError::DivisionByZero,
    })
}

fn param(b: &Bond, bindings: &BTreeMap<String, Rational>) -> Result<Rational, OracleError> {
    let name = b.param.clone().unwrap_or_default();
    bindings.get(&name).cloned().ok_or(OracleError::MissingBinding(name))
}

fn sig(kind: SignalKind, b: &Bond) -> OVar {
    OVar::Sig(SignalVar::new(kind, b.label))
}

struct Writer {
    rows: Vec<Row>,
}

impl Writer {
    fn row(&mut self, tag: RowTag, terms: &[(OVar, Rational)]) {
        let mut coeffs = BTreeMap::new();
        for (v, c) in terms {
            let e = coeffs.entry(*v).or_insert_with(Rational::zero);
            *e += c;
        }
        coeffs.retain(|_, c: &mut Rational| !c.is_zero());
        self.rows.push(Row { coeffs, tag });
    }

    /// Both port laws of a two-port whose sides are `x` and `y`.
    fn link(&mut self, x: &Bond, y: &Bond, bindings: &BTreeMap<String, Rational>) -> Result<(), OracleError> {
        let (e, f) = (SignalKind::Effort, SignalKind::Flow);
        let me = eval(&y.modulus.effort_modulus, bindings)?;
        let mf = eval(&y.modulus.flow_modulus, bindings)?;
        if x.element == ElementType::Gyrator {
            self.row(RowTag::Link, &[(sig(e, x), int(1)), (sig(f, y), -mf)]);
            self.row(RowTag::Link, &[(sig(f, x), int(1)), (sig(e, y), -me)]);
        } else {
            self.row(RowTag::Link, &[(sig(e, x), int(1)), (sig(e, y), -me)]);
            self.row(RowTag::Link, &[(sig(f, x), int(1)), (sig(f, y), -mf)]);
        }
        Ok(())
    }
}

/// Writes every junction law, link law, element law and state derivative of the model directly.
pub fn oracle_junction_equations(
    model: &BondGraphModel,
    bindings: &BTreeMap<String, Rational>,
) -> Result<DenseLinearSystem, OracleError> {
    let junctions: usize = model.branches.iter().map(|b| b.junctions.len()).sum();
    if junctions > 16 {
        return Err(OracleError::SizeCap(junctions));
    }
    let mut w = Writer { rows: Vec::new() };
    let (e, f) = (SignalKind::Effort, SignalKind::Flow);
    for branch in &model.branches {
        for (i, j) in branch.junctions.iter().enumerate() {
            if j.bonds.len() < 2 {
                return Err(OracleError::DegenerateJunction(j.number));
            }
            let (common, summed) = match j.kind {
                JunctionKind::One => (f, e),
                JunctionKind::Zero => (e, f),
            };
            for b in &j.bonds[1..] {
                w.row(RowTag::Equality, &[(sig(common, &j.bonds[0]), int(1)), (sig(common, b), int(-1))]);
            }
            let terms: Vec<(OVar, Rational)> = j
                .bonds
                .iter()
                .map(|b| (sig(summed, b), if b.direction.toward_junction { int(1) } else { int(-1) }))
                .collect();
            w.row(RowTag::Summation, &terms);
            if let Some(next) = branch.junctions.get(i + 1) {
                let x = &j.bonds[j.bonds.len() - 1];
                let y = &next.bonds[next.bonds.len() - 2];
                w.link(x, y, bindings)?;
            }
        }
    }
    let all: Vec<&Bond> = model.bonds().collect();
    for x in &all {
        if x.branch.present && x.label == x.branch.common_bond_label {
            if let Some(y) = all.iter().find(|y| y.label != x.label && y.branch == x.branch) {
                w.link(x, y, bindings)?;
            }
        }
    }
    for b in &all {
        let u = OVar::Sig(SignalVar::input(b.label));
        let p = OVar::Sig(SignalVar::momentum(b.label));
        let q = OVar::Sig(SignalVar::displacement(b.label));
        match b.element {
            ElementType::Source => {
                let k = if b.causality.stroke_toward_junction { e } else { f };
                w.row(RowTag::Constitutive, &[(sig(k, b), int(1)), (u, int(-1))]);
            }
            ElementType::Resistor => {
                let r = param(b, bindings)?;
                w.row(RowTag::Constitutive, &[(sig(e, b), int(1)), (sig(f, b), -r)]);
            }
            ElementType::Inertance => {
                let l = param(b, bindings)?;
                w.row(RowTag::Constitutive, &[(sig(f, b), l), (p, int(-1))]);
                w.row(RowTag::Derivative, &[(OVar::Der(SignalVar::momentum(b.label)), int(1)), (sig(e, b), int(-1))]);
            }
            ElementType::Compliance => {
                let c = param(b, bindings)?;
                w.row(RowTag::Constitutive, &[(q, int(1)), (sig(e, b), -c)]);
                w.row(RowTag::Derivative, &[(OVar::Der(SignalVar::displacement(b.label)), int(1)), (sig(f, b), int(-1))]);
            }
            _ => {}
        }
    }
    let variables: BTreeSet<OVar> = w.rows.iter().flat_map(|r| r.coeffs.keys().copied()).collect();
    Ok(DenseLinearSystem { variables: variables.into_iter().collect(), rows: w.rows })
}

/// Gauss-Jordan elimination of every variable outside `keep`.
///
/// Returns the remaining relations as coefficient rows over `keep`, in reduced row echelon form.
pub fn oracle_eliminate(sys: &DenseLinearSystem, keep: &[OVar]) -> Vec<Vec<Rational>> {
    let keep_set: BTreeSet<OVar> = keep.iter().copied().collect();
    let mut cols: Vec<OVar> = sys.variables.iter().filter(|v| !keep_set.contains(v)).copied().collect();
    let elim = cols.len();
    cols.extend(keep.iter().copied());
    let index: BTreeMap<OVar, usize> = cols.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut m: Vec<Vec<Rational>> = sys
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![Rational::zero(); cols.len()];
            for (v, c) in &r.coeffs {
                row[index[v]] = c.clone();
            }
            row
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols.len() {
        let Some(p) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let k = m[r][col].clone();
                for c in 0..cols.len() {
                    let d = &m[pivot_row][c] * &k;
                    m[r][c] -= d;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.into_iter()
        .filter(|row| row[..elim].iter().all(Zero::is_zero) && row[elim..].iter().any(|x| !x.is_zero()))
        .map(|row| row[elim..].to_vec())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleStateSpace {
    pub states: Vec<SignalVar>,
    pub inputs: Vec<SignalVar>,
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Vec<Rational>>,
}

/// Ground-truth `A`, `B` from full elimination.
pub fn oracle_state_space(
    model: &BondGraphModel,
    bindings: &BTreeMap<String, Rational>,
) -> Result<OracleStateSpace, OracleError> {
    let states: Vec<SignalVar> = model
        .bonds()
        .filter_map(|b| match b.element {
            ElementType::Inertance => Some(SignalVar::momentum(b.label)),
            ElementType::Compliance => Some(SignalVar::displacement(b.label)),
            _ => None,
        })
        .collect();
    let inputs: Vec<SignalVar> =
        model.bonds().filter(|b| b.element == ElementType::Source).map(|b| SignalVar::input(b.label)).collect();
    let sys = oracle_junction_equations(model, bindings)?;
    let mut keep: Vec<OVar> = states.iter().map(|s| OVar::Der(*s)).collect();
    keep.extend(states.iter().map(|s| OVar::Sig(*s)));
    keep.extend(inputs.iter().map(|s| OVar::Sig(*s)));
    let rows = oracle_eliminate(&sys, &keep);
    let n = states.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let row = rows
            .iter()
            .find(|r| !r[i].is_zero() && (0..n).all(|j| j == i || r[j].is_zero()))
            .ok_or_else(|| OracleError::Singular(format!("d/dt {} is not determined", states[i])))?;
        let lead = row[i].clone();
        a.push((0..n).map(|j| -&row[n + j] / &lead).collect());
        b.push((0..inputs.len()).map(|k| -&row[2 * n + k] / &lead).collect());
    }
    Ok(OracleStateSpace { states, inputs, a, b })
}

/// Polynomial roots as eigenvalues of the companion matrix, refined by Newton steps.
pub fn oracle_poly_roots(coeffs: &[f64], precision: f64) -> Result<Vec<Complex64>, OracleError> {
    let lead = coeffs[0];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    let n = c.len() - 1;
    if n > 12 {
        return Err(OracleError::SizeCap(n));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        comp[(0, j)] = -c[j + 1];
    }
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    let eig = comp.complex_eigenvalues();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut d = Complex64::zero();
        for x in &c {
            d = d * z + p;
            p = p * z + x;
        }
        (p, d)
    };
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut out = Vec::new();
    for z0 in eig.iter() {
        let mut z = Complex64::new(z0.re, z0.im);
        for _ in 0..20 {
            let (p, d) = eval(z);
            if d.norm() == 0.0 {
                break;
            }
            let next = z - p / d;
            if !next.is_finite() || eval(next).0.norm() >= p.norm() {
                break;
            }
            z = next;
        }
        let res = eval(z).0.norm();
        if res > precision * norm.max(1.0) * z.norm().max(1.0).powi(n as i32) {
            return Err(OracleError::Precision(res));
        }
        out.push(z);
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Whether the causal assignment forces an algebraic loop: a cycle among the port
/// variables in the "is computed from" relation.
pub fn has_algebraic_loop(model: &BondGraphModel) -> bool {
    let (e, f) = (SignalKind::Effort, SignalKind::Flow);
    let mut edges: BTreeMap<SignalVar, Vec<SignalVar>> = BTreeMap::new();
    let mut add = |from: SignalVar, to: SignalVar| edges.entry(from).or_default().push(to);
    for branch in &model.branches {
        for (i, j) in branch.junctions.iter().enumerate() {
            let strong_toward = j.kind == JunctionKind::Zero;
            let Some(s) = j.bonds.iter().find(|b| b.causality.stroke_toward_junction == strong_toward) else {
                continue;
            };
            let (common, summed) = if j.kind == JunctionKind::One { (f, e) } else { (e, f) };
            for b in j.bonds.iter().filter(|b| b.label != s.label) {
                add(s.signal(common), b.signal(common));
                add(b.signal(summed), s.signal(summed));
            }
            if let Some(next) = branch.junctions.get(i + 1) {
                let x = &j.bonds[j.bonds.len() - 1];
                let y = &next.bonds[next.bonds.len() - 2];
                link_edges(x, y, &mut add);
            }
        }
    }
    let all: Vec<&Bond> = model.bonds().collect();
    for x in &all {
        if x.branch.present && x.label == x.branch.common_bond_label {
            if let Some(y) = all.iter().find(|y| y.label != x.label && y.branch == x.branch) {
                link_edges(x, y, &mut add);
            }
        }
    }
    for b in &all {
        if b.element == ElementType::Resistor {
            if b.causality.stroke_toward_junction {
                add(b.flow(), b.effort());
            } else {
                add(b.effort(), b.flow());
            }
        }
    }
    let mut state: BTreeMap<SignalVar, u8> = BTreeMap::new();
    fn visit(v: SignalVar, edges: &BTreeMap<SignalVar, Vec<SignalVar>>, state: &mut BTreeMap<SignalVar, u8>) -> bool {
        match state.get(&v) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(v, 1);
        for w in edges.get(&v).into_iter().flatten() {
            if visit(*w, edges, state) {
                return true;
            }
        }
        state.insert(v, 2);
        false
    }
    let nodes: Vec<SignalVar> = edges.keys().copied().collect();
    nodes.into_iter().any(|v| visit(v, &edges, &mut state))
}

fn link_edges(x: &Bond, y: &Bond, add: &mut impl FnMut(SignalVar, SignalVar)) {
    let tx = x.causality.stroke_toward_junction;
    if x.element == ElementType::Gyrator {
        if tx {
            add(y.flow(), x.effort());
            add(x.flow(), y.effort());
        } else {
            add(y.effort(), x.flow());
            add(x.effort(), y.flow());
        }
    } else if tx {
        add(y.effort(), x.effort());
        add(x.flow(), y.flow());
    } else {
        add(x.effort(), y.effort());
        add(y.flow(), x.flow());
    }
}

/// A generated model with a positive rational value for every parameter.
#[derive(Debug, Clone)]
pub struct Generated {
    pub model: BondGraphModel,
    pub bindings: BTreeMap<String, Rational>,
}

fn random_value(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into())
}

fn pick<T: Copy>(rng: &mut impl Rng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())]
}

struct BondPlan {
    element: ElementType,
    toward: bool,
    power_in: bool,
    modulus: Option<(ParamExpr, ParamExpr)>,
    branch: Option<u32>,
}

fn assemble(branch_id: u32, kinds: &[JunctionKind], plans: Vec<Vec<BondPlan>>, params: &mut BTreeSet<String>) -> Branch {
    let junctions = plans
        .into_iter()
        .zip(kinds)
        .enumerate()
        .map(|(q, (bonds, kind))| {
            let number = q as u32 + 1;
            let bonds = bonds
                .into_iter()
                .enumerate()
                .map(|(r, s)| {
                    let label = (branch_id * 10 + number) * 10 + r as u32 + 1;
                    let causality = Causality { stroke_toward_junction: s.toward };
                    let direction = PowerDirection { toward_junction: s.power_in };
                    let mut b = Bond::new(label, s.element, causality, direction);
                    if matches!(s.element, ElementType::Inertance | ElementType::Compliance | ElementType::Resistor) {
                        let name = format!("P{label}");
                        params.insert(name.clone());
                        b.param = Some(name);
                    }
                    if let Some((me, mf)) = s.modulus {
                        b.modulus = Modulus::new(me, mf);
                    }
                    if let Some(l) = s.branch {
                        b.branch = BranchRef::to(l);
                    }
                    b
                })
                .collect();
            Junction { number, kind: *kind, bonds }
        })
        .collect();
    Branch { id: branch_id, junctions }
}

fn element_plan(rng: &mut impl Rng, element: ElementType) -> BondPlan {
    let toward = match element {
        ElementType::Inertance => false,
        ElementType::Compliance | ElementType::Source => true,
        _ => rng.gen_bool(0.5),
    };
    let power_in = if element == ElementType::Source { true } else { rng.gen_bool(0.2) };
    BondPlan { element, toward, power_in, modulus: None, branch: None }
}

/// One attempt at an `n`-junction single-branch chain; may violate causality.
pub fn chain_attempt(rng: &mut impl Rng, branch_id: u32, n: usize) -> Generated {
    let kinds: Vec<JunctionKind> =
        (0..n).map(|_| if rng.gen_bool(0.5) { JunctionKind::One } else { JunctionKind::Zero }).collect();
    let elements = [ElementType::Source, ElementType::Inertance, ElementType::Compliance, ElementType::Resistor];
    let mut links = Vec::new();
    for _ in 1..n {
        let el = pick(rng, &[ElementType::ConnectingBond, ElementType::Transformer, ElementType::Gyrator]);
        let x_toward = rng.gen_bool(0.5);
        let y_toward = if el == ElementType::Gyrator { x_toward } else { !x_toward };
        let x_in = rng.gen_bool(0.5);
        links.push((el, x_toward, y_toward, x_in));
    }
    let mut params = BTreeSet::new();
    let mut moduli = Vec::new();
    for (i, (el, ..)) in links.iter().enumerate() {
        let m = match el {
            ElementType::ConnectingBond => None,
            _ => {
                let name = format!("m{}{}", branch_id, i + 1);
                params.insert(name.clone());
                Some(name)
            }
        };
        moduli.push(m);
    }
    let mut plans = Vec::new();
    for i in 0..n {
        let link_count = usize::from(i > 0) + usize::from(i + 1 < n);
        let lo = 3usize.saturating_sub(link_count).max(1);
        let count = rng.gen_range(lo..=lo + 1);
        let mut bonds: Vec<BondPlan> = Vec::new();
        for _ in 0..count {
            let el = pick(rng, &elements);
            bonds.push(element_plan(rng, el));
        }
        if i > 0 {
            let (el, _, y_toward, x_in) = links[i - 1];
            let modulus = moduli[i - 1].as_ref().map(|m| {
                let p = ParamExpr::param(m.clone());
                match el {
                    ElementType::Gyrator => (ParamExpr::recip(p.clone()), p),
                    _ => (p.clone(), ParamExpr::recip(p)),
                }
            });
            let y = BondPlan { element: el, toward: y_toward, power_in: !x_in, modulus, branch: None };
            if i + 1 < n {
                bonds.push(y);
            } else {
                let at = bonds.len() - 1;
                bonds.insert(at, y);
            }
        }
        if i + 1 < n {
            let (el, x_toward, _, x_in) = links[i];
            let modulus = moduli[i].as_ref().map(|m| {
                let p = ParamExpr::param(m.clone());
                (ParamExpr::recip(p.clone()), p)
            });
            bonds.push(BondPlan { element: el, toward: x_toward, power_in: x_in, modulus, branch: None });
        }
        plans.push(bonds);
    }
    let branch = assemble(branch_id, &kinds, plans, &mut params);
    let bindings = params.iter().map(|p| (p.clone(), random_value(rng))).collect();
    let model = BondGraphModel {
        name: format!("chain{branch_id}"),
        parameters: params.into_iter().map(|p| (p, None)).collect(),
        branches: vec![branch],
    };
    Generated { model, bindings }
}

/// Random single-branch chain of at most `max_junctions` junctions with one-ports from
/// Se, I, C and R in integral causality, no algebraic loop, and at least one storage element.
pub fn random_chain_model(rng: &mut impl Rng, max_junctions: usize) -> Generated {
    let n = rng.gen_range(1..=max_junctions);
    loop {
        let g = chain_attempt(rng, 1, n);
        if !g.model.bonds().any(|b| b.element.is_storage()) {
            continue;
        }
        if !bograph::check_causal_completeness(&g.model).complete {
            continue;
        }
        if !bograph::validate_labels(&g.model).is_empty() {
            continue;
        }
        if has_algebraic_loop(&g.model) {
            continue;
        }
        return g;
    }
}

/// Random structurally valid model for serialization round trips, sometimes with a child branch.
/// Causality is not constrained.
pub fn random_model(rng: &mut impl Rng) -> BondGraphModel {
    loop {
        let n = rng.gen_range(1..=4);
        let mut g = chain_attempt(rng, 1, n);
        for b in g.model.branches[0].junctions.iter_mut().flat_map(|j| j.bonds.iter_mut()) {
            if rng.gen_bool(0.5) {
                b.causality.stroke_toward_junction = !b.causality.stroke_toward_junction;
                if b.element == ElementType::Source {
                    b.causality.stroke_toward_junction = rng.gen_bool(0.5);
                }
            }
            if b.element == ElementType::Inertance && rng.gen_bool(0.3) {
                b.p0 = Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=5).into());
            }
            if b.element == ElementType::Compliance && rng.gen_bool(0.3) {
                b.q0 = Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=5).into());
            }
        }
        if rng.gen_bool(0.5) {
            let parent = &mut g.model.branches[0];
            let last = parent.junctions.len() - 1;
            let j = &mut parent.junctions[last];
            let mut bonds: Vec<Bond> = std::mem::take(&mut j.bonds);
            let shared =
                Bond::new(0, ElementType::ConnectingBond, Causality::TOWARD, PowerDirection::OUT).with_branch(0);
            bonds.insert(0, shared);
            let prefix = (10 + j.number) * 10;
            for (k, b) in bonds.iter_mut().enumerate() {
                let new = prefix + k as u32 + 1;
                if b.param.is_some() {
                    b.param = Some(format!("P{new}"));
                }
                b.label = new;
            }
            let common = prefix + 1;
            bonds[0].branch = BranchRef::to(common);
            j.bonds = bonds;
            if j.bonds.len() > 9 {
                continue;
            }
            let child_kind = if rng.gen_bool(0.5) { JunctionKind::One } else { JunctionKind::Zero };
            let mut child_bonds = vec![
                Bond::new(211, ElementType::Compliance, Causality::TOWARD, PowerDirection::OUT).with_param("C211"),
                Bond::new(212, ElementType::ConnectingBond, Causality::AWAY, PowerDirection::IN).with_branch(common),
                Bond::new(213, ElementType::Resistor, Causality::TOWARD, PowerDirection::OUT).with_param("R213"),
            ];
            if rng.gen_bool(0.5) {
                child_bonds.swap(0, 2);
                for (k, b) in child_bonds.iter_mut().enumerate() {
                    b.label = 211 + k as u32;
                }
                child_bonds[0].param = Some("R211".into());
                child_bonds[2].param = Some("C213".into());
            }
            g.model.branches.push(Branch { id: 2, junctions: vec![Junction { number: 1, kind: child_kind, bonds: child_bonds }] });
        }
        let mut names: BTreeSet<String> = BTreeSet::new();
        for b in g.model.bonds() {
            names.extend(b.param.clone());
            names.extend(b.modulus.effort_modulus.params());
        }
        g.model.parameters = names.iter().map(|p| (p.clone(), None)).collect();
        for p in names {
            if rng.gen_bool(0.4) {
                g.model.parameters.insert(p, Some(Rational::new(rng.gen_range(1..=20).into(), rng.gen_range(1..=7).into())));
            }
        }
        g.model.name = format!("random model {}", rng.gen_range(0..1000));
        if bograph::validate_labels(&g.model).is_empty() {
            return g.model;
        }
    }
}
