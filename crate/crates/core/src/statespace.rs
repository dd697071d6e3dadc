//! Reduction of derived equations to `dx/dt = A x + B u`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::constitutive::is_integral;
use crate::derive::{derive_system, DeriveError, EquationSystem};
use crate::equation::{Equation, Provenance};
use crate::expr::{rational_to_f64, ExprError};
use crate::linform::LinearForm;
use crate::model::{BondGraphModel, ElementType};
use crate::ratfunc::RatFunc;
use crate::signal::SignalVar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSpaceError {
    #[error("storage bonds in differential causality ({0:?}) give a differential-algebraic system")]
    Dae(Vec<u32>),
    #[error("no equation determines {0}")]
    Underdetermined(SignalVar),
    #[error("algebraic loop among {}", fmt_vars(.0))]
    AlgebraicLoop(Vec<SignalVar>),
    #[error("model has no storage elements")]
    Degenerate,
    #[error("{0} survives in the state equations")]
    Leftover(SignalVar),
    #[error("state {0} has no derivative law")]
    MissingStateLaw(SignalVar),
    #[error("state equation for {0} has a constant term")]
    ConstantTerm(SignalVar),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    Eval(#[from] ExprError),
}

fn fmt_vars(v: &[SignalVar]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Momentum of each integral inertance and displacement of each integral compliance, in model order.
pub fn state_variables(model: &BondGraphModel) -> Result<Vec<SignalVar>, StateSpaceError> {
    let diff: Vec<u32> = model.bonds().filter(|b| b.element.is_storage() && !is_integral(b)).map(|b| b.label).collect();
    if !diff.is_empty() {
        return Err(StateSpaceError::Dae(diff));
    }
    Ok(model
        .bonds()
        .filter_map(|b| match b.element {
            ElementType::Inertance => Some(SignalVar::momentum(b.label)),
            ElementType::Compliance => Some(SignalVar::displacement(b.label)),
            _ => None,
        })
        .collect())
}

pub fn input_variables(model: &BondGraphModel) -> Vec<SignalVar> {
    model.bonds().filter(|b| b.element == ElementType::Source).map(|b| SignalVar::input(b.label)).collect()
}

/// Solves a targeted algebraic equation for its target.
pub fn solve_for_target(eq: &Equation) -> Option<(SignalVar, LinearForm)> {
    let t = eq.target?;
    if eq.is_differential() {
        return None;
    }
    let r = eq.residual();
    let c = r.coeff(&t);
    if c.is_zero() {
        return None;
    }
    let rest = r.sub(&LinearForm::term(c.clone(), t));
    let k = c.recip().ok()?.neg();
    Some((t, rest.scale(&k)))
}

/// Replaces every non-state, non-input variable in the state derivative laws until none remain.
pub fn reduce_to_state_form(
    system: &EquationSystem,
    states: &[SignalVar],
    inputs: &[SignalVar],
) -> Result<Vec<Equation>, StateSpaceError> {
    let mut defs: BTreeMap<SignalVar, LinearForm> = BTreeMap::new();
    for eq in &system.equations {
        if eq.provenance == Provenance::DerivativeLaw {
            continue;
        }
        if let Some((t, v)) = solve_for_target(eq) {
            defs.entry(t).or_insert(v);
        }
    }
    let keep: BTreeSet<SignalVar> = states.iter().chain(inputs).copied().collect();
    let bound = defs.len() + 1;
    let mut out = Vec::new();
    for s in states {
        let law = system
            .by_provenance(Provenance::DerivativeLaw)
            .find(|e| e.target == Some(*s))
            .ok_or(StateSpaceError::MissingStateLaw(*s))?;
        let mut rhs = law.rhs.clone();
        let mut passes = 0;
        loop {
            let pending: Vec<SignalVar> = rhs.vars().filter(|v| !keep.contains(v)).collect();
            if pending.is_empty() {
                break;
            }
            if passes == bound {
                return Err(StateSpaceError::AlgebraicLoop(pending));
            }
            for v in pending {
                let d = defs.get(&v).ok_or(StateSpaceError::Underdetermined(v))?;
                rhs = rhs.substitute(&v, d);
            }
            passes += 1;
        }
        out.push(Equation { rhs, ..law.clone() });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpaceModel {
    pub states: Vec<SignalVar>,
    pub inputs: Vec<SignalVar>,
    pub a: Vec<Vec<RatFunc>>,
    pub b: Vec<Vec<RatFunc>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl NumericMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        NumericMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        NumericMatrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[f64]>::to_vec).collect()
    }

    pub fn mul(&self, o: &NumericMatrix) -> NumericMatrix {
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let s = (0..self.cols).map(|k| self.get(i, k) * o.get(k, j)).sum();
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Collects the coefficients of the reduced state laws into A and B.
pub fn assemble(
    equations: &[Equation],
    states: &[SignalVar],
    inputs: &[SignalVar],
) -> Result<StateSpaceModel, StateSpaceError> {
    if states.is_empty() {
        return Err(StateSpaceError::Degenerate);
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (s, eq) in states.iter().zip(equations) {
        if let Some(v) = eq.rhs.vars().find(|v| !states.contains(v) && !inputs.contains(v)) {
            return Err(StateSpaceError::Leftover(v));
        }
        if !eq.rhs.constant_term().is_zero() {
            return Err(StateSpaceError::ConstantTerm(*s));
        }
        a.push(states.iter().map(|x| eq.rhs.coeff(x)).collect());
        b.push(inputs.iter().map(|u| eq.rhs.coeff(u)).collect());
    }
    Ok(StateSpaceModel { states: states.to_vec(), inputs: inputs.to_vec(), a, b })
}

/// Full pipeline from a model to its symbolic state-space form.
pub fn state_space(model: &BondGraphModel) -> Result<StateSpaceModel, StateSpaceError> {
    let states = state_variables(model)?;
    if states.is_empty() {
        return Err(StateSpaceError::Degenerate);
    }
    let inputs = input_variables(model);
    let system = derive_system(model)?;
    let reduced = reduce_to_state_form(&system, &states, &inputs)?;
    assemble(&reduced, &states, &inputs)
}

fn eval_matrix(m: &[Vec<RatFunc>], bindings: &BTreeMap<String, Rational>) -> Result<Vec<Vec<Rational>>, ExprError> {
    let lookup = |p: &str| bindings.get(p).cloned();
    m.iter().map(|row| row.iter().map(|x| x.evaluate(&lookup)).collect()).collect()
}

fn to_numeric(m: &[Vec<Rational>], cols: usize) -> NumericMatrix {
    let mut out = NumericMatrix::zeros(m.len(), cols);
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out.set(i, j, rational_to_f64(x));
        }
    }
    out
}

impl StateSpaceModel {
    pub fn params(&self) -> BTreeSet<String> {
        self.a.iter().chain(&self.b).flatten().flat_map(|x| x.params()).collect()
    }

    /// Exact values of A and B under `bindings`.
    pub fn instantiate_exact(
        &self,
        bindings: &BTreeMap<String, Rational>,
    ) -> Result<(Vec<Vec<Rational>>, Vec<Vec<Rational>>), ExprError> {
        Ok((eval_matrix(&self.a, bindings)?, eval_matrix(&self.b, bindings)?))
    }

    pub fn instantiate(&self, bindings: &BTreeMap<String, Rational>) -> Result<(NumericMatrix, NumericMatrix), ExprError> {
        let (a, b) = self.instantiate_exact(bindings)?;
        Ok((to_numeric(&a, self.states.len()), to_numeric(&b, self.inputs.len())))
    }

    pub fn to_json(&self) -> Value {
        let strs = |m: &[Vec<RatFunc>]| -> Value {
            m.iter().map(|r| r.iter().map(|x| Value::String(x.to_string())).collect::<Vec<_>>()).collect()
        };
        json!({
            "states": self.states.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "inputs": self.inputs.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "A": strs(&self.a),
            "B": strs(&self.b),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names = |v: &[SignalVar]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
        out.push_str(&format!("states: [{}]\n", names(&self.states)));
        out.push_str(&format!("inputs: [{}]\n", names(&self.inputs)));
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            out.push_str(&format!("{name}:\n"));
            for row in m {
                out.push_str(&format!("  [{}]\n", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")));
            }
        }
        out
    }
}
