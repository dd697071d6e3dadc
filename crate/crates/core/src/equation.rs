use std::fmt;

use crate::linform::LinearForm;
use crate::signal::SignalVar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    EqualityLaw,
    SummationLaw,
    Constitutive,
    BranchCoupling,
    LoopCoupling,
    DerivativeLaw,
}

/// `lhs = rhs`, either side optionally differentiated in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: LinearForm,
    pub lhs_derivative: bool,
    pub rhs: LinearForm,
    pub rhs_derivative: bool,
    pub provenance: Provenance,
    /// Branch id and junction number the law was written at.
    pub junction: Option<(u32, u32)>,
    /// The variable this equation defines, when it has a causal orientation.
    pub target: Option<SignalVar>,
}

impl Equation {
    pub fn new(lhs: LinearForm, rhs: LinearForm, provenance: Provenance) -> Self {
        Equation {
            lhs,
            lhs_derivative: false,
            rhs,
            rhs_derivative: false,
            provenance,
            junction: None,
            target: None,
        }
    }

    /// `target = rhs`.
    pub fn define(target: SignalVar, rhs: LinearForm, provenance: Provenance) -> Self {
        Equation { target: Some(target), ..Self::new(LinearForm::var(target), rhs, provenance) }
    }

    pub fn at(mut self, branch: u32, junction: u32) -> Self {
        self.junction = Some((branch, junction));
        self
    }

    pub fn differentiated(mut self) -> Self {
        self.lhs_derivative = true;
        self.rhs_derivative = true;
        self
    }

    pub fn is_differential(&self) -> bool {
        self.lhs_derivative || self.rhs_derivative
    }

    /// `lhs - rhs`, meaningful when neither side is differentiated or both are.
    pub fn residual(&self) -> LinearForm {
        self.lhs.sub(&self.rhs)
    }

    pub fn vars(&self) -> impl Iterator<Item = SignalVar> + '_ {
        self.lhs.vars().chain(self.rhs.vars())
    }
}

fn side(f: &mut fmt::Formatter<'_>, form: &LinearForm, der: bool) -> fmt::Result {
    if !der {
        return write!(f, "{form}");
    }
    match form.as_unit_var() {
        Some(v) => write!(f, "d/dt {v}"),
        None => write!(f, "d/dt ({form})"),
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        side(f, &self.lhs, self.lhs_derivative)?;
        write!(f, " = ")?;
        side(f, &self.rhs, self.rhs_derivative)
    }
}
