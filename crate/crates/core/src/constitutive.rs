//! Element laws of one-ports.

use thiserror::Error;

use crate::equation::{Equation, Provenance};
use crate::linform::LinearForm;
use crate::model::{Bond, ElementType};
use crate::ratfunc::RatFunc;
use crate::signal::SignalVar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstitutiveError {
    #[error("bond {label}: element {element} has no constitutive law for this causality")]
    IllegalCausality { label: u32, element: ElementType },
    #[error("bond {0}: element needs a parameter")]
    MissingParameter(u32),
}

fn parameter(bond: &Bond) -> Result<RatFunc, ConstitutiveError> {
    bond.param.as_deref().map(RatFunc::param).ok_or(ConstitutiveError::MissingParameter(bond.label))
}

/// The element law of `bond`, solved for the variable its causality makes it output.
///
/// A stroke at the junction end means the element imposes effort on the junction.
pub fn constitutive_equation(bond: &Bond) -> Result<Equation, ConstitutiveError> {
    let toward = bond.causality.stroke_toward_junction;
    let (e, f) = (bond.effort(), bond.flow());
    let law = Provenance::Constitutive;
    let eq = match (bond.element, toward) {
        (ElementType::Source, true) => Equation::define(e, LinearForm::var(SignalVar::input(bond.label)), law),
        (ElementType::Source, false) => Equation::define(f, LinearForm::var(SignalVar::input(bond.label)), law),
        (ElementType::Resistor, true) => Equation::define(e, LinearForm::term(parameter(bond)?, f), law),
        (ElementType::Resistor, false) => {
            let g = parameter(bond)?.recip().expect("parameter is nonzero");
            Equation::define(f, LinearForm::term(g, e), law)
        }
        (ElementType::Compliance, true) => {
            let k = parameter(bond)?.recip().expect("parameter is nonzero");
            Equation::define(e, LinearForm::term(k, SignalVar::displacement(bond.label)), law)
        }
        (ElementType::Compliance, false) => Equation {
            rhs_derivative: true,
            ..Equation::define(f, LinearForm::term(parameter(bond)?, e), law)
        },
        (ElementType::Inertance, false) => {
            let k = parameter(bond)?.recip().expect("parameter is nonzero");
            Equation::define(f, LinearForm::term(k, SignalVar::momentum(bond.label)), law)
        }
        (ElementType::Inertance, true) => Equation {
            rhs_derivative: true,
            ..Equation::define(e, LinearForm::term(parameter(bond)?, f), law)
        },
        (element, _) => return Err(ConstitutiveError::IllegalCausality { label: bond.label, element }),
    };
    Ok(eq)
}

/// Whether a storage bond is in integral causality.
pub fn is_integral(bond: &Bond) -> bool {
    match bond.element {
        ElementType::Inertance => !bond.causality.stroke_toward_junction,
        ElementType::Compliance => bond.causality.stroke_toward_junction,
        _ => false,
    }
}

/// `d/dt p = e` for an integral inertance, `d/dt q = f` for an integral compliance.
pub fn derivative_law(bond: &Bond) -> Option<Equation> {
    if !is_integral(bond) {
        return None;
    }
    let (state, rhs) = match bond.element {
        ElementType::Inertance => (SignalVar::momentum(bond.label), bond.effort()),
        _ => (SignalVar::displacement(bond.label), bond.flow()),
    };
    Some(Equation {
        lhs_derivative: true,
        ..Equation::define(state, LinearForm::var(rhs), Provenance::DerivativeLaw)
    })
}
