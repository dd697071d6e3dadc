//! Bond-graph models, equation derivation, state-space assembly and stability analysis.

pub mod causality;
pub mod constitutive;
pub mod corpus;
pub mod derive;
pub mod equation;
pub mod expr;
pub mod linform;
pub mod model;
pub mod parser;
pub mod plot;
pub mod poly;
pub mod ratfunc;
pub mod signal;
pub mod stability;
pub mod statespace;

pub type Rational = num::BigRational;

pub use expr::{ExprError, ParamExpr};
pub use poly::{Monomial, Polynomial};
pub use ratfunc::RatFunc;
pub use constitutive::{constitutive_equation, ConstitutiveError};
pub use equation::{Equation, Provenance};
pub use linform::LinearForm;
pub use model::{
    BondGraphModel, BondLoc, Bond, Branch, BranchRef, Causality, ElementType, Junction, JunctionKind, Modulus,
    PowerDirection,
};
pub use signal::{SignalKind, SignalVar};
pub use causality::{check_causal_completeness, strong_bond, CausalityReport};
pub use derive::{derive_system, DeriveError, EquationSystem};
pub use stability::{Classification, Semantics, StabilityVerdict};
pub use statespace::{state_space, NumericMatrix, StateSpaceError, StateSpaceModel};
pub use parser::{from_json, parse, print_dsl, to_json, validate_labels, Diagnostic, ParseReport, RuleId};
