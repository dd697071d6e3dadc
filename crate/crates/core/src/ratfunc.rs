//! Canonical rational functions of the model parameters.

use std::fmt;

use num::{One, Zero};

use crate::expr::{ExprError, ParamExpr};
use crate::poly::Polynomial;
use crate::Rational;

/// `numer / denom` in lowest terms with primitive integer coefficients
/// and a denominator whose leading coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Polynomial,
    den: Polynomial,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Polynomial::one(), den: Polynomial::one() }
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_parts(Polynomial::constant(c), Polynomial::one()).expect("nonzero denominator")
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_rational(Rational::from_integer(c.into()))
    }

    pub fn param(name: &str) -> Self {
        RatFunc { num: Polynomial::var(name), den: Polynomial::one() }
    }

    pub fn from_parts(num: Polynomial, den: Polynomial) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (la, _) = num.integer_content();
        let (lb, _) = den.integer_content();
        let lcm = num::Integer::lcm(&la, &lb);
        let scaled_num = num.scale(&Rational::from_integer(lcm.clone()));
        let scaled_den = den.scale(&Rational::from_integer(lcm));
        let (_, g1) = scaled_num.integer_content();
        let (_, g2) = scaled_den.integer_content();
        let g = num::Integer::gcd(&g1, &g2);
        let mut inv = Rational::from_integer(g).recip();
        if scaled_den.leading_is_negative() {
            inv = -inv;
        }
        num = scaled_num.scale(&inv);
        den = scaled_den.scale(&inv);
        Ok(RatFunc { num, den })
    }

    pub fn from_expr(e: &ParamExpr) -> Result<Self, ExprError> {
        Ok(match e {
            ParamExpr::Const(c) => Self::from_rational(c.clone()),
            ParamExpr::Param(p) => Self::param(p),
            ParamExpr::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            ParamExpr::Sub(a, b) => Self::from_expr(a)?.sub(&Self::from_expr(b)?),
            ParamExpr::Mul(a, b) => Self::from_expr(a)?.mul(&Self::from_expr(b)?),
            ParamExpr::Div(a, b) => Self::from_expr(a)?.div(&Self::from_expr(b)?)?,
            ParamExpr::Pow(a, k) => Self::from_expr(a)?.pow(*k)?,
            ParamExpr::Neg(a) => Self::from_expr(a)?.neg(),
        })
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    pub fn is_negative(&self) -> bool {
        self.num.leading_is_negative()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::from_parts(self.num.add(&o.num), self.den.clone()).expect("nonzero denominator");
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::from_parts(num, self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        Self::from_parts(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn recip(&self) -> Result<RatFunc, ExprError> {
        Self::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, ExprError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn pow(&self, k: i32) -> Result<RatFunc, ExprError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let k = k.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn params(&self) -> std::collections::BTreeSet<String> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn evaluate<F>(&self, lookup: &F) -> Result<Rational, ExprError>
    where
        F: Fn(&str) -> Option<Rational>,
    {
        let missing = || {
            let name = self.params().into_iter().find(|p| lookup(p).is_none()).unwrap_or_default();
            ExprError::MissingBinding(name)
        };
        let n = self.num.evaluate(lookup).ok_or_else(missing)?;
        let d = self.den.evaluate(lookup).ok_or_else(missing)?;
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(n / d)
    }

    pub fn to_expr(&self) -> ParamExpr {
        ParamExpr::parse(&self.to_string()).expect("canonical form parses")
    }

    /// Whether the display form is a bare signed product with no `+`, `-` or `/` inside.
    pub fn is_simple_product(&self) -> bool {
        self.den.is_one() && self.num.len() == 1
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        Self::from_rational(c)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        let bare = self.den.len() == 1
            && self.den.leading().is_some_and(|(m, c)| c.is_one() && m.factors().len() == 1);
        if bare {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RatFunc {
        RatFunc::from_expr(&ParamExpr::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(rf("-R/L").to_string(), "-R/L");
        assert_eq!(rf("-(1/C)").to_string(), "-1/C");
        assert_eq!(rf("1/L").to_string(), "1/L");
        assert_eq!(rf("L-L").to_string(), "0");
        assert_eq!(rf("(2*a)/(4*b)").to_string(), "a/(2*b)");
        assert_eq!(rf("(x^2-1)/(x+1)").to_string(), "x-1");
        assert_eq!(rf("1/(-x)").to_string(), "-1/x");
        assert_eq!(
            rf("-Dm_4/Jm_4-Geer_4^2*D_4/Jm_4-Motor_4^2/(Jm_4*Ra_4)").to_string(),
            "(-D_4*Geer_4^2*Ra_4-Dm_4*Ra_4-Motor_4^2)/(Jm_4*Ra_4)"
        );
    }

    #[test]
    fn equal_functions_share_form() {
        assert_eq!(rf("(a+b)/(a+b)"), RatFunc::one());
        assert_eq!(rf("1/a + 1/b"), rf("(a+b)/(a*b)"));
        assert_eq!(rf("(1/2)*x"), rf("x/2"));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(RatFunc::from_expr(&ParamExpr::parse("1/(a-a)").unwrap()), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn display_reparses() {
        for s in ["-R/L", "(a+b)/(2*c)", "3/4", "-x^2/(y^3)", "(x-1)/(x+1)"] {
            let a = rf(s);
            assert_eq!(rf(&a.to_string()), a);
        }
    }
}
