//! Parameter expressions: unevaluated trees over named parameters and exact rationals.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no value bound for parameter `{0}`")]
    MissingBinding(String),
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamExpr {
    Const(Rational),
    Param(String),
    Add(Box<ParamExpr>, Box<ParamExpr>),
    Sub(Box<ParamExpr>, Box<ParamExpr>),
    Mul(Box<ParamExpr>, Box<ParamExpr>),
    Div(Box<ParamExpr>, Box<ParamExpr>),
    Pow(Box<ParamExpr>, i32),
    Neg(Box<ParamExpr>),
}

impl ParamExpr {
    pub fn constant(value: Rational) -> Self {
        ParamExpr::Const(value)
    }

    pub fn int(value: i64) -> Self {
        ParamExpr::Const(Rational::from_integer(BigInt::from(value)))
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn param(name: impl Into<String>) -> Self {
        ParamExpr::Param(name.into())
    }

    // Binary constructors fold constant operands.
    pub fn add(a: ParamExpr, b: ParamExpr) -> Self {
        match (a, b) {
            (ParamExpr::Const(x), ParamExpr::Const(y)) => ParamExpr::Const(x + y),
            (a, b) => ParamExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: ParamExpr, b: ParamExpr) -> Self {
        match (a, b) {
            (ParamExpr::Const(x), ParamExpr::Const(y)) => ParamExpr::Const(x - y),
            (a, b) => ParamExpr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: ParamExpr, b: ParamExpr) -> Self {
        match (a, b) {
            (ParamExpr::Const(x), ParamExpr::Const(y)) => ParamExpr::Const(x * y),
            (a, b) => ParamExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: ParamExpr, b: ParamExpr) -> Self {
        match (a, b) {
            (ParamExpr::Const(x), ParamExpr::Const(y)) if !y.is_zero() => ParamExpr::Const(x / y),
            (a, b) => ParamExpr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: ParamExpr) -> Self {
        match a {
            ParamExpr::Const(x) => ParamExpr::Const(-x),
            a => ParamExpr::Neg(Box::new(a)),
        }
    }

    pub fn pow(a: ParamExpr, k: i32) -> Self {
        match a {
            ParamExpr::Const(x) if k >= 0 || !x.is_zero() => ParamExpr::Const(rational_pow(&x, k)),
            a => ParamExpr::Pow(Box::new(a), k),
        }
    }

    pub fn recip(a: ParamExpr) -> Self {
        Self::div(Self::one(), a)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ParamExpr::Const(c) if c.is_one())
    }

    /// Names of all parameters occurring in the expression.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            ParamExpr::Const(_) => {}
            ParamExpr::Param(p) => {
                out.insert(p.clone());
            }
            ParamExpr::Add(a, b) | ParamExpr::Sub(a, b) | ParamExpr::Mul(a, b) | ParamExpr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            ParamExpr::Pow(a, _) | ParamExpr::Neg(a) => a.collect_params(out),
        }
    }

    pub fn evaluate<F>(&self, lookup: &F) -> Result<Rational, ExprError>
    where
        F: Fn(&str) -> Option<Rational>,
    {
        Ok(match self {
            ParamExpr::Const(c) => c.clone(),
            ParamExpr::Param(p) => lookup(p).ok_or_else(|| ExprError::MissingBinding(p.clone()))?,
            ParamExpr::Add(a, b) => a.evaluate(lookup)? + b.evaluate(lookup)?,
            ParamExpr::Sub(a, b) => a.evaluate(lookup)? - b.evaluate(lookup)?,
            ParamExpr::Mul(a, b) => a.evaluate(lookup)? * b.evaluate(lookup)?,
            ParamExpr::Div(a, b) => {
                let n = a.evaluate(lookup)?;
                let d = b.evaluate(lookup)?;
                if d.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                n / d
            }
            ParamExpr::Pow(a, k) => {
                let base = a.evaluate(lookup)?;
                if *k < 0 && base.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                rational_pow(&base, *k)
            }
            ParamExpr::Neg(a) => -a.evaluate(lookup)?,
        })
    }

    pub fn parse(text: &str) -> Result<ParamExpr, ExprError> {
        let mut p = ExprParser { src: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    fn precedence(&self) -> u8 {
        match self {
            ParamExpr::Add(..) | ParamExpr::Sub(..) => 1,
            ParamExpr::Mul(..) | ParamExpr::Div(..) => 2,
            ParamExpr::Neg(..) => 3,
            ParamExpr::Pow(..) => 4,
            ParamExpr::Const(_) | ParamExpr::Param(_) => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            ParamExpr::Const(c) => {
                if c.is_integer() && !c.is_negative() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "({})", format_rational(c))
                }
            }
            ParamExpr::Param(p) => write!(f, "{p}"),
            ParamExpr::Add(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, "+")?;
                b.write_prec(f, 2)
            }
            ParamExpr::Sub(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, "-")?;
                b.write_prec(f, 2)
            }
            ParamExpr::Mul(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, "*")?;
                b.write_prec(f, 3)
            }
            ParamExpr::Div(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, "/")?;
                b.write_prec(f, 3)
            }
            ParamExpr::Neg(a) => {
                write!(f, "-")?;
                a.write_prec(f, 3)
            }
            ParamExpr::Pow(a, k) => {
                a.write_prec(f, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
        }
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

pub fn rational_pow(base: &Rational, k: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// `3`, `-3`, `3/2`, `-3/2`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses an exact rational such as `-3/2` or `1.5e-3`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut value = Rational::from_integer(n) * rational_pow(&ten, scale);
    if neg {
        value = -value;
    }
    Some(value)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // Scale huge numerators/denominators down before dividing.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ParamExpr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' { ParamExpr::add(lhs, rhs) } else { ParamExpr::sub(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ParamExpr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' { ParamExpr::mul(lhs, rhs) } else { ParamExpr::div(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ParamExpr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(ParamExpr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ParamExpr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.exponent()?;
            return Ok(ParamExpr::pow(base, k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let k: i32 = digits.parse().map_err(|_| self.err("expected integer exponent"))?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
        }
        Ok(if neg { -k } else { k })
    }

    fn atom(&mut self) -> Result<ParamExpr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                parse_rational(text).map(ParamExpr::Const).ok_or_else(|| self.err("malformed number"))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                Ok(ParamExpr::Param(name.to_string()))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_and_print() {
        for text in ["1/n", "a+b*c", "(a+b)*c", "a-(b-c)", "-x^2", "(-x)^2", "a/(b*c)", "x^(-1)", "(3/2)*R", "a+-b"] {
            let e = ParamExpr::parse(text).unwrap();
            let printed = e.to_string();
            assert_eq!(ParamExpr::parse(&printed).unwrap(), e, "{text} -> {printed}");
        }
    }

    #[test]
    fn constants_fold() {
        assert_eq!(ParamExpr::parse("3/2").unwrap(), ParamExpr::Const(q(3, 2)));
        assert_eq!(ParamExpr::parse("-3").unwrap(), ParamExpr::Const(q(-3, 1)));
        assert_eq!(ParamExpr::parse("0.25").unwrap(), ParamExpr::Const(q(1, 4)));
        assert_eq!(ParamExpr::Const(q(-3, 2)).to_string(), "(-3/2)");
    }

    #[test]
    fn evaluate_with_bindings() {
        let e = ParamExpr::parse("R/L + 1/C").unwrap();
        let v = e
            .evaluate(&|p: &str| match p {
                "R" => Some(q(1, 1)),
                "L" => Some(q(2, 1)),
                "C" => Some(q(4, 1)),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, q(3, 4));
        assert_eq!(e.evaluate(&|_: &str| None), Err(ExprError::MissingBinding("R".into())));
        let z = ParamExpr::parse("1/(a-a)").unwrap();
        assert_eq!(z.evaluate(&|_: &str| Some(q(1, 1))), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_rational("-2.5"), Some(q(-5, 2)));
        assert_eq!(parse_rational("7/-2"), Some(q(-7, 2)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/0"), None);
    }
}
