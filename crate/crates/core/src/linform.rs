//! Linear combinations of signals with rational-function coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::ratfunc::RatFunc;
use crate::signal::SignalVar;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    terms: BTreeMap<SignalVar, RatFunc>,
    constant: RatFunc,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: SignalVar) -> Self {
        Self::term(RatFunc::one(), v)
    }

    pub fn term(coeff: RatFunc, v: SignalVar) -> Self {
        let mut f = Self::zero();
        if !coeff.is_zero() {
            f.terms.insert(v, coeff);
        }
        f
    }

    pub fn constant(c: RatFunc) -> Self {
        LinearForm { terms: BTreeMap::new(), constant: c }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn constant_term(&self) -> &RatFunc {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SignalVar, &RatFunc)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = SignalVar> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, v: &SignalVar) -> RatFunc {
        self.terms.get(v).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn contains(&self, v: &SignalVar) -> bool {
        self.terms.contains_key(v)
    }

    /// The single variable with unit coefficient, if that is all the form holds.
    pub fn as_unit_var(&self) -> Option<SignalVar> {
        if !self.constant.is_zero() || self.terms.len() != 1 {
            return None;
        }
        let (v, c) = self.terms.iter().next()?;
        c.is_one().then_some(*v)
    }

    pub fn add_term(&mut self, coeff: &RatFunc, v: SignalVar) {
        if coeff.is_zero() {
            return;
        }
        let sum = self.coeff(&v).add(coeff);
        if sum.is_zero() {
            self.terms.remove(&v);
        } else {
            self.terms.insert(v, sum);
        }
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(c, *v);
        }
        out.constant = out.constant.add(&other.constant);
        out
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm {
            terms: self.terms.iter().map(|(v, c)| (*v, c.neg())).collect(),
            constant: self.constant.neg(),
        }
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &RatFunc) -> LinearForm {
        if k.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        LinearForm {
            terms: self.terms.iter().map(|(v, c)| (*v, c.mul(k))).collect(),
            constant: self.constant.mul(k),
        }
    }

    pub fn scale_int(&self, k: i64) -> LinearForm {
        self.scale(&RatFunc::from_int(k))
    }

    /// Replaces `v` by `by` wherever it appears.
    pub fn substitute(&self, v: &SignalVar, by: &LinearForm) -> LinearForm {
        match self.terms.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.terms.remove(v);
                rest.add(&by.scale(c))
            }
        }
    }

    /// Writes every term with an explicit leading sign: `+e(1) -R*f(2)`.
    pub fn signed_terms(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(v, c)| {
                let (neg, body) = term_body(c, &v.to_string());
                format!("{}{}", if neg { '-' } else { '+' }, body)
            })
            .collect();
        if !self.constant.is_zero() {
            let (neg, body) = const_body(&self.constant);
            parts.push(format!("{}{}", if neg { '-' } else { '+' }, body));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ")
        }
    }
}

fn magnitude(c: &RatFunc) -> (bool, RatFunc) {
    if c.is_negative() {
        (true, c.neg())
    } else {
        (false, c.clone())
    }
}

fn term_body(c: &RatFunc, var: &str) -> (bool, String) {
    let (neg, m) = magnitude(c);
    let body = if m.is_one() {
        var.to_string()
    } else if m.is_simple_product() {
        format!("{m}*{var}")
    } else {
        format!("({m})*{var}")
    };
    (neg, body)
}

fn const_body(c: &RatFunc) -> (bool, String) {
    let (neg, m) = magnitude(c);
    let body = if m.is_simple_product() { m.to_string() } else { format!("({m})") };
    (neg, body)
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut put = |f: &mut fmt::Formatter<'_>, neg: bool, body: String| -> fmt::Result {
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
            Ok(())
        };
        for (v, c) in &self.terms {
            let (neg, body) = term_body(c, &v.to_string());
            put(f, neg, body)?;
        }
        if !self.constant.is_zero() {
            let (neg, body) = const_body(&self.constant);
            put(f, neg, body)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
