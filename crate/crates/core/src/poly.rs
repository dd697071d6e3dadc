//! Sparse multivariate polynomials over the rationals, with exact division and gcd.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::Rational;

/// A power product; variables sorted by name, exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn degree_of(&self, name: &str) -> u32 {
        self.0.iter().find(|(v, _)| v == name).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: BTreeMap<&str, u32> = BTreeMap::new();
        for (v, e) in self.0.iter().chain(other.0.iter()) {
            *out.entry(v.as_str()).or_insert(0) += e;
        }
        Monomial(out.into_iter().map(|(v, e)| (v.to_string(), e)).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let d = other.degree_of(v);
            match e.cmp(&d) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((v.clone(), e - d)),
            }
        }
        if other.0.iter().any(|(v, _)| self.degree_of(v) == 0) {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, name: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| v != name).cloned().collect())
    }

    fn with_power(&self, name: &str, k: u32) -> Monomial {
        if k == 0 {
            return self.clone();
        }
        self.mul(&Monomial(vec![(name.to_string(), k)]))
    }
}

impl Ord for Monomial {
    /// Pure lexicographic order with alphabetically earlier variables ranking higher.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (v, e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(name: &str) -> Self {
        let mut p = Polynomial::zero();
        p.terms.insert(Monomial::var(name), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut q = Polynomial::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            r = r.sub(&d.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.terms.keys().map(|m| m.degree_of(name)).max().unwrap_or(0)
    }

    /// Coefficient of `name^k`, as a polynomial in the remaining variables.
    fn coeff_in(&self, name: &str, k: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.degree_of(name) == k {
                out.add_term(m.without(name), c.clone());
            }
        }
        out
    }

    fn coeffs_in(&self, name: &str) -> Vec<Polynomial> {
        (0..=self.degree_in(name)).map(|k| self.coeff_in(name, k)).filter(|p| !p.is_zero()).collect()
    }

    /// Scaled so the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => Polynomial::zero(),
        }
    }

    /// Greatest common divisor, normalized to be monic.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let vars: BTreeSet<String> = self.vars().union(&other.vars()).cloned().collect();
        let Some(x) = vars.into_iter().next() else {
            return Polynomial::one();
        };
        let da = self.degree_in(&x);
        let db = other.degree_in(&x);
        if da == 0 {
            return self.gcd(&other.content_in(&x));
        }
        if db == 0 {
            return self.content_in(&x).gcd(other);
        }
        let ca = self.content_in(&x);
        let cb = other.content_in(&x);
        let content = ca.gcd(&cb);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let (mut p, mut q) = if da >= db { (pa, pb) } else { (pb, pa) };
        loop {
            let r = p.pseudo_rem(&q, &x);
            if r.is_zero() {
                break;
            }
            if r.degree_in(&x) == 0 {
                q = Polynomial::one();
                break;
            }
            p = q;
            q = r.primitive_part(&x);
        }
        content.mul(&q.primitive_part(&x)).monic()
    }

    fn content_in(&self, x: &str) -> Polynomial {
        let mut g = Polynomial::zero();
        for c in self.coeffs_in(x) {
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part(&self, x: &str) -> Polynomial {
        let c = self.content_in(x);
        self.div_exact(&c).expect("content divides").monic()
    }

    fn pseudo_rem(&self, q: &Polynomial, x: &str) -> Polynomial {
        let dq = q.degree_in(x);
        let lc = q.coeff_in(x, dq);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(x) >= dq {
            let dr = r.degree_in(x);
            let lr = r.coeff_in(x, dr);
            let shifted = Polynomial {
                terms: lr.terms.iter().map(|(m, c)| (m.with_power(x, dr - dq), c.clone())).collect(),
            };
            r = r.mul(&lc).sub(&shifted.mul(q));
        }
        r
    }

    /// Least common multiple of coefficient denominators and gcd of numerators.
    pub fn integer_content(&self) -> (BigInt, BigInt) {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
            gcd = gcd.gcd(c.numer());
        }
        (lcm, gcd)
    }

    pub fn evaluate<F>(&self, lookup: &F) -> Option<Rational>
    where
        F: Fn(&str) -> Option<Rational>,
    {
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let val = lookup(v)?;
                for _ in 0..*e {
                    t *= &val;
                }
            }
            sum += t;
        }
        Some(sum)
    }

    pub fn leading_is_negative(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if n > 0 {
                write!(f, "+")?;
            }
            if m.is_one() {
                write!(f, "{}", crate::expr::format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else if mag.is_integer() {
                write!(f, "{}*{m}", mag.numer())?;
            } else {
                write!(f, "({})*{m}", crate::expr::format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        crate::RatFunc::from_expr(&crate::ParamExpr::parse(s).unwrap()).unwrap().numer().clone()
    }

    #[test]
    fn lex_order_prefers_earlier_names() {
        let a = Monomial::var("a");
        let b2 = Monomial(vec![("b".into(), 2)]);
        assert!(a > b2);
        assert!(Monomial::var("D_4") > Monomial::var("Dm_4"));
    }

    #[test]
    fn exact_division() {
        let a = p("(x+y)*(x-y)");
        assert_eq!(a.div_exact(&p("x+y")), Some(p("x-y")));
        assert_eq!(a.div_exact(&p("x+2*y")), None);
    }

    #[test]
    fn gcd_multivariate() {
        let a = p("(x+y)^2*(x-3*z)");
        let b = p("(x+y)*(x+z)*(y-2)");
        assert_eq!(a.gcd(&b), p("x+y"));
        assert!(p("x+1").gcd(&p("x+2")).is_one());
        assert_eq!(p("2*a*b").gcd(&p("4*a")), p("a"));
    }

    #[test]
    fn display_descending() {
        assert_eq!(p("b^2 - 2*a + 3").to_string(), "-2*a+b^2+3");
    }
}
