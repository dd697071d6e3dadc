//! Eigenvalues and stability verdicts.

use std::fmt;

use num::complex::Complex64;
use num::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::statespace::NumericMatrix;
use crate::Rational;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("root iteration did not converge (residual {0:e})")]
    NonConvergence(f64),
    #[error("no real root within tolerance")]
    NoRealRoot,
    #[error("factorization residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("expected a 3x3 matrix")]
    NotCubic,
}

/// Monic characteristic polynomial, highest power first: `[1, a_{n-1}, ..., a_0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coefficients: Vec<f64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn check_square(a: &NumericMatrix) -> Result<(), StabilityError> {
    if !a.is_square() {
        return Err(StabilityError::NotSquare(a.rows, a.cols));
    }
    if !a.is_finite() {
        return Err(StabilityError::NonFinite);
    }
    Ok(())
}

/// Faddeev-LeVerrier recurrence.
pub fn char_poly(a: &NumericMatrix) -> Result<CharPoly, StabilityError> {
    check_square(a)?;
    let n = a.rows;
    let mut coeffs = vec![1.0];
    let mut m = NumericMatrix::zeros(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        for i in 0..n {
            let d = m.get(i, i) + c_prev;
            m.set(i, i, d);
        }
        let am = a.mul(&m);
        let tr: f64 = (0..n).map(|i| am.get(i, i)).sum();
        let c = -tr / k as f64;
        coeffs.push(c);
        m = am;
        c_prev = c;
    }
    Ok(CharPoly { coefficients: coeffs })
}

/// The same recurrence over exact rationals.
pub fn char_poly_exact(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mul = |x: &[Vec<Rational>], y: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(Rational::zero(), |s, k| s + &x[i][k] * &y[k][j])).collect())
            .collect()
    };
    let mut coeffs = vec![Rational::from_integer(1.into())];
    let mut m = vec![vec![Rational::zero(); n]; n];
    let mut c_prev = Rational::from_integer(1.into());
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c_prev;
        }
        let am = mul(a, &m);
        let tr = (0..n).fold(Rational::zero(), |s, i| s + &am[i][i]);
        let c = -tr / Rational::from_integer((k as i64).into());
        coeffs.push(c.clone());
        m = am;
        c_prev = c;
    }
    coeffs
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut d = Complex64::zero();
    for x in c {
        d = d * z + p;
        p = p * z + x;
    }
    (p, d)
}

fn quadratic(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::zero(), Complex64::zero()];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, -im), Complex64::new(-0.5 * b, im)]
    }
}

fn aberth(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let bound = c[1..]
        .iter()
        .enumerate()
        .map(|(k, x)| x.abs().powf(1.0 / (k + 1) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, d) = horner(c, z[k]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = if d == Complex64::zero() { Complex64::new(1e-8, 1e-8) } else { p / d };
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                worst = worst.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if worst < 1e-16 {
            break;
        }
    }
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, d) = horner(c, *root);
            if d == Complex64::zero() {
                break;
            }
            let next = *root - p / d;
            if next.is_finite() && horner(c, next).0.norm() < p.norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    z
}

fn tidy(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    for r in roots.iter_mut() {
        if r.im.abs() <= 1e-10 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
        if r.re == 0.0 {
            r.re = 0.0;
        }
    }
    let mut upper: Vec<Complex64> = roots.iter().filter(|r| r.im > 0.0).copied().collect();
    let lower = roots.iter().filter(|r| r.im < 0.0).count();
    if upper.len() == lower {
        upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut out: Vec<Complex64> = roots.iter().filter(|r| r.im == 0.0).copied().collect();
        for u in &upper {
            out.push(*u);
            out.push(u.conj());
        }
        roots = out;
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// All roots of a monic polynomial given highest power first.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, StabilityError> {
    let mut c = coeffs.to_vec();
    let mut roots = Vec::new();
    while c.len() > 1 && *c.last().expect("nonempty") == 0.0 {
        c.pop();
        roots.push(Complex64::zero());
    }
    match c.len() - 1 {
        0 => {}
        1 => roots.push(Complex64::new(-c[1] / c[0], 0.0)),
        2 => roots.extend(quadratic(c[1] / c[0], c[2] / c[0])),
        _ => {
            let lead = c[0];
            let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
            let found = aberth(&monic);
            let norm = monic.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            let n = monic.len() - 1;
            for z in &found {
                let res = horner(&monic, *z).0.norm();
                let scale = norm * z.norm().max(1.0).powi(n as i32);
                if !(res <= 1e-9 * scale) {
                    return Err(StabilityError::NonConvergence(res));
                }
            }
            roots.extend(found);
        }
    }
    Ok(tidy(roots))
}

pub fn eigenvalues(a: &NumericMatrix) -> Result<Vec<Complex64>, StabilityError> {
    poly_roots(&char_poly(a)?.coefficients)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Stable,
    MarginallyStable,
    Unstable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Stable => "Stable",
            Classification::MarginallyStable => "MarginallyStable",
            Classification::Unstable => "Unstable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Semantics {
    #[default]
    Standard,
    PaperLiteral,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Standard => "standard",
            Semantics::PaperLiteral => "paper-literal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GeneralEigen,
    FactoredCubic,
    TriangularShortcut,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::GeneralEigen => "GeneralEigen",
            Method::FactoredCubic => "FactoredCubic",
            Method::TriangularShortcut => "TriangularShortcut",
        })
    }
}

/// Existential predicates, each asking whether some eigenvalue lies in a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiteralFlags {
    pub stable_sys: bool,
    pub unstable_sys: bool,
    pub marginally_stable_sys: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub classification: Classification,
    pub eigenvalues: Vec<Complex64>,
    pub semantics: Semantics,
    pub method: Method,
    pub literal: Option<LiteralFlags>,
}

impl StabilityVerdict {
    pub fn to_json(&self) -> Value {
        let eig: Vec<Value> =
            self.eigenvalues.iter().map(|z| json!({"re": clean(z.re), "im": clean(z.im)})).collect();
        let mut v = json!({
            "classification": self.classification.to_string(),
            "eigenvalues": eig,
            "semantics": self.semantics.to_string(),
            "method": self.method.to_string(),
        });
        if let Some(l) = self.literal {
            v["stable_sys"] = json!(l.stable_sys);
            v["unstable_sys"] = json!(l.unstable_sys);
            v["marginally_stable_sys"] = json!(l.marginally_stable_sys);
        }
        v
    }
}

/// Rounds to 12 decimals; negative zero becomes zero.
pub fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn band(eigs: &[Complex64], tol: f64) -> f64 {
    tol * (1.0 + eigs.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn classify_eigenvalues(eigs: &[Complex64], tol: f64) -> Classification {
    let b = band(eigs, tol);
    let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if eigs.is_empty() || max_re < -b {
        Classification::Stable
    } else if max_re > b {
        Classification::Unstable
    } else {
        Classification::MarginallyStable
    }
}

pub fn literal_flags(eigs: &[Complex64], tol: f64) -> LiteralFlags {
    let b = band(eigs, tol);
    LiteralFlags {
        stable_sys: eigs.iter().any(|z| z.re < -b),
        unstable_sys: eigs.iter().any(|z| z.re > b),
        marginally_stable_sys: eigs.iter().any(|z| z.re.abs() <= b),
    }
}

fn verdict(eigs: Vec<Complex64>, semantics: Semantics, method: Method, tol: f64) -> StabilityVerdict {
    StabilityVerdict {
        classification: classify_eigenvalues(&eigs, tol),
        literal: (semantics == Semantics::PaperLiteral).then(|| literal_flags(&eigs, tol)),
        eigenvalues: eigs,
        semantics,
        method,
    }
}

pub fn classify(a: &NumericMatrix, semantics: Semantics, tol: f64) -> Result<StabilityVerdict, StabilityError> {
    Ok(verdict(eigenvalues(a)?, semantics, Method::GeneralEigen, tol))
}

pub fn is_upper_triangular(a: &NumericMatrix, tol: f64) -> bool {
    (0..a.rows).all(|i| (0..i.min(a.cols)).all(|j| a.get(i, j).abs() <= tol))
}

pub fn is_lower_triangular(a: &NumericMatrix, tol: f64) -> bool {
    (0..a.rows).all(|i| (i + 1..a.cols).all(|j| a.get(i, j).abs() <= tol))
}

/// Reads the eigenvalues off the diagonal when the matrix is triangular.
pub fn triangular_shortcut(a: &NumericMatrix, tol: f64) -> Option<StabilityVerdict> {
    if !a.is_square() || !(is_upper_triangular(a, tol) || is_lower_triangular(a, tol)) {
        return None;
    }
    let eigs = tidy((0..a.rows).map(|i| Complex64::new(a.get(i, i), 0.0)).collect());
    Some(verdict(eigs, Semantics::Standard, Method::TriangularShortcut, tol))
}

/// Triangular shortcut when it applies, otherwise the general eigenvalue route.
pub fn analyze(a: &NumericMatrix, semantics: Semantics, tol: f64) -> Result<StabilityVerdict, StabilityError> {
    check_square(a)?;
    match triangular_shortcut(a, tol) {
        Some(v) => Ok(verdict(v.eigenvalues, semantics, Method::TriangularShortcut, tol)),
        None => classify(a, semantics, tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicMode {
    Corrected,
    PaperLiteral,
}

/// Stability of `(s + r)(s^2 + b1 s + c1)`.
pub fn factored_cubic_criterion(b1: f64, c1: f64, r: f64, mode: CubicMode) -> bool {
    match mode {
        CubicMode::Corrected => r > 0.0 && b1 > 0.0 && c1 > 0.0,
        CubicMode::PaperLiteral => {
            let disc = b1 * b1 - 4.0 * c1;
            0.0 < r || (0.0 < b1 && (disc < 0.0 || disc == 0.0)) || (0.0 < disc && (disc < b1 || -b1 < disc.sqrt()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicFactorization {
    pub r: f64,
    pub b1: f64,
    pub c1: f64,
}

fn bisect(p: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = p(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = p(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of a monic cubic `s^3 + a2 s^2 + a1 s + a0`, ascending.
pub fn cubic_real_roots(a2: f64, a1: f64, a0: f64, tol: f64) -> Vec<f64> {
    let p = |s: f64| ((s + a2) * s + a1) * s + a0;
    let bound = 1.0 + a2.abs().max(a1.abs()).max(a0.abs());
    let mut knots = vec![-bound];
    let disc = a2 * a2 - 3.0 * a1;
    if disc >= 0.0 {
        let q = disc.sqrt();
        knots.push((-a2 - q) / 3.0);
        knots.push((-a2 + q) / 3.0);
    }
    knots.push(bound);
    let scale = 1.0 + a2.abs() + a1.abs() + a0.abs();
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (fl, fh) = (p(lo), p(hi));
        if fl.abs() <= tol * scale {
            roots.push(lo);
        } else if fl.signum() != fh.signum() && fh.abs() > tol * scale {
            roots.push(bisect(&p, lo, hi));
        }
    }
    if let Some(&last) = knots.last() {
        if p(last).abs() <= tol * scale {
            roots.push(last);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Splits the characteristic cubic of `a` as `(s + r)(s^2 + b1 s + c1)` around its most negative real root.
pub fn match_cubic_factorization(a: &NumericMatrix, tol: f64) -> Result<CubicFactorization, StabilityError> {
    if a.rows != 3 || a.cols != 3 {
        return Err(StabilityError::NotCubic);
    }
    let cp = char_poly(a)?;
    let (a2, a1, a0) = (cp.coefficients[1], cp.coefficients[2], cp.coefficients[3]);
    let root = *cubic_real_roots(a2, a1, a0, tol).first().ok_or(StabilityError::NoRealRoot)?;
    let r = -root;
    let b1 = a2 - r;
    let c1 = a1 - b1 * r;
    let res = (c1 * r - a0).abs();
    if res > tol * (1.0 + a0.abs() + a1.abs() + a2.abs()) {
        return Err(StabilityError::Residual(res));
    }
    Ok(CubicFactorization { r: clean_zero(r), b1: clean_zero(b1), c1: clean_zero(c1) })
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Routh array test: true iff every root lies strictly in the left half plane.
///
/// A zero in the first column is replaced by a small epsilon. Any such substitution
/// means a root on or across the imaginary axis and the result is false.
pub fn routh_hurwitz(p: &CharPoly) -> bool {
    let c = &p.coefficients;
    let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let zero = 1e-12 * scale;
    if c.iter().any(|x| *x <= zero) {
        return false;
    }
    let n = c.len();
    let width = n.div_ceil(2);
    let mut rows: Vec<Vec<f64>> = vec![
        (0..width).map(|i| c.get(2 * i).copied().unwrap_or(0.0)).collect(),
        (0..width).map(|i| c.get(2 * i + 1).copied().unwrap_or(0.0)).collect(),
    ];
    let mut perturbed = false;
    for k in 2..n {
        let (up, prev) = (&rows[k - 2], &rows[k - 1]);
        let mut pivot = prev[0];
        if pivot.abs() <= zero {
            pivot = 1e-9 * scale;
            perturbed = true;
        }
        let row: Vec<f64> = (0..width)
            .map(|i| {
                let a = up.get(i + 1).copied().unwrap_or(0.0);
                let b = prev.get(i + 1).copied().unwrap_or(0.0);
                (pivot * a - up[0] * b) / pivot
            })
            .collect();
        rows.push(row);
    }
    !perturbed && rows.iter().take(n).all(|r| r[0] > zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NumericMatrix {
        NumericMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn charpoly_examples() {
        assert_eq!(char_poly(&m(&[&[-1.0, -1.0], &[1.0, 0.0]])).unwrap().coefficients, vec![1.0, 1.0, 1.0]);
        assert_eq!(char_poly(&NumericMatrix::identity(3)).unwrap().coefficients, vec![1.0, -3.0, 3.0, -1.0]);
        let a = m(&[&[-3.0, 1.0, -1.0], &[1.0, -1.0, 1.0], &[1.0, -1.0, 0.0]]);
        assert_eq!(char_poly(&a).unwrap().coefficients, vec![1.0, 4.0, 4.0, 2.0]);
    }

    #[test]
    fn roots_examples() {
        let r = eigenvalues(&m(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
        assert_eq!(r, vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)]);
        let r = poly_roots(&[1.0, 6.0, 11.0, 6.0]).unwrap();
        for (z, want) in r.iter().zip([-3.0, -2.0, -1.0]) {
            assert!((z.re - want).abs() < 1e-12 && z.im == 0.0);
        }
    }

    #[test]
    fn routh_examples() {
        let p = |c: &[f64]| CharPoly { coefficients: c.to_vec() };
        assert!(routh_hurwitz(&p(&[1.0, 1.0, 1.0])));
        assert!(routh_hurwitz(&p(&[1.0, 4.0, 4.0, 2.0])));
        assert!(!routh_hurwitz(&p(&[1.0, 0.0, 1.0])));
        assert!(!routh_hurwitz(&p(&[1.0, 1.0, 4.0, 10.0])));
        assert!(!routh_hurwitz(&p(&[1.0, 1.0, 1.0, 1.0])));
    }

    #[test]
    fn cubic_criterion_examples() {
        assert!(factored_cubic_criterion(2.0, 1.0, 1.0, CubicMode::Corrected));
        assert!(!factored_cubic_criterion(2.0, 1.0, -1.0, CubicMode::Corrected));
        assert!(!factored_cubic_criterion(0.0, 1.0, 1.0, CubicMode::Corrected));
        assert!(factored_cubic_criterion(0.0, 1.0, 1.0, CubicMode::PaperLiteral));
    }

    #[test]
    fn nilpotent_factorization() {
        let f = match_cubic_factorization(&m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]), 1e-9).unwrap();
        assert_eq!((f.r, f.b1, f.c1), (0.0, 0.0, 0.0));
    }
}
