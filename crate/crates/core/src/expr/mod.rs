//! Entire-function expressions of the closed form `Σ c·z^k·exp(Q(z))`.
//!
//! The class is closed under sums, products, integer powers and
//! differentiation, which is all the classifiers in [`crate::typicality`]
//! need. Exponent polynomials never carry a constant term: `exp(Q(0))` is
//! folded into the coefficient.

mod parse;

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::Poly;

pub use parse::parse_expr;

/// `ln(f64::MAX)`: larger real parts of an exponent overflow `exp`.
pub const EXP_OVERFLOW: f64 = 709.782712893384;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("argument of exp at byte {pos} is not a polynomial in z")]
    NonPolynomialExponent { pos: usize },
    #[error("non-finite coefficient produced at byte {pos}")]
    NonFiniteCoefficient { pos: usize },
    #[error("exp overflows at z = {z}: Re Q(z) = {re_exponent}")]
    OverflowToInfinity { z: Complex64, re_exponent: f64 },
    #[error("invalid serialized expression: {0}")]
    InvalidJson(String),
}

/// One summand `coeff · z^power · exp(exponent(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub power: u32,
    /// Polynomial with zero constant term; the zero polynomial means no exponential factor.
    pub exponent: Poly<Complex64>,
}

impl Term {
    fn exponent_degree(&self) -> usize {
        self.exponent.degree().unwrap_or(0)
    }

    fn exponent_leading(&self) -> Complex64 {
        self.exponent.leading().copied().unwrap_or_default()
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.exponent_leading(), other.exponent_leading());
        self.exponent_degree()
            .cmp(&other.exponent_degree())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
            .then(self.power.cmp(&other.power))
            .then_with(|| {
                let (p, q) = (self.exponent.coeffs(), other.exponent.coeffs());
                p.iter()
                    .rev()
                    .zip(q.iter().rev())
                    .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.power == other.power && self.exponent == other.exponent
    }

    pub fn has_exponential(&self) -> bool {
        !self.exponent.is_zero()
    }
}

/// Growth order and type: `ln|f(z)| ≲ p·|z|^rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderType {
    pub rho: usize,
    pub p: f64,
}

/// A canonical entire-function expression. See the module docs.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EntireExpr {
    terms: Vec<Term>,
}

fn clean(c: Complex64) -> Complex64 {
    // folds -0.0 into 0.0 so that equal values compare equal under total_cmp
    Complex64::new(c.re + 0.0, c.im + 0.0)
}

fn clean_poly(p: &Poly<Complex64>) -> Poly<Complex64> {
    Poly::new(p.coeffs().iter().map(|&c| clean(c)).collect())
}

impl EntireExpr {
    /// Canonicalizes: strips exponent constants, merges equal shapes, drops zeros, sorts.
    pub fn from_terms(raw: Vec<Term>) -> Self {
        let mut terms: Vec<Term> = raw
            .into_iter()
            .map(|t| {
                let c0 = t.exponent.coeff(0);
                let (coeff, exponent) = if c0.re == 0.0 && c0.im == 0.0 {
                    (t.coeff, t.exponent)
                } else {
                    let mut q = t.exponent.into_coeffs();
                    q[0] = Complex64::new(0.0, 0.0);
                    (t.coeff * c0.exp(), Poly::new(q))
                };
                Term {
                    coeff: clean(coeff),
                    power: t.power,
                    exponent: clean_poly(&exponent),
                }
            })
            .collect();
        terms.sort_by(|a, b| a.sort_key_cmp(b));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_shape(&t) => last.coeff = clean(last.coeff + t.coeff),
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.re != 0.0 || t.coeff.im != 0.0);
        Self { terms: merged }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Complex64, power: u32) -> Self {
        Self::from_terms(vec![Term {
            coeff: c,
            power,
            exponent: Poly::zero(),
        }])
    }

    /// `c · exp(Q)`; a constant term of `Q` is folded into `c`.
    pub fn exp_term(c: Complex64, power: u32, exponent: Poly<Complex64>) -> Self {
        Self::from_terms(vec![Term {
            coeff: c,
            power,
            exponent,
        }])
    }

    pub fn from_poly(p: &Poly<Complex64>) -> Self {
        Self::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, &c)| Term {
                    coeff: c,
                    power: k as u32,
                    exponent: Poly::zero(),
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| !t.has_exponential())
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| !t.has_exponential() && t.power == 0)
    }

    /// The polynomial this expression equals, when it has no exponential factors.
    pub fn as_poly(&self) -> Option<Poly<Complex64>> {
        if !self.is_polynomial() {
            return None;
        }
        let deg = self
            .terms
            .iter()
            .map(|t| t.power as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for t in &self.terms {
            coeffs[t.power as usize] += t.coeff;
        }
        Some(Poly::new(coeffs))
    }

    /// Groups the expression as `Σ_j P_j(z)·exp(Q_j(z))` with distinct `Q_j`,
    /// in canonical order.
    pub fn exponential_groups(&self) -> Vec<(Poly<Complex64>, Poly<Complex64>)> {
        let mut groups: Vec<(Poly<Complex64>, Vec<Complex64>)> = Vec::new();
        for t in &self.terms {
            let idx = match groups.iter().position(|(q, _)| *q == t.exponent) {
                Some(i) => i,
                None => {
                    groups.push((t.exponent.clone(), Vec::new()));
                    groups.len() - 1
                }
            };
            let coeffs = &mut groups[idx].1;
            if coeffs.len() <= t.power as usize {
                coeffs.resize(t.power as usize + 1, Complex64::new(0.0, 0.0));
            }
            coeffs[t.power as usize] += t.coeff;
        }
        groups.into_iter().map(|(q, c)| (q, Poly::new(c))).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    power: a.power + b.power,
                    exponent: a.exponent.clone() + b.exponent.clone(),
                });
            }
        }
        Self::from_terms(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, _| {
            acc.mul(self)
        })
    }

    /// Exact term-wise derivative: `(c z^k e^Q)' = c (k z^{k-1} + z^k Q') e^Q`.
    pub fn differentiate(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.power > 0 {
                out.push(Term {
                    coeff: t.coeff * t.power as f64,
                    power: t.power - 1,
                    exponent: t.exponent.clone(),
                });
            }
            for (j, &q) in t.exponent.coeffs().iter().enumerate().skip(1) {
                out.push(Term {
                    coeff: t.coeff * q * j as f64,
                    power: t.power + j as u32 - 1,
                    exponent: t.exponent.clone(),
                });
            }
        }
        Self::from_terms(out)
    }

    /// Value at `z`; fails when an exponential factor overflows.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, ExprError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let q = t.exponent.eval(&z);
            if q.re > EXP_OVERFLOW {
                return Err(ExprError::OverflowToInfinity {
                    z,
                    re_exponent: q.re,
                });
            }
            acc += t.coeff * z.powu(t.power) * q.exp();
        }
        if !acc.is_finite() {
            let re_exponent = self
                .terms
                .iter()
                .map(|t| t.exponent.eval(&z).re)
                .fold(f64::NEG_INFINITY, f64::max);
            return Err(ExprError::OverflowToInfinity { z, re_exponent });
        }
        Ok(acc)
    }

    /// Value without overflow checks; may be infinite or NaN.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * z.powu(t.power) * t.exponent.eval(&z).exp())
            .sum()
    }

    pub fn order_and_type(&self) -> OrderType {
        let rho = self
            .terms
            .iter()
            .map(|t| t.exponent_degree())
            .max()
            .unwrap_or(0);
        if rho == 0 {
            return OrderType { rho: 0, p: 0.0 };
        }
        let p = self
            .terms
            .iter()
            .filter(|t| t.exponent_degree() == rho)
            .map(|t| t.exponent_leading().norm())
            .fold(0.0, f64::max);
        OrderType { rho, p }
    }

    /// Membership in the class of entire functions of order at most `rho`
    /// and, at order exactly `rho`, type at most `p`.
    pub fn in_class(&self, rho: usize, p: f64) -> bool {
        let ot = self.order_and_type();
        ot.rho < rho || (ot.rho == rho && ot.p <= p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ExprJson::from(self)).expect("expression serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ExprError> {
        let raw: ExprJson =
            serde_json::from_str(text).map_err(|e| ExprError::InvalidJson(e.to_string()))?;
        raw.try_into()
    }
}

/// Serialized form: `{"terms":[{"c":[re,im],"k":int,"Q":[[re,im],...]}]}`,
/// `Q` listed from the degree-one coefficient upward.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExprJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub c: [f64; 2],
    pub k: u32,
    #[serde(rename = "Q")]
    pub q: Vec<[f64; 2]>,
}

impl From<&EntireExpr> for ExprJson {
    fn from(e: &EntireExpr) -> Self {
        ExprJson {
            terms: e
                .terms
                .iter()
                .map(|t| TermJson {
                    c: [t.coeff.re, t.coeff.im],
                    k: t.power,
                    q: t.exponent
                        .coeffs()
                        .iter()
                        .skip(1)
                        .map(|c| [c.re, c.im])
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ExprJson> for EntireExpr {
    type Error = ExprError;

    fn try_from(raw: ExprJson) -> Result<Self, ExprError> {
        let finite = |v: &[f64; 2]| v[0].is_finite() && v[1].is_finite();
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            if !finite(&t.c) || !t.q.iter().all(finite) {
                return Err(ExprError::InvalidJson("non-finite number".into()));
            }
            let mut q = vec![Complex64::new(0.0, 0.0)];
            q.extend(t.q.iter().map(|v| Complex64::new(v[0], v[1])));
            terms.push(Term {
                coeff: Complex64::new(t.c[0], t.c[1]),
                power: t.k,
                exponent: Poly::new(q),
            });
        }
        Ok(EntireExpr::from_terms(terms))
    }
}

impl Serialize for EntireExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ExprJson::from(self).serialize(serializer)
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    write!(f, "({:?},{:?})", c.re, c.im)
}

impl fmt::Display for EntireExpr {
    /// Canonical text that parses back to an identical expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "(0.0,0.0)");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write_complex(f, t.coeff)?;
            if t.power > 0 {
                write!(f, "*z^{}", t.power)?;
            }
            if t.has_exponential() {
                write!(f, "*exp(")?;
                let mut first = true;
                for (j, &q) in t.exponent.coeffs().iter().enumerate().skip(1) {
                    if q.re == 0.0 && q.im == 0.0 {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write_complex(f, q)?;
                    write!(f, "*z^{j}")?;
                }
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(text: &str) -> EntireExpr {
        parse_expr(text).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("exp(z) - z").differentiate(), p("exp(z) - 1"));
        assert!(p("7").differentiate().is_zero());
        assert_eq!(p("z^3 - 3*z").differentiate(), p("3*z^2 - 3"));
        // chain rule through a quadratic exponent
        assert_eq!(
            p("z*exp(z^2)").differentiate(),
            p("exp(z^2) + 2*z^2*exp(z^2)")
        );
    }

    #[test]
    fn evaluate_examples() {
        let f = p("exp(z) - z");
        assert_eq!(f.evaluate(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let two_pi_i = c(0.0, 2.0 * std::f64::consts::PI);
        let v = f.evaluate(two_pi_i).unwrap();
        assert!((v - (c(1.0, 0.0) - two_pi_i)).norm() < 1e-14);
        assert_eq!(p("z^3 - 3*z").evaluate(c(1.0, 0.0)).unwrap(), c(-2.0, 0.0));
    }

    #[test]
    fn evaluate_reports_overflow() {
        let f = p("exp(z^2)");
        assert!(matches!(
            f.evaluate(c(30.0, 0.0)),
            Err(ExprError::OverflowToInfinity { .. })
        ));
        // large negative exponent underflows harmlessly
        assert_eq!(p("exp(-z)").evaluate(c(800.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn order_and_type_examples() {
        assert_eq!(
            p("exp(z) - z").order_and_type(),
            OrderType { rho: 1, p: 1.0 }
        );
        assert_eq!(
            p("z^3 - 3*z").order_and_type(),
            OrderType { rho: 0, p: 0.0 }
        );
        assert_eq!(
            p("exp(2*z^2) + exp(z)").order_and_type(),
            OrderType { rho: 2, p: 2.0 }
        );
        assert!(p("exp(z) - z").in_class(1, 1.0));
        assert!(!p("exp(z) - z").in_class(1, 0.5));
        assert!(p("exp(3*z)").in_class(2, 0.1));
    }

    #[test]
    fn json_layout() {
        let f = p("3*exp(2*z) + 5");
        assert_eq!(
            f.to_json(),
            r#"{"terms":[{"c":[5.0,0.0],"k":0,"Q":[]},{"c":[3.0,0.0],"k":0,"Q":[[2.0,0.0]]}]}"#
        );
        assert_eq!(EntireExpr::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn exponent_constant_folds_into_coefficient() {
        let f = p("exp(z + 1)");
        assert_eq!(f.terms().len(), 1);
        assert!((f.terms()[0].coeff - c(std::f64::consts::E, 0.0)).norm() < 1e-15);
        assert_eq!(f.terms()[0].exponent.coeff(0), c(0.0, 0.0));
    }

    #[test]
    fn groups_by_exponent() {
        let g = p("z*exp(z) + 2*exp(z) + z^2 - 1").exponential_groups();
        assert_eq!(g.len(), 2);
        assert!(g[0].0.is_zero());
        assert_eq!(
            g[0].1,
            Poly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
        );
        assert_eq!(g[1].1, Poly::new(vec![c(2.0, 0.0), c(1.0, 0.0)]));
    }
}
