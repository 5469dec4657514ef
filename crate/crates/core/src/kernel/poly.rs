use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::Field;

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// Trailing zeros are always trimmed, so the zero polynomial has an empty
/// coefficient list and the last stored coefficient is the leading one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `y`.
    pub fn x() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `y^m + a_{m-1} y^{m-1} + ... + a_0` from the lower coefficients.
    pub fn monic_from_lower(lower: &[F]) -> Self {
        let mut coeffs = lower.to_vec();
        coeffs.push(F::one());
        Self::new(coeffs)
    }

    /// `Π (y - r)`.
    pub fn from_roots(roots: &[F]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            acc * Self::new(vec![-r.clone(), F::one()])
        })
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `y^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == F::one())
    }

    pub fn eval(&self, y: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * y.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Divides through by the leading coefficient.
    pub fn to_monic(&self) -> Option<Self> {
        let lc = self.leading()?.clone();
        Some(self.scale(&(F::one() / lc)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<Complex64> {
    /// Sum of coefficient moduli, the scale used by residual tests.
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// `Σ |a_k| |y|^k`, the magnitude against which rounding in `eval` is measured.
    pub fn eval_abs(&self, y: Complex64) -> f64 {
        let r = y.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, y: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * y + p;
            p = p * y + c;
        }
        (p, dp)
    }
}

impl<F: Field> Add for Poly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<F: Field> Sub for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<F: Field> Mul for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::field::ExactComplex;

    fn q(n: i64) -> ExactComplex {
        ExactComplex::from_int(n)
    }

    #[test]
    fn trims_and_reports_degree() {
        let p = Poly::new(vec![q(1), q(2), q(0), q(0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::<ExactComplex>::new(vec![q(0)]).degree(), None);
    }

    #[test]
    fn product_and_derivative() {
        let p = Poly::from_roots(&[q(1), q(-1)]);
        assert_eq!(p, Poly::new(vec![q(-1), q(0), q(1)]));
        assert_eq!(p.derivative(), Poly::new(vec![q(0), q(2)]));
        assert_eq!(p.eval(&q(3)), q(8));
    }

    #[test]
    fn horner_with_derivative_matches() {
        let p = Poly::new(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-3.0, 0.5),
            Complex64::new(0.0, 1.0),
        ]);
        let y = Complex64::new(0.3, -0.7);
        let (v, d) = p.eval_with_derivative(y);
        assert!((v - p.eval(&y)).norm() < 1e-15);
        assert!((d - p.derivative().eval(&y)).norm() < 1e-15);
    }
}
