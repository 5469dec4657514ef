use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::field::Field;

/// Dense `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<F> {
    n: usize,
    entries: Vec<F>,
}

impl<F: Field> SquareMatrix<F> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![F::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = F::one();
        }
        m
    }

    /// Builds from rows; `None` unless every row has length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Option<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<F>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> F {
        (0..self.n).fold(F::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// `self + c·I`.
    pub fn add_scalar(&self, c: &F) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] = out.entries[i * self.n + i].clone() + c.clone();
        }
        out
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> SquareMatrix<G> {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Determinant by Gaussian elimination with pivoting on `pivot_weight`.
    pub fn det(&self) -> F {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = F::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .pivot_weight()
                        .partial_cmp(&a[s * n + col].pivot_weight())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(s.cmp(&r))
                })
                .unwrap_or(col);
            if a[pivot * n + col].is_zero() {
                return F::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let factor = a[r * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[r * n + j].clone() - factor.clone() * a[col * n + j].clone();
                    a[r * n + j] = v;
                }
            }
        }
        det
    }
}

impl SquareMatrix<Complex64> {
    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// LU factorization with partial pivoting of a complex matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    det: Complex64,
}

impl Lu {
    /// Factorizes `m`. A zero pivot yields a factorization with `det == 0`.
    pub fn new(m: &SquareMatrix<Complex64>) -> Self {
        let n = m.n;
        let mut lu = m.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    lu[r * n + col]
                        .norm()
                        .partial_cmp(&lu[s * n + col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if pivot != col {
                for j in 0..n {
                    lu.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                det = -det;
            }
            let p = lu[col * n + col];
            det *= p;
            if p.norm() == 0.0 {
                continue;
            }
            for r in col + 1..n {
                let factor = lu[r * n + col] / p;
                lu[r * n + col] = factor;
                for j in col + 1..n {
                    let v = lu[col * n + j];
                    lu[r * n + j] -= factor * v;
                }
            }
        }
        Self { n, lu, perm, det }
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = self.lu[i * n + j] * x[j];
                x[i] -= v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = self.lu[i * n + j] * x[j];
                x[i] -= v;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// `A^{-1}` assembled column by column from solves against unit vectors.
    pub fn inverse(&self) -> SquareMatrix<Complex64> {
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

impl<F: Field> Add for SquareMatrix<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Self {
            n: self.n,
            entries: self
                .entries
                .into_iter()
                .zip(rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<F: Field> Sub for SquareMatrix<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Self {
            n: self.n,
            entries: self
                .entries
                .into_iter()
                .zip(rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<F: Field> Mul for &SquareMatrix<F> {
    type Output = SquareMatrix<F>;
    fn mul(self, rhs: Self) -> SquareMatrix<F> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out: SquareMatrix<F> = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v =
                        out.entries[i * n + j].clone() + a.clone() * rhs.entries[k * n + j].clone();
                    out.entries[i * n + j] = v;
                }
            }
        }
        out
    }
}

impl<F: Field + Serialize> Serialize for SquareMatrix<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, F> {
            n: usize,
            rows: Vec<&'a [F]>,
        }
        Repr {
            n: self.n,
            rows: self.entries.chunks(self.n).collect(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::field::ExactComplex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exact_det_with_zero_leading_pivot() {
        let q = ExactComplex::from_int;
        let m = SquareMatrix::from_rows(vec![
            vec![q(0), q(1), q(2)],
            vec![q(1), q(0), q(3)],
            vec![q(4), q(-3), q(8)],
        ])
        .unwrap();
        // expanded by hand along the first row: -1*(8-12) + 2*(-3-0) = -2
        assert_eq!(m.det(), q(-2));
    }

    #[test]
    fn lu_solves_and_inverts() {
        let m = SquareMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, -1.0)],
            vec![c(4.0, 0.0), c(-3.0, 0.0), c(8.0, 0.5)],
        ])
        .unwrap();
        let lu = Lu::new(&m);
        let prod = &m * &lu.inverse();
        let err = (prod - SquareMatrix::identity(3)).max_abs();
        assert!(err < 1e-13, "{err}");
        assert!((lu.det() - m.det()).norm() < 1e-12);
    }
}
