//! Companion matrices, resultants, discriminants and the exact critical
//! values discriminant (CVD) pipeline.

use num_complex::Complex64;

use super::field::Field;
use super::matrix::SquareMatrix;
use super::poly::Poly;
use super::KernelError;

/// Companion matrix of a monic polynomial: ones on the subdiagonal and
/// `-c_0, ..., -c_{m-1}` down the last column.
pub fn companion<F: Field>(p: &Poly<F>) -> Result<SquareMatrix<F>, KernelError> {
    let m = p.degree().ok_or(KernelError::ZeroPolynomial)?;
    if m == 0 {
        return Err(KernelError::DegreeZero);
    }
    if !p.is_monic() {
        return Err(KernelError::NotMonic);
    }
    let mut c = SquareMatrix::zeros(m);
    for i in 1..m {
        c.set(i, i - 1, F::one());
    }
    for i in 0..m {
        c.set(i, m - 1, -p.coeff(i));
    }
    Ok(c)
}

/// `p'/m` for a monic `p` of degree `m ≥ 2`; monic of degree `m - 1`.
pub fn monic_derivative<F: Field>(p: &Poly<F>) -> Result<Poly<F>, KernelError> {
    let m = p.degree().ok_or(KernelError::ZeroPolynomial)?;
    if m < 2 {
        return Err(KernelError::DegreeTooSmall {
            degree: m,
            required: 2,
        });
    }
    if !p.is_monic() {
        return Err(KernelError::NotMonic);
    }
    Ok(p.derivative().scale(&(F::one() / F::from_int(m as i64))))
}

/// Sylvester-matrix resultant, `lc(p)^{deg q} · Π q(α)` over the roots `α` of `p`.
pub fn resultant<F: Field>(p: &Poly<F>, q: &Poly<F>) -> Result<F, KernelError> {
    let n = p.degree().ok_or(KernelError::ZeroPolynomial)?;
    let k = q.degree().ok_or(KernelError::ZeroPolynomial)?;
    if n + k == 0 {
        return Ok(F::one());
    }
    let size = n + k;
    let mut s = SquareMatrix::zeros(size);
    for row in 0..k {
        for (j, c) in p.coeffs().iter().rev().enumerate() {
            s.set(row, row + j, c.clone());
        }
    }
    for row in 0..n {
        for (j, c) in q.coeffs().iter().rev().enumerate() {
            s.set(k + row, row + j, c.clone());
        }
    }
    Ok(s.det())
}

/// `(-1)^{n(n-1)/2} Res(p, p') / lc(p)`; exactly one when `deg p ≤ 1`.
pub fn discriminant<F: Field>(p: &Poly<F>) -> Result<F, KernelError> {
    let n = p.degree().ok_or(KernelError::ZeroPolynomial)?;
    if n <= 1 {
        return Ok(F::one());
    }
    let lc = p.leading().cloned().ok_or(KernelError::ZeroPolynomial)?;
    let res = resultant(p, &p.derivative())?;
    let sign = if (n * (n - 1) / 2) % 2 == 0 {
        F::one()
    } else {
        -F::one()
    };
    Ok(sign * res / lc)
}

/// Horner evaluation `p(C)`.
pub fn matpoly_eval<F: Field>(p: &Poly<F>, c: &SquareMatrix<F>) -> SquareMatrix<F> {
    let n = c.dim();
    p.coeffs()
        .iter()
        .rev()
        .fold(SquareMatrix::zeros(n), |acc, a| (&acc * c).add_scalar(a))
}

/// Monic characteristic polynomial `det(yI - A)` by Faddeev–LeVerrier.
pub fn charpoly<F: Field>(a: &SquareMatrix<F>) -> Poly<F> {
    faddeev_leverrier(a, |_| {})
}

/// Characteristic polynomial of a complex matrix plus a growth factor:
/// the largest intermediate entry seen in the recurrence divided by the
/// largest output coefficient. Values far above one flag cancellation.
pub fn charpoly_with_growth(a: &SquareMatrix<Complex64>) -> (Poly<Complex64>, f64) {
    let mut peak = 0.0f64;
    let p = faddeev_leverrier(a, |m: &SquareMatrix<Complex64>| {
        peak = peak.max(m.max_abs());
    });
    let top = p.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
    (p, peak / top)
}

fn faddeev_leverrier<F: Field>(
    a: &SquareMatrix<F>,
    mut observe: impl FnMut(&SquareMatrix<F>),
) -> Poly<F> {
    let n = a.dim();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut m = SquareMatrix::zeros(n);
    for k in 1..=n {
        m = (a * &m).add_scalar(&coeffs[n - k + 1]);
        let am = a * &m;
        observe(&am);
        coeffs[n - k] = -(am.trace() / F::from_int(k as i64));
    }
    Poly::new(coeffs)
}

/// Intermediate objects of the CVD pipeline for a monic `P_m`.
#[derive(Clone, Debug)]
pub struct CvdPipeline<F> {
    pub poly: Poly<F>,
    pub critical_poly: Poly<F>,
    pub companion: SquareMatrix<F>,
    pub value_matrix: SquareMatrix<F>,
    pub value_poly: Poly<F>,
    pub cvd: F,
}

/// Runs the full pipeline on `y^m + a_{m-1} y^{m-1} + ... + a_0`.
pub fn cvd_pipeline<F: Field>(lower: &[F]) -> Result<CvdPipeline<F>, KernelError> {
    if lower.len() < 2 {
        return Err(KernelError::DegreeTooSmall {
            degree: lower.len(),
            required: 2,
        });
    }
    let poly = Poly::monic_from_lower(lower);
    let critical_poly = monic_derivative(&poly)?;
    let companion = companion(&critical_poly)?;
    let value_matrix = matpoly_eval(&poly, &companion);
    let value_poly = charpoly(&value_matrix);
    let cvd = discriminant(&value_poly)?;
    Ok(CvdPipeline {
        poly,
        critical_poly,
        companion,
        value_matrix,
        value_poly,
        cvd,
    })
}

/// The critical values discriminant of `y^m + a_{m-1} y^{m-1} + ... + a_0`
/// given `lower = [a_0, ..., a_{m-1}]`.
pub fn cvd<F: Field>(lower: &[F]) -> Result<F, KernelError> {
    cvd_pipeline(lower).map(|p| p.cvd)
}

/// Whether the monic-normalized derivative has a repeated root.
pub fn disc_variety_member<F: Field>(lower: &[F]) -> Result<bool, KernelError> {
    if lower.len() < 2 {
        return Err(KernelError::DegreeTooSmall {
            degree: lower.len(),
            required: 2,
        });
    }
    let d = monic_derivative(&Poly::monic_from_lower(lower))?;
    Ok(discriminant(&d)?.is_zero())
}
