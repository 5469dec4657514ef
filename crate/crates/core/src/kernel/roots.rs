//! Simultaneous polynomial root finding (Aberth–Ehrlich) with Newton polish.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::poly::Poly;
use super::KernelError;

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Relative residual accepted for each root.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 500,
        }
    }
}

/// All `deg p` roots of `p` with multiplicity.
pub fn roots(p: &Poly<Complex64>) -> Result<Vec<Complex64>, KernelError> {
    roots_with(p, RootOptions::default())
}

pub fn roots_with(p: &Poly<Complex64>, opts: RootOptions) -> Result<Vec<Complex64>, KernelError> {
    let n = p.degree().ok_or(KernelError::ZeroPolynomial)?;
    if n == 0 {
        return Err(KernelError::DegreeZero);
    }
    if p.coeffs()
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(KernelError::NonFiniteCoefficient);
    }
    let monic = p.to_monic().ok_or(KernelError::ZeroPolynomial)?;
    if n == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let dp = monic.derivative();

    let cauchy = 1.0
        + monic.coeffs()[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(cauchy, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();

    let scale = monic.norm1();
    let within_noise =
        |w: Complex64, v: Complex64| v.norm() <= 8.0 * f64::EPSILON * monic.eval_abs(w);
    let accepted = |w: Complex64, v: Complex64| {
        v.norm() <= opts.tol * scale * w.norm().max(1.0).powi(n as i32)
    };

    let mut done = vec![false; n];
    let mut iters = 0;
    while iters < opts.max_iters && done.iter().any(|d| !d) {
        iters += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let v = monic.eval(&z[i]);
            if v.norm() == 0.0 || within_noise(z[i], v) {
                done[i] = true;
                continue;
            }
            let newton = v / dp.eval(&z[i]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() == 0.0 || !newton.is_finite() {
                Complex64::new(1e-8 * z[i].norm().max(1.0), 0.0)
            } else {
                newton / denom
            };
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1.0)
                && accepted(z[i], monic.eval(&z[i]))
            {
                done[i] = true;
            }
        }
    }

    // Newton polish, kept only when the residual does not grow.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = monic.eval_with_derivative(*zi);
            if d.norm() == 0.0 || v.norm() == 0.0 {
                break;
            }
            let cand = *zi - v / d;
            if cand.is_finite() && monic.eval(&cand).norm() < v.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }

    let residuals: Vec<f64> = z.iter().map(|w| monic.eval(w).norm()).collect();
    if z.iter()
        .zip(&residuals)
        .all(|(w, r)| *r <= opts.tol * scale * w.norm().max(1.0).powi(n as i32))
    {
        Ok(z)
    } else {
        Err(KernelError::NoConvergence {
            max_iters: opts.max_iters,
            residuals,
        })
    }
}

/// Smallest pairwise distance, `None` for fewer than two points.
pub fn min_pairwise_distance(points: &[Complex64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm();
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

/// Orders points lexicographically by `(re, im)`.
pub fn sort_lex(points: &mut [Complex64]) {
    points.sort_by(lex_cmp);
}

/// Order by `(re, im)`, treating real parts within `1e-9` (relative) as tied
/// so that rounding noise does not decide the order of points on a vertical line.
pub fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let scale = a.norm().max(b.norm()).max(1.0);
    if (a.re - b.re).abs() <= 1e-9 * scale {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(c: &[(f64, f64)]) -> Poly<Complex64> {
        Poly::new(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    fn matches_set(found: &[Complex64], expected: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; expected.len()];
        found.iter().all(|f| {
            match expected
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .min_by(|a, b| (a.1 - f).norm().total_cmp(&(b.1 - f).norm()))
            {
                Some((j, e)) if (e - f).norm() < tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn unit_imaginary_pair() {
        let r = roots(&poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(matches_set(&r, &[c(0.0, 1.0), c(0.0, -1.0)], 1e-12));
    }

    #[test]
    fn depressed_cubic() {
        let r = roots(&poly(&[(0.0, 0.0), (-3.0, 0.0), (0.0, 0.0), (1.0, 0.0)])).unwrap();
        let s = 3f64.sqrt();
        assert!(matches_set(
            &r,
            &[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)],
            1e-12
        ));
    }

    #[test]
    fn double_root_clusters() {
        let r = roots(&poly(&[(1.0, 0.0), (-2.0, 0.0), (1.0, 0.0)])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - r[1]).norm() < 1e-6);
        assert!(r.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-6));
    }

    #[test]
    fn pure_power_converges_to_origin() {
        let r = roots(&Poly::monomial(c(1.0, 0.0), 5)).unwrap();
        assert!(r.iter().all(|z| z.norm() < 1e-6), "{r:?}");
    }

    #[test]
    fn rejects_constants() {
        assert_eq!(roots(&poly(&[(3.0, 0.0)])), Err(KernelError::DegreeZero));
        assert_eq!(roots(&Poly::zero()), Err(KernelError::ZeroPolynomial));
    }

    #[test]
    fn degree_twenty_with_spread_roots() {
        let expected: Vec<Complex64> = (0..20)
            .map(|k| Complex64::from_polar(1.0 + 0.05 * k as f64, 0.7 * k as f64))
            .collect();
        let p = Poly::from_roots(&expected);
        let r = roots(&p).unwrap();
        assert!(matches_set(&r, &expected, 1e-8));
    }
}
