//! Trapezoidal quadrature on circles and the disk-truncated critical values
//! discriminant of an entire-function expression.
//!
//! The pipeline recovers the critical points of `w` inside `|z| < R` as the
//! roots of a monic polynomial built from contour power sums, forms its
//! companion matrix `C`, evaluates `w(C)` as a Cauchy integral of the
//! resolvent and takes the discriminant of the characteristic polynomial of
//! the result. Nothing is assumed about `w` beyond analyticity and a
//! zero-free derivative on the circle.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EntireExpr, ExprError};
use crate::kernel::{
    charpoly_with_growth, companion, discriminant, lex_cmp, min_pairwise_distance, roots, Field,
    KernelError, Lu, Poly, SquareMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContourConfig {
    pub radius: f64,
    /// Initial node count; a power of two, at least 16.
    pub nodes: usize,
    /// Smallest admissible distance from a node to a denominator zero, relative to the radius.
    pub guard_tol: f64,
    pub max_doublings: u32,
    /// Relative agreement required between the `N`- and `2N`-node results.
    pub match_tol: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            radius: 5.0,
            nodes: 64,
            guard_tol: 1e-9,
            max_doublings: 8,
            match_tol: 1e-10,
        }
    }
}

impl ContourConfig {
    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ContourError> {
        let bad = |msg: &str| Err(ContourError::InvalidConfig(msg.to_string()));
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return bad("radius must be positive and finite");
        }
        if self.nodes < 16 || !self.nodes.is_power_of_two() {
            return bad("nodes must be a power of two, at least 16");
        }
        if self.guard_tol.is_nan() || self.guard_tol <= 0.0 {
            return bad("guard_tol must be positive");
        }
        if self.match_tol.is_nan() || self.match_tol <= 0.0 {
            return bad("match_tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("invalid contour configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature did not converge: last change {delta:e} at {nodes} nodes")]
    NoConvergence { nodes: usize, delta: f64 },
    #[error("non-finite integrand at node {index} (z = {z})")]
    NonFiniteSample { index: usize, z: Complex64 },
    #[error("integrand denominator {modulus:e} at z = {z} is below the guard; perturb the radius")]
    ZeroNearContour { z: Complex64, modulus: f64 },
    #[error("argument-principle integral {value} is not near an integer")]
    NotNearInteger { value: Complex64 },
    #[error("resolvent is near singular at z = {z} (|det| = {det:e})")]
    ResolventNearSingular { z: Complex64, det: f64 },
    #[error("zero count changed between stages: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: Complex64 },
    #[error("grid search found {found} of {expected} zeros")]
    GridExhausted { found: usize, expected: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl ContourError {
    /// Failures caused by a zero of the integrand denominator sitting close to the circle.
    pub fn is_near_contour(&self) -> bool {
        matches!(
            self,
            ContourError::ZeroNearContour { .. }
                | ContourError::NotNearInteger { .. }
                | ContourError::NoConvergence { .. }
                | ContourError::ResolventNearSingular { .. }
                | ContourError::CountMismatch { .. }
        )
    }
}

/// Stages of [`truncated_cvd`], used to label failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Derivative,
    CountZeros,
    NewtonSums,
    Companion,
    CauchyMatrix,
    Charpoly,
    Discriminant,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        write!(
            f,
            "{}",
            s.as_ref().and_then(|v| v.as_str()).unwrap_or("unknown")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: ContourError,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T, E: Into<ContourError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            source: e.into(),
        })
    }
}

/// A circle `|z - center| = radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

/// Converged quadrature values and the node count that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub values: Vec<Complex64>,
    pub nodes: usize,
    pub delta: f64,
}

fn tree_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => tree_sum(&values[..n / 2]) + tree_sum(&values[n / 2..]),
    }
}

/// `(1/2πi) ∮ g(z) dz` over `circle` for a vector-valued `g` of length `len`.
///
/// `g` writes its value at `z` into the output slice. The node count starts
/// at `cfg.nodes` and doubles, reusing earlier samples, until successive
/// estimates agree to `cfg.match_tol` (relative to `max(1, |value|)`).
pub fn circle_quadrature_vec<G>(
    mut g: G,
    len: usize,
    circle: Circle,
    cfg: &ContourConfig,
) -> Result<Quadrature, ContourError>
where
    G: FnMut(Complex64, &mut [Complex64]) -> Result<(), ContourError>,
{
    cfg.validate()?;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut sample =
        |index: usize, n: usize, out: &mut [Vec<Complex64>]| -> Result<(), ContourError> {
            let e = Complex64::from_polar(circle.radius, 2.0 * PI * index as f64 / n as f64);
            let z = circle.center + e;
            g(z, &mut buf)?;
            for (j, v) in buf.iter().enumerate() {
                let weighted = v * e;
                if !weighted.is_finite() {
                    return Err(ContourError::NonFiniteSample { index, z });
                }
                out[j].push(weighted);
            }
            Ok(())
        };

    let mut n = cfg.nodes;
    let mut samples: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); len];
    for k in 0..n {
        sample(k, n, &mut samples)?;
    }
    let mut sums: Vec<Complex64> = samples.iter().map(|s| tree_sum(s)).collect();
    let mut current: Vec<Complex64> = sums.iter().map(|s| s / n as f64).collect();

    let mut delta = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        let mut odd: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); len];
        for k in 0..n {
            sample(2 * k + 1, 2 * n, &mut odd)?;
        }
        n *= 2;
        for (s, o) in sums.iter_mut().zip(&odd) {
            *s += tree_sum(o);
        }
        let next: Vec<Complex64> = sums.iter().map(|s| s / n as f64).collect();
        delta = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
            .fold(0.0, f64::max);
        current = next;
        if delta <= cfg.match_tol {
            return Ok(Quadrature {
                values: current,
                nodes: n,
                delta,
            });
        }
    }
    Err(ContourError::NoConvergence { nodes: n, delta })
}

/// Scalar `(1/2πi) ∮_{|z| = R} g(z) dz`.
pub fn circle_quadrature<G>(mut g: G, cfg: &ContourConfig) -> Result<Complex64, ContourError>
where
    G: FnMut(Complex64) -> Complex64,
{
    let circle = Circle {
        center: Complex64::new(0.0, 0.0),
        radius: cfg.radius,
    };
    circle_quadrature_vec(
        |z, out| {
            out[0] = g(z);
            Ok(())
        },
        1,
        circle,
        cfg,
    )
    .map(|q| q.values[0])
}

/// Logarithmic derivative `f'/f` at `z`.
///
/// Rejects nodes where the Newton distance `|f/f'|` to the nearest zero is
/// below `guard_tol·radius`.
fn log_derivative(
    f: &EntireExpr,
    fprime: &EntireExpr,
    z: Complex64,
    guard_tol: f64,
    radius: f64,
) -> Result<Complex64, ContourError> {
    let v = f.evaluate(z)?;
    let d = fprime.evaluate(z)?;
    if v.norm() == 0.0 || v.norm() <= guard_tol * radius * d.norm() {
        return Err(ContourError::ZeroNearContour {
            z,
            modulus: v.norm(),
        });
    }
    Ok(d / v)
}

/// Result of the argument-principle count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// The raw integral before rounding.
    pub integral: Complex64,
    pub nodes: usize,
}

fn round_count(value: Complex64) -> Result<usize, ContourError> {
    let n = value.re.round();
    if (value - Complex64::new(n, 0.0)).norm() >= 0.25 || n < 0.0 {
        return Err(ContourError::NotNearInteger { value });
    }
    Ok(n as usize)
}

/// Number of zeros of `f` in `|z - center| < radius`, with multiplicity.
pub fn count_zeros_on(
    f: &EntireExpr,
    circle: Circle,
    cfg: &ContourConfig,
) -> Result<ZeroCount, ContourError> {
    let fprime = f.differentiate();
    let q = circle_quadrature_vec(
        |z, out| {
            out[0] = log_derivative(f, &fprime, z, cfg.guard_tol, circle.radius)?;
            Ok(())
        },
        1,
        circle,
        cfg,
    )?;
    Ok(ZeroCount {
        count: round_count(q.values[0])?,
        integral: q.values[0],
        nodes: q.nodes,
    })
}

/// Number of zeros of `f` in `|z| < cfg.radius`, with multiplicity.
pub fn count_zeros(f: &EntireExpr, cfg: &ContourConfig) -> Result<ZeroCount, ContourError> {
    count_zeros_on(f, origin_circle(cfg), cfg)
}

fn origin_circle(cfg: &ContourConfig) -> Circle {
    Circle {
        center: Complex64::new(0.0, 0.0),
        radius: cfg.radius,
    }
}

/// Power sums `s_k = Σ z_ν^k`, `k = 1..=m`, over the `m` zeros of `f` in the disk.
///
/// The zeroth moment is integrated alongside and must round to `m`.
pub fn newton_sums(
    f: &EntireExpr,
    m: usize,
    cfg: &ContourConfig,
) -> Result<Vec<Complex64>, ContourError> {
    newton_sums_detailed(f, m, cfg).map(|q| q.values[1..].to_vec())
}

fn newton_sums_detailed(
    f: &EntireExpr,
    m: usize,
    cfg: &ContourConfig,
) -> Result<Quadrature, ContourError> {
    let fprime = f.differentiate();
    let q = circle_quadrature_vec(
        |z, out| {
            let ld = log_derivative(f, &fprime, z, cfg.guard_tol, cfg.radius)?;
            let mut zk = Complex64::new(1.0, 0.0);
            for slot in out.iter_mut() {
                *slot = zk * ld;
                zk *= z;
            }
            Ok(())
        },
        m + 1,
        origin_circle(cfg),
        cfg,
    )?;
    if round_count(q.values[0]).ok() != Some(m) {
        return Err(ContourError::CountMismatch {
            expected: m,
            found: q.values[0],
        });
    }
    Ok(q)
}

/// Monic polynomial whose roots have the given power sums (Newton identities).
///
/// With `e_0 = 1` and `e_k = (1/k) Σ_{j=1}^{k} (-1)^{j-1} e_{k-j} s_j`, the
/// result is `z^m - e_1 z^{m-1} + e_2 z^{m-2} - ...`.
pub fn newton_to_monic<F: Field>(sums: &[F]) -> Poly<F> {
    let m = sums.len();
    let mut e = vec![F::one()];
    for k in 1..=m {
        let mut acc = F::zero();
        for j in 1..=k {
            let term = e[k - j].clone() * sums[j - 1].clone();
            acc = if j % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / F::from_int(k as i64));
    }
    let mut coeffs = vec![F::zero(); m + 1];
    for (k, ek) in e.into_iter().enumerate() {
        coeffs[m - k] = if k % 2 == 0 { ek } else { -ek };
    }
    Poly::new(coeffs)
}

/// `W(C) = -(1/2πi) ∮_{|ζ| = R} w(ζ) (C - ζI)^{-1} dζ`, the function `w` of the matrix `C`.
///
/// The resolvent is applied through an LU factorization at each node.
pub fn cauchy_matrix_fn(
    w: &EntireExpr,
    c: &SquareMatrix<Complex64>,
    cfg: &ContourConfig,
) -> Result<SquareMatrix<Complex64>, ContourError> {
    cauchy_matrix_fn_detailed(w, c, cfg).map(|(m, _)| m)
}

fn cauchy_matrix_fn_detailed(
    w: &EntireExpr,
    c: &SquareMatrix<Complex64>,
    cfg: &ContourConfig,
) -> Result<(SquareMatrix<Complex64>, usize), ContourError> {
    let n = c.dim();
    let q = circle_quadrature_vec(
        |zeta, out| {
            let shifted = c.add_scalar(&(-zeta));
            let lu = Lu::new(&shifted);
            let det = lu.det().norm();
            if det.is_nan() || det <= cfg.guard_tol * cfg.radius.powi(n as i32) {
                return Err(ContourError::ResolventNearSingular { z: zeta, det });
            }
            let wz = w.evaluate(zeta)?;
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                e[j] = Complex64::new(1.0, 0.0);
                for (i, v) in lu.solve(&e).into_iter().enumerate() {
                    out[i * n + j] = -wz * v;
                }
            }
            Ok(())
        },
        n * n,
        origin_circle(cfg),
        cfg,
    )?;
    let rows = q.values.chunks(n).map(|r| r.to_vec()).collect();
    let m = SquareMatrix::from_rows(rows).expect("square by construction");
    Ok((m, q.nodes))
}

/// A zero located inside a disk, with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocatedZero {
    pub point: Complex64,
    pub multiplicity: usize,
}

const GRID_START: usize = 16;
const GRID_MAX: usize = 256;
const NEWTON_ITERS: usize = 100;

fn newton_polish(f: &EntireExpr, fprime: &EntireExpr, mut z: Complex64) -> Option<Complex64> {
    let mut last = f64::INFINITY;
    for _ in 0..NEWTON_ITERS {
        let v = f.evaluate(z).ok()?;
        if v.norm() == 0.0 {
            return Some(z);
        }
        let d = fprime.evaluate(z).ok()?;
        let step = v / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        last = step.norm() / z.norm().max(1.0);
        if last <= 1e-15 {
            return Some(z);
        }
    }
    // multiple zeros stall at roughly the square root of the rounding level
    (last <= 1e-7).then_some(z)
}

/// All zeros of `f` in the open disk `circle`, by an argument-principle
/// count followed by Newton iteration from an `n × n` grid over the
/// bounding square (`n` doubling from 16 to 256) until the multiplicities
/// of the distinct zeros found add up to the count. Multiplicities come
/// from local counts on small circles. Sorted lexicographically.
pub fn zeros_in_disk(
    f: &EntireExpr,
    circle: Circle,
    cfg: &ContourConfig,
) -> Result<Vec<LocatedZero>, ContourError> {
    let expected = count_zeros_on(f, circle, cfg)?.count;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let fprime = f.differentiate();
    let mut found: Vec<Complex64> = Vec::new();
    let mut n = GRID_START;
    let mut total = 0;
    while n <= GRID_MAX {
        for i in 0..n {
            for j in 0..n {
                let t = |k: usize| -1.0 + (2 * k + 1) as f64 / n as f64;
                let start = circle.center + Complex64::new(t(i), t(j)) * circle.radius;
                let Some(z) = newton_polish(f, &fprime, start) else {
                    continue;
                };
                if (z - circle.center).norm() >= circle.radius {
                    continue;
                }
                if found
                    .iter()
                    .all(|w| (w - z).norm() > 1e-6 * z.norm().max(1.0))
                {
                    found.push(z);
                }
            }
        }
        let located = multiplicities(f, &found, circle, cfg)?;
        total = located.iter().map(|z| z.multiplicity).sum();
        if total == expected {
            let mut out = located;
            out.sort_by(|a, b| lex_cmp(&a.point, &b.point));
            return Ok(out);
        }
        n *= 2;
    }
    Err(ContourError::GridExhausted {
        found: total,
        expected,
    })
}

fn multiplicities(
    f: &EntireExpr,
    points: &[Complex64],
    circle: Circle,
    cfg: &ContourConfig,
) -> Result<Vec<LocatedZero>, ContourError> {
    let mut out = Vec::with_capacity(points.len());
    for (i, &z) in points.iter().enumerate() {
        let mut r = circle.radius - (z - circle.center).norm();
        for (j, &w) in points.iter().enumerate() {
            if i != j {
                r = r.min((z - w).norm());
            }
        }
        let local = Circle {
            center: z,
            radius: (r / 3.0).min(1e-2 * circle.radius),
        };
        // a tiny local radius can still straddle an unfound zero; treat that as "not yet"
        let multiplicity = match count_zeros_on(f, local, cfg) {
            Ok(c) => c.count,
            Err(e) if e.is_near_contour() => 0,
            Err(e) => return Err(e),
        };
        if multiplicity > 0 {
            out.push(LocatedZero {
                point: z,
                multiplicity,
            });
        }
    }
    Ok(out)
}

/// Numerical health of a truncated CVD run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TcvdDiagnostics {
    pub radius_requested: f64,
    pub radius_used: f64,
    pub nudges: u32,
    pub count_integral: Complex64,
    pub count_nodes: usize,
    pub sums_nodes: usize,
    pub cauchy_nodes: usize,
    /// Peak intermediate entry over peak coefficient in Faddeev–LeVerrier.
    pub charpoly_growth: f64,
    /// Smallest distance between recovered critical points; small values
    /// mean the companion matrix is ill-conditioned.
    pub min_root_separation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedCvdReport {
    /// Number of critical points in the disk.
    pub m: usize,
    pub critical_poly: Poly<Complex64>,
    pub companion: Option<SquareMatrix<Complex64>>,
    #[serde(rename = "W")]
    pub value_matrix: Option<SquareMatrix<Complex64>>,
    #[serde(rename = "U")]
    pub value_poly: Poly<Complex64>,
    pub cvd_value: Complex64,
    pub diagnostics: TcvdDiagnostics,
}

/// The disk-truncated critical values discriminant of `w` on `|z| < cfg.radius`.
pub fn truncated_cvd(
    w: &EntireExpr,
    cfg: &ContourConfig,
) -> Result<TruncatedCvdReport, StageError> {
    cfg.validate().at(Stage::Config)?;
    let wp = w.differentiate();
    let count = count_zeros(&wp, cfg).at(Stage::CountZeros)?;
    let m = count.count;
    let mut diagnostics = TcvdDiagnostics {
        radius_requested: cfg.radius,
        radius_used: cfg.radius,
        nudges: 0,
        count_integral: count.integral,
        count_nodes: count.nodes,
        sums_nodes: 0,
        cauchy_nodes: 0,
        charpoly_growth: 0.0,
        min_root_separation: None,
    };
    if m == 0 {
        return Ok(TruncatedCvdReport {
            m,
            critical_poly: Poly::one(),
            companion: None,
            value_matrix: None,
            value_poly: Poly::one(),
            cvd_value: Complex64::new(1.0, 0.0),
            diagnostics,
        });
    }
    let sums = newton_sums_detailed(&wp, m, cfg).at(Stage::NewtonSums)?;
    diagnostics.sums_nodes = sums.nodes;
    let critical_poly = newton_to_monic(&sums.values[1..]);
    diagnostics.min_root_separation = roots(&critical_poly)
        .ok()
        .and_then(|r| min_pairwise_distance(&r));
    let c = companion(&critical_poly).at(Stage::Companion)?;
    let (value_matrix, cauchy_nodes) =
        cauchy_matrix_fn_detailed(w, &c, cfg).at(Stage::CauchyMatrix)?;
    diagnostics.cauchy_nodes = cauchy_nodes;
    let (value_poly, growth) = charpoly_with_growth(&value_matrix);
    if !value_poly.coeffs().iter().all(|v| v.is_finite()) {
        return Err(StageError {
            stage: Stage::Charpoly,
            source: ContourError::NonFiniteSample {
                index: 0,
                z: Complex64::new(f64::NAN, f64::NAN),
            },
        });
    }
    diagnostics.charpoly_growth = growth;
    let cvd_value = discriminant(&value_poly).at(Stage::Discriminant)?;
    Ok(TruncatedCvdReport {
        m,
        critical_poly,
        companion: Some(c),
        value_matrix: Some(value_matrix),
        value_poly,
        cvd_value,
        diagnostics,
    })
}

/// Radius retry schedule: `R·(1 ± 1/64)`, then `R·(1 ± 1/64)²`.
pub fn nudged_radii(radius: f64) -> [f64; 4] {
    let up = 1.0 + 1.0 / 64.0;
    let down = 1.0 - 1.0 / 64.0;
    [
        radius * up,
        radius * down,
        radius * up * up,
        radius * down * down,
    ]
}

/// Runs `run` at `cfg.radius`, retrying on the nudged radii when the failure
/// is a near-contour one and `strict` is false. Returns the value, the
/// radius that succeeded and the number of retries spent.
pub fn with_radius_nudging<T>(
    cfg: &ContourConfig,
    strict: bool,
    mut run: impl FnMut(&ContourConfig) -> Result<T, StageError>,
) -> Result<(T, f64, u32), StageError> {
    let first = run(cfg);
    let mut err = match first {
        Ok(v) => return Ok((v, cfg.radius, 0)),
        Err(e) if strict || !e.source.is_near_contour() => return Err(e),
        Err(e) => e,
    };
    for (i, r) in nudged_radii(cfg.radius).into_iter().enumerate() {
        let attempt = ContourConfig { radius: r, ..*cfg };
        match run(&attempt) {
            Ok(v) => return Ok((v, r, i as u32 + 1)),
            Err(e) if e.source.is_near_contour() => err = e,
            Err(e) => return Err(e),
        }
    }
    Err(err)
}

/// [`truncated_cvd`] with radius nudging, recording the radius actually used.
pub fn truncated_cvd_nudged(
    w: &EntireExpr,
    cfg: &ContourConfig,
    strict: bool,
) -> Result<TruncatedCvdReport, StageError> {
    let (mut report, radius, nudges) = with_radius_nudging(cfg, strict, |c| truncated_cvd(w, c))?;
    report.diagnostics.radius_requested = cfg.radius;
    report.diagnostics.radius_used = radius;
    report.diagnostics.nudges = nudges;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(r: f64) -> ContourConfig {
        ContourConfig::with_radius(r)
    }

    #[test]
    fn quadrature_examples() {
        let one = circle_quadrature(|z| z.inv(), &cfg(1.0)).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-14);
        let zero = circle_quadrature(|z| z, &cfg(1.0)).unwrap();
        assert!(zero.norm() < 1e-14);
        let outside = circle_quadrature(|z| (z - c(2.0, 0.0)).inv(), &cfg(1.0)).unwrap();
        assert!(outside.norm() < 1e-12);
    }

    #[test]
    fn quadrature_reports_bad_samples() {
        let err = circle_quadrature(|z| if z.im > 0.5 { c(f64::NAN, 0.0) } else { z }, &cfg(1.0))
            .unwrap_err();
        assert!(matches!(err, ContourError::NonFiniteSample { .. }));
        let tight = ContourConfig {
            max_doublings: 1,
            ..cfg(1.0)
        };
        // a pole at distance 0.01 from the circle needs thousands of nodes
        let err = circle_quadrature(|z| (z - c(1.01, 0.0)).inv(), &tight).unwrap_err();
        assert!(matches!(err, ContourError::NoConvergence { .. }));
        let bad = ContourConfig {
            nodes: 48,
            ..cfg(1.0)
        };
        assert!(matches!(
            bad.validate(),
            Err(ContourError::InvalidConfig(_))
        ));
    }

    #[test]
    fn zero_count_examples() {
        let f = parse_expr("exp(z) - 1").unwrap();
        assert_eq!(count_zeros(&f, &cfg(1.0)).unwrap().count, 1);
        assert_eq!(count_zeros(&f, &cfg(7.0)).unwrap().count, 3);
        let g = parse_expr("3*z^2 - 3").unwrap();
        assert_eq!(count_zeros(&g, &cfg(2.0)).unwrap().count, 2);
    }

    #[test]
    fn zero_on_contour_is_guarded() {
        let g = parse_expr("z - 2").unwrap();
        let err = count_zeros(&g, &cfg(2.0)).unwrap_err();
        assert!(
            matches!(err, ContourError::ZeroNearContour { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn power_sum_examples() {
        let s = newton_sums(&parse_expr("3*z^2 - 3").unwrap(), 2, &cfg(2.0)).unwrap();
        assert!((s[0]).norm() < 1e-12 && (s[1] - c(2.0, 0.0)).norm() < 1e-12);
        let f = parse_expr("exp(z) - 1").unwrap();
        let s = newton_sums(&f, 1, &cfg(1.0)).unwrap();
        assert!(s[0].norm() < 1e-12);
        let s = newton_sums(&f, 3, &cfg(7.0)).unwrap();
        let expected = [c(0.0, 0.0), c(-8.0 * PI * PI, 0.0), c(0.0, 0.0)];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
        assert!(matches!(
            newton_sums(&f, 2, &cfg(7.0)),
            Err(ContourError::CountMismatch { expected: 2, .. })
        ));
    }

    #[test]
    fn newton_identity_examples() {
        let p = newton_to_monic(&[c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p, Poly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        let a = c(0.3, -1.2);
        assert_eq!(newton_to_monic(&[a]), Poly::new(vec![-a, c(1.0, 0.0)]));
        let four_pi2 = 4.0 * PI * PI;
        let p = newton_to_monic(&[c(0.0, 0.0), c(-2.0 * four_pi2, 0.0), c(0.0, 0.0)]);
        let expected = [c(0.0, 0.0), c(four_pi2, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (x, y) in p.coeffs().iter().zip(expected) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    fn swap2() -> SquareMatrix<Complex64> {
        SquareMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn cauchy_matrix_examples() {
        let m = swap2();
        let id = cauchy_matrix_fn(&parse_expr("z").unwrap(), &m, &cfg(2.0)).unwrap();
        assert!((id - m.clone()).max_abs() < 1e-12);
        let k = cauchy_matrix_fn(&parse_expr("2-i").unwrap(), &m, &cfg(2.0)).unwrap();
        assert!((k - SquareMatrix::identity(2).scale(&c(2.0, -1.0))).max_abs() < 1e-12);
        let p = cauchy_matrix_fn(&parse_expr("z^3 - 3*z").unwrap(), &m, &cfg(2.0)).unwrap();
        assert!((p - m.scale(&c(-2.0, 0.0))).max_abs() < 1e-12);
    }

    #[test]
    fn truncated_cvd_cubic() {
        let r = truncated_cvd(&parse_expr("z^3 - 3*z").unwrap(), &cfg(2.0)).unwrap();
        assert_eq!(r.m, 2);
        assert!(
            (r.cvd_value - c(16.0, 0.0)).norm() < 1e-8,
            "{}",
            r.cvd_value
        );
    }

    #[test]
    fn truncated_cvd_exp_minus_z() {
        let r = truncated_cvd(&parse_expr("exp(z) - z").unwrap(), &cfg(7.0)).unwrap();
        let expected = -256.0 * PI.powi(6);
        assert_eq!(r.m, 3);
        assert!(
            (r.cvd_value - c(expected, 0.0)).norm() / expected.abs() < 1e-6,
            "{}",
            r.cvd_value
        );
    }

    #[test]
    fn truncated_cvd_without_critical_points() {
        for radius in [0.5, 5.0, 40.0] {
            let r = truncated_cvd(&parse_expr("exp(z)").unwrap(), &cfg(radius)).unwrap();
            assert_eq!((r.m, r.cvd_value), (0, c(1.0, 0.0)));
        }
    }

    #[test]
    fn stage_is_labeled() {
        let err = truncated_cvd(&parse_expr("z^2 - 4*z").unwrap(), &cfg(2.0)).unwrap_err();
        assert_eq!(err.stage, Stage::CountZeros);
        assert!(err.to_string().starts_with("count_zeros"));
    }

    #[test]
    fn zeros_in_disk_with_multiplicity() {
        let f = parse_expr("(z-1)^2*(z+2)*(z-0.5*i)").unwrap();
        let origin = Complex64::new(0.0, 0.0);
        let z = zeros_in_disk(
            &f,
            Circle {
                center: origin,
                radius: 3.0,
            },
            &cfg(3.0),
        )
        .unwrap();
        let summary: Vec<(i64, i64, usize)> = z
            .iter()
            .map(|l| {
                (
                    (l.point.re * 1e5).round() as i64,
                    (l.point.im * 1e5).round() as i64,
                    l.multiplicity,
                )
            })
            .collect();
        assert_eq!(
            summary,
            vec![(-200000, 0, 1), (0, 50000, 1), (100000, 0, 2)]
        );
        let g = parse_expr("exp(z) - 1").unwrap();
        let z = zeros_in_disk(
            &g,
            Circle {
                center: origin,
                radius: 7.0,
            },
            &cfg(7.0),
        )
        .unwrap();
        assert_eq!(z.len(), 3);
        assert!((z[1].point - c(0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn nudging_escapes_contour_zero() {
        // w' = 2z - 4 vanishes exactly on |z| = 2
        let w = parse_expr("z^2 - 4*z").unwrap();
        let r = truncated_cvd_nudged(&w, &cfg(2.0), false).unwrap();
        assert_eq!(r.diagnostics.nudges, 1);
        assert_eq!(r.m, 1);
        assert!(truncated_cvd_nudged(&w, &cfg(2.0), true).is_err());
    }
}
