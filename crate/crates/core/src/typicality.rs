//! Structural classifiers for surjectivity and for the size of the critical
//! set, a numerical typicality probe on a disk, the `Θ_m` lower bound for
//! `|e^z - εz|` on square contours, and two perturbation constructions:
//! Hermite interpolation with vanishing derivatives and splitting of
//! multiple zeros.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::contour::{
    truncated_cvd_nudged, with_radius_nudging, zeros_in_disk, Circle, ContourConfig, ContourError,
    Stage, StageError,
};
use crate::expr::EntireExpr;
use crate::kernel::{
    lex_cmp, min_pairwise_distance, roots, ExactComplex, Field, KernelError, Poly,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypicalityError {
    #[error("the expression is constant")]
    ConstantInput,
    #[error("interpolation points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },
    #[error("{points} points but {values} values")]
    LengthMismatch { points: usize, values: usize },
    #[error("delta^(1/{multiplicity}) = {split_radius:e} is not below half the root separation {limit:e}")]
    DeltaTooLarge {
        multiplicity: usize,
        split_radius: f64,
        limit: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Stage(#[from] StageError),
}

/// `b·exp(Q(z)) + a` when the expression has that normal form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surjectivity {
    NonSurjective {
        b: Complex64,
        #[serde(rename = "Q")]
        q: Poly<Complex64>,
        a: Complex64,
    },
    Surjective,
}

/// Decided from the normal form: an expression omits a value exactly when
/// it is `b·exp(Q) + a` (including constants, with `b = 0`).
pub fn classify_surjectivity(f: &EntireExpr) -> Surjectivity {
    let zero = Complex64::new(0.0, 0.0);
    let mut b = zero;
    let mut q = Poly::zero();
    let mut a = zero;
    let mut exp_terms = 0;
    for t in f.terms() {
        match (t.power, t.has_exponential()) {
            (0, false) => a = t.coeff,
            (0, true) => {
                exp_terms += 1;
                b = t.coeff;
                q = t.exponent.clone();
            }
            _ => return Surjectivity::Surjective,
        }
    }
    if exp_terms <= 1 {
        Surjectivity::NonSurjective { b, q, a }
    } else {
        Surjectivity::Surjective
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "m", rename_all = "snake_case")]
pub enum CriticalCardinality {
    Finite(usize),
    Infinite,
}

/// Finite exactly when `f'` is a single `P·exp(Q)`; then the count is `deg P`.
pub fn classify_critical_cardinality(
    f: &EntireExpr,
) -> Result<CriticalCardinality, TypicalityError> {
    if f.is_constant() {
        return Err(TypicalityError::ConstantInput);
    }
    let groups = f.differentiate().exponential_groups();
    Ok(match groups.as_slice() {
        [(_, p)] => CriticalCardinality::Finite(p.degree().unwrap_or(0)),
        _ => CriticalCardinality::Infinite,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TypicalityConfig {
    pub degeneracy_tol: f64,
    pub gap_tol: f64,
    pub strict_radius: bool,
    pub contour: ContourConfig,
}

impl Default for TypicalityConfig {
    fn default() -> Self {
        Self {
            degeneracy_tol: 1e-8,
            gap_tol: 1e-8,
            strict_radius: false,
            contour: ContourConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointInfo {
    pub point: Complex64,
    pub value: Complex64,
    pub second_derivative_modulus: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "snake_case")]
pub enum TypicalVerdict {
    TypicalEvidence,
    NotTypical(String),
}

/// The disk-truncated CVD computed alongside the probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corroboration {
    pub m: usize,
    pub cvd_value: Complex64,
    /// `|cvd|` over `Π_{i<j} max(1, |v_i|, |v_j|)²`.
    pub cvd_relative: f64,
    pub cvd_nonzero: bool,
    pub agrees_with_gap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub surjectivity: Surjectivity,
    pub critical_cardinality: CriticalCardinality,
    pub radius_requested: f64,
    pub probe_radius: f64,
    pub nudges: u32,
    pub critical_points_in_disk: Vec<CriticalPointInfo>,
    pub min_value_gap: Option<f64>,
    pub degeneracy_tol: f64,
    pub gap_tol: f64,
    pub verdict: TypicalVerdict,
    pub corroboration: Option<Corroboration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corroboration_error: Option<String>,
}

/// Classifiers plus the critical data of `f` in `|z| < cfg.contour.radius`.
///
/// Critical points come from [`zeros_in_disk`] applied to `f'`. A point is
/// degenerate when it is multiple or `|f''| ≤ degeneracy_tol·max(1, |f|)`;
/// two values coincide when their distance is at most
/// `gap_tol·max(1, max|v|)`.
pub fn typicality_probe(
    f: &EntireExpr,
    cfg: &TypicalityConfig,
) -> Result<TypicalityReport, TypicalityError> {
    let surjectivity = classify_surjectivity(f);
    let critical_cardinality = classify_critical_cardinality(f)?;
    let fprime = f.differentiate();
    let fsecond = fprime.differentiate();
    let (located, radius, nudges) = with_radius_nudging(&cfg.contour, cfg.strict_radius, |c| {
        let circle = Circle {
            center: Complex64::new(0.0, 0.0),
            radius: c.radius,
        };
        zeros_in_disk(&fprime, circle, c).map_err(|source| StageError {
            stage: Stage::CountZeros,
            source,
        })
    })?;
    let at_stage = |source: ContourError| StageError {
        stage: Stage::CountZeros,
        source,
    };
    let mut points = Vec::with_capacity(located.len());
    for z in located {
        points.push(CriticalPointInfo {
            point: z.point,
            value: f.evaluate(z.point).map_err(|e| at_stage(e.into()))?,
            second_derivative_modulus: fsecond
                .evaluate(z.point)
                .map_err(|e| at_stage(e.into()))?
                .norm(),
            multiplicity: z.multiplicity,
        });
    }
    let values: Vec<Complex64> = points.iter().map(|p| p.value).collect();
    let min_value_gap = min_pairwise_distance(&values);
    let value_scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let gap_ok = min_value_gap.is_none_or(|g| g > cfg.gap_tol * value_scale);

    let mut reasons = Vec::new();
    if let Surjectivity::NonSurjective { .. } = surjectivity {
        reasons.push("non-surjective".to_string());
    }
    match critical_cardinality {
        CriticalCardinality::Finite(0) => reasons.push("no critical points".to_string()),
        CriticalCardinality::Finite(m) => reasons.push(format!("finite critical set ({m} points)")),
        CriticalCardinality::Infinite => {}
    }
    for p in &points {
        if p.multiplicity > 1
            || p.second_derivative_modulus <= cfg.degeneracy_tol * p.value.norm().max(1.0)
        {
            reasons.push(format!("degenerate critical point at {}", p.point));
        }
    }
    if !gap_ok {
        reasons.push("coincident critical values".to_string());
    }
    let verdict = if reasons.is_empty() {
        TypicalVerdict::TypicalEvidence
    } else {
        TypicalVerdict::NotTypical(reasons.join("; "))
    };

    let strict = ContourConfig {
        radius,
        ..cfg.contour
    };
    let (corroboration, corroboration_error) = match truncated_cvd_nudged(f, &strict, true) {
        Ok(r) => {
            let mut scale = 1.0;
            for (i, a) in values.iter().enumerate() {
                for b in &values[i + 1..] {
                    scale *= a.norm().max(b.norm()).max(1.0).powi(2);
                }
            }
            let cvd_relative = r.cvd_value.norm() / scale;
            let cvd_nonzero = cvd_relative > cfg.gap_tol;
            (
                Some(Corroboration {
                    m: r.m,
                    cvd_value: r.cvd_value,
                    cvd_relative,
                    cvd_nonzero,
                    agrees_with_gap: cvd_nonzero == gap_ok
                        && r.m == points.iter().map(|p| p.multiplicity).sum::<usize>(),
                }),
                None,
            )
        }
        Err(e) => (None, Some(e.to_string())),
    };

    Ok(TypicalityReport {
        surjectivity,
        critical_cardinality,
        radius_requested: cfg.contour.radius,
        probe_radius: radius,
        nudges,
        critical_points_in_disk: points,
        min_value_gap,
        degeneracy_tol: cfg.degeneracy_tol,
        gap_tol: cfg.gap_tol,
        verdict,
        corroboration,
        corroboration_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaReport {
    pub epsilon: f64,
    pub m: u32,
    pub samples: usize,
    pub theta: f64,
    /// `Θ_m ≤ 0`, so the bound says nothing.
    pub vacuous: bool,
    pub empirical_min: f64,
    pub argmin: Complex64,
    pub slack: f64,
    pub holds: bool,
}

/// `Θ_m = min{e^{πm} - √2·επm, επm - 1}`.
pub fn theta(epsilon: f64, m: u32) -> f64 {
    let pm = PI * m as f64;
    (pm.exp() - 2f64.sqrt() * epsilon * pm).min(epsilon * pm - 1.0)
}

/// `Θ_m` against the minimum of `|e^z - εz|` over `samples` equally spaced
/// points on the boundary of the square `|Re z|, |Im z| ≤ πm`, starting at
/// the corner `πm(1 - i)` and running counterclockwise.
pub fn theta_bound(epsilon: f64, m: u32, samples: usize) -> Result<ThetaReport, TypicalityError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(TypicalityError::InvalidInput(
            "epsilon must be positive".into(),
        ));
    }
    if m == 0 {
        return Err(TypicalityError::InvalidInput("m must be positive".into()));
    }
    if samples < 100 {
        return Err(TypicalityError::InvalidInput(
            "at least 100 samples are required".into(),
        ));
    }
    let h = PI * m as f64;
    let corners = [
        Complex64::new(h, -h),
        Complex64::new(h, h),
        Complex64::new(-h, h),
        Complex64::new(-h, -h),
    ];
    let side = 2.0 * h;
    let mut empirical_min = f64::INFINITY;
    let mut argmin = corners[0];
    for k in 0..samples {
        let s = 4.0 * side * k as f64 / samples as f64;
        let edge = ((s / side) as usize).min(3);
        let t = (s - edge as f64 * side) / side;
        let z = corners[edge] + (corners[(edge + 1) % 4] - corners[edge]) * t;
        let v = (z.exp() - z * epsilon).norm();
        if v < empirical_min {
            empirical_min = v;
            argmin = z;
        }
    }
    let theta = theta(epsilon, m);
    let slack = 1e-9 * theta.abs().max(1.0);
    Ok(ThetaReport {
        epsilon,
        m,
        samples,
        theta,
        vacuous: theta <= 0.0,
        empirical_min,
        argmin,
        slack,
        holds: empirical_min >= theta - slack,
    })
}

/// The polynomial of degree at most `2m` with `P(z_j) = y_j` and `P'(z_j) = 0`.
///
/// Built as `Σ_j y_j·q_j(z)·ℓ_j(z)²` where `ℓ_j` is the Lagrange basis
/// polynomial of `z_j` and
/// `q_j(z) = 1 + (z - z_j)² - 2ℓ_j'(z_j)(z - z_j)`, with
/// `ℓ_j'(z_j) = Σ_{k≠j} 1/(z_j - z_k)`.
pub fn hermite_interpolant(
    points: &[Complex64],
    values: &[Complex64],
) -> Result<Poly<Complex64>, TypicalityError> {
    if points.len() != values.len() {
        return Err(TypicalityError::LengthMismatch {
            points: points.len(),
            values: values.len(),
        });
    }
    for (i, (z, y)) in points.iter().zip(values).enumerate() {
        if !(z.is_finite() && y.is_finite()) {
            return Err(TypicalityError::InvalidInput(format!(
                "entry {i} is not finite"
            )));
        }
    }
    for (i, a) in points.iter().enumerate() {
        if let Some(j) = points[i + 1..].iter().position(|b| a == b) {
            return Err(TypicalityError::DuplicatePoints {
                first: i,
                second: i + 1 + j,
            });
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut total = Poly::zero();
    for (j, (&zj, &yj)) in points.iter().zip(values).enumerate() {
        let mut basis = Poly::constant(yj);
        let mut slope = Complex64::new(0.0, 0.0);
        for (k, &zk) in points.iter().enumerate() {
            if k != j {
                let inv = (zj - zk).inv();
                let factor = Poly::new(vec![-zk * inv, inv]);
                basis = basis * factor.clone() * factor;
                slope += inv;
            }
        }
        // q_j in powers of z: 1 + z_j² + 2 z_j s + (-2 z_j - 2 s) z + z²
        let q = Poly::new(vec![
            one + zj * zj + zj * slope * 2.0,
            -(zj + slope) * 2.0,
            one,
        ]);
        total = total + basis * q;
    }
    Ok(total)
}

/// Largest `|P(z_j) - y_j|` and largest `|P'(z_j)|`, evaluated exactly.
pub fn hermite_residuals(
    p: &Poly<Complex64>,
    points: &[Complex64],
    values: &[Complex64],
) -> (f64, f64) {
    let exact = |z: Complex64| ExactComplex::from_complex(z);
    let Some(coeffs) = p
        .coeffs()
        .iter()
        .map(|&c| exact(c))
        .collect::<Option<Vec<_>>>()
    else {
        return (f64::NAN, f64::NAN);
    };
    let pe = Poly::new(coeffs);
    let de = pe.derivative();
    points
        .iter()
        .zip(values)
        .fold((0.0, 0.0), |(rv, rd), (&z, &y)| {
            match (exact(z), exact(y)) {
                (Some(ze), Some(ye)) => {
                    let v = (pe.eval(&ze) - ye).to_complex().norm();
                    let d = de.eval(&ze).to_complex().norm();
                    (f64::max(rv, v), f64::max(rd, d))
                }
                _ => (f64::NAN, f64::NAN),
            }
        })
}

/// Numerically coincident roots grouped around their centroid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitOutcome {
    /// False when the input had no multiple root and was returned unchanged.
    pub split: bool,
    pub poly: Poly<Complex64>,
    pub clusters: Vec<RootCluster>,
    /// Roots of the result, sorted lexicographically.
    pub roots: Vec<Complex64>,
}

/// Smallest linking radius for a multiple root.
pub const CLUSTER_RADIUS: f64 = 1e-6;

/// Slack between the predicted spread of a multiple root and its linking radius.
const CLUSTER_SLACK: f64 = 8.0;

/// Linking radius for `k` roots of `p` coalescing at `c`, where `rest` are the
/// other roots: the double-precision spread `(ε·Σ|a_i||c|^i / |q(c)|)^{1/k}` of a
/// `k`-fold root with cofactor `q`, scaled by [`CLUSTER_SLACK`] and never below
/// [`CLUSTER_RADIUS`].
pub fn cluster_radius(p: &Poly<Complex64>, c: Complex64, k: usize, rest: &[Complex64]) -> f64 {
    let r = c.norm();
    let size: f64 = p
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, a| acc * r + a.norm());
    let cofactor: f64 = rest.iter().map(|z| (c - z).norm()).product();
    let lead = p.coeffs().last().map_or(1.0, |a| a.norm());
    let spread = (f64::EPSILON * size / (lead * cofactor)).powf(1.0 / k as f64);
    if spread.is_finite() {
        (CLUSTER_SLACK * spread).max(CLUSTER_RADIUS)
    } else {
        CLUSTER_RADIUS
    }
}

/// Groups numerically coincident roots around their centroids.
///
/// From the highest multiplicity down, the `k` free roots nearest to a free
/// root become a cluster when all of them lie within [`cluster_radius`] of
/// their centroid.
pub fn cluster_roots(rs: &[Complex64]) -> Vec<RootCluster> {
    let p = Poly::from_roots(rs);
    let mut free: Vec<usize> = (0..rs.len()).collect();
    let mut clusters: Vec<RootCluster> = Vec::new();
    for k in (2..=rs.len()).rev() {
        let mut i = 0;
        while i < free.len() && free.len() >= k {
            let z = rs[free[i]];
            let mut near = free.clone();
            near.sort_by(|&a, &b| (rs[a] - z).norm().total_cmp(&(rs[b] - z).norm()));
            near.truncate(k);
            let center = near.iter().map(|&j| rs[j]).sum::<Complex64>() / k as f64;
            let rest: Vec<Complex64> = (0..rs.len())
                .filter(|j| !near.contains(j))
                .map(|j| rs[j])
                .collect();
            let radius = cluster_radius(&p, center, k, &rest);
            if near.iter().all(|&j| (rs[j] - center).norm() <= radius) {
                clusters.push(RootCluster {
                    center,
                    multiplicity: k,
                });
                free.retain(|j| !near.contains(j));
            } else {
                i += 1;
            }
        }
    }
    clusters.extend(free.iter().map(|&i| RootCluster {
        center: rs[i],
        multiplicity: 1,
    }));
    clusters.sort_by(|a, b| lex_cmp(&a.center, &b.center));
    clusters
}

/// Replaces every multiple root `(z - z_1)^{m_1}` of `p` by
/// `(z - z_1)^{m_1} - δ`, whose roots are `z_1 + δ^{1/m_1}e^{2πiν/m_1}`.
pub fn split_zeros(p: &Poly<Complex64>, delta: f64) -> Result<SplitOutcome, TypicalityError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(TypicalityError::InvalidInput(
            "delta must be positive".into(),
        ));
    }
    let lead = *p.leading().ok_or(KernelError::ZeroPolynomial)?;
    let rs = if p.degree() == Some(0) {
        Vec::new()
    } else {
        roots(p)?
    };
    let clusters = cluster_roots(&rs);
    if clusters.iter().all(|c| c.multiplicity == 1) {
        let mut sorted = rs;
        sorted.sort_by(lex_cmp);
        return Ok(SplitOutcome {
            split: false,
            poly: p.clone(),
            clusters,
            roots: sorted,
        });
    }
    let centers: Vec<Complex64> = clusters.iter().map(|c| c.center).collect();
    let limit = min_pairwise_distance(&centers).map_or(f64::INFINITY, |d| d / 2.0);
    let one = Complex64::new(1.0, 0.0);
    let mut poly = Poly::constant(lead);
    let mut new_roots = Vec::with_capacity(rs.len());
    for c in &clusters {
        let linear = Poly::new(vec![-c.center, one]);
        if c.multiplicity == 1 {
            poly = poly * linear;
            new_roots.push(c.center);
            continue;
        }
        let split_radius = delta.powf(1.0 / c.multiplicity as f64);
        if split_radius >= limit {
            return Err(TypicalityError::DeltaTooLarge {
                multiplicity: c.multiplicity,
                split_radius,
                limit,
            });
        }
        poly =
            poly * (linear.pow(c.multiplicity as u32) - Poly::constant(Complex64::new(delta, 0.0)));
        new_roots.extend((0..c.multiplicity).map(|nu| {
            c.center
                + Complex64::from_polar(split_radius, 2.0 * PI * nu as f64 / c.multiplicity as f64)
        }));
    }
    new_roots.sort_by(lex_cmp);
    Ok(SplitOutcome {
        split: true,
        poly,
        clusters,
        roots: new_roots,
    })
}
