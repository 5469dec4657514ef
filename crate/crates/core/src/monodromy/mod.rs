//! Monodromy of the inverse of a polynomial, computed by continuing its
//! fiber along loops around the critical values, and analysis of the
//! permutation group the loops generate.

mod group;
mod probe;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::contour::ContourError;
use crate::expr::{EntireExpr, ExprError};
use crate::kernel::{
    cvd, lex_cmp, min_pairwise_distance, roots, ExactComplex, Field, KernelError, Poly,
};

pub use group::{
    factorial, group_analyze, Capped, GroupReport, Permutation, Verdict, DEFAULT_ORDER_CAP,
};
pub use probe::{
    entire_branch_probe, entire_branch_probe_at, window_monodromy, BranchProbeReport, ProbeConfig,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonodromyError {
    #[error("tracked sheets collided near w = {w} (separation {separation:e})")]
    PathCollision { w: Complex64, separation: f64 },
    #[error("corrector failed to converge near w = {w} at z = {z}")]
    NewtonDivergence { w: Complex64, z: Complex64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("critical point {point} is degenerate (|f''| = {second_derivative:e})")]
    DegenerateCriticalPoint {
        point: Complex64,
        second_derivative: f64,
    },
    #[error("window fiber unstable: {0}")]
    WindowFiberUnstable(String),
    #[error("critical point index {index} out of range ({found} found in the search disk)")]
    CriticalPointIndex { index: usize, found: usize },
    #[error("degree {degree} is below 2")]
    DegreeTooSmall { degree: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A map that can be evaluated with its derivative.
pub trait Holomorphic {
    fn value_and_derivative(&self, w: Complex64) -> Result<(Complex64, Complex64), MonodromyError>;
}

impl Holomorphic for Poly<Complex64> {
    fn value_and_derivative(&self, w: Complex64) -> Result<(Complex64, Complex64), MonodromyError> {
        Ok(self.eval_with_derivative(w))
    }
}

/// An expression paired with its derivative.
#[derive(Clone, Debug)]
pub struct ExprMap {
    pub f: EntireExpr,
    pub fprime: EntireExpr,
}

impl ExprMap {
    pub fn new(f: EntireExpr) -> Self {
        let fprime = f.differentiate();
        Self { f, fprime }
    }
}

impl Holomorphic for ExprMap {
    fn value_and_derivative(&self, w: Complex64) -> Result<(Complex64, Complex64), MonodromyError> {
        Ok((self.f.evaluate(w)?, self.fprime.evaluate(w)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalData {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

/// Critical points of `p` (roots of `p'`, sorted lexicographically) and the
/// index-aligned critical values.
pub fn critical_data(p: &Poly<Complex64>) -> Result<CriticalData, MonodromyError> {
    let degree = p.degree().unwrap_or(0);
    if degree < 2 {
        return Err(MonodromyError::DegreeTooSmall { degree });
    }
    let mut points = roots(&p.derivative())?;
    points.sort_by(lex_cmp);
    let values = points.iter().map(|&w| p.eval(&w)).collect();
    Ok(CriticalData { points, values })
}

/// A closed path starting and ending at `base`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Loop {
    pub base: Complex64,
    pub target: Complex64,
    pub ring_radius: f64,
    pub samples: Vec<Complex64>,
}

impl Loop {
    /// The circle `|z - center| = radius` traversed once counterclockwise from `center + radius`.
    pub fn circle(center: Complex64, radius: f64, n: usize) -> Self {
        let base = center + radius;
        let mut samples: Vec<Complex64> = (0..n)
            .map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
            .collect();
        samples.push(base);
        Self {
            base,
            target: center,
            ring_radius: radius,
            samples,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            samples,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopSet {
    pub base: Complex64,
    pub loops: Vec<Loop>,
    /// Number of critical values that coincided with another one and were merged.
    pub collapsed: usize,
}

const CIRCLE_SAMPLES: usize = 64;

fn coincide(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * a.norm().max(b.norm()).max(1.0)
}

/// One lasso per distinct critical value, all based at `2·max|v| + 1`.
///
/// Each lasso runs from the base towards its target, goes once
/// counterclockwise around a ring of radius `min(1, d/3)` (`d` the distance
/// to the nearest other value) and returns along the same tail. Tails pass
/// other values on their left along those values' rings. Loops are ordered
/// by the direction of the target as seen from the base.
pub fn build_loops(values: &[Complex64]) -> LoopSet {
    let mut distinct: Vec<Complex64> = Vec::new();
    for &v in values {
        if !distinct.iter().any(|&u| coincide(u, v)) {
            distinct.push(v);
        }
    }
    let collapsed = values.len() - distinct.len();
    let max = distinct.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut base = Complex64::new(2.0 * max + 1.0, 0.0);
    if distinct.iter().any(|&v| coincide(v, base)) {
        base += Complex64::new(0.0, 0.5);
    }
    let rings: Vec<f64> = distinct
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = distinct
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &u)| (u - v).norm())
                .fold(f64::INFINITY, f64::min);
            (d / 3.0).min(1.0)
        })
        .collect();

    let mut order: Vec<usize> = (0..distinct.len()).collect();
    order.sort_by(|&i, &j| {
        let key = |v: Complex64| (base - v).arg();
        key(distinct[i]).total_cmp(&key(distinct[j])).then(
            (distinct[i] - base)
                .norm()
                .total_cmp(&(distinct[j] - base).norm()),
        )
    });

    let loops = order
        .into_iter()
        .map(|i| {
            let v = distinct[i];
            let r = rings[i];
            let entry = v + (base - v) / (base - v).norm() * r;
            let mut tail = vec![base];
            tail.extend(tail_path(base, entry, i, &distinct, &rings));
            let start_angle = (entry - v).arg();
            let mut samples = tail.clone();
            samples.extend((1..=CIRCLE_SAMPLES).map(|k| {
                v + Complex64::from_polar(
                    r,
                    start_angle + 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64,
                )
            }));
            *samples.last_mut().expect("nonempty") = entry;
            samples.extend(tail.iter().rev().skip(1));
            Loop {
                base,
                target: v,
                ring_radius: r,
                samples,
            }
        })
        .collect();
    LoopSet {
        base,
        loops,
        collapsed,
    }
}

/// Points after `from` leading to `to`, with arcs around every other value
/// whose ring the segment crosses.
fn tail_path(
    from: Complex64,
    to: Complex64,
    skip: usize,
    values: &[Complex64],
    rings: &[f64],
) -> Vec<Complex64> {
    let dir = to - from;
    let len = dir.norm();
    let unit = dir / len;
    // (parameter along the segment, center, radius) of each ring in the way
    let mut obstacles: Vec<(f64, Complex64, f64)> = values
        .iter()
        .zip(rings)
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .filter_map(|(_, (&u, &r))| {
            let t = ((u - from) * unit.conj()).re;
            let offset = ((u - from) * unit.conj()).im;
            (t > 0.0 && t < len && offset.abs() < r).then_some((t, u, r))
        })
        .collect();
    obstacles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = Vec::new();
    for (_, u, r) in obstacles {
        let rel = (u - from) * unit.conj();
        let half = (r * r - rel.im * rel.im).sqrt();
        let enter = from + unit * (rel.re - half);
        let exit = from + unit * (rel.re + half);
        out.push(enter);
        let a0 = (enter - u).arg();
        let mut a1 = (exit - u).arg();
        // the left side of the direction of travel is the clockwise way round
        while a1 > a0 {
            a1 -= 2.0 * PI;
        }
        for k in 1..CIRCLE_SAMPLES / 2 {
            let a = a0 + (a1 - a0) * k as f64 / (CIRCLE_SAMPLES / 2) as f64;
            out.push(u + Complex64::from_polar(r, a));
        }
        out.push(exit);
    }
    out.push(to);
    out
}

/// Step control of the fiber tracker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    pub collision_tol: f64,
    pub newton_iters: usize,
    /// Smallest step as a fraction of the sample segment.
    pub min_step: f64,
    /// When set, every tracked point must stay in `|w - center| < radius`.
    pub window: Option<(Complex64, f64)>,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            collision_tol: 1e-10,
            newton_iters: 12,
            min_step: 1e-12,
            window: None,
        }
    }
}

fn correct<H: Holomorphic>(
    h: &H,
    mut w: Complex64,
    z: Complex64,
    iters: usize,
) -> Result<Option<Complex64>, MonodromyError> {
    for _ in 0..iters {
        let (v, d) = h.value_and_derivative(w)?;
        let step = (v - z) / d;
        if !step.is_finite() {
            return Ok(None);
        }
        w -= step;
        if step.norm() <= 1e-14 * w.norm().max(1.0) {
            return Ok(Some(w));
        }
    }
    let (v, _) = h.value_and_derivative(w)?;
    Ok(((v - z).norm() <= 1e-12 * z.norm().max(1.0)).then_some(w))
}

/// Continues each point of `fiber` (solutions of `h(w) = samples[0]`) along
/// the polyline through `samples` with an Euler predictor and a Newton
/// corrector. A step is halved whenever a point would move more than a
/// third of the current minimal separation of the fiber.
pub fn track_path<H: Holomorphic>(
    h: &H,
    fiber: &[Complex64],
    samples: &[Complex64],
    opts: &TrackOptions,
) -> Result<Vec<Complex64>, MonodromyError> {
    let mut current = fiber.to_vec();
    for pair in samples.windows(2) {
        let (za, zb) = (pair[0], pair[1]);
        let mut s = 0.0;
        let mut step: f64 = 1.0;
        while s < 1.0 {
            step = step.min(1.0 - s);
            let z0 = za + (zb - za) * s;
            let z1 = if s + step >= 1.0 {
                zb
            } else {
                za + (zb - za) * (s + step)
            };
            let sep = min_pairwise_distance(&current).unwrap_or(f64::INFINITY);
            if sep < opts.collision_tol {
                return Err(MonodromyError::PathCollision {
                    w: current[0],
                    separation: sep,
                });
            }
            match advance(h, &current, z0, z1, sep, opts)? {
                Some(next) => {
                    if let Some((c, r)) = opts.window {
                        if let Some(w) = next.iter().find(|w| (*w - c).norm() >= r) {
                            return Err(MonodromyError::WindowFiberUnstable(format!(
                                "sheet at {w} left the window of radius {r} around {c}"
                            )));
                        }
                    }
                    current = next;
                    s += step;
                    step *= 2.0;
                }
                None => {
                    step /= 2.0;
                    if step < opts.min_step {
                        return Err(MonodromyError::NewtonDivergence {
                            w: current[0],
                            z: z0,
                        });
                    }
                }
            }
        }
    }
    Ok(current)
}

fn advance<H: Holomorphic>(
    h: &H,
    fiber: &[Complex64],
    z0: Complex64,
    z1: Complex64,
    sep: f64,
    opts: &TrackOptions,
) -> Result<Option<Vec<Complex64>>, MonodromyError> {
    let limit = sep / 3.0;
    let mut next = Vec::with_capacity(fiber.len());
    for &w in fiber {
        let (_, d) = h.value_and_derivative(w)?;
        let predicted = w + (z1 - z0) / d;
        if !predicted.is_finite() || (predicted - w).norm() > limit {
            return Ok(None);
        }
        match correct(h, predicted, z1, opts.newton_iters)? {
            Some(c) if (c - w).norm() <= limit => next.push(c),
            _ => return Ok(None),
        }
    }
    Ok(Some(next))
}

/// Permutation taking sheet `i` (the start point `start[i]`) to the start
/// point nearest to where it ended. Matches must be closer than a third of
/// the fiber's minimal separation.
pub fn match_fibers(start: &[Complex64], end: &[Complex64]) -> Result<Permutation, MonodromyError> {
    let sep = min_pairwise_distance(start).unwrap_or(f64::INFINITY);
    let mut images = Vec::with_capacity(end.len());
    let mut used = vec![false; start.len()];
    for &w in end {
        let (j, d) = start
            .iter()
            .enumerate()
            .map(|(j, &s)| (j, (s - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty fiber");
        if d >= sep / 3.0 || used[j] {
            return Err(MonodromyError::PathCollision { w, separation: d });
        }
        used[j] = true;
        images.push(j);
    }
    Ok(Permutation::from_zero_based(images))
}

/// The fiber `p(w) = z`, sorted lexicographically (this fixes the sheet labels).
pub fn poly_fiber(p: &Poly<Complex64>, z: Complex64) -> Result<Vec<Complex64>, MonodromyError> {
    let shifted = p.clone() - Poly::constant(z);
    let mut fiber = roots(&shifted)?;
    fiber.sort_by(lex_cmp);
    Ok(fiber)
}

/// Monodromy permutation of `p^{-1}` along `lp`.
pub fn track_fiber(p: &Poly<Complex64>, lp: &Loop) -> Result<Permutation, MonodromyError> {
    let fiber = poly_fiber(p, lp.base)?;
    let opts = TrackOptions::default();
    if let Some(sep) = min_pairwise_distance(&fiber) {
        if sep < opts.collision_tol {
            return Err(MonodromyError::PathCollision {
                w: fiber[0],
                separation: sep,
            });
        }
    }
    let end = track_path(p, &fiber, &lp.samples, &opts)?;
    match_fibers(&fiber, &end)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopReport {
    pub target: Complex64,
    pub ring_radius: f64,
    pub permutation: Permutation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub critical_points: Vec<Complex64>,
    pub critical_values: Vec<Complex64>,
    pub base: Complex64,
    pub base_fiber: Vec<Complex64>,
    pub loops: Vec<LoopReport>,
    pub collapsed: usize,
    #[serde(flatten)]
    pub group: GroupReport,
}

/// Critical data, lassos, per-loop permutations and their group.
pub fn monodromy_group(
    p: &Poly<Complex64>,
    order_cap: usize,
) -> Result<MonodromyReport, MonodromyError> {
    let data = critical_data(p)?;
    let set = build_loops(&data.values);
    let m = p.degree().unwrap_or(0);
    let loops = set
        .loops
        .iter()
        .map(|lp| {
            Ok(LoopReport {
                target: lp.target,
                ring_radius: lp.ring_radius,
                permutation: track_fiber(p, lp)?,
            })
        })
        .collect::<Result<Vec<_>, MonodromyError>>()?;
    let generators: Vec<Permutation> = loops.iter().map(|l| l.permutation.clone()).collect();
    let mut group = group_analyze(&generators, m, order_cap)?;
    if set.collapsed > 0 {
        group.verdict = Verdict::Inconclusive;
    }
    Ok(MonodromyReport {
        critical_points: data.points,
        critical_values: data.values,
        base: set.base,
        base_fiber: poly_fiber(p, set.base)?,
        loops,
        collapsed: set.collapsed,
        group,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadicalsVerdict {
    NotExpressedByRadicals,
    NoConclusionDegreeBelowFive,
    NoConclusionCvdVanishes,
}

impl RadicalsVerdict {
    pub fn text(&self) -> &'static str {
        match self {
            RadicalsVerdict::NotExpressedByRadicals => "not expressed by radicals",
            RadicalsVerdict::NoConclusionDegreeBelowFive => "no conclusion (degree below 5)",
            RadicalsVerdict::NoConclusionCvdVanishes => "no conclusion (CVD vanishes)",
        }
    }
}

pub const RADICALS_BASIS: &str = "a nonzero critical values discriminant makes the monodromy group of the \
inverse the full symmetric group S(m); for m >= 5 that group is not solvable, so the inverse is not \
expressed by radicals";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadicalsReport {
    pub m: usize,
    pub cvd: String,
    pub cvd_exact: ExactComplex,
    pub verdict: RadicalsVerdict,
    pub verdict_text: &'static str,
    pub basis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<MonodromyReport>,
    /// Whether the tracked group agrees with the verdict, when cross-checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check_agrees: Option<bool>,
}

/// Radicals verdict for `y^m + a_{m-1} y^{m-1} + ... + a_0` from the exact
/// critical values discriminant, optionally cross-checked by tracking.
pub fn radicals_verdict(
    lower: &[ExactComplex],
    cross_check: Option<usize>,
) -> Result<RadicalsReport, MonodromyError> {
    let m = lower.len();
    if m < 2 {
        return Err(MonodromyError::DegreeTooSmall { degree: m });
    }
    let value = cvd(lower)?;
    let verdict = if value == ExactComplex::from_int(0) {
        RadicalsVerdict::NoConclusionCvdVanishes
    } else if m < 5 {
        RadicalsVerdict::NoConclusionDegreeBelowFive
    } else {
        RadicalsVerdict::NotExpressedByRadicals
    };
    let (monodromy, cross_check_agrees) = match cross_check {
        Some(cap) => {
            let approx: Vec<Complex64> = lower.iter().map(Field::to_complex).collect();
            let p = Poly::monic_from_lower(&approx);
            let report = monodromy_group(&p, cap)?;
            let symmetric = report.group.verdict == Verdict::SymmetricGroup;
            let agrees = match verdict {
                RadicalsVerdict::NotExpressedByRadicals => {
                    symmetric && report.group.solvable != Capped::Known(true)
                }
                RadicalsVerdict::NoConclusionDegreeBelowFive => symmetric,
                RadicalsVerdict::NoConclusionCvdVanishes => true,
            };
            (Some(report), Some(agrees))
        }
        None => (None, None),
    };
    Ok(RadicalsReport {
        m,
        cvd: value.to_string(),
        cvd_exact: value,
        verdict,
        verdict_text: verdict.text(),
        basis: RADICALS_BASIS,
        monodromy,
        cross_check_agrees,
    })
}
