use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use super::{
    match_fibers, track_path, ExprMap, Holomorphic, Loop, MonodromyError, Permutation, TrackOptions,
};
use crate::contour::{zeros_in_disk, Circle, ContourConfig};
use crate::expr::EntireExpr;
use crate::kernel::lex_cmp;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    /// Radius of the disk around the origin in which critical points are indexed.
    pub search_radius: f64,
    pub window_radius: f64,
    pub degeneracy_tol: f64,
    pub loop_samples: usize,
    pub contour: ContourConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            search_radius: 10.0,
            window_radius: 2.0,
            degeneracy_tol: 1e-8,
            loop_samples: 128,
            contour: ContourConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchProbeReport {
    pub critical_point: Complex64,
    pub critical_value: Complex64,
    pub second_derivative_modulus: f64,
    pub loop_radius: f64,
    pub base: Complex64,
    pub window_radius: f64,
    pub window_fiber: Vec<Complex64>,
    pub permutation: Permutation,
    pub local_transposition: bool,
}

fn by_modulus_then_arg(a: &Complex64, b: &Complex64) -> Ordering {
    let scale = a.norm().max(b.norm()).max(1.0);
    if (a.norm() - b.norm()).abs() <= 1e-9 * scale {
        a.arg().total_cmp(&b.arg())
    } else {
        a.norm().total_cmp(&b.norm())
    }
}

/// Local branching of `f^{-1}` at the `k`-th critical point in the search
/// disk, the points being ordered by modulus and then argument.
pub fn entire_branch_probe(
    f: &EntireExpr,
    k: usize,
    cfg: &ProbeConfig,
) -> Result<BranchProbeReport, MonodromyError> {
    let origin = Circle {
        center: Complex64::new(0.0, 0.0),
        radius: cfg.search_radius,
    };
    let contour = ContourConfig {
        radius: cfg.search_radius,
        ..cfg.contour
    };
    let mut points: Vec<Complex64> = zeros_in_disk(&f.differentiate(), origin, &contour)?
        .into_iter()
        .map(|z| z.point)
        .collect();
    points.sort_by(by_modulus_then_arg);
    let &w = points.get(k).ok_or(MonodromyError::CriticalPointIndex {
        index: k,
        found: points.len(),
    })?;
    entire_branch_probe_at(f, w, cfg)
}

/// Local branching of `f^{-1}` at the critical point nearest to `guess`.
///
/// The fiber over a point close to the critical value is collected inside
/// the window `|w - w_k| < window_radius` and tracked once around the
/// critical value. The loop radius keeps the two colliding sheets near
/// a quarter of the window radius from `w_k`.
pub fn entire_branch_probe_at(
    f: &EntireExpr,
    guess: Complex64,
    cfg: &ProbeConfig,
) -> Result<BranchProbeReport, MonodromyError> {
    let fprime = f.differentiate();
    let w = polish_critical_point(&ExprMap::new(fprime.clone()), guess)?;
    let z = f.evaluate(w)?;
    let f2 = fprime.differentiate().evaluate(w)?.norm();
    if f2 <= cfg.degeneracy_tol * z.norm().max(1.0) {
        return Err(MonodromyError::DegenerateCriticalPoint {
            point: w,
            second_derivative: f2,
        });
    }
    let window = Circle {
        center: w,
        radius: cfg.window_radius,
    };
    let window_cfg = ContourConfig {
        radius: cfg.window_radius,
        ..cfg.contour
    };
    let mut radius = (f2 * (cfg.window_radius / 4.0).powi(2) / 2.0).min(1.0);
    for other in zeros_in_disk(&fprime, window, &window_cfg)? {
        if (other.point - w).norm() > 1e-6 * w.norm().max(1.0) {
            let d = (f.evaluate(other.point)? - z).norm();
            radius = radius.min(d / 3.0);
        }
    }
    let lp = Loop::circle(z, radius, cfg.loop_samples);
    let (window_fiber, permutation) = window_monodromy(f, window, &lp, &window_cfg)?;
    Ok(BranchProbeReport {
        critical_point: w,
        critical_value: z,
        second_derivative_modulus: f2,
        loop_radius: radius,
        base: lp.base,
        window_radius: cfg.window_radius,
        window_fiber,
        local_transposition: permutation.is_transposition(),
        permutation,
    })
}

fn polish_critical_point(fprime: &ExprMap, mut w: Complex64) -> Result<Complex64, MonodromyError> {
    for _ in 0..50 {
        let (v, d) = fprime.value_and_derivative(w)?;
        let step = v / d;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.norm() <= 1e-15 * w.norm().max(1.0) {
            break;
        }
    }
    Ok(w)
}

/// The fiber of `f` over `lp.base` inside `window` (sorted lexicographically)
/// and the permutation it undergoes along `lp`. Every sheet must stay in
/// the window.
pub fn window_monodromy(
    f: &EntireExpr,
    window: Circle,
    lp: &Loop,
    cfg: &ContourConfig,
) -> Result<(Vec<Complex64>, Permutation), MonodromyError> {
    let shifted = f.sub(&EntireExpr::constant(lp.base));
    let located = zeros_in_disk(&shifted, window, cfg)?;
    if located.iter().any(|z| z.multiplicity != 1) {
        return Err(MonodromyError::WindowFiberUnstable(
            "the base point is a critical value of a window sheet".into(),
        ));
    }
    let mut fiber: Vec<Complex64> = located.into_iter().map(|z| z.point).collect();
    fiber.sort_by(lex_cmp);
    if fiber.is_empty() {
        return Ok((fiber, Permutation::identity(0)));
    }
    let opts = TrackOptions {
        window: Some((window.center, window.radius)),
        ..TrackOptions::default()
    };
    let end = track_path(&ExprMap::new(f.clone()), &fiber, &lp.samples, &opts)?;
    let perm = match_fibers(&fiber, &end)?;
    Ok((fiber, perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn exp_minus_w_branches_simply() {
        let f = parse_expr("exp(z) - z").unwrap();
        let r = entire_branch_probe(&f, 0, &ProbeConfig::default()).unwrap();
        assert!(r.critical_point.norm() < 1e-12);
        assert!((r.critical_value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.window_fiber.len(), 2);
        assert!(r.local_transposition);
        let r = entire_branch_probe(&f, 2, &ProbeConfig::default()).unwrap();
        assert!((r.critical_point - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-9);
        assert!(r.local_transposition);
    }

    #[test]
    fn noncritical_loop_is_identity() {
        let f = parse_expr("exp(z) - z").unwrap();
        let window = Circle {
            center: Complex64::new(0.0, 0.0),
            radius: 2.0,
        };
        let lp = Loop::circle(Complex64::new(1.5, 0.2), 0.1, 64);
        let (fiber, perm) =
            window_monodromy(&f, window, &lp, &ContourConfig::with_radius(2.0)).unwrap();
        assert_eq!(fiber.len(), 2);
        assert!(perm.is_identity());
    }

    #[test]
    fn degenerate_point_rejected() {
        let f = parse_expr("z^3").unwrap();
        let err = entire_branch_probe_at(&f, Complex64::new(0.0, 0.0), &ProbeConfig::default())
            .unwrap_err();
        assert!(matches!(
            err,
            MonodromyError::DegenerateCriticalPoint { .. }
        ));
    }
}
