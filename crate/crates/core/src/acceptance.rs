//! The acceptance suite: each criterion runs its checks, times itself
//! against a budget and reports a single pass/fail line. Shared by the
//! `selftest` subcommand and the `acceptance` test target.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contour::{count_zeros, truncated_cvd, ContourConfig};
use crate::expr::{parse_expr, EntireExpr};
use crate::kernel::{cvd, roots, ExactComplex, Field, Poly};
use crate::monodromy::{
    build_loops, critical_data, monodromy_group, track_fiber, Capped, Loop, DEFAULT_ORDER_CAP,
};
use crate::typicality::{
    hermite_interpolant, hermite_residuals, split_zeros, theta, theta_bound, typicality_probe,
    TypicalVerdict, TypicalityConfig,
};

pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not checkable directly; exercised through other criteria.
    Covered,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Covered => "COVERED",
        };
        format!(
            "criterion {} [{}] {}: {} ({:.2}s of {:.0}s)",
            self.id, tag, self.name, self.detail, self.elapsed_s, self.budget_s
        )
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<String, String>;

const CRITERIA: [(u32, &str, f64, Check); 8] = [
    (1, "exact CVD values", 1.0, exact_values),
    (
        2,
        "truncated CVD matches exact CVD",
        30.0,
        truncated_cross_check,
    ),
    (3, "exp(z) - z critical data", 10.0, exp_minus_z),
    (4, "full symmetric monodromy", 300.0, symmetric_suite),
    (5, "monodromy invariants", 120.0, monodromy_invariants),
    (6, "argument-principle counts", 5.0, zero_counts),
    (7, "perturbation constructions", 10.0, constructions),
    (8, "theta bound", 5.0, theta_suite),
];

/// Runs criterion `id` (1..=9) with its own generator seeded from `seed`.
pub fn run_criterion(id: u32, seed: u64) -> Option<CriterionResult> {
    if id == 9 {
        return Some(CriterionResult {
            id,
            name: "genericity",
            status: Status::Covered,
            detail: "a Baire-category statement; its constructive ingredients are exercised by criteria 2-4".into(),
            elapsed_s: 0.0,
            budget_s: 0.0,
        });
    }
    let &(id, name, budget_s, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let start = Instant::now();
    let outcome = check(&mut rng);
    let elapsed = start.elapsed();
    let within = elapsed <= Duration::from_secs_f64(budget_s);
    let (status, mut detail) = match outcome {
        Ok(d) => (Status::Pass, d),
        Err(d) => (Status::Fail, d),
    };
    let status = if within { status } else { Status::Fail };
    if !within {
        detail.push_str("; over the time budget");
    }
    Some(CriterionResult {
        id,
        name,
        status,
        detail,
        elapsed_s: elapsed.as_secs_f64(),
        budget_s,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=9).filter_map(|id| run_criterion(id, seed)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(v: i64) -> ExactComplex {
    ExactComplex::from_int(v)
}

/// A Gaussian rational `(a + bi)/64` drawn uniformly from the open disk of
/// radius `radius` (at most 8).
pub fn random_gaussian_rational(rng: &mut ChaCha8Rng, radius: f64) -> ExactComplex {
    let k = (radius * 64.0).ceil() as i64;
    loop {
        let (a, b) = (rng.gen_range(-k..=k), rng.gen_range(-k..=k));
        if ((a * a + b * b) as f64) < (radius * 64.0).powi(2) {
            let r = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(64));
            return ExactComplex::new(r(a), r(b));
        }
    }
}

/// A monic polynomial with `m` random Gaussian-rational roots in the disk.
pub fn random_monic(rng: &mut ChaCha8Rng, m: usize, radius: f64) -> Poly<ExactComplex> {
    let rs: Vec<ExactComplex> = (0..m)
        .map(|_| random_gaussian_rational(rng, radius))
        .collect();
    Poly::from_roots(&rs)
}

pub fn lower_coeffs<F: Field>(p: &Poly<F>) -> Vec<F> {
    let c = p.coeffs();
    c[..c.len() - 1].to_vec()
}

fn to_float(p: &Poly<ExactComplex>) -> Poly<Complex64> {
    p.map(Field::to_complex)
}

fn exact_values(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let v = cvd(&[q(0), q(-3), q(0)]).map_err(|e| e.to_string())?;
    ensure(v == q(16), || format!("cvd(0,-3,0) = {v}"))?;
    for m in 3..=6 {
        let v = cvd(&vec![q(0); m]).map_err(|e| e.to_string())?;
        ensure(v == q(0), || format!("cvd(y^{m}) = {v}"))?;
    }
    for _ in 0..20 {
        let lower = [
            random_gaussian_rational(rng, 8.0),
            random_gaussian_rational(rng, 8.0),
        ];
        let v = cvd(&lower).map_err(|e| e.to_string())?;
        ensure(v == q(1), || format!("quadratic cvd = {v}"))?;
    }
    Ok("16 for y^3 - 3y; 0 for y^3..y^6; 1 for 20 random quadratics".into())
}

fn truncated_cross_check(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let radius = 2.5;
    let cfg = ContourConfig::with_radius(radius);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 50 {
        let m = 3 + done % 4;
        let p = random_monic(rng, m, 2.0);
        let lower = lower_coeffs(&p);
        let exact = cvd(&lower).map_err(|e| e.to_string())?;
        if exact.is_zero() {
            continue;
        }
        let float = to_float(&p);
        let crit = roots(&float.derivative()).map_err(|e| e.to_string())?;
        if crit.iter().any(|c| (radius - c.norm()).abs() < 0.1) {
            continue;
        }
        let report =
            truncated_cvd(&EntireExpr::from_poly(&float), &cfg).map_err(|e| e.to_string())?;
        let e = exact.to_complex();
        let rel = (report.cvd_value - e).norm() / e.norm();
        worst = worst.max(rel);
        ensure(rel < 1e-6, || {
            format!("degree {m}: relative error {rel:e} for {float:?}")
        })?;
        done += 1;
    }
    Ok(format!(
        "50 polynomials of degree 3-6, worst relative error {worst:.2e}"
    ))
}

fn exp_minus_z(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = parse_expr("exp(z) - z").map_err(|e| e.to_string())?;
    let r = truncated_cvd(&f, &ContourConfig::with_radius(7.0)).map_err(|e| e.to_string())?;
    let expected = -256.0 * PI.powi(6);
    let rel = (r.cvd_value - Complex64::new(expected, 0.0)).norm() / expected.abs();
    ensure(rel < 1e-6, || {
        format!("truncated cvd {} vs {expected}", r.cvd_value)
    })?;
    let cfg = TypicalityConfig {
        contour: ContourConfig::with_radius(10.0),
        ..TypicalityConfig::default()
    };
    let report = typicality_probe(&f, &cfg).map_err(|e| e.to_string())?;
    let pts = &report.critical_points_in_disk;
    ensure(pts.len() == 3, || format!("{} critical points", pts.len()))?;
    for k in -1i32..=1 {
        let w = Complex64::new(0.0, 2.0 * PI * k as f64);
        let z = Complex64::new(1.0, -2.0 * PI * k as f64);
        ensure(
            pts.iter()
                .any(|p| (p.point - w).norm() < 1e-8 && (p.value - z).norm() < 1e-8),
            || format!("no critical point at {w} with value {z}"),
        )?;
    }
    ensure(report.verdict == TypicalVerdict::TypicalEvidence, || {
        format!("verdict {:?}", report.verdict)
    })?;
    Ok(format!(
        "relative error {rel:.2e}; critical points 2πki, k = -1, 0, 1; typical evidence"
    ))
}

fn symmetric_suite(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for m in 3..=5 {
        let mut done = 0;
        while done < 100 {
            let p = random_monic(rng, m, 2.0);
            if cvd(&lower_coeffs(&p)).map_err(|e| e.to_string())?.is_zero() {
                continue;
            }
            let float = to_float(&p);
            let r = monodromy_group(&float, DEFAULT_ORDER_CAP)
                .map_err(|e| format!("{float:?}: {e}"))?;
            ensure(r.group.equals_symmetric, || {
                format!("not symmetric for {float:?}")
            })?;
            ensure(
                r.loops.iter().all(|l| l.permutation.is_transposition()),
                || format!("non-transposition loop for {float:?}"),
            )?;
            if m == 5 {
                ensure(
                    r.group.order == Capped::Known(120) && r.group.solvable == Capped::Known(false),
                    || format!("order {:?}, solvable {:?}", r.group.order, r.group.solvable),
                )?;
            }
            done += 1;
        }
    }
    Ok("300 polynomials (m = 3, 4, 5): all S(m) by transpositions; S(5) of order 120, not solvable".into())
}

fn monodromy_invariants(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut reversals = 0;
    let mut trivial = 0;
    for i in 0..20 {
        let m = 2 + i % 7;
        let p = to_float(&random_monic(rng, m, 2.0));
        let data = critical_data(&p).map_err(|e| e.to_string())?;
        let r0 = data.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let big = track_fiber(
            &p,
            &Loop::circle(Complex64::new(0.0, 0.0), 2.0 * r0 + 1.0, 256),
        )
        .map_err(|e| e.to_string())?;
        ensure(big.cycle_type() == vec![m], || {
            format!("big circle gave {big} for degree {m}")
        })?;

        let set = build_loops(&data.values);
        if set.collapsed == 0 {
            for lp in &set.loops {
                let fwd = track_fiber(&p, lp).map_err(|e| e.to_string())?;
                let back = track_fiber(&p, &lp.reversed()).map_err(|e| e.to_string())?;
                ensure(back == fwd.inverse(), || {
                    format!("reversal gave {back}, forward {fwd}")
                })?;
                reversals += 1;
            }
        }
        for _ in 0..5 {
            let center = Complex64::new(rng.gen_range(-r0..=r0), rng.gen_range(-r0..=r0));
            let gap = data
                .values
                .iter()
                .map(|v| (v - center).norm())
                .fold(f64::INFINITY, f64::min);
            if gap < 1e-3 {
                continue;
            }
            let perm =
                track_fiber(&p, &Loop::circle(center, gap / 2.0, 64)).map_err(|e| e.to_string())?;
            ensure(perm.is_identity(), || {
                format!("contractible loop gave {perm}")
            })?;
            trivial += 1;
        }
    }
    Ok(format!(
        "20 big circles are m-cycles (m = 2..8); {reversals} reversed loops invert; {trivial} contractible loops trivial"
    ))
}

fn zero_counts(_: &mut ChaCha8Rng) -> Result<String, String> {
    let cases = [
        ("exp(z) - 1", 1.0, 1),
        ("exp(z) - 1", 7.0, 3),
        ("3*z^2 - 3", 2.0, 2),
    ];
    for (text, radius, expected) in cases {
        let f = parse_expr(text).map_err(|e| e.to_string())?;
        let c = count_zeros(&f, &ContourConfig::with_radius(radius))
            .map_err(|e| format!("{text}: {e}"))?;
        ensure(c.count == expected, || {
            format!("{text} on radius {radius}: {}", c.count)
        })?;
    }
    Ok("exp(z) - 1: 1 in D1, 3 in D7; 3z^2 - 3: 2 in D2".into())
}

fn constructions(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let m = 1 + done % 6;
        let points: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let separated = points
            .iter()
            .enumerate()
            .all(|(i, a)| points[i + 1..].iter().all(|b| (a - b).norm() >= 0.1));
        if !separated {
            continue;
        }
        let values: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let p = hermite_interpolant(&points, &values).map_err(|e| e.to_string())?;
        let (rv, rd) = hermite_residuals(&p, &points, &values);
        worst = worst.max(rv).max(rd);
        ensure(rv < 1e-10 && rd < 1e-10, || {
            format!("residuals {rv:e}, {rd:e} for m = {m}")
        })?;
        done += 1;
    }
    let c = |re: f64| Complex64::new(re, 0.0);
    let p = Poly::from_roots(&[c(1.0), c(1.0), c(-2.0)]);
    let out = split_zeros(&p, 0.01).map_err(|e| e.to_string())?;
    let mut numeric = roots(&out.poly).map_err(|e| e.to_string())?;
    numeric.sort_by(|a, b| a.re.total_cmp(&b.re));
    let expected = [c(-2.0), c(0.9), c(1.1)];
    let err = numeric
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    ensure(err < 1e-8, || format!("split roots {numeric:?}"))?;
    Ok(format!(
        "100 Hermite instances, worst residual {worst:.1e}; split roots of (z-1)^2(z+2) within {err:.1e}"
    ))
}

fn theta_suite(_: &mut ChaCha8Rng) -> Result<String, String> {
    let mut previous = f64::NEG_INFINITY;
    let mut mins = Vec::new();
    for m in 1..=4 {
        let r = theta_bound(1.0, m, 20_000).map_err(|e| e.to_string())?;
        ensure(r.holds, || {
            format!("m = {m}: minimum {} below {}", r.empirical_min, r.theta)
        })?;
        ensure(r.theta > previous, || {
            format!("theta not increasing at m = {m}")
        })?;
        previous = r.theta;
        mins.push(format!("{:.3} ≥ {:.3}", r.empirical_min, r.theta));
    }
    ensure((theta(1.0, 1) - (PI - 1.0)).abs() < 1e-12, || {
        "theta(1, 1) != π - 1".into()
    })?;
    Ok(format!("ε = 1, m = 1..4: {}", mins.join(", ")))
}
