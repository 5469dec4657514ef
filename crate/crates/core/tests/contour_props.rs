use critval::contour::{
    cauchy_matrix_fn, circle_quadrature_vec, count_zeros, truncated_cvd, truncated_cvd_nudged,
    Circle, ContourConfig, ContourError,
};
use critval::expr::EntireExpr;
use critval::kernel::{
    charpoly, cvd, min_pairwise_distance, roots, ExactComplex, Field, Lu, Poly, SquareMatrix,
};
use critval::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point_in_disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn gaussian_in_disk(r: f64) -> impl Strategy<Value = ExactComplex> {
    let k = (r * 64.0) as i64;
    (-k..=k, -k..=k)
        .prop_filter("inside the disk", move |(a, b)| {
            ((a * a + b * b) as f64) < (r * 64.0).powi(2)
        })
        .prop_map(|(a, b)| {
            let q = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(64));
            ExactComplex::new(q(a), q(b))
        })
}

/// Pairs each target with its nearest unused candidate and returns the worst distance.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// `exp(a z) + b z^2 + d z`.
fn sample_w() -> impl Strategy<Value = EntireExpr> {
    (point_in_disk(1.0), point_in_disk(1.0), point_in_disk(2.0)).prop_map(|(a, b, d)| {
        EntireExpr::exp_term(c(1.0, 0.0), 0, Poly::new(vec![c(0.0, 0.0), a]))
            .add(&EntireExpr::monomial(b, 2))
            .add(&EntireExpr::monomial(d, 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cauchy_matrix_obeys_spectral_mapping(
        eig in prop::collection::vec(point_in_disk(2.5), 2..=5),
        basis in prop::collection::vec(point_in_disk(1.0), 25),
        w in sample_w(),
    ) {
        let n = eig.len();
        let values: Vec<Complex64> = eig.iter().map(|z| w.evaluate(*z).unwrap()).collect();
        prop_assume!(min_pairwise_distance(&values).unwrap() >= 0.1);
        let mut v = SquareMatrix::<Complex64>::identity(n);
        for i in 0..n {
            for j in 0..n {
                v.set(i, j, *v.get(i, j) + basis[i * 5 + j] * 0.3);
            }
        }
        let lu = Lu::new(&v);
        prop_assume!(lu.det().norm() > 0.1);
        let vinv = lu.inverse();
        let mut d = SquareMatrix::<Complex64>::zeros(n);
        for (i, e) in eig.iter().enumerate() {
            d.set(i, i, *e);
        }
        let cm = &(&v * &d) * &vinv;
        let cfg = ContourConfig::with_radius(5.0);
        let wc = cauchy_matrix_fn(&w, &cm, &cfg).unwrap();
        let got = roots(&charpoly(&wc)).unwrap();
        let scale = values.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let err = multiset_distance(&values, &got);
        prop_assert!(err <= 1e-6 * scale, "error {} on values {:?}", err, values);
    }

    #[test]
    fn zero_count_is_monotone_in_radius(
        rs in prop::collection::vec(point_in_disk(4.0), 1..=6),
        mut radii in prop::collection::vec(0.3..5.0f64, 6),
    ) {
        radii.sort_by(f64::total_cmp);
        let f = EntireExpr::from_poly(&Poly::from_roots(&rs));
        let mut last = 0;
        for r in radii {
            if rs.iter().any(|z| (z.norm() - r).abs() < 0.05) {
                continue;
            }
            let n = count_zeros(&f, &ContourConfig::with_radius(r)).unwrap().count;
            prop_assert_eq!(n, rs.iter().filter(|z| z.norm() < r).count());
            prop_assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn doubling_is_stable(w in sample_w(), r in 1.0..6.0f64) {
        let wp = w.differentiate();
        let g = |z: Complex64, out: &mut [Complex64]| {
            out[0] = w.evaluate(z).unwrap() / wp.evaluate(z).unwrap();
            Ok::<(), ContourError>(())
        };
        let mut cfg = ContourConfig::with_radius(r);
        let circle = Circle { center: c(0.0, 0.0), radius: r };
        let q = circle_quadrature_vec(g, 1, circle, &cfg);
        prop_assume!(q.is_ok());
        let q = q.unwrap();
        cfg.nodes = 2 * q.nodes;
        let q2 = circle_quadrature_vec(g, 1, circle, &cfg).unwrap();
        let (a, b) = (q.values[0], q2.values[0]);
        prop_assert!((a - b).norm() <= cfg.match_tol * a.norm().max(1.0), "{} vs {} at {} nodes", a, b, q.nodes);
    }

    #[test]
    fn truncated_cvd_is_translation_invariant(w in sample_w(), shift in point_in_disk(10.0)) {
        let cfg = ContourConfig::with_radius(4.0);
        let base = truncated_cvd_nudged(&w, &cfg, false);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let moved = truncated_cvd(&w.add(&EntireExpr::constant(shift)), &ContourConfig::with_radius(base.diagnostics.radius_used)).unwrap();
        let (a, b) = (base.cvd_value, moved.cvd_value);
        prop_assert_eq!(base.m, moved.m);
        prop_assert!((a - b).norm() <= 1e-6 * a.norm(), "{} vs {}", a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polynomial_truncated_cvd_matches_exact(rs in prop::collection::vec(gaussian_in_disk(2.0), 3..=6)) {
        let p = Poly::from_roots(&rs);
        let coeffs = p.coeffs();
        let exact = cvd(&coeffs[..coeffs.len() - 1]).unwrap().to_complex();
        prop_assume!(exact.norm() > 1e-12);
        let pf = p.map(Field::to_complex);
        let crit = roots(&pf.derivative()).unwrap();
        let radius = 5.0;
        prop_assume!(crit.iter().all(|z| radius - z.norm() >= 0.1));
        let report = truncated_cvd(&EntireExpr::from_poly(&pf), &ContourConfig::with_radius(radius)).unwrap();
        let got = report.cvd_value;
        prop_assert!((got - exact).norm() <= 1e-6 * exact.norm(), "{} vs {}", got, exact);
    }
}
