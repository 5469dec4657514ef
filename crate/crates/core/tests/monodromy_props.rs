use critval::kernel::Poly;
use critval::monodromy::{
    build_loops, critical_data, factorial, match_fibers, monodromy_group, poly_fiber, track_fiber,
    Capped, Loop, Permutation, DEFAULT_ORDER_CAP,
};
use critval::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point_in_disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

/// Monic polynomial with roots in the unit-ish disk; critical values stay well separated in practice.
fn monic(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Poly<Complex64>> {
    m.prop_flat_map(|m| prop::collection::vec(point_in_disk(1.5), m))
        .prop_map(|rs| Poly::from_roots(&rs))
}

fn separated(p: &Poly<Complex64>, gap: f64) -> bool {
    let data = critical_data(p).unwrap();
    let v = &data.values;
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| (v[i] - v[j]).norm() >= gap))
        && critval::kernel::min_pairwise_distance(&data.points).is_none_or(|d| d >= gap)
}

/// Plain Newton continuation with a fixed number of equal substeps per sample segment.
fn oracle_track(p: &Poly<Complex64>, lp: &Loop, substeps: usize) -> Vec<Complex64> {
    let mut fiber = poly_fiber(p, lp.base).unwrap();
    for pair in lp.samples.windows(2) {
        for k in 1..=substeps {
            let z = pair[0] + (pair[1] - pair[0]) * (k as f64 / substeps as f64);
            for w in fiber.iter_mut() {
                for _ in 0..30 {
                    let (v, d) = p.eval_with_derivative(*w);
                    *w -= (v - z) / d;
                }
            }
        }
    }
    fiber
}

#[test]
fn cubic_lasso_agrees_with_oversampled_oracle() {
    let p = Poly::new(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    for lp in [
        Loop::circle(c(2.0, 0.0), 1.0, 64),
        Loop::circle(c(-2.0, 0.0), 1.5, 64),
    ] {
        let start = poly_fiber(&p, lp.base).unwrap();
        let oracle = match_fibers(&start, &oracle_track(&p, &lp, 640)).unwrap();
        let tracked = track_fiber(&p, &lp).unwrap();
        assert_eq!(tracked, oracle, "loop around {}", lp.target);
        assert!(tracked.is_transposition());
        let fixed = (1..=3).find(|&i| tracked.apply(i) == i).unwrap();
        let expected = if lp.target.re > 0.0 { 2.0 } else { -2.0 };
        assert!((start[fixed - 1] - expected).norm() < 0.3, "{start:?}");
    }
}

#[test]
fn cubic_lassos_from_build_loops_agree_with_oracle() {
    let p = Poly::new(vec![c(0.2, 0.1), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let data = critical_data(&p).unwrap();
    for lp in build_loops(&data.values).loops {
        let start = poly_fiber(&p, lp.base).unwrap();
        let oracle = match_fibers(&start, &oracle_track(&p, &lp, 200)).unwrap();
        assert_eq!(track_fiber(&p, &lp).unwrap(), oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reversed_lasso_gives_inverse(p in monic(3..=6)) {
        prop_assume!(separated(&p, 0.05));
        let data = critical_data(&p).unwrap();
        for lp in build_loops(&data.values).loops {
            let fwd = track_fiber(&p, &lp).unwrap();
            let back = track_fiber(&p, &lp.reversed()).unwrap();
            prop_assert_eq!(back, fwd.inverse());
        }
    }

    #[test]
    fn big_circle_is_one_cycle(p in monic(2..=8)) {
        prop_assume!(separated(&p, 0.01));
        let m = p.degree().unwrap();
        let r0 = critical_data(&p).unwrap().values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let perm = track_fiber(&p, &Loop::circle(c(0.0, 0.0), 2.0 * r0 + 1.0, 256)).unwrap();
        prop_assert_eq!(perm.cycle_type(), vec![m]);
    }

    #[test]
    fn contractible_loops_are_trivial(
        p in monic(3..=6),
        centers in prop::collection::vec((point_in_disk(8.0), 0.1..0.9f64), 50),
    ) {
        let values = critical_data(&p).unwrap().values;
        let m = p.degree().unwrap();
        for (center, frac) in centers {
            let d = values.iter().map(|v| (v - center).norm()).fold(f64::INFINITY, f64::min);
            let lp = Loop::circle(center, frac * d, 32);
            prop_assert_eq!(track_fiber(&p, &lp).unwrap(), Permutation::identity(m));
        }
    }

    #[test]
    fn symmetric_verdict_has_factorial_order(p in monic(3..=6)) {
        prop_assume!(separated(&p, 0.05));
        let r = monodromy_group(&p, DEFAULT_ORDER_CAP).unwrap();
        if r.group.equals_symmetric {
            prop_assert_eq!(r.group.order, Capped::Known(factorial(r.group.m).unwrap()));
        }
        prop_assert!(r.group.is_transitive);
    }
}
