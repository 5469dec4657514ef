use critval::kernel::{
    charpoly, companion, cvd, disc_variety_member, discriminant, min_pairwise_distance, roots,
    ExactComplex, Field, Poly,
};
use critval::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn gaussian(max: i64, den: i64) -> impl Strategy<Value = ExactComplex> {
    (-max..=max, -max..=max, 1..=den).prop_map(|(a, b, d)| {
        let r = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        ExactComplex::new(r(a), r(b))
    })
}

fn lower(deg: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<ExactComplex>> {
    deg.prop_flat_map(|m| prop::collection::vec(gaussian(9, 4), m))
}

/// `∫ m·c` with zero constant term, so that the derivative of the result is `m·c`.
fn antiderivative(c: &Poly<ExactComplex>) -> Poly<ExactComplex> {
    let m = c.degree().unwrap() as i64 + 1;
    let mut out = vec![ExactComplex::zero()];
    for (k, a) in c.coeffs().iter().enumerate() {
        out.push(a.clone() * ExactComplex::from_int(m) / ExactComplex::from_int(k as i64 + 1));
    }
    Poly::new(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charpoly_inverts_companion(l in lower(1..=8)) {
        let p = Poly::monic_from_lower(&l);
        prop_assert_eq!(charpoly(&companion(&p).unwrap()), p);
    }

    #[test]
    fn cvd_is_translation_invariant(l in lower(2..=6), c in gaussian(20, 7)) {
        let mut shifted = l.clone();
        shifted[0] = shifted[0].clone() + c;
        prop_assert_eq!(cvd(&shifted).unwrap(), cvd(&l).unwrap());
    }

    #[test]
    fn repeated_critical_point_forces_zero_cvd(
        a in gaussian(6, 3),
        rest in prop::collection::vec(gaussian(6, 3), 0..=3),
        a0 in gaussian(6, 5),
    ) {
        let mut rs = vec![a.clone(), a];
        rs.extend(rest);
        let mut p = antiderivative(&Poly::from_roots(&rs));
        let mut c = p.coeffs().to_vec();
        c[0] = a0;
        p = Poly::new(c);
        let l = &p.coeffs()[..p.coeffs().len() - 1];
        prop_assert!(disc_variety_member(l).unwrap());
        prop_assert!(cvd(l).unwrap().is_zero());
    }

    #[test]
    fn variety_membership_implies_vanishing_cvd(l in lower(2..=5)) {
        if disc_variety_member(&l).unwrap() {
            prop_assert!(cvd(&l).unwrap().is_zero());
        }
    }

    #[test]
    fn discriminant_matches_root_product(l in lower(2..=7)) {
        let p = Poly::monic_from_lower(&l);
        let pf = p.map(Field::to_complex);
        let rs = roots(&pf).unwrap();
        prop_assume!(min_pairwise_distance(&rs).unwrap() >= 0.1);
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                prod *= (rs[i] - rs[j]).powi(2);
            }
        }
        let exact = discriminant(&p).unwrap().to_complex();
        prop_assert!((exact - prod).norm() <= 1e-6 * exact.norm(), "{} vs {}", exact, prod);
    }

    #[test]
    fn roots_satisfy_vieta(l in lower(1..=8)) {
        let pf = Poly::monic_from_lower(&l).map(Field::to_complex);
        let rs = roots(&pf).unwrap();
        let m = rs.len();
        let sum: Complex64 = rs.iter().sum();
        let prod: Complex64 = rs.iter().product();
        let top = -pf.coeff(m - 1);
        let bottom = pf.coeff(0) * if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let scale = |v: Complex64| v.norm().max(1.0);
        prop_assert!((sum - top).norm() <= 1e-8 * scale(top), "{} vs {}", sum, top);
        prop_assert!((prod - bottom).norm() <= 1e-8 * scale(bottom), "{} vs {}", prod, bottom);
    }
}
