use henon_lab::amalgam::{translation_length, AmalgamWord};
use henon_lab::automorphism::{is_henon_type, AffineMap, PolyAuto};
use henon_lab::green::Green;
use henon_lab::heights::{lcm_height, multiplicative_height, product_formula_residual, valuation};
use henon_lab::numeric::NumAuto;
use henon_lab::periodic::{fixed_points_of_iterate, make_reversible, PointType};
use henon_lab::scalar::{rat, rat_int};
use henon_lab::{Rational, UPoly};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// `(a y, x + P(y))` with `deg P` in 2..=3.
fn henon_factor() -> impl Strategy<Value = PolyAuto> {
    (nonzero_rational(), prop::collection::vec(small_rational(), 2..=3), nonzero_rational()).prop_map(
        |(a, mut low, top)| {
            low.push(top);
            PolyAuto::henon(&a, &UPoly::new(low)).unwrap()
        },
    )
}

fn affine() -> impl Strategy<Value = AffineMap> {
    (prop::array::uniform4(small_rational()), prop::array::uniform2(small_rational()))
        .prop_filter_map("singular", |(m, t)| {
            AffineMap::new([[m[0].clone(), m[1].clone()], [m[2].clone(), m[3].clone()]], t).ok()
        })
}

fn big_rational() -> impl Strategy<Value = Rational> {
    (-1_000_000_000i64..=1_000_000_000, 1i64..=1_000_000_000).prop_map(|(n, d)| rat(n, d))
}

fn point(r: f64) -> impl Strategy<Value = [Complex64; 2]> {
    prop::array::uniform4(-r..r).prop_map(|v| [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_composes_to_identity(f in henon_factor(), g in henon_factor()) {
        let h = f.compose(&g);
        prop_assert!(h.compose(&h.inverse()).forward().is_identity());
        prop_assert!(h.inverse().compose(&h).forward().is_identity());
        prop_assert_eq!(h.jacobian(), &(f.jacobian() * g.jacobian()));
    }

    #[test]
    fn henon_type_is_conjugation_invariant(f in henon_factor(), phi in affine()) {
        let e = PolyAuto::elementary(&rat_int(1), &rat_int(0), &UPoly::new(vec![rat_int(0), rat_int(0), rat_int(1)])).unwrap();
        let phi = phi.to_auto();
        prop_assert!(is_henon_type(&f.conjugate_by(&phi)));
        prop_assert!(!is_henon_type(&e.conjugate_by(&phi)));
    }

    #[test]
    fn translation_length_scales_with_powers(f in henon_factor(), phi in affine(), n in 1i64..=3) {
        let f = f.conjugate_by(&phi.to_auto());
        let l = translation_length(&AmalgamWord::from_auto(&f));
        prop_assert_eq!(translation_length(&AmalgamWord::from_auto(&f.pow(n))), n as u64 * l);
        prop_assert_eq!(translation_length(&AmalgamWord::from_auto(&f.pow(-n))), n as u64 * l);
    }

    #[test]
    fn product_formula(x in big_rational().prop_filter("nonzero", |r| !r.is_zero())) {
        prop_assert!(product_formula_residual(&x).unwrap().is_empty());
    }

    #[test]
    fn valuations_are_additive(a in big_rational(), b in big_rational(), p in prop::sample::select(vec![2u32, 3, 5, 7, 11, 101])) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let p = BigUint::from(p);
        let v = |x: &Rational| valuation(x, &p).unwrap();
        prop_assert_eq!(v(&(&a * &b)), v(&a) + v(&b));
        prop_assert!(v(&(&a + &b)) >= v(&a).min(v(&b)) || (&a + &b).is_zero());
    }

    #[test]
    fn naive_height_place_sum_matches_lcm(x in prop::collection::vec(big_rational(), 1..=4)) {
        prop_assert_eq!(multiplicative_height(&x), Rational::from_integer(lcm_height(&x)));
    }

    #[test]
    fn green_functional_equations(p in point(4.0)) {
        let f = PolyAuto::henon(&rat(1, 2), &UPoly::new(vec![rat_int(1), rat_int(0), rat_int(1)])).unwrap();
        let g = Green::<f64>::new(&f).unwrap();
        let num = NumAuto::<f64>::new(&f);
        let tol = 1e-10;
        let (a, b) = (g.green_plus(&num.iterate(&p, 1), tol).unwrap(), g.green_plus(&p, tol).unwrap());
        prop_assert!((a.value - 2.0 * b.value).abs() <= a.error_bound + 2.0 * b.error_bound + 1e-14 * a.value.abs());
        let (a, b) = (g.green_minus(&num.iterate(&p, -1), tol).unwrap(), g.green_minus(&p, tol).unwrap());
        prop_assert!((a.value - 2.0 * b.value).abs() <= a.error_bound + 2.0 * b.error_bound + 1e-14 * a.value.abs());
        prop_assert!(b.value >= 0.0);
    }

    #[test]
    fn reversor_swaps_green_functions(p in point(3.0), cs in prop::collection::vec(-3i64..=3, 2..=3)) {
        let mut cs: Vec<Rational> = cs.into_iter().map(rat_int).collect();
        cs.push(rat_int(1));
        let rp = make_reversible(&UPoly::new(cs)).unwrap();
        let g = Green::<f64>::new(&rp.f).unwrap();
        let q = [p[1], p[0]];
        let (a, b) = (g.green_plus(&q, 1e-10).unwrap(), g.green_minus(&p, 1e-10).unwrap());
        prop_assert!((a.value - b.value).abs() <= a.error_bound + b.error_bound + 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn periodic_point_counts_and_multipliers(f in henon_factor(), n in 1u32..=2) {
        let d = f.degree() as u64;
        let pts = fixed_points_of_iterate(&f, n).unwrap();
        let total: u64 = pts.iter().map(|p| p.multiplicity as u64).sum();
        prop_assert_eq!(total, d.pow(n));
        let jac: f64 = henon_lab::scalar::rational_to_f64(f.jacobian());
        for p in pts.iter().filter(|p| p.kind == PointType::Saddle && p.multiplicity == 1) {
            let prod = p.multipliers[0] * p.multipliers[1];
            let want = jac.powi(p.exact_period as i32);
            prop_assert!((prod - want).norm() <= 1e-9 * want.abs().max(prod.norm()), "{prod} vs {want}");
            prop_assert!(p.residual <= 1e-8 * p.point[0].norm().max(p.point[1].norm()).max(1.0));
        }
    }
}
