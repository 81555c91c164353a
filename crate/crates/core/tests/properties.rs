use csm_core::chow::{Ambient, ChowClass, LineBundleClass};
use csm_core::gb::{buchberger, normal_form, MonomialOrder};
use csm_core::poly::{monomials_in_range, parse_poly, MultiPoly, Ring, VarSpec};
use csm_core::zeta::{self, ZetaNumerator};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ambient() -> impl Strategy<Value = Ambient> {
    prop_oneof![(1usize..5).prop_map(Ambient::projective), (1usize..4, 1usize..4).prop_map(|(n, r)| Ambient::product(n, r))]
}

fn class_in(a: Ambient) -> impl Strategy<Value = ChowClass> {
    let cells = (a.n + 1) * (a.h_max() + 1);
    let width = a.h_max() + 1;
    prop::collection::vec(-30i64..30, cells)
        .prop_map(move |c| ChowClass::from_terms(a, c.into_iter().enumerate().map(|(k, v)| (k / width, k % width, v))))
}

fn three_classes() -> impl Strategy<Value = (ChowClass, ChowClass, ChowClass)> {
    ambient().prop_flat_map(|a| (class_in(a), class_in(a), class_in(a)))
}

fn line_bundle() -> impl Strategy<Value = LineBundleClass> {
    (-6i64..6, -6i64..6).prop_map(|(a, b)| LineBundleClass::new(a, b))
}

proptest! {
    #[test]
    fn chow_ring_axioms((x, y, z) in three_classes()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x - &x, ChowClass::zero(x.ambient()));
    }

    #[test]
    fn unit_inverse((x, _, _) in three_classes(), sign in prop::bool::ANY) {
        let a = x.ambient();
        // force a unit constant term
        let c0 = if sign { 1 } else { -1 };
        let u = &(&x - &x.codim_part(0)) + &ChowClass::term(a, 0, 0, c0);
        let inv = u.inverse_unit().unwrap();
        prop_assert_eq!(&u * &inv, ChowClass::one(a));
    }

    #[test]
    fn twist_and_dual_laws((x, y, _) in three_classes(), l in line_bundle(), m in line_bundle()) {
        prop_assert_eq!(x.aluffi_tensor(l).aluffi_tensor(m), x.aluffi_tensor(l.tensor(&m)));
        prop_assert_eq!(x.dual().dual(), x.clone());
        prop_assert_eq!(x.aluffi_tensor(l).dual(), x.dual().aluffi_tensor(l.dual()));
        prop_assert_eq!(x.aluffi_tensor(LineBundleClass::new(0, 0)), x.clone());
        // both operations are additive
        prop_assert_eq!((&x + &y).aluffi_tensor(l), &x.aluffi_tensor(l) + &y.aluffi_tensor(l));
        prop_assert_eq!((&x + &y).dual(), &x.dual() + &y.dual());
    }

    #[test]
    fn pushforward_is_additive(n in 1usize..4, r in 1usize..4, seed in any::<u64>()) {
        let a = Ambient::product(n, r);
        let x = ChowClass::from_terms(a, (0..=n).flat_map(|i| (0..=r).map(move |j| (i, j, ((seed >> ((i * 5 + j) % 60)) & 15) as i64 - 7))));
        let y = x.dual();
        prop_assert_eq!((&x + &y).pushforward_h().unwrap(), &x.pushforward_h().unwrap() + &y.pushforward_h().unwrap());
    }
}

fn small_poly(n: usize, deg: u32) -> impl Strategy<Value = MultiPoly> {
    let vars = VarSpec::projective(n);
    let monos = monomials_in_range(vars.total(), 0..n + 1, deg);
    prop::collection::vec(-5i64..5, monos.len()).prop_map(move |c| {
        let terms = monos.iter().cloned().zip(c.into_iter().map(BigInt::from)).collect();
        MultiPoly::from_bigint_terms(vars, Ring::Rational, terms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_text_round_trip(f in small_poly(2, 3)) {
        let back = parse_poly(&f.to_string(), f.vars(), Ring::Rational).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn leibniz_rule(f in small_poly(2, 2), g in small_poly(2, 3), i in 0usize..3) {
        let lhs = (&f * &g).partial_derivative(i).unwrap();
        let rhs = &(&f.partial_derivative(i).unwrap() * &g) + &(&f * &g.partial_derivative(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ideal_members_reduce_to_zero(f in small_poly(2, 2), g in small_poly(2, 2), a in small_poly(2, 1), b in small_poly(2, 1)) {
        let p = 32003;
        let red = |h: &MultiPoly| h.primitive_integer_part().reduce_mod_p(p).unwrap();
        let gens: Vec<MultiPoly> = [&f, &g].into_iter().filter(|h| !h.is_zero()).map(red).collect();
        prop_assume!(!gens.is_empty());
        let basis = buchberger(&gens, MonomialOrder::Degrevlex).unwrap();
        let member = red(&(&(&a * &f) + &(&b * &g)));
        prop_assert!(normal_form(&member, &basis).unwrap().is_zero());
        for h in &gens {
            prop_assert!(normal_form(h, &basis).unwrap().is_zero());
        }
    }

    #[test]
    fn numerator_involution_and_gamma(n in 1usize..4, r in 0usize..3, d in 1u32..4, seed in any::<u64>()) {
        let rows: Vec<Vec<i64>> = (0..n + 2)
            .map(|a| (0..r + 2).map(|b| ((seed.rotate_left((a * 7 + b * 3) as u32) & 31) as i64) - 15).collect())
            .collect();
        let p = ZetaNumerator::from_coeffs(n, r, d, &rows);
        prop_assert_eq!(zeta::involution(&zeta::involution(&p)).poly, p.poly.clone());
        prop_assert_eq!(zeta::gamma_from_numerator(&p), zeta::gamma_from_q(&p));
    }
}
