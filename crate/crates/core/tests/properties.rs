use proptest::prelude::*;

use tautseries::algebraic::{solve_algebraic, Poly2};
use tautseries::extract::{build_panel, extract_universal, GeometryPanel};
use tautseries::oracle::{
    chern_integral, segre_integral, verlinde_chi, EqKClass, LineTerm, SurfaceKind, ToricSurface, DEFAULT_SEED,
};
use tautseries::rational::{binomial, q, qf, qpow};
use tautseries::universal::{chern_A, segre_A, verlinde_B};
use tautseries::{Series, Var, Q};

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), len)
}

/// `1 + c_1 x + ...` of the given order.
fn unit_series(order: usize) -> impl Strategy<Value = Series> {
    coeffs(order).prop_map(move |tail| {
        let mut c = vec![q(1)];
        c.extend(tail);
        Series::from_coeffs(Var::T, c)
    })
}

/// `x + c_2 x^2 + ...` of the given order.
fn tangent_series(order: usize) -> impl Strategy<Value = Series> {
    coeffs(order - 1).prop_map(move |tail| {
        let mut c = vec![q(0), q(1)];
        c.extend(tail);
        Series::from_coeffs(Var::T, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn revert_round_trip(a in tangent_series(7)) {
        let b = a.revert().unwrap();
        prop_assert!(a.compose(&b).unwrap().is_identity());
        prop_assert!(b.compose(&a).unwrap().is_identity());
    }

    #[test]
    fn power_laws(a in unit_series(6), e1 in small_q(), e2 in small_q()) {
        let p1 = a.pow_rational(&e1).unwrap();
        let p2 = a.pow_rational(&e2).unwrap();
        prop_assert_eq!(p1.mul(&p2).unwrap(), a.pow_rational(&(&e1 + &e2)).unwrap());
        prop_assert_eq!(p1.pow_rational(&e2).unwrap(), a.pow_rational(&(&e1 * &e2)).unwrap());
    }

    #[test]
    fn integer_powers_agree(a in unit_series(6), k in -4i64..=4) {
        prop_assert_eq!(a.pow_int(k).unwrap(), a.pow_rational(&q(k)).unwrap());
    }

    #[test]
    fn exp_log_inverse(a in unit_series(7), tail in coeffs(7)) {
        prop_assert_eq!(a.log().unwrap().exp().unwrap(), a);
        let mut c = vec![q(0)];
        c.extend(tail);
        let l = Series::from_coeffs(Var::T, c);
        prop_assert_eq!(l.exp().unwrap().log().unwrap(), l);
    }

    #[test]
    fn rational_power_of_binomial(c in small_q(), e in small_q()) {
        let order = 8;
        let mut base = vec![q(0); order + 1];
        base[0] = q(1);
        base[1] = c.clone();
        let one_plus = Series::from_coeffs(Var::T, base);
        let got = one_plus.pow_rational(&e).unwrap();
        for k in 0..=order {
            let want = binomial(&e, k as u32) * qpow(&c, k as u32);
            prop_assert_eq!(got.coeff(k), &want);
        }
        prop_assert_eq!(&got, &Series::linear_power(Var::T, &c, &e, order));
    }

    #[test]
    fn algebraic_residual_vanishes(
        lin in (1i64..=5).prop_flat_map(|a| prop_oneof![Just(a), Just(-a)]),
        terms in prop::collection::vec((0usize..=3, 0usize..=3, -4i64..=4), 1..6),
    ) {
        let mut p = Poly2::term(q(lin), 1, 0);
        p.add_term(q(-1), 0, 1);
        for (i, j, c) in terms {
            if i + j >= 2 {
                p.add_term(q(c), i, j);
            }
        }
        let y = solve_algebraic(&p, 8).unwrap();
        prop_assert!(p.eval_y(&y).unwrap().is_zero());
        prop_assert!(y.constant_term() == &q(0));
    }

    #[test]
    fn operations_are_pure(a in unit_series(6), b in tangent_series(6)) {
        prop_assert_eq!(a.compose(&b).unwrap(), a.compose(&b).unwrap());
        prop_assert_eq!(a.log().unwrap().to_json(), a.log().unwrap().to_json());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Series>(&j).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn catalog_constant_terms(s in -2i64..=4, r in -3i64..=3, order in 1usize..6) {
        for i in 0..=2 {
            prop_assert_eq!(segre_A(s, i, order).unwrap().series.constant_term().clone(), q(1));
            prop_assert_eq!(chern_A(s, i, order).unwrap().series.constant_term().clone(), q(1));
        }
        for i in 1..=4 {
            match verlinde_B(r, i, order) {
                Ok(e) => {
                    prop_assert_eq!(e.series.constant_term(), &q(1));
                    prop_assert_eq!(e.change_of_variable.constant_term(), &q(0));
                }
                Err(_) => prop_assert!(i >= 3 && r.abs() >= 4),
            }
        }
    }
}

fn surface_of(k: u8) -> ToricSurface {
    match k % 3 {
        0 => ToricSurface::p2(),
        1 => ToricSurface::p1xp1(),
        _ => ToricSurface::f1(),
    }
}

/// Up to three signed line terms with small degrees.
fn class_terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((prop_oneof![Just(1i64), Just(-1), Just(2)], -2i64..=2, -1i64..=2), 1..=3)
}

fn make_class(surface: &ToricSurface, terms: &[(i64, i64, i64)]) -> EqKClass {
    EqKClass::from_terms(
        terms.iter().map(|&(c, a, b)| (c, if surface.rank() == 1 { vec![a] } else { vec![a, b] })).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn lift_shifts_and_specializations(
        k in 0u8..3,
        terms in class_terms(),
        shifts in prop::collection::vec((-5i64..=5, -5i64..=5), 3),
        n in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let s = surface_of(k);
        let class = make_class(&s, &terms);
        let shifted = class.with_shifts(&shifts);
        let base = segre_integral(&s, &class, n, DEFAULT_SEED).unwrap();
        prop_assert_eq!(&segre_integral(&s, &shifted, n, seed).unwrap(), &base);
        let base = chern_integral(&s, &class, n, DEFAULT_SEED).unwrap();
        prop_assert_eq!(&chern_integral(&s, &shifted, n, seed).unwrap(), &base);
        let line = LineTerm { coeff: 1, class: class.c1(&s), shift: (0, 0) };
        let moved = LineTerm { shift: shifts[0], ..line.clone() };
        prop_assert_eq!(
            verlinde_chi(&s, &line, 2, n, DEFAULT_SEED).unwrap(),
            verlinde_chi(&s, &moved, 2, n, seed).unwrap()
        );
    }

    #[test]
    fn n_one_reduces_to_surface_numbers(k in 0u8..3, terms in class_terms(), r in -2i64..=3) {
        let s = surface_of(k);
        let class = make_class(&s, &terms);
        let m = class.numerics(&s);
        prop_assert_eq!(segre_integral(&s, &class, 1, DEFAULT_SEED).unwrap(), q(m.c1sq - m.c2));
        prop_assert_eq!(chern_integral(&s, &class, 1, DEFAULT_SEED).unwrap(), q(m.c2));
        let line = LineTerm { coeff: 1, class: class.c1(&s), shift: (0, 0) };
        prop_assert_eq!(verlinde_chi(&s, &line, r, 1, DEFAULT_SEED).unwrap(), m.chi_det.into());
    }

    #[test]
    fn ruling_swap_on_p1xp1(terms in class_terms(), n in 1usize..=3) {
        let s = ToricSurface::p1xp1();
        let class = make_class(&s, &terms);
        let swapped: Vec<(i64, i64, i64)> = terms.iter().map(|&(c, a, b)| (c, b, a)).collect();
        let other = make_class(&s, &swapped);
        prop_assert_eq!(
            segre_integral(&s, &class, n, DEFAULT_SEED).unwrap(),
            segre_integral(&s, &other, n, DEFAULT_SEED).unwrap()
        );
    }
}

#[test]
fn panel_permutation_and_subset_invariance() {
    let panel = build_panel(2, 8).unwrap();
    let full = extract_universal(2, 3, &panel).unwrap();
    let reversed = extract_universal(2, 3, &panel.reversed()).unwrap();
    assert_eq!(full.series, reversed.series);
    // Every spanning subset of five rows gives the same answer.
    let rows: Vec<(SurfaceKind, EqKClass)> = panel.rows.iter().map(|r| (r.surface, r.eq_class.clone())).collect();
    let mut spanning = 0;
    for skip in 0..rows.len() {
        for skip2 in skip + 1..rows.len() {
            for skip3 in skip2 + 1..rows.len() {
                let subset: Vec<_> = rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| ![skip, skip2, skip3].contains(i))
                    .map(|(_, r)| r.clone())
                    .collect();
                if let Ok(sub) = GeometryPanel::segre(2, subset) {
                    spanning += 1;
                    assert_eq!(extract_universal(2, 3, &sub).unwrap().series, full.series);
                }
            }
        }
    }
    assert!(spanning >= 3, "only {spanning} spanning subsets");
}
