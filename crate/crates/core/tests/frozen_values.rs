//! Hand-computed values, frozen.

use tautseries::extract::predict_unknown;
use tautseries::rational::q;
use tautseries::universal::{segre_A, verlinde_B};
use tautseries::verify::{coeff_product, lagrange_lhs, lagrange_rhs, residue_coeff};
use tautseries::{Series, Var, Q};

fn ints(c: &[i64]) -> Vec<Q> {
    c.iter().map(|&x| q(x)).collect()
}

#[test]
fn rank_two_a3_coefficients() {
    let a3 = segre_A(2, 3, 8).unwrap().series;
    let want = ints(&[1, 0, -7, 187, -4588, 112368, -2782141, 69728392, -1767224037]);
    assert_eq!(a3.coeffs(), want.as_slice());
}

#[test]
fn residue_and_abelian_first_terms() {
    assert_eq!(residue_coeff(0, 5, 2, 1), q(6));
    // n = 1 on an abelian surface: r χ
    for r in 1..=4 {
        for chi in -3..=6 {
            let e = chi - r - 1;
            let res = coeff_product(0, e, r, 1) + q(r * (r + 1)) * coeff_product(0, e, r, 0);
            assert_eq!(res, q(r * chi));
        }
    }
}

#[test]
fn lagrange_with_linear_f() {
    // f = 1 + z, g = 1: both sides are 1/(1-z)
    let order = 6;
    let f = Series::from_ints(Var::Z, &[1, 1], order);
    let g = Series::one(Var::Z, order);
    let geom = Series::from_ints(Var::Z, &[1; 7], order);
    assert_eq!(lagrange_lhs(&f, &g).unwrap(), geom);
    assert_eq!(lagrange_rhs(&f, &g).unwrap(), geom.truncate(order - 1));
}

#[test]
fn verlinde_b3_inverse_pair() {
    let p = verlinde_B(2, 3, 6).unwrap().series.mul(&verlinde_B(-2, 3, 6).unwrap().series).unwrap();
    assert_eq!(p, Series::one(Var::W, 6));
}

#[test]
fn extracted_rank_three() {
    let rep = predict_unknown(3, 4).unwrap();
    assert_eq!(rep.a3, ["1", "0", "-15", "686", "-28891"]);
    assert_eq!(rep.a4, ["1", "0", "-15", "846", "-41061"]);
}

#[test]
fn extracted_negative_ranks() {
    let rep = predict_unknown(-3, 4).unwrap();
    assert_eq!(rep.a3, ["1", "0", "1/2", "-4", "231/8"]);
    assert_eq!(rep.a4, ["1", "0", "0", "1", "-12"]);
}
