//! Closed-form universal series: Segre `A_0..A_4`, Chern `Ã_0..Ã_2`, Verlinde
//! `B_1..B_4`, the quartic branches `y`, `Y`, and the changes of variables.
//!
//! Every closed form is built in the auxiliary variable `t` and composed with
//! `t(z)` (or `t(w)`) as the last step.

use std::fmt;

use serde::Serialize;

use crate::algebraic::{quartic_relation, solve_algebraic};
use crate::error::{Error, Result};
use crate::rational::{is_integer, q, qf, Q};
use crate::series::{Series, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Conjectural,
    Trivial,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proven => "proven",
            Status::Conjectural => "conjectural",
            Status::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    SegreA0,
    SegreA1,
    SegreA2,
    SegreA3,
    SegreA4,
    ChernA0,
    ChernA1,
    ChernA2,
    VerlindeB1,
    VerlindeB2,
    VerlindeB3,
    VerlindeB4,
    /// `Y(t)`, the branch of `y(1+y)^2 = t(1-y)(1-y^3)`.
    #[serde(rename = "Yquartic")]
    YQuartic,
    /// `y(t)`, the branch of `y(1+y)^2(1+3t) = t(1-y)(1-y^3)`.
    #[serde(rename = "yQuartic")]
    LowerYQuartic,
}

impl Family {
    pub fn segre(index: usize) -> Result<Family> {
        [Family::SegreA0, Family::SegreA1, Family::SegreA2, Family::SegreA3, Family::SegreA4]
            .get(index)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("Segre index {index} not in 0..=4")))
    }

    pub fn chern(index: usize) -> Result<Family> {
        [Family::ChernA0, Family::ChernA1, Family::ChernA2]
            .get(index)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("Chern index {index} not in 0..=2")))
    }

    pub fn verlinde(index: usize) -> Result<Family> {
        [Family::VerlindeB1, Family::VerlindeB2, Family::VerlindeB3, Family::VerlindeB4]
            .get(index.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Invalid(format!("Verlinde index {index} not in 1..=4")))
    }
}

/// How the exponent `r` of a closed form was derived from the rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankConvention {
    /// `r = s + 1`.
    SegreShift,
    /// `r = s - 1`.
    ChernShift,
    /// `r` is the Verlinde twist itself.
    VerlindeTwist,
    /// No rank dependence.
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCatalogEntry {
    pub family: Family,
    /// `s` for Segre and Chern entries, the twist `r` for Verlinde entries.
    pub rank: i64,
    pub r: i64,
    pub convention: RankConvention,
    pub status: Status,
    pub series: Series,
    /// The map from `t` to the natural variable of `series`.
    pub change_of_variable: Series,
}

fn lin(c: i64, e: Q, order: usize) -> Series {
    Series::linear_power(Var::T, &q(c), &e, order)
}

fn prod(factors: &[Series]) -> Result<Series> {
    Series::product(factors)
}

/// `t f(t)` as a series of the given order, from `f` known to `order - 1`.
fn times_t(f: &Series) -> Series {
    f.shift_up(1)
}

/// `t(1 + c t)^e` and its compositional inverse, retagged to `var`.
fn change_of_var(c: i64, e: Q, var: Var, order: usize) -> Result<(Series, Series)> {
    if order == 0 {
        return Err(Error::Invalid("a change of variables needs order >= 1".into()));
    }
    let x_of_t = times_t(&lin(c, e, order - 1));
    let t_of_x = x_of_t.revert()?.with_var(var);
    Ok((x_of_t, t_of_x))
}

/// `z = t(1+rt)^r` and `t(z)`.
pub fn segre_change_of_var(r: i64, order: usize) -> Result<(Series, Series)> {
    change_of_var(r, q(r), Var::Z, order)
}

/// `z = t(1-rt)^{-r}` and `t(z)`.
pub fn chern_change_of_var(r: i64, order: usize) -> Result<(Series, Series)> {
    change_of_var(-r, q(-r), Var::Z, order)
}

/// `w = t(1+t)^{r^2-1}` and `t(w)`.
pub fn verlinde_change_of_var(r: i64, order: usize) -> Result<(Series, Series)> {
    change_of_var(1, q(r * r - 1), Var::W, order)
}

/// The branch `y(t)` to `order`.
pub fn y_series(order: usize) -> Result<Series> {
    solve_algebraic(&quartic_relation(3), order)
}

/// The branch `Y(t)` to `order`.
pub fn big_y_series(order: usize) -> Result<Series> {
    solve_algebraic(&quartic_relation(0), order)
}

/// Pieces of an algebraic branch used by the closed forms: `b/t`, `b`, `b'`, all to `order`.
fn branch_parts(branch: &Series) -> Result<(Series, Series, Series)> {
    let n = branch.order() - 1;
    Ok((branch.shift_down(1)?, branch.truncate(n), branch.derivative()))
}

/// `(b/t)^{e} (1+b)^2 (1-b)^{-1} / b'`, the common shape of the algebraic `A_4`/`B_4`.
fn algebraic_four(branch: &Series, e: Q) -> Result<Series> {
    let (bt, b, db) = branch_parts(branch)?;
    let one = Series::one(Var::T, b.order());
    let num = bt.pow_rational(&e)?.mul(&one.add(&b)?.pow_int(2)?)?;
    num.div(&one.sub(&b)?)?.div(&db)
}

/// Segre closed form in `t` (with `z = t(1+rt)^r`), together with its status.
pub fn segre_t(s: i64, index: usize, order: usize) -> Result<(Series, Status)> {
    let r = s + 1;
    let unknown = || Error::UnknownSeries { family: format!("SegreA{index}"), rank: s };
    Ok(match index {
        0 => (prod(&[lin(r, q(-r), order), lin(1 + r, q(r - 1), order)])?, Status::Proven),
        1 => (prod(&[lin(r, qf(r - 1, 2), order), lin(1 + r, qf(2 - r, 2), order)])?, Status::Proven),
        2 => (
            prod(&[
                lin(r, qf(r * r - 1, 2), order),
                lin(1 + r, qf(2 * r - r * r, 2), order),
                lin(r * (1 + r), qf(-1, 2), order),
            ])?,
            Status::Proven,
        ),
        3 | 4 => match s {
            1 => {
                let sq2 = lin(2, qf(1, 2), order);
                let sq6 = lin(6, qf(1, 2), order);
                let half_sum = sq2.add(&sq6)?.scale(&qf(1, 2));
                let f = if index == 3 {
                    lin(2, q(-1), order).mul(&half_sum)?
                } else {
                    sq2.mul(&sq6)?.div(&half_sum.pow_int(2)?)?
                };
                (f, Status::Proven)
            }
            2 => {
                let y = y_series(order + 1)?;
                let f = if index == 3 {
                    let (yt, _, _) = branch_parts(&y)?;
                    lin(3, q(-1), order).mul(&yt.pow_rational(&qf(-1, 2))?)?
                } else {
                    lin(3, q(1), order).mul(&algebraic_four(&y, q(3))?)?
                };
                (f, Status::Proven)
            }
            0 if index == 3 => (lin(1, q(-1), order).mul(&lin(2, qf(1, 2), order))?, Status::Conjectural),
            0 | -1 | -2 => (Series::one(Var::T, order), Status::Trivial),
            _ => return Err(unknown()),
        },
        _ => return Err(Error::Invalid(format!("Segre index {index} not in 0..=4"))),
    })
}

/// Segre universal series `A_index` at rank `s`, as a series in `z`.
#[allow(non_snake_case)]
pub fn segre_A(s: i64, index: usize, order: usize) -> Result<SeriesCatalogEntry> {
    let family = Family::segre(index)?;
    let r = s + 1;
    let (f, status) = segre_t(s, index, order)?;
    let (z_of_t, t_of_z) = segre_change_of_var(r, order.max(1))?;
    let series = f.truncate(order).compose(&t_of_z.truncate(order))?;
    Ok(SeriesCatalogEntry {
        family,
        rank: s,
        r,
        convention: RankConvention::SegreShift,
        status,
        series,
        change_of_variable: z_of_t,
    })
}

/// Chern universal series `Ã_index` at rank `s` (with `r = s - 1`), as a series in `z`.
#[allow(non_snake_case)]
pub fn chern_A(s: i64, index: usize, order: usize) -> Result<SeriesCatalogEntry> {
    let family = Family::chern(index)?;
    let r = s - 1;
    let f = match index {
        0 => prod(&[lin(-r, q(-r), order), lin(1 - r, q(r + 1), order)])?,
        1 => prod(&[lin(-r, qf(r - 1, 2), order), lin(1 - r, qf(-r, 2), order)])?,
        _ => prod(&[
            lin(r * r - r, qf(-1, 2), order),
            lin(-r, qf(r * r - 1, 2), order),
            lin(1 - r, qf(-r * r - 2 * r, 2), order),
        ])?,
    };
    let (z_of_t, t_of_z) = chern_change_of_var(r, order.max(1))?;
    let series = f.compose(&t_of_z.truncate(order))?;
    Ok(SeriesCatalogEntry {
        family,
        rank: s,
        r,
        convention: RankConvention::ChernShift,
        status: Status::Proven,
        series,
        change_of_variable: z_of_t,
    })
}

/// Verlinde closed form in `t` for twist `r >= 0` (indices 3, 4 need `r <= 3`).
pub fn verlinde_t(r: i64, index: usize, order: usize) -> Result<(Series, Status)> {
    let one = Series::one(Var::T, order);
    Ok(match (index, r) {
        (1, _) => (lin(1, q(1), order), Status::Proven),
        (2, _) => (lin(1, qf(r * r, 2), order).mul(&lin(r * r, qf(-1, 2), order))?, Status::Proven),
        (3 | 4, 0 | 1) => (one, Status::Trivial),
        (3 | 4, 2) => {
            let sq4 = lin(4, qf(1, 2), order);
            let half = sq4.add(&one)?.scale(&qf(1, 2));
            let f = if index == 3 {
                half.mul(&lin(1, q(-1), order))?
            } else {
                prod(&[lin(1, qf(1, 2), order), sq4, half.pow_rational(&qf(-5, 2))?])?
            };
            (f, Status::Conjectural)
        }
        (3 | 4, 3) => {
            let y = big_y_series(order + 1)?;
            let f = if index == 3 {
                let (yt, _, _) = branch_parts(&y)?;
                lin(1, qf(-3, 2), order).mul(&yt.pow_rational(&qf(-1, 2))?)?
            } else {
                lin(1, qf(3, 4), order).mul(&algebraic_four(&y, qf(13, 4))?)?
            };
            (f, Status::Conjectural)
        }
        (3 | 4, _) => return Err(Error::UnknownSeries { family: format!("VerlindeB{index}"), rank: r }),
        _ => return Err(Error::Invalid(format!("Verlinde index {index} not in 1..=4"))),
    })
}

/// Verlinde universal series `B_index` at twist `r`, as a series in `w`. Negative
/// twists use `B_3 -> B_3^{-1}` and `B_4` unchanged.
#[allow(non_snake_case)]
pub fn verlinde_B(r: i64, index: usize, order: usize) -> Result<SeriesCatalogEntry> {
    let family = Family::verlinde(index)?;
    let (mut f, status) = verlinde_t(r.abs(), index, order)?;
    if r < 0 && index == 3 {
        f = f.inv()?;
    }
    let (w_of_t, t_of_w) = verlinde_change_of_var(r, order.max(1))?;
    let series = f.compose(&t_of_w.truncate(order))?;
    Ok(SeriesCatalogEntry {
        family,
        rank: r,
        r,
        convention: RankConvention::VerlindeTwist,
        status,
        series,
        change_of_variable: w_of_t,
    })
}

/// Catalog entries for the two quartic branches, as series in `t`.
pub fn quartic_entry(family: Family, order: usize) -> Result<SeriesCatalogEntry> {
    let series = match family {
        Family::LowerYQuartic => y_series(order)?,
        Family::YQuartic => big_y_series(order)?,
        _ => return Err(Error::Invalid(format!("{family:?} is not a quartic branch"))),
    };
    Ok(SeriesCatalogEntry {
        family,
        rank: 0,
        r: 0,
        convention: RankConvention::None,
        status: Status::Proven,
        series,
        change_of_variable: Series::variable(Var::T, order.max(1)),
    })
}

fn raise(base: &Series, e: &Q) -> Result<Series> {
    if is_integer(e) {
        let k: i64 = e.to_integer().try_into().map_err(|_| Error::NonIntegralExponent(e.to_string()))?;
        base.pow_int(k)
    } else {
        base.pow_rational(e)
    }
}

fn assemble(order: usize, var: Var, factors: Vec<(Q, Box<dyn Fn() -> Result<Series> + '_>)>) -> Result<Series> {
    let mut acc = Series::one(var, order);
    for (e, build) in factors {
        if e != q(0) {
            acc = acc.mul(&raise(&build()?, &e)?)?;
        }
    }
    Ok(acc)
}

/// `A_0^{c2} A_1^{c1^2} A_2^{χ(O)} A_3^{c1·K} A_4^{K^2}` at rank `s`.
pub fn segre_full(s: i64, c2: i64, c1sq: i64, chi_o: i64, c1k: i64, ksq: i64, order: usize) -> Result<Series> {
    let exps = [c2, c1sq, chi_o, c1k, ksq];
    let factors = exps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let build: Box<dyn Fn() -> Result<Series>> = Box::new(move || Ok(segre_A(s, i, order)?.series));
            (q(e), build)
        })
        .collect();
    assemble(order, Var::Z, factors)
}

/// `Ã_0^{c2} Ã_1^{c1^2} Ã_2^{χ(O)}` at rank `s`.
pub fn chern_full(s: i64, c2: i64, c1sq: i64, chi_o: i64, order: usize) -> Result<Series> {
    let factors = [c2, c1sq, chi_o]
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let build: Box<dyn Fn() -> Result<Series>> = Box::new(move || Ok(chern_A(s, i, order)?.series));
            (q(e), build)
        })
        .collect();
    assemble(order, Var::Z, factors)
}

/// `B_1^{χ(L)} B_2^{χ(O)} B_3^{c1·K - K^2/2} B_4^{K^2}` at twist `r`. A half-integral
/// `B_3` exponent is taken as a rational power (`B_3` has constant term 1).
pub fn verlinde_full(r: i64, chi_l: i64, chi_o: i64, c1k: i64, ksq: i64, order: usize) -> Result<Series> {
    let exps = [q(chi_l), q(chi_o), q(c1k) - qf(ksq, 2), q(ksq)];
    let factors = exps
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let build: Box<dyn Fn() -> Result<Series>> = Box::new(move || Ok(verlinde_B(r, i + 1, order)?.series));
            (e, build)
        })
        .collect();
    assemble(order, Var::W, factors)
}

/// Logarithms of `A_0..A_{count-1}` at rank `s`, for repeated assembly.
pub fn segre_logs(s: i64, count: usize, order: usize) -> Result<Vec<Series>> {
    (0..count).map(|i| segre_A(s, i, order)?.series.log()).collect()
}

/// Logarithms of `Ã_0, Ã_1, Ã_2` at rank `s`.
pub fn chern_logs(s: i64, order: usize) -> Result<Vec<Series>> {
    (0..3).map(|i| chern_A(s, i, order)?.series.log()).collect()
}

/// Logarithms of `B_1..B_count` at twist `r`.
pub fn verlinde_logs(r: i64, count: usize, order: usize) -> Result<Vec<Series>> {
    (1..=count).map(|i| verlinde_B(r, i, order)?.series.log()).collect()
}

/// `exp(Σ e_i log_i)`.
pub fn assemble_logs(logs: &[Series], exps: &[Q]) -> Result<Series> {
    if logs.len() != exps.len() {
        return Err(Error::Invalid(format!("{} series but {} exponents", logs.len(), exps.len())));
    }
    let mut acc = logs[0].scale(&exps[0]);
    for (l, e) in logs.iter().zip(exps).skip(1) {
        acc = acc.add(&l.scale(e))?;
    }
    acc.exp()
}

/// `z = t(1-rt)^{-r}` and `w = t(1-(r-1)t)^{r^2-1} (1-rt)^{-r^2}`, both as series in `t`.
pub fn segre_verlinde_vars(r: i64, order: usize) -> Result<(Series, Series)> {
    if order == 0 {
        return Err(Error::Invalid("a change of variables needs order >= 1".into()));
    }
    let n = order - 1;
    let z = times_t(&lin(-r, q(-r), n));
    let w = times_t(&lin(-(r - 1), q(r * r - 1), n).mul(&lin(-r, q(-r * r), n))?);
    Ok((z, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_z(f: Series, r: i64) -> Series {
        let (_, t_of_z) = segre_change_of_var(r, f.order()).unwrap();
        f.compose(&t_of_z).unwrap()
    }

    #[test]
    fn rank_one_matches_lehn_forms() {
        let n = 8;
        let a0 = lin(2, q(-2), n).mul(&lin(3, q(1), n)).unwrap();
        assert_eq!(segre_A(1, 0, n).unwrap().series, in_z(a0, 2));
        assert_eq!(segre_A(1, 1, n).unwrap().series, in_z(lin(2, qf(1, 2), n), 2));
        let a2 = lin(2, qf(3, 2), n).mul(&lin(6, qf(-1, 2), n)).unwrap();
        assert_eq!(segre_A(1, 2, n).unwrap().series, in_z(a2, 2));
        assert_eq!(segre_A(1, 3, n).unwrap().series.constant_term(), &q(1));
    }

    #[test]
    fn rank_two_matches_printed_forms() {
        let n = 8;
        let a0 = lin(4, q(2), n).mul(&lin(3, q(-3), n)).unwrap();
        assert_eq!(segre_A(2, 0, n).unwrap().series, in_z(a0, 3));
        let a1 = lin(3, q(1), n).mul(&lin(4, qf(-1, 2), n)).unwrap();
        assert_eq!(segre_A(2, 1, n).unwrap().series, in_z(a1, 3));
        let a2 = prod(&[lin(3, q(4), n), lin(4, qf(-3, 2), n), lin(12, qf(-1, 2), n)]).unwrap();
        assert_eq!(segre_A(2, 2, n).unwrap().series, in_z(a2, 3));
    }

    #[test]
    fn change_of_variables() {
        let (z, t) = segre_change_of_var(2, 3).unwrap();
        assert_eq!(z, Series::from_ints(Var::T, &[0, 1, 4, 4], 3));
        assert_eq!(t, Series::from_ints(Var::Z, &[0, 1, -4, 28], 3));
        assert!(z.compose(&t).unwrap().is_identity());
        let (z, t) = segre_change_of_var(0, 4).unwrap();
        assert!(z.is_identity() && t.is_identity());
        let (z, w) = segre_verlinde_vars(1, 5).unwrap();
        let geom = Series::from_ints(Var::T, &[0, 1, 1, 1, 1, 1], 5);
        assert_eq!((z.clone(), w), (geom.clone(), geom));
        let (z, w) = segre_verlinde_vars(0, 4).unwrap();
        assert!(z.is_identity());
        assert_eq!(w, Series::from_ints(Var::T, &[0, 1, -1, 1, -1], 4));
    }

    #[test]
    fn chern_rank_two() {
        let a0 = chern_A(2, 0, 6).unwrap().series;
        assert_eq!(a0, Series::from_ints(Var::Z, &[1, 1], 6));
        assert_eq!(chern_A(2, 1, 6).unwrap().series, Series::one(Var::Z, 6));
        assert_eq!(chern_A(2, 2, 6).unwrap().series, Series::one(Var::Z, 6));
    }

    #[test]
    fn verlinde_entries() {
        let n = 6;
        let v = verlinde_full(0, 3, 1, -2, 9, n).unwrap();
        let want = Series::from_ints(Var::W, &[1, -1], n).pow_int(-3).unwrap();
        assert_eq!(v, want);
        for r in [1, 2, 3] {
            let b3 = verlinde_B(r, 3, n).unwrap().series;
            let b3m = verlinde_B(-r, 3, n).unwrap().series;
            assert!(b3.mul(&b3m).unwrap().add_constant(&q(-1)).is_zero());
            assert_eq!(verlinde_B(r, 4, n).unwrap().series, verlinde_B(-r, 4, n).unwrap().series);
        }
        assert!(matches!(verlinde_B(4, 3, n), Err(Error::UnknownSeries { .. })));
        assert_eq!(verlinde_B(2, 3, n).unwrap().status, Status::Conjectural);
    }

    #[test]
    fn unknown_and_trivial_segre() {
        assert!(matches!(segre_A(3, 3, 4), Err(Error::UnknownSeries { rank: 3, .. })));
        assert!(matches!(segre_A(-3, 4, 4), Err(Error::UnknownSeries { .. })));
        assert_eq!(segre_A(-1, 3, 4).unwrap().status, Status::Trivial);
        assert_eq!(segre_A(0, 4, 4).unwrap().series, Series::one(Var::Z, 4));
        assert_eq!(segre_full(2, 0, 0, 0, 0, 0, 5).unwrap(), Series::one(Var::Z, 5));
        assert!(segre_full(3, 1, 1, 1, 0, 0, 3).is_ok());
        assert!(segre_full(3, 1, 1, 1, 1, 0, 3).is_err());
    }

    #[test]
    fn quartic_branches_agree() {
        // Y(t) = y(t / (1 - 3t))
        let n = 7;
        let inner = Series::from_ints(Var::T, &[0, 1, 3, 9, 27, 81, 243, 729], n);
        let lhs = y_series(n).unwrap().compose(&inner).unwrap();
        assert_eq!(lhs, big_y_series(n).unwrap());
        let want: Vec<Q> = [0, 1, -3, 14, -80, 509, -3459].iter().map(|&c| q(c)).collect();
        assert_eq!(&big_y_series(6).unwrap().coeffs()[..], want.as_slice());
    }
}
