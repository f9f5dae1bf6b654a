//! Power-series branches of algebraic curves `P(y, t) = 0` through the origin.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{format_q, q, Q};
use crate::series::{Series, Var};

/// Polynomial in two variables, `sum c_{ij} y^i t^j`. Zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(usize, usize), Q>,
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2::default()
    }

    /// `c y^i t^j`.
    pub fn term(c: Q, i: usize, j: usize) -> Poly2 {
        let mut p = Poly2::zero();
        p.add_term(c, i, j);
        p
    }

    pub fn y() -> Poly2 {
        Poly2::term(q(1), 1, 0)
    }

    pub fn t() -> Poly2 {
        Poly2::term(q(1), 0, 1)
    }

    pub fn constant(c: Q) -> Poly2 {
        Poly2::term(c, 0, 0)
    }

    pub fn add_term(&mut self, c: Q, i: usize, j: usize) {
        let entry = self.terms.entry((i, j)).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> Q {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(c.clone(), i, j);
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), a) in &self.terms {
            out.add_term(a * c, i, j);
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &other.terms {
                out.add_term(a * b, i1 + i2, j1 + j2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly2 {
        (0..k).fold(Poly2::constant(q(1)), |acc, _| acc.mul(self))
    }

    /// `dP/dy`.
    pub fn dy(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.add_term(c * q(i as i64), i - 1, j);
            }
        }
        out
    }

    fn y_degree(&self) -> usize {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// Substitute a series in `t` for `y`, truncating at the series' order.
    pub fn eval_y(&self, y: &Series) -> Result<Series> {
        let order = y.order();
        let deg = self.y_degree();
        // Horner in y; the coefficient of y^i is a polynomial in t.
        let t_poly = |i: usize| -> Series {
            let mut coeffs = vec![Q::zero(); order + 1];
            for (&(ii, j), c) in &self.terms {
                if ii == i && j <= order {
                    coeffs[j] += c;
                }
            }
            Series::from_coeffs(y.var(), coeffs)
        };
        let mut acc = t_poly(deg);
        for i in (0..deg).rev() {
            acc = acc.mul(y)?.add(&t_poly(i))?;
        }
        Ok(acc)
    }
}

/// The unique series `y(t)` with `y(0) = 0` and `P(y(t), t) = O(t^{order+1})`, by
/// Newton iteration. Needs `P(0, 0) = 0` and `dP/dy(0, 0) != 0`.
pub fn solve_algebraic(relation: &Poly2, order: usize) -> Result<Series> {
    let c00 = relation.coeff(0, 0);
    if !c00.is_zero() {
        return Err(Error::Branch(format!("P(0,0) = {} is not zero", format_q(&c00))));
    }
    if relation.coeff(1, 0).is_zero() {
        return Err(Error::Branch("dP/dy vanishes at the origin".into()));
    }
    let dy = relation.dy();
    let mut y = Series::zero(Var::T, order);
    for _ in 0..64 {
        let resid = relation.eval_y(&y)?;
        if resid.is_zero() {
            return Ok(y);
        }
        let slope = dy.eval_y(&y)?;
        y = y.sub(&resid.div(&slope)?)?;
    }
    Err(Error::Branch("Newton iteration did not converge".into()))
}

/// `y (1 + y)^2 (1 + c t) - t (1 - y)(1 - y^3)`: the quartic defining the rank-2
/// branch (`c = 3`) and its companion without the `t/(1+3t)` twist (`c = 0`).
pub fn quartic_relation(c: i64) -> Poly2 {
    let y = Poly2::y();
    let t = Poly2::t();
    let one = Poly2::constant(q(1));
    let lhs = y.mul(&one.add(&y).pow(2)).mul(&one.add(&t.scale(&q(c))));
    let rhs = t.mul(&one.sub(&y)).mul(&one.sub(&y.pow(3)));
    lhs.sub(&rhs)
}
