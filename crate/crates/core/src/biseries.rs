//! Dense truncated bivariate series, used for excess-coefficient extraction.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, q, Q};
use crate::series::Var;

/// Coefficients `c[i][j]` of `x^i y^j` for `i <= d1`, `j <= d2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    vars: (Var, Var),
    d1: usize,
    d2: usize,
    coeffs: Vec<Vec<Q>>,
}

impl BiSeries {
    pub fn zero(vars: (Var, Var), d1: usize, d2: usize) -> BiSeries {
        BiSeries { vars, d1, d2, coeffs: vec![vec![Q::zero(); d2 + 1]; d1 + 1] }
    }

    pub fn one(vars: (Var, Var), d1: usize, d2: usize) -> BiSeries {
        let mut s = BiSeries::zero(vars, d1, d2);
        s.coeffs[0][0] = Q::one();
        s
    }

    /// `c0 + c1 x + c2 y`.
    pub fn linear(vars: (Var, Var), d1: usize, d2: usize, c0: Q, c1: Q, c2: Q) -> BiSeries {
        let mut s = BiSeries::zero(vars, d1, d2);
        s.coeffs[0][0] = c0;
        if d1 >= 1 {
            s.coeffs[1][0] = c1;
        }
        if d2 >= 1 {
            s.coeffs[0][1] = c2;
        }
        s
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn vars(&self) -> (Var, Var) {
        self.vars
    }

    /// Coefficient of `x^i y^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Result<&Q> {
        if i > self.d1 || j > self.d2 {
            return Err(Error::Range { i, j, d1: self.d1, d2: self.d2 });
        }
        Ok(&self.coeffs[i][j])
    }

    pub fn set(&mut self, i: usize, j: usize, c: Q) -> Result<()> {
        if i > self.d1 || j > self.d2 {
            return Err(Error::Range { i, j, d1: self.d1, d2: self.d2 });
        }
        self.coeffs[i][j] = c;
        Ok(())
    }

    fn check_shape(&self, other: &BiSeries) -> Result<()> {
        if (self.d1, self.d2) != (other.d1, other.d2) {
            return Err(Error::OrderMismatch { left: self.d1.max(self.d2), right: other.d1.max(other.d2) });
        }
        Ok(())
    }

    pub fn mul(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check_shape(other)?;
        let mut out = BiSeries::zero(self.vars, self.d1, self.d2);
        for i1 in 0..=self.d1 {
            for j1 in 0..=self.d2 {
                let a = &self.coeffs[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=self.d1 - i1 {
                    for j2 in 0..=self.d2 - j1 {
                        let b = &other.coeffs[i2][j2];
                        if !b.is_zero() {
                            out.coeffs[i1 + i2][j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse of a series with nonzero constant term, by the coefficient recurrence
    /// `b_{ij} = -a_{00}^{-1} sum_{(k,l) != 0} a_{kl} b_{i-k,j-l}`.
    pub fn inv(&self) -> Result<BiSeries> {
        let c0 = self.coeffs[0][0].clone();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = c0.recip();
        let support: Vec<(usize, usize, &Q)> = (0..=self.d1)
            .flat_map(|k| (0..=self.d2).map(move |l| (k, l)))
            .filter(|&(k, l)| (k, l) != (0, 0) && !self.coeffs[k][l].is_zero())
            .map(|(k, l)| (k, l, &self.coeffs[k][l]))
            .collect();
        let mut out = BiSeries::zero(self.vars, self.d1, self.d2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                if (i, j) == (0, 0) {
                    out.coeffs[0][0] = inv0.clone();
                    continue;
                }
                let mut acc = Q::zero();
                for &(k, l, a) in &support {
                    if k <= i && l <= j {
                        let b = &out.coeffs[i - k][j - l];
                        if !b.is_zero() {
                            acc += a * b;
                        }
                    }
                }
                out.coeffs[i][j] = -acc * &inv0;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BiSeries) -> Result<BiSeries> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (row, orow) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
        Ok(out)
    }

    /// Integer power; a negative power inverts after raising, which keeps the
    /// multiplications sparse for polynomial bases.
    pub fn pow_int(&self, k: i64) -> Result<BiSeries> {
        let mut acc = BiSeries::one(self.vars, self.d1, self.d2);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(self)?;
        }
        if k < 0 {
            acc = acc.inv()?;
        }
        Ok(acc)
    }

    /// `(1 + c y)^e` in the second variable only, via the binomial series.
    pub fn second_var_power(vars: (Var, Var), d1: usize, d2: usize, c: &Q, e: &Q) -> BiSeries {
        let mut s = BiSeries::zero(vars, d1, d2);
        let mut cp = Q::one();
        for j in 0..=d2 {
            s.coeffs[0][j] = binomial(e, j as u32) * &cp;
            cp *= c;
        }
        s
    }
}

/// `[h^i ζ^j]` of a bivariate series.
pub fn bicoeff(f: &BiSeries, i: usize, j: usize) -> Result<Q> {
    f.coeff(i, j).cloned()
}

/// `(1 - ζ)^a / (1 - h - ζ)^2` truncated at `h^{d1} ζ^{d2}`, variables ordered `(h, ζ)`.
pub fn excess_series(a: i64, d1: usize, d2: usize) -> Result<BiSeries> {
    let vars = (Var::H, Var::Zeta);
    let num = BiSeries::second_var_power(vars, d1, d2, &q(-1), &q(a));
    let den = BiSeries::linear(vars, d1, d2, q(1), q(-1), q(-1));
    num.mul(&den.pow_int(-2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excess_coefficients() {
        // (-1)^n (2n+1) at n = 1, 2
        assert_eq!(bicoeff(&excess_series(5, 2, 1).unwrap(), 2, 1).unwrap(), q(-3));
        assert_eq!(bicoeff(&excess_series(8, 4, 2).unwrap(), 4, 2).unwrap(), q(5));
    }

    #[test]
    fn unit_and_range() {
        let one = BiSeries::one((Var::H, Var::Zeta), 3, 2);
        assert_eq!(bicoeff(&one, 0, 0).unwrap(), q(1));
        assert_eq!(bicoeff(&one, 3, 2).unwrap(), q(0));
        assert!(matches!(bicoeff(&one, 4, 0), Err(Error::Range { .. })));
        let f = BiSeries::linear((Var::H, Var::Zeta), 3, 3, q(2), q(1), q(-5));
        assert_eq!(f.mul(&f.inv().unwrap()).unwrap(), BiSeries::one((Var::H, Var::Zeta), 3, 3));
    }
}
