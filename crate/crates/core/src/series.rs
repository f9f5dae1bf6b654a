//! Truncated univariate formal power series over exact rationals.
//!
//! A [`Series`] of order `N` stores exactly `N + 1` coefficients and stands
//! for `c_0 + c_1 x + ... + c_N x^N + O(x^{N+1})`. Binary operations insist on
//! equal orders; callers truncate explicitly when they want to combine series
//! known to different precisions.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, q, Q};

/// Symbolic name of the series variable. Used for display and error reports only;
/// arithmetic never compares tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    Z,
    T,
    W,
    U,
    Q,
    H,
    Zeta,
}

impl Var {
    pub fn as_str(self) -> &'static str {
        match self {
            Var::Z => "z",
            Var::T => "t",
            Var::W => "w",
            Var::U => "u",
            Var::Q => "q",
            Var::H => "h",
            Var::Zeta => "zeta",
        }
    }

    pub fn parse(s: &str) -> Result<Var> {
        Ok(match s {
            "z" => Var::Z,
            "t" => Var::T,
            "w" => Var::W,
            "u" => Var::U,
            "q" => Var::Q,
            "h" => Var::H,
            "zeta" => Var::Zeta,
            _ => return Err(Error::Parse(format!("unknown series variable {s:?}"))),
        })
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    var: Var,
    coeffs: Vec<Q>,
}

impl Series {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient vector.
    pub fn from_coeffs(var: Var, coeffs: Vec<Q>) -> Series {
        assert!(!coeffs.is_empty(), "a series needs at least its constant term");
        Series { var, coeffs }
    }

    /// Polynomial with integer coefficients, padded with zeros (or truncated) to `order`.
    pub fn from_ints(var: Var, ints: &[i64], order: usize) -> Series {
        let coeffs = (0..=order).map(|k| ints.get(k).map_or_else(Q::zero, |&c| q(c))).collect();
        Series { var, coeffs }
    }

    pub fn zero(var: Var, order: usize) -> Series {
        Series { var, coeffs: vec![Q::zero(); order + 1] }
    }

    pub fn one(var: Var, order: usize) -> Series {
        Series::constant(var, Q::one(), order)
    }

    pub fn constant(var: Var, c: Q, order: usize) -> Series {
        let mut s = Series::zero(var, order);
        s.coeffs[0] = c;
        s
    }

    /// The variable itself, `x + O(x^{order+1})`.
    pub fn variable(var: Var, order: usize) -> Series {
        Series::monomial(var, Q::one(), 1, order)
    }

    /// `c x^k`, truncated to `order`.
    pub fn monomial(var: Var, c: Q, k: usize, order: usize) -> Series {
        let mut s = Series::zero(var, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// `(1 + c x)^e` through the ratio recurrence of the binomial series.
    pub fn linear_power(var: Var, c: &Q, e: &Q, order: usize) -> Series {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut cur = Q::one();
        coeffs.push(cur.clone());
        for k in 1..=order {
            cur = cur * (e - q(k as i64 - 1)) / q(k as i64) * c;
            coeffs.push(cur.clone());
        }
        Series { var, coeffs }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Series {
        self.var = var;
        self
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; panics when `k` exceeds the order.
    pub fn coeff(&self, k: usize) -> &Q {
        &self.coeffs[k]
    }

    pub fn constant_term(&self) -> &Q {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drop everything above `order`. Asking for a higher order than is known panics.
    pub fn truncate(&self, order: usize) -> Series {
        assert!(order <= self.order(), "cannot truncate order {} up to {order}", self.order());
        Series { var: self.var, coeffs: self.coeffs[..=order].to_vec() }
    }

    fn check_orders(&self, other: &Series) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch { left: self.order(), right: other.order() })
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_orders(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Series { var: self.var, coeffs })
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check_orders(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Series { var: self.var, coeffs })
    }

    pub fn neg(&self) -> Series {
        Series { var: self.var, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Q) -> Series {
        Series { var: self.var, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn add_constant(&self, c: &Q) -> Series {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_orders(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Series) -> Series {
        let n = self.order();
        let mut out = vec![Q::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { var: self.var, coeffs: out }
    }

    /// Product of several series of a common order.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Series>) -> Result<Series> {
        let mut it = factors.into_iter();
        let first = it.next().ok_or_else(|| Error::Invalid("empty product".into()))?.clone();
        it.try_fold(first, |acc, f| acc.mul(f))
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Result<Series> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Q> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..=self.order() {
            let mut acc = Q::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &out[n - k];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Series { var: self.var, coeffs: out })
    }

    /// `self / other`; the divisor needs a nonzero constant term. Series with a
    /// vanishing constant term have to be divided by a power of the variable
    /// first, with [`Series::shift_down`].
    pub fn div(&self, other: &Series) -> Result<Series> {
        self.check_orders(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    /// Divide by `x^k`. The first `k` coefficients must vanish; the order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Series> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotDivisible { expected: k });
        }
        Ok(Series { var: self.var, coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiply by `x^k`. The result is known to `k` more orders than `self`.
    pub fn shift_up(&self, k: usize) -> Series {
        let mut coeffs = vec![Q::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { var: self.var, coeffs }
    }

    /// Termwise derivative. The order drops by one (an order-0 series maps to the
    /// zero series of order 0).
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(self.var, 0);
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect();
        Series { var: self.var, coeffs }
    }

    /// Antiderivative with zero constant term. The order grows by one.
    pub fn integral(&self) -> Series {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Q::zero());
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / q(k as i64 + 1)));
        Series { var: self.var, coeffs }
    }

    /// Logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain {
                op: "log",
                reason: format!("constant term must be 1, found {}", format_q(&self.coeffs[0])),
            });
        }
        // a' = a b'  =>  n b_n = n a_n - sum_{k=1}^{n-1} k b_k a_{n-k}
        let n_max = self.order();
        let mut b = vec![Q::zero(); n_max + 1];
        for n in 1..=n_max {
            let mut acc = q(n as i64) * &self.coeffs[n];
            for k in 1..n {
                if !b[k].is_zero() && !self.coeffs[n - k].is_zero() {
                    acc -= q(k as i64) * &b[k] * &self.coeffs[n - k];
                }
            }
            b[n] = acc / q(n as i64);
        }
        Ok(Series { var: self.var, coeffs: b })
    }

    /// Exponential of a series with constant term 0.
    pub fn exp(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain {
                op: "exp",
                reason: format!("constant term must be 0, found {}", format_q(&self.coeffs[0])),
            });
        }
        // f' = g' f  =>  n f_n = sum_{k=1}^{n} k g_k f_{n-k}
        let n_max = self.order();
        let mut f = vec![Q::zero(); n_max + 1];
        f[0] = Q::one();
        for n in 1..=n_max {
            let mut acc = Q::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() && !f[n - k].is_zero() {
                    acc += q(k as i64) * &self.coeffs[k] * &f[n - k];
                }
            }
            f[n] = acc / q(n as i64);
        }
        Ok(Series { var: self.var, coeffs: f })
    }

    /// `self^e` for rational `e`, computed as `exp(e log self)`. The base must have
    /// constant term exactly 1.
    pub fn pow_rational(&self, e: &Q) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitBase(format_q(&self.coeffs[0])));
        }
        if e.is_zero() {
            return Ok(Series::one(self.var, self.order()));
        }
        self.log()?.scale(e).exp()
    }

    /// Integer power by repeated squaring; negative powers need an invertible base.
    pub fn pow_int(&self, k: i64) -> Result<Series> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Series::one(self.var, self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// `self(inner(x))`. The inner series must have zero constant term and the
    /// same order as `self`. The result carries the inner series' variable.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        self.check_orders(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionDomain(format_q(&inner.coeffs[0])));
        }
        let n = self.order();
        let mut acc = Series::constant(inner.var, self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse by Newton iteration on `self(b) = x`.
    pub fn revert(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonInvertible("nonzero constant term"));
        }
        let n = self.order();
        if n == 0 {
            return Ok(Series::zero(self.var, 0));
        }
        if self.coeffs[1].is_zero() {
            return Err(Error::NonInvertible("vanishing linear coefficient"));
        }
        let x = Series::variable(self.var, n);
        let deriv = self.derivative();
        let mut b = Series::monomial(self.var, self.coeffs[1].recip(), 1, n);
        for _ in 0..64 {
            let resid = self.compose(&b)?.sub(&x)?;
            if resid.is_zero() {
                return Ok(b);
            }
            // resid has valuation >= 1, so self'(b) is only needed to order n - 1.
            let slope = deriv.compose(&b.truncate(n - 1))?;
            let step = resid.shift_down(1)?.div(&slope)?.shift_up(1);
            b = b.sub(&step)?;
        }
        Err(Error::NonInvertible("Newton iteration did not converge"))
    }

    /// True if `self` is `x + O(x^{order+1})`.
    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(k, c)| if k == 1 { c.is_one() } else { c.is_zero() })
    }

    /// Evaluate the truncated polynomial at a rational point.
    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// Exact JSON view.
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            variable: self.var.as_str().to_string(),
            order: self.order(),
            coefficients: self.coeffs.iter().map(format_q).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Series> {
        if j.coefficients.len() != j.order + 1 {
            return Err(Error::Parse(format!(
                "order {} needs {} coefficients, got {}",
                j.order,
                j.order + 1,
                j.coefficients.len()
            )));
        }
        let coeffs = j.coefficients.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?;
        Ok(Series { var: Var::parse(&j.variable)?, coeffs })
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = format_q(c);
            if !first {
                f.write_str(if s.starts_with('-') { " - " } else { " + " })?;
            } else if s.starts_with('-') {
                f.write_str("-")?;
            }
            let s = s.trim_start_matches('-');
            match k {
                0 => write!(f, "{s}")?,
                1 if s == "1" => write!(f, "{}", self.var)?,
                1 => write!(f, "{s}*{}", self.var)?,
                _ if s == "1" => write!(f, "{}^{k}", self.var)?,
                _ => write!(f, "{s}*{}^{k}", self.var)?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

/// Wire format: `{"variable": "z", "order": N, "coefficients": ["p/q", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub variable: String,
    pub order: usize,
    pub coefficients: Vec<String>,
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(deserializer)?;
        Series::from_json(&j).map_err(serde::de::Error::custom)
    }
}
