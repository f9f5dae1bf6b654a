//! Exact rational scalars and the handful of combinatorial helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator by `num_rational`.
pub type Q = num_rational::BigRational;

/// Build a rational from a machine integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Build the rational `num/den`. Panics on a zero denominator.
pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical exact string: `"p"` when the denominator is one, `"p/q"` otherwise.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Always-explicit `"p/q"` form, used by the tabular CLI output.
pub fn format_q_explicit(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `"p"` or `"p/q"` (optional leading sign, no whitespace inside).
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Generalized binomial coefficient `a(a-1)...(a-k+1)/k!` for rational `a`.
///
/// This is the polynomial definition, so negative and small `a` are allowed:
/// `binomial(-1, 3) = -1`, `binomial(2, 5) = 0`.
pub fn binomial(a: &Q, k: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..k {
        acc = acc * (a - q(i as i64)) / q(i as i64 + 1);
    }
    acc
}

/// Integer binomial with integer (possibly negative) top, via the polynomial definition.
pub fn binomial_int(a: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(a - i);
        den *= BigInt::from(i + 1);
    }
    let (quo, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quo
}

/// `x^k` for a non-negative machine exponent.
pub fn qpow(x: &Q, k: u32) -> Q {
    num_traits::pow(x.clone(), k as usize)
}

/// True when `x` is an integer.
pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Serialize rationals as exact strings, for `#[serde(serialize_with)]`.
pub fn serialize_q_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_q))
}

pub fn serialize_q_matrix<S: serde::Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(format_q).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-22/7"] {
            assert_eq!(format_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(format_q(&parse_q("4/2").unwrap()), "2");
        assert_eq!(format_q_explicit(&q(-6)), "-6/1");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("1/-2").is_err());
    }

    #[test]
    fn polynomial_binomials() {
        assert_eq!(binomial(&q(5), 2), q(10));
        assert_eq!(binomial(&q(2), 5), q(0));
        assert_eq!(binomial(&q(-1), 3), q(-1));
        assert_eq!(binomial(&qf(1, 2), 2), qf(-1, 8));
        assert_eq!(binomial_int(-3, 2), BigInt::from(6));
        assert_eq!(binomial_int(6, 2), BigInt::from(15));
        assert_eq!(binomial_int(4, -1), BigInt::from(0));
    }
}
