use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::factor::is_prime;
use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with positive denominator.
pub type Rational = BigRational;

/// A place of Q: the real absolute value or a p-adic one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(BigUint),
}

impl Place {
    pub fn finite(p: BigUint) -> Result<Place> {
        if !is_prime(&p) {
            return Err(Error::arg(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `max(|p|, |q|)` for `x = p/q` in lowest terms; `h(x) = log` of this.
pub fn rational_height_magnitude(x: &Rational) -> BigUint {
    x.numer().magnitude().max(x.denom().magnitude()).clone()
}

fn valuation_of_int(n: &BigUint, p: &BigUint) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)` for nonzero rational `x`.
pub fn valuation(x: &Rational, p: &BigUint) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::domain("valuation of 0 is undefined"));
    }
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    Ok(valuation_unchecked(x, p))
}

/// Valuation without the primality certificate; caller guarantees `p` prime
/// and `x != 0`.
pub(crate) fn valuation_unchecked(x: &Rational, p: &BigUint) -> i64 {
    valuation_of_int(x.numer().magnitude(), p) - valuation_of_int(x.denom().magnitude(), p)
}
