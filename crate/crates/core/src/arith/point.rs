use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::rational::{parse_rational, rational_to_string, Rational};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// A point `(x : z)` of P^1(Q), kept in the canonical representative:
/// coprime coordinates, `z >= 0`, and `(1 : 0)` for infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x: BigInt,
    z: BigInt,
}

impl ProjPoint {
    pub fn new(x: BigInt, z: BigInt) -> Result<Self> {
        if x.is_zero() && z.is_zero() {
            return Err(Error::arg("(0:0) is not a point of P^1"));
        }
        Ok(Self::normalized(x, z))
    }

    /// Caller guarantees `(x, z) != (0, 0)`.
    pub(crate) fn normalized(mut x: BigInt, mut z: BigInt) -> Self {
        debug_assert!(!(x.is_zero() && z.is_zero()));
        if z.is_zero() {
            return Self::infinity();
        }
        let g = x.gcd(&z);
        if !g.is_one() {
            x /= &g;
            z /= &g;
        }
        if z.is_negative() {
            x = -x;
            z = -z;
        }
        ProjPoint { x, z }
    }

    pub fn infinity() -> Self {
        ProjPoint { x: BigInt::one(), z: BigInt::zero() }
    }

    pub fn from_rational(q: &Rational) -> Self {
        ProjPoint { x: q.numer().clone(), z: q.denom().clone() }
    }

    pub fn from_int(n: i64) -> Self {
        ProjPoint { x: BigInt::from(n), z: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn z(&self) -> &BigInt {
        &self.z
    }

    pub fn is_infinity(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        (!self.is_infinity()).then(|| BigRational::new(self.x.clone(), self.z.clone()))
    }

    /// `1 / P`, swapping 0 and infinity.
    pub fn reciprocal(&self) -> ProjPoint {
        Self::normalized(self.z.clone(), self.x.clone())
    }

    pub fn magnitude(&self) -> BigUint {
        self.x.magnitude().max(self.z.magnitude()).clone()
    }
}

impl Ord for ProjPoint {
    /// Ascending magnitude, then infinity first, then ascending `x`, then `z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.magnitude()
            .cmp(&other.magnitude())
            .then_with(|| other.is_infinity().cmp(&self.is_infinity()))
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            None => write!(f, "inf"),
            Some(q) => write!(f, "{}", rational_to_string(&q)),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.x, self.z)
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Self::infinity());
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            if let Some((a, b)) = inner.split_once(':') {
                let x: BigInt = a.trim().parse().map_err(|_| Error::parse(format!("bad point {s:?}")))?;
                let z: BigInt = b.trim().parse().map_err(|_| Error::parse(format!("bad point {s:?}")))?;
                return ProjPoint::new(x, z);
            }
        }
        Ok(Self::from_rational(&parse_rational(t)?))
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Weil height of a point of P^1(Q), carried as the exact integer
/// `max(|x|, |z|)`; comparisons use the integer, the logarithm is a cached
/// certified enclosure for presentation and bound evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightValue {
    magnitude: BigUint,
    log: Interval,
}

impl HeightValue {
    pub fn from_magnitude(magnitude: BigUint) -> Self {
        let log = Interval::ln_biguint(&magnitude);
        HeightValue { magnitude, log }
    }

    pub fn magnitude(&self) -> &BigUint {
        &self.magnitude
    }

    pub fn log(&self) -> &Interval {
        &self.log
    }

    pub fn approx(&self) -> f64 {
        self.log.mid_f64()
    }
}

impl PartialOrd for HeightValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.magnitude.cmp(&other.magnitude))
    }
}

pub fn weil_height(p: &ProjPoint) -> HeightValue {
    HeightValue::from_magnitude(p.magnitude())
}

fn points_of_magnitude(m: u64) -> Vec<ProjPoint> {
    if m == 1 {
        return vec![
            ProjPoint::infinity(),
            ProjPoint::from_int(-1),
            ProjPoint::from_int(0),
            ProjPoint::from_int(1),
        ];
    }
    let mut out = Vec::new();
    let mi = m as i64;
    for x in -mi..=mi {
        if x.unsigned_abs() == m {
            for z in 1..=m {
                if z.gcd(&m) == 1 {
                    out.push(ProjPoint { x: x.into(), z: z.into() });
                }
            }
        } else if x.unsigned_abs().gcd(&m) == 1 {
            out.push(ProjPoint { x: x.into(), z: mi.into() });
        }
    }
    out
}

/// Deterministic, restartable stream of all points of magnitude at most
/// `bound`, in canonical order.
#[derive(Clone, Debug)]
pub struct PointStream {
    bound: u64,
    magnitude: u64,
    buffer: Vec<ProjPoint>,
    pos: usize,
}

impl PointStream {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Restart the stream at the given global index.
    pub fn starting_at(mut self, index: usize) -> Self {
        let mut skipped = 0usize;
        let mut m = 1;
        while m <= self.bound {
            let n = if m == 1 { 4 } else { count_of_magnitude(m) as usize };
            if skipped + n > index {
                break;
            }
            skipped += n;
            m += 1;
        }
        self.magnitude = m;
        self.buffer = if m <= self.bound { points_of_magnitude(m) } else { Vec::new() };
        self.pos = index - skipped;
        self
    }
}

impl Iterator for PointStream {
    type Item = ProjPoint;

    fn next(&mut self) -> Option<ProjPoint> {
        loop {
            if self.pos < self.buffer.len() {
                self.pos += 1;
                return Some(self.buffer[self.pos - 1].clone());
            }
            if self.magnitude >= self.bound {
                return None;
            }
            self.magnitude += 1;
            self.buffer = points_of_magnitude(self.magnitude);
            self.pos = 0;
        }
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn count_of_magnitude(m: u64) -> u64 {
    if m == 1 {
        4
    } else {
        4 * euler_phi(m)
    }
}

/// Number of points with magnitude at most `bound`.
pub fn count_points(bound: u64) -> u64 {
    (1..=bound).map(count_of_magnitude).sum()
}

pub fn enumerate_points(bound: u64) -> Result<PointStream> {
    if bound < 1 {
        return Err(Error::arg("height bound must be at least 1"));
    }
    Ok(PointStream { bound, magnitude: 1, buffer: points_of_magnitude(1), pos: 0 })
}
