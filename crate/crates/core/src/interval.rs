//! Certified real enclosures.
//!
//! An [`Interval`] holds two integers `lo`, `hi` and represents the closed
//! range `[lo, hi] * 2^-PRECISION_BITS`. Every operation rounds its lower end
//! toward minus infinity and its upper end toward plus infinity, so an
//! interval produced from exact inputs always contains the true value.
//! Logarithms are evaluated with the `atanh` series at a few guard bits
//! beyond the working precision, with the series tail bounded explicitly.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Working precision of every enclosure, in bits after the binary point.
pub const PRECISION_BITS: u32 = 160;

const GUARD_BITS: u32 = 40;
const SERIES_BITS: u32 = PRECISION_BITS + GUARD_BITS;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn shr_floor(a: &BigInt, bits: u32) -> BigInt {
    floor_div(a, &(BigInt::one() << bits))
}

fn shr_ceil(a: &BigInt, bits: u32) -> BigInt {
    ceil_div(a, &(BigInt::one() << bits))
}

/// Enclosure of `ln(p/q)` for `q <= p <= 2q`, at scale `2^-SERIES_BITS`.
fn ln_unit_range(p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(q.is_positive() && p >= q && p <= &(q * 2));
    let w = SERIES_BITS;
    let one_w = BigInt::one() << w;
    // t = (p - q) / (p + q) lies in [0, 1/3]
    let num = (p - q) << w;
    let den = p + q;
    let t_lo = floor_div(&num, &den);
    let t_hi = ceil_div(&num, &den);
    if t_hi.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let t2_lo = floor_div(&(&t_lo * &t_lo), &one_w);
    let t2_hi = ceil_div(&(&t_hi * &t_hi), &one_w);
    let mut pow_lo = t_lo;
    let mut pow_hi = t_hi;
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let stop = BigInt::one() << (GUARD_BITS / 2);
    let mut j: u64 = 0;
    loop {
        let odd = BigInt::from(2 * j + 1);
        sum_lo += floor_div(&pow_lo, &odd);
        sum_hi += ceil_div(&pow_hi, &odd);
        pow_lo = floor_div(&(&pow_lo * &t2_lo), &one_w);
        pow_hi = ceil_div(&(&pow_hi * &t2_hi), &one_w);
        j += 1;
        if pow_hi < stop {
            // tail: sum_{i >= j} t^(2i+1)/(2i+1) <= t^(2j+1) / (1 - t^2) <= 9/8 t^(2j+1)
            sum_hi += ceil_div(&(&pow_hi * 9), &BigInt::from(8)) + 1;
            break;
        }
    }
    (sum_lo * 2, sum_hi * 2)
}

fn ln2_series() -> &'static (BigInt, BigInt) {
    static LN2: OnceLock<(BigInt, BigInt)> = OnceLock::new();
    LN2.get_or_init(|| ln_unit_range(&BigInt::from(2), &BigInt::one()))
}

impl Interval {
    pub fn zero() -> Self {
        Interval { lo: BigInt::zero(), hi: BigInt::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let v = n << PRECISION_BITS;
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let num = q.numer() << PRECISION_BITS;
        Interval { lo: floor_div(&num, q.denom()), hi: ceil_div(&num, q.denom()) }
    }

    /// Smallest interval containing both endpoints (order-insensitive).
    pub fn hull(a: &Interval, b: &Interval) -> Interval {
        Interval {
            lo: a.lo.clone().min(b.lo.clone()),
            hi: a.hi.clone().max(b.hi.clone()),
        }
    }

    /// `ln n` for `n >= 1`.
    pub fn ln_biguint(n: &BigUint) -> Interval {
        assert!(!n.is_zero(), "logarithm of zero");
        let bits = n.bits() as u32;
        let k = bits - 1;
        let n = BigInt::from_biguint(Sign::Plus, n.clone());
        let (ln2_lo, ln2_hi) = ln2_series();
        let (mut lo, mut hi) = (ln2_lo * k, ln2_hi * k);
        let keep = SERIES_BITS + 8;
        if k <= keep {
            let q = BigInt::one() << k;
            let (a, b) = ln_unit_range(&n, &q);
            lo += a;
            hi += b;
        } else {
            // n / 2^k lies in [top, top + 1] / 2^keep
            let shift = k - keep;
            let top = &n >> shift;
            let q = BigInt::one() << keep;
            let (a, _) = ln_unit_range(&top, &q);
            let upper = &top + 1u32;
            let (_, b) = if upper <= &q * 2 {
                ln_unit_range(&upper, &q)
            } else {
                ln_unit_range(&(&q * 2), &q)
            };
            lo += a;
            hi += b;
        }
        Interval { lo: shr_floor(&lo, GUARD_BITS), hi: shr_ceil(&hi, GUARD_BITS) }
    }

    pub fn ln_u64(n: u64) -> Interval {
        Self::ln_biguint(&BigUint::from(n))
    }

    /// `ln |q|` for nonzero rational `q`.
    pub fn ln_rational(q: &BigRational) -> Interval {
        assert!(!q.is_zero(), "logarithm of zero");
        let num = q.numer().magnitude();
        let den = q.denom().magnitude();
        Self::ln_biguint(num).sub(&Self::ln_biguint(den))
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Interval { lo: shr_floor(min, PRECISION_BITS), hi: shr_ceil(max, PRECISION_BITS) }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Interval {
        let a = &self.lo * q.numer();
        let b = &self.hi * q.numer();
        let (min, max) = if a <= b { (a, b) } else { (b, a) };
        Interval { lo: floor_div(&min, q.denom()), hi: ceil_div(&max, q.denom()) }
    }

    pub fn mul_int(&self, k: i64) -> Interval {
        self.mul_rational(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Division by a positive integer.
    pub fn div_bigint(&self, k: &BigInt) -> Interval {
        assert!(k.is_positive(), "division by a non-positive integer");
        Interval { lo: floor_div(&self.lo, k), hi: ceil_div(&self.hi, k) }
    }

    /// Division by an interval that is certainly positive.
    pub fn div(&self, other: &Interval) -> Option<Interval> {
        if !other.lo.is_positive() {
            return None;
        }
        let scale = |x: &BigInt| x << PRECISION_BITS;
        let cands_lo = [
            floor_div(&scale(&self.lo), &other.lo),
            floor_div(&scale(&self.lo), &other.hi),
            floor_div(&scale(&self.hi), &other.lo),
            floor_div(&scale(&self.hi), &other.hi),
        ];
        let cands_hi = [
            ceil_div(&scale(&self.lo), &other.lo),
            ceil_div(&scale(&self.lo), &other.hi),
            ceil_div(&scale(&self.hi), &other.lo),
            ceil_div(&scale(&self.hi), &other.hi),
        ];
        Some(Interval {
            lo: cands_lo.iter().min().unwrap().clone(),
            hi: cands_hi.iter().max().unwrap().clone(),
        })
    }

    /// Elementwise maximum; encloses `max(x, y)` for `x` in self, `y` in other.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << PRECISION_BITS)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << PRECISION_BITS)
    }

    /// Upper end rounded up to an `f64` (never below the true upper end).
    pub fn hi_f64(&self) -> f64 {
        let v = scaled_to_f64(&self.hi);
        if rational_of_f64(v).is_some_and(|r| r < self.hi_rational()) {
            v.next_up()
        } else {
            v
        }
    }

    /// Lower end rounded down to an `f64`.
    pub fn lo_f64(&self) -> f64 {
        let v = scaled_to_f64(&self.lo);
        if rational_of_f64(v).is_some_and(|r| r > self.lo_rational()) {
            v.next_down()
        } else {
            v
        }
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&((&self.lo + &self.hi) / 2))
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << PRECISION_BITS)
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.hi + &self.lo, BigInt::one() << (PRECISION_BITS + 1))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo_rational() <= q && q <= &self.hi_rational()
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Certainly strictly less than `other` at every point.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// Largest integer `M >= 1` that may satisfy `ln M <= self` (uses the
    /// upper end, so every `M` with `ln M <= true value` is covered).
    pub fn max_magnitude_with_ln_at_most(&self) -> Option<BigUint> {
        if self.hi.is_negative() {
            return None;
        }
        let hi = self.hi_f64();
        let mut guess = if hi < 700.0 {
            BigUint::from(hi.exp().floor().max(1.0) as u128)
        } else {
            return None;
        };
        let fits = |m: &BigUint| Interval::ln_biguint(m).lo <= self.hi;
        while !fits(&guess) && guess > BigUint::one() {
            guess -= 1u32;
        }
        loop {
            let next = &guess + 1u32;
            if fits(&next) {
                guess = next;
            } else {
                break;
            }
        }
        Some(guess)
    }
}

fn scaled_to_f64(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits > 1000 {
        let shift = bits - 900;
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        return top * 2f64.powi(shift as i32 - PRECISION_BITS as i32);
    }
    x.to_f64().unwrap_or(f64::NAN) / 2f64.powi(PRECISION_BITS as i32)
}

fn rational_of_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_f64(), self.hi_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ln2_brackets_reference_digits() {
        // ln 2 = 0.69314718055994530941723212145817656807550013436025...
        let ln2 = Interval::ln_u64(2);
        let lo = q(69314718055994530, 100000000000000000);
        let hi = q(69314718055994531, 100000000000000000);
        assert!(ln2.lo_rational() > lo && ln2.hi_rational() < hi);
        assert!(ln2.width() < BigRational::new(BigInt::one(), BigInt::one() << 150));
    }

    #[test]
    fn ln_one_is_exact_zero() {
        let z = Interval::ln_u64(1);
        assert!(z.contains_zero());
        assert!(z.width().is_zero());
    }

    #[test]
    fn ln_is_additive_within_rounding() {
        for (a, b) in [(3u64, 7u64), (10, 10), (1 << 40, 12345), (999_999_937, 2)] {
            let lhs = Interval::ln_u64(a).add(&Interval::ln_u64(b));
            let rhs = Interval::ln_biguint(&(BigUint::from(a) * b));
            assert!(lhs.intersects(&rhs), "{a} {b}");
        }
    }

    #[test]
    fn ln_of_huge_integer_matches_power_rule() {
        let n = BigUint::from(3u32).pow(500);
        let direct = Interval::ln_biguint(&n);
        let scaled = Interval::ln_u64(3).mul_int(500);
        assert!(direct.intersects(&scaled));
        assert!(direct.width() < q(1, 1 << 40));
    }

    #[test]
    fn floats_round_outward() {
        let third = Interval::from_rational(&q(1, 3));
        assert!(third.lo_f64() <= 1.0 / 3.0 && third.hi_f64() >= 1.0 / 3.0);
        let ln10 = Interval::ln_u64(10);
        let r = BigRational::from_float(std::f64::consts::LN_10).unwrap();
        assert!(BigRational::from_float(ln10.lo_f64()).unwrap() <= ln10.lo_rational());
        assert!(BigRational::from_float(ln10.hi_f64()).unwrap() >= ln10.hi_rational());
        assert!((ln10.mid_f64() - std::f64::consts::LN_10).abs() < 1e-15);
        let _ = r;
    }

    #[test]
    fn division_by_positive_interval() {
        let a = Interval::from_int(7);
        let b = Interval::from_rational(&q(7, 2));
        let c = a.div(&b).unwrap();
        assert!(c.contains_rational(&q(2, 1)));
        assert!(a.div(&Interval::zero()).is_none());
    }

    #[test]
    fn magnitude_bound_covers_exp() {
        let one = Interval::from_int(1);
        // e = 2.718..., so M = 2 is the largest with ln M <= 1
        assert_eq!(one.max_magnitude_with_ln_at_most(), Some(BigUint::from(2u32)));
        let b = Interval::ln_u64(5);
        assert_eq!(b.max_magnitude_with_ln_at_most(), Some(BigUint::from(5u32)));
    }
}
