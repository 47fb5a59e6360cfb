//! Finitely generated subgroups of Q* as a sign bit plus an exponent lattice
//! over the support primes.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{factor, parse_rational, rational_to_string, Place, Rational};
use crate::error::{Error, Result};
use crate::lattice::{saturation, solve_left, Matrix};

/// Exponents `e_i` with `prod g_i^e_i = x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub exponents: Vec<BigInt>,
}

impl Serialize for MembershipWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.exponents.len()))?;
        for e in &self.exponents {
            match e.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&e.to_string())?,
            }
        }
        seq.end()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct UnitGroup {
    generators: Vec<Rational>,
    support: Vec<BigUint>,
    /// One row per generator: sign bit, then valuations on `support`.
    rows: Matrix,
}

fn prime_support(x: &Rational) -> Result<Vec<BigUint>> {
    let mut out: Vec<BigUint> = factor(x.numer())?.primes.into_iter().map(|(p, _)| p).collect();
    out.extend(factor(x.denom())?.primes.into_iter().map(|(p, _)| p));
    Ok(out)
}

/// `(sign bit, valuations on support)` when `x` is supported on `support`.
pub(crate) fn exponent_vector(x: &Rational, support: &[BigUint]) -> Option<Vec<BigInt>> {
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    let mut v = Vec::with_capacity(support.len() + 1);
    v.push(BigInt::from(u8::from(x.is_negative())));
    for p in support {
        let mut e = 0i64;
        while (&num % p).is_zero() {
            num /= p;
            e += 1;
        }
        while (&den % p).is_zero() {
            den /= p;
            e -= 1;
        }
        v.push(BigInt::from(e));
    }
    (num.is_one() && den.is_one()).then_some(v)
}

/// True iff `v_p(x) = 0` for every prime outside `support`.
pub fn is_s_unit(x: &Rational, support: &[BigUint]) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::arg("0 is not a unit"));
    }
    Ok(exponent_vector(x, support).is_some())
}

fn pow_int(x: &Rational, e: &BigInt) -> Rational {
    let k = e.magnitude().to_u32().expect("exponent fits in u32");
    let p = num_traits::pow(x.clone(), k as usize);
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

impl UnitGroup {
    pub fn new(generators: Vec<Rational>) -> Result<Self> {
        let mut support = Vec::new();
        for g in &generators {
            if g.is_zero() {
                return Err(Error::arg("0 cannot generate a subgroup of Q*"));
            }
            support.extend(prime_support(g)?);
        }
        support.sort();
        support.dedup();
        let rows = generators
            .iter()
            .map(|g| exponent_vector(g, &support).expect("generator factors over its support"))
            .collect();
        Ok(UnitGroup { generators, support, rows })
    }

    pub fn trivial() -> Self {
        UnitGroup { generators: Vec::new(), support: Vec::new(), rows: Vec::new() }
    }

    /// `R_S^*` for the given finite primes: generated by `-1` and the primes.
    pub fn s_units(primes: &[BigUint]) -> Result<Self> {
        let mut gens = vec![Rational::from_integer(BigInt::from(-1))];
        let mut ps = primes.to_vec();
        ps.sort();
        ps.dedup();
        for p in &ps {
            if !crate::arith::is_prime(p) {
                return Err(Error::arg(format!("{p} is not prime")));
            }
            gens.push(Rational::from_integer(BigInt::from(p.clone())));
        }
        UnitGroup::new(gens)
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn support(&self) -> &[BigUint] {
        &self.support
    }

    pub fn support_places(&self) -> Vec<Place> {
        let mut out = vec![Place::Archimedean];
        out.extend(self.support.iter().cloned().map(Place::Finite));
        out
    }

    fn relation_matrix(&self) -> Matrix {
        let mut rows = self.rows.clone();
        let mut two = vec![BigInt::zero(); self.support.len() + 1];
        two[0] = BigInt::from(2);
        rows.push(two);
        rows
    }

    /// Membership with a witness, by an integer solve on the exponent lattice
    /// (the sign coordinate is taken modulo 2).
    pub fn in_group(&self, x: &Rational) -> Option<MembershipWitness> {
        if x.is_zero() {
            return None;
        }
        let target = exponent_vector(x, &self.support)?;
        let sol = solve_left(&self.relation_matrix(), self.support.len() + 1, &target)?;
        let w = MembershipWitness { exponents: sol[..self.generators.len()].to_vec() };
        debug_assert_eq!(self.evaluate(&w), *x);
        Some(w)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.in_group(x).is_some()
    }

    pub fn evaluate(&self, w: &MembershipWitness) -> Rational {
        self.generators
            .iter()
            .zip(&w.exponents)
            .fold(Rational::one(), |acc, (g, e)| acc * pow_int(g, e))
    }

    /// Smallest saturated group containing `self`: `-1` together with a
    /// reduced basis of the saturated exponent lattice, as positive rationals.
    pub fn saturate(&self) -> UnitGroup {
        let n = self.support.len();
        let exps: Matrix = self.rows.iter().map(|r| r[1..].to_vec()).collect();
        let sat = saturation(&exps, n);
        let mut gens = vec![Rational::from_integer(BigInt::from(-1))];
        for row in sat {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for (p, e) in self.support.iter().zip(&row) {
                let k = e.magnitude().to_u32().expect("small exponent");
                if e.is_positive() {
                    num *= p.pow(k);
                } else {
                    den *= p.pow(k);
                }
            }
            gens.push(Rational::new(num.into(), den.into()));
        }
        UnitGroup::new(gens).expect("nonzero generators")
    }

    /// Same subgroup of Q*.
    pub fn same_group(&self, other: &UnitGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g)) && other.generators.iter().all(|g| self.contains(g))
    }
}

/// One representative per coset of `R_S^* / (R_S^*)^m`, in canonical order:
/// exponent vectors in `[0, m)` lexicographically, positive before negative.
pub fn coset_reps_mod_powers(primes: &[BigUint], m: u32, limit: u64) -> Result<Vec<Rational>> {
    if m < 2 {
        return Err(Error::arg("m must be at least 2"));
    }
    let mut ps = primes.to_vec();
    ps.sort();
    ps.dedup();
    let signs: &[i64] = if m % 2 == 0 { &[1, -1] } else { &[1] };
    let count = (m as u64)
        .checked_pow(ps.len() as u32)
        .and_then(|c| c.checked_mul(signs.len() as u64))
        .filter(|&c| c <= limit)
        .ok_or_else(|| Error::Resource { reason: format!("more than {limit} cosets"), partial: None })?;
    let mut out = Vec::with_capacity(count as usize);
    let mut exps = vec![0u32; ps.len()];
    loop {
        let base: BigUint = ps.iter().zip(&exps).map(|(p, &e)| p.pow(e)).product();
        for &s in signs {
            out.push(Rational::from_integer(BigInt::from(base.clone()) * s));
        }
        let mut i = ps.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < m {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// `LCM(2, ..., d^n + 1) + 1`.
pub fn lcm_exponent(d: u64, n: u32) -> Result<BigInt> {
    let top = d
        .checked_pow(n)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= 1 << 24)
        .ok_or_else(|| Error::Resource { reason: format!("{d}^{n} + 1 is too large"), partial: None })?;
    if top < 2 {
        return Err(Error::arg("need d^n + 1 >= 2"));
    }
    let l = (2..=top).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    Ok(l + 1)
}

impl fmt::Display for UnitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(rational_to_string).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

impl fmt::Debug for UnitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitGroup{self}")
    }
}

impl FromStr for UnitGroup {
    type Err = Error;

    /// Comma-separated rationals, optionally wrapped in `<>`, `[]` or `()`.
    /// The empty list is the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['<', '[', '(']).trim_end_matches(['>', ']', ')']);
        let gens = t
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| parse_rational(p.trim_matches('"')))
            .collect::<Result<Vec<_>>>()?;
        UnitGroup::new(gens)
    }
}

impl Serialize for UnitGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let gens: Vec<String> = self.generators.iter().map(rational_to_string).collect();
        gens.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> UnitGroup {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn primes(ps: &[u32]) -> Vec<BigUint> {
        ps.iter().map(|&p| BigUint::from(p)).collect()
    }

    #[test]
    fn support_examples() {
        let places: Vec<String> = g("-2, 3/5").support_places().iter().map(|p| p.to_string()).collect();
        assert_eq!(places, vec!["inf", "2", "3", "5"]);
        assert_eq!(g("1").support_places(), vec![Place::Archimedean]);
        assert_eq!(g("4").support_places().len(), 2);
        assert!("0, 2".parse::<UnitGroup>().is_err());
        assert_eq!(g("").generators().len(), 0);
    }

    #[test]
    fn s_unit_examples() {
        let s = primes(&[2, 3]);
        assert!(is_s_unit(&q("9/8"), &s).unwrap());
        assert!(!is_s_unit(&q("5"), &s).unwrap());
        assert!(is_s_unit(&q("-1"), &[]).unwrap());
    }

    #[test]
    fn membership_examples() {
        let four = g("4");
        assert_eq!(four.in_group(&q("1/16")).unwrap().exponents, vec![BigInt::from(-2)]);
        assert!(four.in_group(&q("8")).is_none());
        assert!(four.in_group(&q("-4")).is_none());
        let w = g("-2, 3").in_group(&q("-6")).unwrap();
        assert_eq!(w.exponents, vec![BigInt::from(1), BigInt::from(1)]);
        assert!(g("-2, 3").in_group(&q("5")).is_none());
        assert!(g("").in_group(&q("1")).is_some());
        assert!(g("").in_group(&q("-1")).is_none());
        assert!(g("-1").in_group(&q("-1")).is_some());
    }

    #[test]
    fn saturation_examples() {
        let s = g("4").saturate();
        assert!(s.same_group(&g("-1, 2")));
        assert!(g("2").saturate().same_group(&g("-1, 2")));
        assert!(g("8, 2").saturate().same_group(&g("-1, 2")));
        let ss = s.saturate();
        assert!(ss.same_group(&s));
        assert!(g("12, 18").saturate().same_group(&g("-1, 2, 3")));
        assert!(g("4, 9").saturate().same_group(&g("-1, 2, 3")));
        assert!(g("36").saturate().same_group(&g("-1, 6")));
    }

    #[test]
    fn coset_examples() {
        let two = primes(&[2]);
        assert_eq!(coset_reps_mod_powers(&two, 3, 100).unwrap(), vec![q("1"), q("2"), q("4")]);
        assert_eq!(
            coset_reps_mod_powers(&two, 2, 100).unwrap(),
            vec![q("1"), q("-1"), q("2"), q("-2")]
        );
        assert_eq!(coset_reps_mod_powers(&[], 5, 100).unwrap(), vec![q("1")]);
        assert_eq!(coset_reps_mod_powers(&primes(&[2, 3, 5]), 4, 1000).unwrap().len(), 128);
        assert!(coset_reps_mod_powers(&primes(&[2, 3, 5]), 4, 10).is_err());
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_exponent(2, 1).unwrap(), BigInt::from(7));
        assert_eq!(lcm_exponent(2, 2).unwrap(), BigInt::from(61));
        for (d, n) in [(2, 3), (3, 2), (5, 1), (2, 4)] {
            let m = lcm_exponent(d, n).unwrap();
            assert!(m >= BigInt::from(7));
            for k in 2..=d.pow(n) + 1 {
                assert!(m.gcd(&BigInt::from(k)).is_one());
            }
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (prop::collection::vec(-3i32..=3, 3), any::<bool>()).prop_map(|(e, neg)| {
            let mut x = Rational::one();
            for (p, k) in [2, 3, 5].iter().zip(e) {
                let pq = Rational::from_integer((*p).into());
                x *= if k >= 0 { num_traits::pow(pq, k as usize) } else { num_traits::pow(pq.recip(), (-k) as usize) };
            }
            if neg { -x } else { x }
        })
    }

    proptest! {
        #[test]
        fn generators_round_trip(gens in prop::collection::vec(small_rational(), 0..4)) {
            let group = UnitGroup::new(gens.clone()).unwrap();
            for x in &gens {
                let w = group.in_group(x).unwrap();
                prop_assert_eq!(group.evaluate(&w), x.clone());
            }
        }

        #[test]
        fn saturation_matches_roots(gens in prop::collection::vec(small_rational(), 1..3), x in small_rational()) {
            let group = UnitGroup::new(gens).unwrap();
            let sat = group.saturate();
            prop_assert!(sat.saturate().same_group(&sat));
            let mut in_root = false;
            for n in 1..=72usize {
                if group.contains(&num_traits::pow(x.clone(), n)) {
                    in_root = true;
                    break;
                }
            }
            prop_assert_eq!(sat.contains(&x), in_root);
        }

        #[test]
        fn support_is_fixed_point(ps in prop::collection::btree_set(prop::sample::select(vec![2u32, 3, 5, 7, 11]), 0..4)) {
            let s: Vec<BigUint> = ps.iter().map(|&p| BigUint::from(p)).collect();
            let group = UnitGroup::s_units(&s).unwrap();
            prop_assert_eq!(group.support(), &s[..]);
        }
    }
}
