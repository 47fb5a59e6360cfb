use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::arith::{factor_with_budget, ProjPoint};
use crate::error::Result;
use crate::heights::{c1_bound, decide_preperiodic};
use crate::ratmap::RationalMap;

/// Rho iterations spent on each cofactor before it is reported unfactored.
const FACTOR_BUDGET: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZsigmondyEntry {
    pub n: usize,
    pub value: ProjPoint,
    #[serde(serialize_with = "ser_primes")]
    pub new_primes: Vec<BigUint>,
    /// Primitive part that could not be split within budget.
    #[serde(serialize_with = "ser_primes")]
    pub unfactored: Vec<BigUint>,
    pub has_primitive_divisor: bool,
}

fn ser_primes<S: Serializer>(ps: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZsigmondyReport {
    pub entries: Vec<ZsigmondyEntry>,
    pub zsigmondy_set: Vec<usize>,
    pub include_m0: bool,
    pub truncated: Option<String>,
    pub warnings: Vec<String>,
}

fn strip_common(mut x: BigUint, earlier: &BigUint) -> BigUint {
    loop {
        let g = x.gcd(earlier);
        if g.is_one() {
            return x;
        }
        x /= g;
    }
}

/// Primitive prime divisors of `f^(n)(alpha)` for `1 <= n <= n_max`. A prime
/// is primitive at `n` when it divides the numerator or denominator of the
/// `n`-th value and of no earlier one (from index 0 if `include_m0`, else 1).
pub fn zsigmondy(f: &RationalMap, alpha: &ProjPoint, n_max: usize, include_m0: bool) -> Result<ZsigmondyReport> {
    let mut warnings = Vec::new();
    if f.degree() >= 2 {
        let bound = c1_bound(f)?;
        if !decide_preperiodic(f, &bound, alpha).is_wandering() {
            warnings.push(format!("{alpha} is preperiodic"));
        }
    }
    let orbit = f.orbit(alpha, n_max);
    let mut entries = Vec::new();
    let mut truncated = None;
    // |numerator| * denominator of each value so far
    let mut earlier: Vec<BigUint> = Vec::new();
    for (n, p) in orbit.iter().enumerate() {
        if p.is_zero() || p.is_infinity() {
            truncated = Some(format!("f^({n})({alpha}) = {p}"));
            break;
        }
        let v = p.x().magnitude() * p.z().magnitude();
        if n == 0 {
            if include_m0 {
                earlier.push(v);
            }
            continue;
        }
        let rest = earlier.iter().fold(v.clone(), strip_common);
        let (new_primes, unfactored) = if rest.is_one() {
            (Vec::new(), Vec::new())
        } else {
            let part = factor_with_budget(&rest, FACTOR_BUDGET)?;
            (part.primes.into_iter().map(|(q, _)| q).collect(), part.unfactored)
        };
        entries.push(ZsigmondyEntry {
            n,
            value: p.clone(),
            has_primitive_divisor: !rest.is_one(),
            new_primes,
            unfactored,
        });
        earlier.push(v);
    }
    let zsigmondy_set = entries.iter().filter(|e| !e.has_primitive_divisor).map(|e| e.n).collect();
    Ok(ZsigmondyReport { entries, zsigmondy_set, include_m0, truncated, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, valuation, Rational};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn m(s: &str) -> RationalMap {
        s.parse().unwrap()
    }

    fn primes(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&p| BigUint::from(p)).collect()
    }

    #[test]
    fn x_squared_plus_one() {
        let r = zsigmondy(&m("X^2+1"), &ProjPoint::from_int(1), 4, true).unwrap();
        let vals: Vec<String> = r.entries.iter().map(|e| e.value.to_string()).collect();
        assert_eq!(vals, ["2", "5", "26", "677"]);
        // with m = 0 counted, 1 has no prime factors, so nothing changes
        let got: Vec<Vec<BigUint>> = r.entries.iter().map(|e| e.new_primes.clone()).collect();
        assert_eq!(got, vec![primes(&[2]), primes(&[5]), primes(&[13]), primes(&[677])]);
        assert!(r.zsigmondy_set.is_empty());
    }

    #[test]
    fn squaring_two() {
        let r = zsigmondy(&m("X^2"), &ProjPoint::from_int(2), 5, false).unwrap();
        assert_eq!(r.entries[0].new_primes, primes(&[2]));
        assert_eq!(r.zsigmondy_set, vec![2, 3, 4, 5]);
        let r = zsigmondy(&m("X^2"), &ProjPoint::from_int(2), 5, true).unwrap();
        assert_eq!(r.zsigmondy_set, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn truncates_at_zero() {
        let r = zsigmondy(&m("X^2-1"), &ProjPoint::from_int(1), 5, true).unwrap();
        assert!(r.truncated.is_some());
        assert!(r.entries.is_empty());
        assert!(!r.warnings.is_empty());
    }

    fn value_primes(p: &ProjPoint) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = factor(&BigInt::from(p.x().magnitude().clone()))
            .unwrap()
            .primes
            .into_iter()
            .chain(factor(&BigInt::from(p.z().magnitude().clone())).unwrap().primes)
            .map(|(q, _)| q)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    proptest! {
        #[test]
        fn primitive_primes_match_valuations(c in -4i64..=4, a in -3i64..=3, b in 1i64..=3, m0: bool) {
            let f = RationalMap::new(crate::poly::Poly::from_ints(&[c, 0, 1]), crate::poly::Poly::one()).unwrap();
            let alpha = ProjPoint::from_rational(&Rational::new(a.into(), b.into()));
            let r = zsigmondy(&f, &alpha, 4, m0).unwrap();
            let orbit = f.orbit(&alpha, 4);
            let start = if m0 { 0 } else { 1 };
            for e in &r.entries {
                prop_assert!(e.unfactored.is_empty());
                let x = e.value.to_rational().unwrap();
                let oracle: Vec<BigUint> = value_primes(&e.value)
                    .into_iter()
                    .filter(|p| (start..e.n).all(|k| {
                        valuation(&orbit[k].to_rational().unwrap(), p).unwrap() == 0
                    }))
                    .collect();
                prop_assert!(oracle.iter().all(|p| valuation(&x, p).unwrap() != 0));
                prop_assert_eq!(&e.new_primes, &oracle);
                prop_assert_eq!(e.has_primitive_divisor, !oracle.is_empty());
            }
        }
    }
}
