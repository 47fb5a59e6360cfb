//! Exhaustive searches over rational points of bounded height: the sets G,
//! F and E, pairwise dependence modulo a group, Zsigmondy sets and relations
//! cut out by split multilinear forms.

mod dependence;
mod split;
mod zsigmondy;

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{coprime_base, enumerate_points, rational_to_string, ProjPoint, Rational};
use crate::error::{Error, Result};
use crate::heights::{c1_bound, decide_preperiodic, StepBound};
use crate::interval::Interval;
use crate::ratmap::RationalMap;
use crate::unit_group::{exponent_vector, MembershipWitness, UnitGroup};

pub use dependence::{
    find_pairwise_dependences, mult_dependent_mod_group, HypothesisCheck, PairDependence, PairHit,
    PairwiseReport,
};
pub use split::{
    find_split_relations, thm19_height_bound, thm19_n1_bound, thm19_n1_rhs, SplitMultilinearForm, SplitReport,
};
pub use zsigmondy::{zsigmondy, ZsigmondyEntry, ZsigmondyReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Points with `max(|x|, |z|) <= height`.
    pub height: u64,
    pub n_max: usize,
    pub k_max: usize,
    pub r_range: RangeInclusive<i64>,
    pub s_range: RangeInclusive<i64>,
    pub wandering_only: bool,
    /// Test membership in the group itself rather than in `R_S^*` for its support.
    pub exact_group: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            height: 10,
            n_max: 4,
            k_max: 2,
            r_range: 1..=1,
            s_range: 1..=1,
            wandering_only: true,
            exact_group: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.height < 1 {
            return Err(Error::arg("height bound must be at least 1"));
        }
        if self.n_max < 1 {
            return Err(Error::arg("n_max must be at least 1"));
        }
        if self.r_range.is_empty() || self.s_range.is_empty() {
            return Err(Error::arg("empty exponent range"));
        }
        if self.exponent_pairs().is_empty() {
            return Err(Error::arg("(r, s) = (0, 0) is not a relation"));
        }
        Ok(())
    }

    /// All `(r, s)` in the ranges except `(0, 0)`.
    pub fn exponent_pairs(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for r in self.r_range.clone() {
            for s in self.s_range.clone() {
                if (r, s) != (0, 0) {
                    out.push((r, s));
                }
            }
        }
        out
    }

    /// The group memberships are tested in.
    pub fn effective_group(&self, group: &UnitGroup) -> Result<UnitGroup> {
        if self.exact_group {
            Ok(group.clone())
        } else {
            UnitGroup::s_units(group.support())
        }
    }
}

/// `log(|s|/|r|) / log d + 1`.
pub fn rho(r: i64, s: i64, d: u64) -> Result<Interval> {
    if r == 0 || s == 0 {
        return Err(Error::arg("rho needs r and s nonzero"));
    }
    if d < 2 {
        return Err(Error::arg("rho needs degree at least 2"));
    }
    let q = Rational::new(BigInt::from(s.unsigned_abs()), BigInt::from(r.unsigned_abs()));
    let ratio = Interval::ln_rational(&q).div(&Interval::ln_u64(d)).expect("log d > 0");
    Ok(ratio.add(&Interval::from_int(1)))
}

/// `n >= rho(r, s, d)`, decided by `|s| d <= |r| d^n`. With `s = 0` every `n`
/// qualifies, with `r = 0` none does.
pub fn n_at_least_rho(n: usize, r: i64, s: i64, d: u64) -> bool {
    let lhs = BigInt::from(s.unsigned_abs()) * d;
    let rhs = BigInt::from(r.unsigned_abs()) * BigInt::from(d).pow(n as u32);
    lhs <= rhs
}

pub(crate) fn pow_i(x: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn finite_nonzero(p: &ProjPoint) -> Option<Rational> {
    p.to_rational().filter(|q| !q.is_zero())
}

fn wandering_filter(f: &RationalMap, needed: bool) -> Result<Option<StepBound>> {
    if needed {
        Ok(Some(c1_bound(f)?))
    } else {
        Ok(None)
    }
}

fn is_admissible(f: &RationalMap, bound: &Option<StepBound>, alpha: &ProjPoint) -> bool {
    match bound {
        Some(b) => decide_preperiodic(f, b, alpha).is_wandering(),
        None => true,
    }
}

fn points(height: u64) -> Result<Vec<ProjPoint>> {
    if height < 1 {
        return Err(Error::arg("height bound must be at least 1"));
    }
    Ok(enumerate_points(height)?.collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupHit {
    pub n: usize,
    pub alpha: ProjPoint,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub membership: MembershipWitness,
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(q))
}

/// All `alpha` of height at most `height` with `f(alpha)` in the group.
pub fn find_g_set(f: &RationalMap, group: &UnitGroup, height: u64) -> Result<Vec<GroupHit>> {
    let pts = points(height)?;
    let hits: Vec<Option<GroupHit>> = pts
        .par_iter()
        .map(|alpha| {
            let value = finite_nonzero(&f.eval(alpha))?;
            let membership = group.in_group(&value)?;
            Some(GroupHit { n: 1, alpha: alpha.clone(), value, membership })
        })
        .collect();
    Ok(hits.into_iter().flatten().collect())
}

/// All `(n, alpha)` with `alpha` wandering of height at most `height`,
/// `n` in `n_range` and `f^(n)(alpha)` in the group.
pub fn find_f_set(
    f: &RationalMap,
    group: &UnitGroup,
    height: u64,
    n_range: RangeInclusive<usize>,
) -> Result<Vec<GroupHit>> {
    let pts = points(height)?;
    let bound = wandering_filter(f, true)?;
    let n_max = *n_range.end();
    let per_point: Vec<Vec<GroupHit>> = pts
        .par_iter()
        .map(|alpha| {
            if !is_admissible(f, &bound, alpha) {
                return Vec::new();
            }
            let orbit = f.orbit(alpha, n_max);
            n_range
                .clone()
                .filter_map(|n| {
                    let value = finite_nonzero(orbit.get(n)?)?;
                    let membership = group.in_group(&value)?;
                    Some(GroupHit { n, alpha: alpha.clone(), value, membership })
                })
                .collect()
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

/// `f^(n+k)(alpha)^r = u f^(k)(alpha)^s` with `u` in the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceWitness {
    pub n: usize,
    pub k: usize,
    pub alpha: ProjPoint,
    pub r: i64,
    pub s: i64,
    pub u: Rational,
    pub membership: MembershipWitness,
}

impl Serialize for DependenceWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DependenceWitness", 8)?;
        st.serialize_field("kind", "E-witness")?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("u", &rational_to_string(&self.u))?;
        st.serialize_field("exponents", &self.membership)?;
        st.end()
    }
}

impl DependenceWitness {
    /// Recomputes the orbit and checks the relation and the membership.
    pub fn verify(&self, f: &RationalMap, group: &UnitGroup) -> bool {
        if (self.r, self.s) == (0, 0) || self.u.is_zero() {
            return false;
        }
        let orbit = f.orbit(&self.alpha, self.n + self.k);
        let (Some(a), Some(b)) = (orbit[self.n + self.k].to_rational(), orbit[self.k].to_rational()) else {
            return false;
        };
        if (a.is_zero() && self.r != 0) || (b.is_zero() && self.s != 0) {
            return false;
        }
        pow_i(&a, self.r) == &self.u * pow_i(&b, self.s) && group.evaluate(&self.membership) == self.u
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ESearchReport {
    pub witnesses: Vec<DependenceWitness>,
    pub points: u64,
    pub preperiodic_excluded: u64,
    /// Candidates dropped because an orbit value was 0 or infinity.
    pub skipped_degenerate: u64,
}

/// `r v_p(a) = s v_p(b)` at every prime outside `support`. Only the parts of
/// `a` and `b` prime to `support` are looked at, through a coprime base.
pub fn valuation_criterion(a: &Rational, b: &Rational, r: i64, s: i64, support: &[BigUint]) -> bool {
    let strip = |mut x: BigUint| {
        for p in support {
            while (&x % p).is_zero() {
                x /= p;
            }
        }
        x
    };
    let parts = [
        strip(a.numer().magnitude().clone()),
        strip(a.denom().magnitude().clone()),
        strip(b.numer().magnitude().clone()),
        strip(b.denom().magnitude().clone()),
    ];
    let base = coprime_base(&parts);
    let va = exponent_vector(a, &base_with(support, &base)).expect("a factors over the base");
    let vb = exponent_vector(b, &base_with(support, &base)).expect("b factors over the base");
    let skip = support.len() + 1;
    va[skip..].iter().zip(&vb[skip..]).all(|(x, y)| x * r == y * s)
}

fn base_with(support: &[BigUint], extra: &[BigUint]) -> Vec<BigUint> {
    support.iter().chain(extra).cloned().collect()
}

/// Candidates of the set E for every `(r, s)` in the configured ranges,
/// `k <= k_max`, `n <= n_max` with `n >= rho(r, s, d)`.
pub fn find_e_set(f: &RationalMap, group: &UnitGroup, config: &SearchConfig) -> Result<ESearchReport> {
    config.validate()?;
    let group = config.effective_group(group)?;
    let pts = points(config.height)?;
    let bound = wandering_filter(f, config.wandering_only)?;
    let d = f.degree() as u64;
    let pairs = config.exponent_pairs();
    let support = group.support().to_vec();

    struct Partial {
        witnesses: Vec<DependenceWitness>,
        preperiodic: bool,
        skipped: u64,
    }

    let parts: Vec<Partial> = pts
        .par_iter()
        .map(|alpha| {
            let mut out = Partial { witnesses: Vec::new(), preperiodic: false, skipped: 0 };
            if !is_admissible(f, &bound, alpha) {
                out.preperiodic = true;
                return out;
            }
            let orbit = f.orbit(alpha, config.n_max + config.k_max);
            for &(r, s) in &pairs {
                for k in 0..=config.k_max {
                    for n in 0..=config.n_max {
                        if !n_at_least_rho(n, r, s, d) {
                            continue;
                        }
                        let (pa, pb) = (&orbit[n + k], &orbit[k]);
                        let a = if r == 0 { Some(Rational::one()) } else { finite_nonzero(pa) };
                        let b = if s == 0 { Some(Rational::one()) } else { finite_nonzero(pb) };
                        let (Some(a), Some(b)) = (a, b) else {
                            out.skipped += 1;
                            continue;
                        };
                        if !valuation_criterion(&a, &b, r, s, &support) {
                            continue;
                        }
                        let u = pow_i(&a, r) / pow_i(&b, s);
                        if let Some(membership) = group.in_group(&u) {
                            out.witnesses.push(DependenceWitness { n, k, alpha: alpha.clone(), r, s, u, membership });
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut report = ESearchReport { points: pts.len() as u64, ..Default::default() };
    for p in parts {
        report.witnesses.extend(p.witnesses);
        report.preperiodic_excluded += u64::from(p.preperiodic);
        report.skipped_degenerate += p.skipped;
    }
    Ok(report)
}

/// Largest `|r|` or `|s|` used by the brute-force exponent scans in tests.
#[cfg(test)]
pub(crate) const BRUTE_EXPONENT: i64 = 6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;
    use proptest::prelude::*;

    fn m(s: &str) -> RationalMap {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn gamma(s: &str) -> UnitGroup {
        s.parse().unwrap()
    }

    #[test]
    fn rho_values() {
        assert!(rho(1, 1, 3).unwrap().contains_rational(&q("1")));
        assert!(rho(1, 5, 5).unwrap().contains_rational(&q("2")));
        assert!(rho(1, 8, 2).unwrap().contains_rational(&q("4")));
        assert!(rho(3, 1, 2).unwrap().hi_f64() < 1.0);
        assert!(rho(0, 1, 2).is_err());
        assert!(n_at_least_rho(1, 1, 1, 2));
        assert!(!n_at_least_rho(0, 1, 1, 2));
        assert!(n_at_least_rho(4, 1, 8, 2));
        assert!(!n_at_least_rho(3, 1, 8, 2));
        assert!(n_at_least_rho(0, 2, 1, 2));
    }

    #[test]
    fn n_at_least_rho_matches_interval() {
        for r in 1..6i64 {
            for s in 1..40i64 {
                for d in 2..5u64 {
                    let rh = rho(r, s, d).unwrap();
                    for n in 0..8usize {
                        let exact = n_at_least_rho(n, r, s, d);
                        let ni = Interval::from_int(n as i64);
                        if rh.certainly_le(&ni) {
                            assert!(exact, "{r} {s} {d} {n}");
                        }
                        if ni.certainly_lt(&rh) {
                            assert!(!exact, "{r} {s} {d} {n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn g_set_examples() {
        let hits = find_g_set(&m("X^2"), &gamma("2"), 2).unwrap();
        let alphas: Vec<String> = hits.iter().map(|h| h.alpha.to_string()).collect();
        for a in ["1", "-1", "2", "-2", "1/2", "-1/2"] {
            assert!(alphas.contains(&a.to_string()), "{a} missing from {alphas:?}");
        }
        // brute force over the 8 points
        let oracle: Vec<String> = enumerate_points(2)
            .unwrap()
            .filter(|p| {
                p.to_rational().is_some_and(|x| {
                    let v = &x * &x;
                    !v.is_zero() && (-8..=8).any(|e| pow_i(&q("2"), e) == v)
                })
            })
            .map(|p| p.to_string())
            .collect();
        assert_eq!(alphas, oracle);
        assert!(find_g_set(&m("X^2+5"), &gamma("2"), 1).unwrap().is_empty());
    }

    #[test]
    fn f_set_examples() {
        let hits = find_f_set(&m("X^2"), &gamma("2"), 2, 1..=3).unwrap();
        let mut got: Vec<(usize, String)> = hits.iter().map(|h| (h.n, h.alpha.to_string())).collect();
        got.sort();
        let mut want = Vec::new();
        for n in 1..=3 {
            for a in ["2", "-2", "1/2", "-1/2"] {
                want.push((n, a.to_string()));
            }
        }
        want.sort();
        assert_eq!(got, want);
        let hits = find_f_set(&m("X^2+1"), &gamma("2"), 3, 1..=5).unwrap();
        assert!(hits.iter().any(|h| h.n == 1 && h.alpha.to_string() == "1"));
        assert!(hits.iter().any(|h| h.n == 1 && h.alpha.to_string() == "-1"));
    }

    #[test]
    fn square_over_x_family_is_found() {
        let f = m("(1-X)^2/X");
        let config = SearchConfig { height: 7, n_max: 1, k_max: 0, ..Default::default() };
        let report = find_e_set(&f, &gamma("2"), &config).unwrap();
        let found: Vec<(String, String)> = report
            .witnesses
            .iter()
            .filter(|w| w.n == 1 && w.k == 0)
            .map(|w| (w.alpha.to_string(), rational_to_string(&w.u)))
            .collect();
        for (a, u) in [("1/3", "4"), ("1/5", "16"), ("-1", "4"), ("2/3", "1/4"), ("4/5", "1/16")] {
            assert!(found.contains(&(a.to_string(), u.to_string())), "{a} missing from {found:?}");
        }
        // u = -1/2 gives alpha = 2, but f(2) = 1/2 is fixed, so 2 is not wandering
        assert!(!found.iter().any(|(a, _)| a == "2"));
        for w in &report.witnesses {
            assert!(w.verify(&f, &gamma("2")));
        }
    }

    #[test]
    fn no_witness_for_three_under_squaring() {
        let config = SearchConfig { height: 3, n_max: 3, k_max: 2, ..Default::default() };
        let report = find_e_set(&m("X^2"), &gamma("2"), &config).unwrap();
        assert!(report.witnesses.iter().all(|w| w.alpha.to_string() != "3"));
        let bad = SearchConfig { r_range: 0..=0, s_range: 0..=0, ..Default::default() };
        assert!(find_e_set(&m("X^2"), &gamma("2"), &bad).is_err());
    }

    #[test]
    fn e_witness_json_shape() {
        let w = DependenceWitness {
            n: 1,
            k: 0,
            alpha: ProjPoint::from_rational(&q("1/3")),
            r: 1,
            s: 1,
            u: q("4"),
            membership: MembershipWitness { exponents: vec![BigInt::from(2)] },
        };
        let j = serde_json::to_string(&w).unwrap();
        assert_eq!(j, r#"{"kind":"E-witness","n":1,"k":0,"alpha":"1/3","r":1,"s":1,"u":"4","exponents":[2]}"#);
    }

    #[test]
    fn e_search_is_thread_count_independent() {
        let f = m("(1-X)^2/X");
        let config = SearchConfig { height: 6, n_max: 2, k_max: 1, s_range: 1..=2, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| find_e_set(&f, &gamma("2"), &config).unwrap());
        let b = four.install(|| find_e_set(&f, &gamma("2"), &config).unwrap());
        assert_eq!(a, b);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-60i64..=60, 1i64..=60)
            .prop_filter("nonzero", |(a, _)| *a != 0)
            .prop_map(|(a, b)| Rational::new(a.into(), b.into()))
    }

    proptest! {
        #[test]
        fn valuation_criterion_is_necessary(
            a in small_rational(),
            b in small_rational(),
            mask in 0u8..8,
        ) {
            let primes: Vec<BigUint> = [2u32, 3, 5]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| BigUint::from(p))
                .collect();
            for r in -BRUTE_EXPONENT..=BRUTE_EXPONENT {
                for s in -BRUTE_EXPONENT..=BRUTE_EXPONENT {
                    if (r, s) == (0, 0) {
                        continue;
                    }
                    let u = pow_i(&a, r) / pow_i(&b, s);
                    let in_rs = exponent_vector(&u, &primes).is_some();
                    prop_assert_eq!(valuation_criterion(&a, &b, r, s, &primes), in_rs);
                }
            }
        }

        #[test]
        fn e_witnesses_replay(c in -3i64..=3, h in 2u64..5) {
            let f = RationalMap::new(
                crate::poly::Poly::from_ints(&[c, 0, 1]),
                crate::poly::Poly::one(),
            ).unwrap();
            let g = gamma("2, 3");
            let config = SearchConfig { height: h, n_max: 2, k_max: 1, s_range: 1..=2, exact_group: false, ..Default::default() };
            let report = find_e_set(&f, &g, &config).unwrap();
            let eff = config.effective_group(&g).unwrap();
            for w in &report.witnesses {
                prop_assert!(w.verify(&f, &eff));
            }
        }
    }
}
