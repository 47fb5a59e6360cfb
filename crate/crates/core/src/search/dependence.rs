use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{finite_nonzero, points, pow_i};
use crate::arith::{coprime_base, rational_to_string, ProjPoint, Rational};
use crate::error::{Error, Result};
use crate::heights::{c1_bound, decide_preperiodic, Dynamics};
use crate::lattice::{left_kernel, row_basis, Matrix};
use crate::poly::Poly;
use crate::ratmap::RationalMap;
use crate::unit_group::{exponent_vector, MembershipWitness, UnitGroup};

/// `a^r = u b^s` with `u` in the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDependence {
    pub r: BigInt,
    pub s: BigInt,
    pub u: Rational,
    pub membership: MembershipWitness,
}

impl Serialize for PairDependence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PairDependence", 4)?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("s", &self.s.to_string())?;
        st.serialize_field("u", &rational_to_string(&self.u))?;
        st.serialize_field("exponents", &self.membership)?;
        st.end()
    }
}

impl PairDependence {
    pub fn verify(&self, a: &Rational, b: &Rational, group: &UnitGroup) -> bool {
        let (Some(r), Some(s)) = (self.r.to_i64(), self.s.to_i64()) else {
            return false;
        };
        (r, s) != (0, 0) && pow_i(a, r) == &self.u * pow_i(b, s) && group.evaluate(&self.membership) == self.u
    }
}

/// Cap on `|r| + |s|` when looking for a coprime relation in a rank-2 lattice.
const PRIMITIVE_SEARCH: i128 = 4096;

/// Lattice of `(r, -s)` with `a^r b^-s` in the group, as a reduced basis.
fn relation_lattice(a: &Rational, b: &Rational, group: &UnitGroup) -> Matrix {
    let strip = |mut x: BigUint| {
        for p in group.support() {
            while (&x % p).is_zero() {
                x /= p;
            }
        }
        x
    };
    let extra = coprime_base(&[
        strip(a.numer().magnitude().clone()),
        strip(a.denom().magnitude().clone()),
        strip(b.numer().magnitude().clone()),
        strip(b.denom().magnitude().clone()),
    ]);
    let support: Vec<BigUint> = group.support().iter().chain(&extra).cloned().collect();
    let cols = support.len() + 1;
    let vec_of = |x: &Rational| exponent_vector(x, &support).expect("factors over the base");
    let mut rows = vec![vec_of(a), vec_of(b)];
    rows.extend(group.generators().iter().map(vec_of));
    let mut two = vec![BigInt::zero(); cols];
    two[0] = BigInt::from(2);
    rows.push(two);
    let kernel = left_kernel(&rows, cols);
    let projected: Matrix = kernel.iter().map(|k| vec![k[0].clone(), k[1].clone()]).collect();
    row_basis(&projected, 2)
}

fn canonical_sign(r: BigInt, s: BigInt) -> (BigInt, BigInt) {
    if r.is_negative() || (r.is_zero() && s.is_negative()) {
        (-r, -s)
    } else {
        (r, s)
    }
}

/// Smallest `|r| + |s|` in a full-rank lattice given by an upper triangular
/// basis, coprime if one is found within the cap.
fn minimal_in_full_rank(h: &Matrix) -> Option<(i128, i128)> {
    let h11 = h[0][0].to_i128()?;
    let h12 = h[0][1].to_i128()?;
    let h22 = h[1][1].to_i128()?;
    let member = |x: i128, y: i128| {
        if x % h11 != 0 {
            return false;
        }
        (y - (x / h11) * h12) % h22 == 0
    };
    let mut first = None;
    for t in 1..=PRIMITIVE_SEARCH {
        // r > 0 first, then s ascending: r = t - |s| for s = -t..t, then r = 0, then r < 0
        let mut cands = Vec::new();
        for s in -t..=t {
            let r = t - s.abs();
            if r > 0 {
                cands.push((r, s));
            }
        }
        cands.push((0, t));
        for (r, s) in cands {
            if member(r, -s) {
                if r.gcd(&s) == 1 {
                    return Some((r, s));
                }
                first.get_or_insert((r, s));
            }
        }
    }
    first
}

/// A relation `a^r = u b^s`, `u` in the group, `(r, s) != (0, 0)`: coprime
/// when the relation lattice has a coprime vector, of smallest `|r| + |s|`,
/// `r > 0` (or `r = 0 < s`).
pub fn mult_dependent_mod_group(a: &Rational, b: &Rational, group: &UnitGroup) -> Option<PairDependence> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let basis = relation_lattice(a, b, group);
    let (r, s) = match basis.len() {
        0 => return None,
        1 => canonical_sign(basis[0][0].clone(), -basis[0][1].clone()),
        _ => match minimal_in_full_rank(&basis) {
            Some((r, s)) => (BigInt::from(r), BigInt::from(s)),
            None => canonical_sign(basis[1][0].clone(), -basis[1][1].clone()),
        },
    };
    let (ri, si) = (r.to_i64()?, s.to_i64()?);
    let u = pow_i(a, ri) / pow_i(b, si);
    let membership = group.in_group(&u)?;
    Some(PairDependence { r, s, u, membership })
}

/// Hypotheses of the pairwise finiteness statement, computed, not enforced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub degree: usize,
    pub squarefree: bool,
    /// Only checked for degree 2.
    pub second_iterate_squarefree: Option<bool>,
    pub zero_not_periodic: bool,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        self.degree >= 2 && self.squarefree && self.second_iterate_squarefree != Some(false) && self.zero_not_periodic
    }

    fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.degree < 2 {
            out.push("degree below 2".to_string());
        }
        if !self.squarefree {
            out.push("f has a multiple root".to_string());
        }
        if self.second_iterate_squarefree == Some(false) {
            out.push("f^(2) has a multiple root".to_string());
        }
        if !self.zero_not_periodic {
            out.push("0 is periodic".to_string());
        }
        out
    }
}

fn is_squarefree(p: &Poly) -> bool {
    p.gcd(&p.derivative()).is_constant()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairHit {
    pub alpha: ProjPoint,
    pub m: usize,
    pub n: usize,
    #[serde(flatten)]
    pub dependence: PairDependence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairwiseReport {
    pub hypotheses: HypothesisCheck,
    pub warnings: Vec<String>,
    pub hits: Vec<PairHit>,
    pub points: u64,
    pub preperiodic_excluded: u64,
    pub skipped_degenerate: u64,
}

/// All wandering `alpha` of height at most `height` and `n < m <= n_max`
/// with `f^(m)(alpha)` and `f^(n)(alpha)` dependent modulo the group.
pub fn find_pairwise_dependences(
    f: &RationalMap,
    group: &UnitGroup,
    height: u64,
    n_max: usize,
) -> Result<PairwiseReport> {
    if !f.is_polynomial() {
        return Err(Error::arg("pairwise search needs a polynomial map"));
    }
    if n_max < 2 {
        return Err(Error::arg("n_max must be at least 2"));
    }
    let bound = c1_bound(f)?;
    let d = f.degree();
    let hypotheses = HypothesisCheck {
        degree: d,
        squarefree: is_squarefree(f.numerator()),
        second_iterate_squarefree: (d == 2).then(|| is_squarefree(f.iterate(2).numerator())),
        zero_not_periodic: !matches!(
            decide_preperiodic(f, &bound, &ProjPoint::zero()),
            Dynamics::Preperiodic { tail: 0, .. }
        ),
    };
    let pts = points(height)?;

    let parts: Vec<(Vec<PairHit>, bool, u64)> = pts
        .par_iter()
        .map(|alpha| {
            if !decide_preperiodic(f, &bound, alpha).is_wandering() {
                return (Vec::new(), true, 0);
            }
            let orbit = f.orbit(alpha, n_max);
            let values: Vec<Option<Rational>> = orbit.iter().map(finite_nonzero).collect();
            let mut hits = Vec::new();
            let mut skipped = 0;
            for m in 2..=n_max {
                for n in 1..m {
                    let (Some(a), Some(b)) = (&values[m], &values[n]) else {
                        skipped += 1;
                        continue;
                    };
                    if let Some(dependence) = mult_dependent_mod_group(a, b, group) {
                        hits.push(PairHit { alpha: alpha.clone(), m, n, dependence });
                    }
                }
            }
            (hits, false, skipped)
        })
        .collect();

    let mut report = PairwiseReport {
        warnings: hypotheses.warnings(),
        hypotheses,
        hits: Vec::new(),
        points: pts.len() as u64,
        preperiodic_excluded: 0,
        skipped_degenerate: 0,
    };
    for (hits, pre, skipped) in parts {
        report.hits.extend(hits);
        report.preperiodic_excluded += u64::from(pre);
        report.skipped_degenerate += skipped;
    }
    Ok(report)
}
