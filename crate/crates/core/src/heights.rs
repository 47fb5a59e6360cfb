//! Certified canonical heights: the step constant, enclosures of the
//! canonical height, exact preperiodicity decisions and the lower bound on
//! canonical heights of wandering rational points.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{count_points, enumerate_points, ProjPoint, Rational};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::solve_linear;
use crate::ratmap::RationalMap;

/// `|h(f(P)) - d h(P)| <= c_step` for every rational point, and
/// `c1 = c_step / (d - 1)` bounds `|hhat - h|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepBound {
    pub degree: usize,
    /// `log max(|F|_1, |G|_1)`.
    pub upper_term: Interval,
    /// `log K` from the elimination identities.
    pub lower_term: Interval,
    pub c_step: Interval,
    pub c1: Interval,
}

impl Serialize for StepBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StepBound", 2)?;
        st.serialize_field("c_step", &self.c_step.hi_f64())?;
        st.serialize_field("c1", &self.c1.hi_f64())?;
        st.end()
    }
}

fn l1_norm(coeffs: &[BigInt]) -> BigUint {
    coeffs.iter().map(|c| c.magnitude().clone()).sum()
}

/// Sylvester entry: coefficient of `X^t` in `X^i * F`.
fn form_mul_row(f: &[BigInt], i: usize, t: usize) -> Rational {
    t.checked_sub(i)
        .and_then(|j| f.get(j))
        .map(|c| Rational::from_integer(c.clone()))
        .unwrap_or_else(Rational::zero)
}

/// Solves `A F + B G = X^(2d-1)` (`top = true`) or `= Z^(2d-1)` for forms
/// `A, B` of degree `d - 1`. Returns the coefficients of `A` then `B`.
fn elimination_cofactors(f: &RationalMap, top: bool) -> Vec<Rational> {
    let d = f.degree();
    let (fh, gh) = (f.hom_numerator(), f.hom_denominator());
    let size = 2 * d;
    let mut rows = Vec::with_capacity(size);
    for t in 0..size {
        let mut row = Vec::with_capacity(size);
        for i in 0..d {
            row.push(form_mul_row(fh, i, t));
        }
        for i in 0..d {
            row.push(form_mul_row(gh, i, t));
        }
        rows.push(row);
    }
    let mut rhs = vec![Rational::zero(); size];
    rhs[if top { size - 1 } else { 0 }] = Rational::one();
    solve_linear(rows, rhs).expect("coprime forms have a nonsingular Sylvester system")
}

/// Step constant from coefficient size (upper direction) and the
/// elimination identities (lower direction).
pub fn c1_bound(f: &RationalMap) -> Result<StepBound> {
    f.require_degree_two()?;
    let d = f.degree();
    let upper = l1_norm(f.hom_numerator()).max(l1_norm(f.hom_denominator()));
    let sols = [elimination_cofactors(f, true), elimination_cofactors(f, false)];
    let den = sols
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let k = sols
        .iter()
        .map(|s| {
            s.iter()
                .map(|c| (c * Rational::from_integer(den.clone())).to_integer().magnitude().clone())
                .sum::<BigUint>()
        })
        .max()
        .unwrap();
    let upper_term = Interval::ln_biguint(&upper);
    let lower_term = Interval::ln_biguint(&k);
    let c_step = upper_term.max(&lower_term).max(&Interval::zero());
    let c1 = c_step.div_bigint(&BigInt::from(d - 1));
    Ok(StepBound { degree: d, upper_term, lower_term, c_step, c1 })
}

/// Certified enclosure of the canonical height at iteration depth `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightInterval {
    pub enclosure: Interval,
    pub depth: u32,
}

impl HeightInterval {
    pub fn lower(&self) -> f64 {
        self.enclosure.lo_f64()
    }

    pub fn upper(&self) -> f64 {
        self.enclosure.hi_f64()
    }
}

impl Serialize for HeightInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HeightInterval", 3)?;
        st.serialize_field("lower", &self.lower())?;
        st.serialize_field("upper", &self.upper())?;
        st.serialize_field("depth", &self.depth)?;
        st.end()
    }
}

/// `d^-N (h(f^N(alpha)) +- c1)`, outward rounded.
pub fn canonical_height(f: &RationalMap, bound: &StepBound, alpha: &ProjPoint, depth: u32) -> HeightInterval {
    let mut p = alpha.clone();
    for _ in 0..depth {
        p = f.eval(&p);
    }
    enclose(&p, bound, depth)
}

fn enclose(p: &ProjPoint, bound: &StepBound, depth: u32) -> HeightInterval {
    let h = Interval::ln_biguint(&p.magnitude());
    let wide = Interval::hull(&h.sub(&bound.c1), &h.add(&bound.c1));
    let scale = BigInt::from(bound.degree).pow(depth);
    HeightInterval { enclosure: wide.div_bigint(&scale), depth }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Dynamics {
    /// `f^(tail)(alpha)` is the first point on a cycle of length `period`.
    Preperiodic { tail: usize, period: usize },
    /// `h(f^(n)(alpha)) > c1`, so the canonical height is positive.
    Wandering { certificate: usize },
}

impl Dynamics {
    pub fn is_wandering(&self) -> bool {
        matches!(self, Dynamics::Wandering { .. })
    }
}

/// Exact orbit walk: stops as soon as a height exceeds `c1` or a point
/// repeats. Terminates because points of height at most `c1` are finite.
pub fn decide_preperiodic(f: &RationalMap, bound: &StepBound, alpha: &ProjPoint) -> Dynamics {
    let mut seen: HashMap<ProjPoint, usize> = HashMap::new();
    let mut p = alpha.clone();
    let mut n = 0;
    loop {
        if bound.c1.certainly_lt(&Interval::ln_biguint(&p.magnitude())) {
            return Dynamics::Wandering { certificate: n };
        }
        if let Some(&first) = seen.get(&p) {
            return Dynamics::Preperiodic { tail: first, period: n - first };
        }
        let next = f.eval(&p);
        seen.insert(p, n);
        p = next;
        n += 1;
    }
}

/// Budgets for the lower-bound search.
#[derive(Clone, Copy, Debug)]
pub struct C2Budget {
    pub max_depth: u32,
    pub max_points: u64,
}

impl Default for C2Budget {
    fn default() -> Self {
        C2Budget { max_depth: 60, max_points: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C2Report {
    /// Certified lower bound, at most 1.
    pub value: Rational,
    /// Enumeration radius: all points with `h <= 1 + c1` have magnitude at most this.
    pub magnitude_bound: BigUint,
    pub points: u64,
    pub wandering: u64,
    /// Point attaining the minimum enclosure, if below the cap.
    pub argmin: Option<ProjPoint>,
}

impl C2Report {
    /// Rounded down.
    pub fn value_f64(&self) -> f64 {
        Interval::from_rational(&self.value).lo_f64()
    }
}

impl Serialize for C2Report {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("C2Report", 5)?;
        st.serialize_field("c2", &self.value_f64())?;
        st.serialize_field("magnitude_bound", &self.magnitude_bound.to_string())?;
        st.serialize_field("points", &self.points)?;
        st.serialize_field("wandering", &self.wandering)?;
        st.serialize_field("argmin", &self.argmin)?;
        st.end()
    }
}

/// Smallest depth whose enclosure has positive lower end, with that end.
fn positive_lower_end(
    f: &RationalMap,
    bound: &StepBound,
    alpha: &ProjPoint,
    max_depth: u32,
) -> Option<Rational> {
    let mut p = alpha.clone();
    for depth in 0..=max_depth {
        let enc = enclose(&p, bound, depth);
        if enc.enclosure.is_positive() {
            return Some(enc.enclosure.lo_rational());
        }
        p = f.eval(&p);
    }
    None
}

/// Lower bound for canonical heights of wandering rational points: scan all
/// points with `h <= 1 + c1`, certify each wandering one, take the smallest
/// lower end and cap at 1.
pub fn c2_bound(f: &RationalMap, bound: &StepBound, budget: C2Budget) -> Result<C2Report> {
    let radius = bound.c1.add(&Interval::from_int(1));
    let mag = radius
        .max_magnitude_with_ln_at_most()
        .ok_or_else(|| Error::Resource { reason: "c1 too large to enumerate".into(), partial: None })?;
    let mag_u64 = u64::try_from(&mag).map_err(|_| Error::Resource {
        reason: format!("magnitude bound {mag} too large"),
        partial: None,
    })?;
    let points = count_points(mag_u64);
    if points > budget.max_points {
        return Err(Error::Resource {
            reason: format!("{points} points of magnitude <= {mag} exceed the budget {}", budget.max_points),
            partial: Some(format!("c1 <= {}", bound.c1.hi_f64())),
        });
    }
    let all: Vec<ProjPoint> = enumerate_points(mag_u64)?.collect();
    let results: Vec<(usize, Option<Option<Rational>>)> = all
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            if decide_preperiodic(f, bound, p).is_wandering() {
                (i, Some(positive_lower_end(f, bound, p, budget.max_depth)))
            } else {
                (i, None)
            }
        })
        .collect();
    let mut best: Option<(Rational, usize)> = None;
    let mut wandering = 0;
    for (i, r) in results {
        let Some(lower) = r else { continue };
        wandering += 1;
        let Some(lower) = lower else {
            return Err(Error::Resource {
                reason: format!("no positive enclosure for {} within depth {}", all[i], budget.max_depth),
                partial: best.map(|(v, _)| format!("minimum so far {v}")),
            });
        };
        if best.as_ref().is_none_or(|(v, _)| lower < *v) {
            best = Some((lower, i));
        }
    }
    let one = Rational::one();
    let (value, argmin) = match best {
        Some((v, i)) if v < one => (v, Some(all[i].clone())),
        _ => (one, None),
    };
    debug_assert!(value.is_positive());
    Ok(C2Report { value, magnitude_bound: mag, points, wandering, argmin })
}
