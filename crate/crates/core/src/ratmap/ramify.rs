use std::fmt;

use serde::{Serialize, Serializer};

use super::RationalMap;
use crate::arith::{ProjPoint, Rational};
use crate::error::Result;
use crate::poly::Poly;

/// A set of conjugate points: infinity, or the roots of a monic squarefree
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Locus {
    Infinity,
    Roots(Poly),
}

impl Locus {
    /// The single rational point, when the defining factor is linear.
    pub fn rational_point(&self) -> Option<ProjPoint> {
        match self {
            Locus::Infinity => Some(ProjPoint::infinity()),
            Locus::Roots(p) if p.deg() == 1 => {
                Some(ProjPoint::from_rational(&(-p.coeff(0) / p.coeff(1))))
            }
            Locus::Roots(_) => None,
        }
    }

    /// Number of geometric points.
    pub fn size(&self) -> usize {
        match self {
            Locus::Infinity => 1,
            Locus::Roots(p) => p.deg(),
        }
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Infinity => write!(f, "inf"),
            Locus::Roots(p) => match self.rational_point() {
                Some(q) => write!(f, "{q}"),
                None => write!(f, "roots({p})"),
            },
        }
    }
}

impl Serialize for Locus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    pub locus: Locus,
    /// Ramification index at each point of the locus.
    pub e: usize,
}

/// `c_z F - c_x G` dehomogenized, for the target `(c_x : c_z)`.
fn fiber_form(f: &RationalMap, target: &ProjPoint) -> Poly {
    let cx = Rational::from_integer(target.x().clone());
    let cz = Rational::from_integer(target.z().clone());
    &f.numerator().scale(&cz) - &f.denominator().scale(&cx)
}

/// Order of vanishing of the form at `alpha`, in a form of formal degree `d`.
fn form_multiplicity(h: &Poly, d: usize, alpha: &ProjPoint) -> usize {
    match alpha.to_rational() {
        Some(a) => h.root_multiplicity(&a),
        None => d - h.deg(),
    }
}

/// `e_f(alpha)`: multiplicity of `alpha` in the fiber over `f(alpha)`.
/// Computed on the homogeneous lift, so infinity on either side needs no
/// special chart. Degree-0 maps give 0.
pub fn ramification_index(f: &RationalMap, alpha: &ProjPoint) -> usize {
    if f.degree() == 0 {
        return 0;
    }
    let h = fiber_form(f, &f.eval(alpha));
    form_multiplicity(&h, f.degree(), alpha)
}

/// Preimages of `target` grouped by multiplicity; multiplicities times locus
/// sizes sum to `d`.
pub fn fiber_shape(f: &RationalMap, target: &ProjPoint) -> Vec<(Locus, usize)> {
    let h = fiber_form(f, target);
    let mut out: Vec<(Locus, usize)> = h
        .squarefree_decomposition()
        .into_iter()
        .map(|(p, k)| (Locus::Roots(p), k))
        .collect();
    let at_inf = f.degree() - h.deg();
    if at_inf > 0 {
        out.push((Locus::Infinity, at_inf));
    }
    out
}

/// Points with `e_f > 1`, read off the Wronskian `F'G - FG'` of formal
/// degree `2d - 2`; the missing degree is the order at infinity.
pub fn critical_data(f: &RationalMap) -> Result<Vec<CriticalPoint>> {
    f.require_degree_two()?;
    let (num, den) = (f.numerator(), f.denominator());
    let w = &(&num.derivative() * den) - &(num * &den.derivative());
    let mut out: Vec<CriticalPoint> = w
        .squarefree_decomposition()
        .into_iter()
        .map(|(p, k)| CriticalPoint { locus: Locus::Roots(p), e: k + 1 })
        .collect();
    let at_inf = 2 * f.degree() - 2 - w.deg();
    if at_inf > 0 {
        out.push(CriticalPoint { locus: Locus::Infinity, e: at_inf + 1 });
    }
    Ok(out)
}

/// Number of distinct complex roots.
pub fn nu(h: &Poly) -> Result<usize> {
    h.distinct_root_count()
}

/// Distinct zeros and poles of `f` on P^1, counting infinity.
pub fn zero_pole_count(f: &RationalMap) -> usize {
    let (num, den) = (f.numerator(), f.denominator());
    let finite = if num.is_zero() || den.is_zero() {
        0
    } else {
        (num * den).squarefree_part().deg()
    };
    finite + usize::from(num.deg() != den.deg() && !num.is_zero() && !den.is_zero())
}

/// `beta` has finite backward orbit iff it is a totally ramified fixed point
/// of `f^(2)`.
pub fn is_exceptional(f: &RationalMap, beta: &ProjPoint) -> Result<bool> {
    f.require_degree_two()?;
    let f2 = f.compose(f);
    if f2.eval(beta) != *beta {
        return Ok(false);
    }
    Ok(ramification_index(&f2, beta) == f.degree() * f.degree())
}

/// The exceptional set, as loci. An exceptional point is totally ramified
/// for `f`, so the candidates are the critical loci with `e = d`; a
/// conjugate pair qualifies when `f` maps the pair into itself.
pub fn exceptional_points(f: &RationalMap) -> Result<Vec<Locus>> {
    let d = f.degree();
    let mut out = Vec::new();
    for c in critical_data(f)? {
        if c.e != d {
            continue;
        }
        let keep = match &c.locus {
            Locus::Infinity => is_exceptional(f, &ProjPoint::infinity())?,
            Locus::Roots(p) if p.deg() == 1 => is_exceptional(f, &c.locus.rational_point().unwrap())?,
            // p(F/G) G^2 vanishes on the roots of p
            Locus::Roots(p) if p.deg() == 2 => {
                let (num, den) = (f.numerator(), f.denominator());
                let h = &(&(&num.pow(2) * &Poly::constant(p.coeff(2))) + &(&(num * den) * &Poly::constant(p.coeff(1))))
                    + &(&den.pow(2) * &Poly::constant(p.coeff(0)));
                h.div_rem(p).1.is_zero()
            }
            Locus::Roots(_) => false,
        };
        if keep {
            out.push(c.locus);
        }
    }
    Ok(out)
}

impl RationalMap {
    pub fn ramification_index(&self, alpha: &ProjPoint) -> usize {
        ramification_index(self, alpha)
    }
}
