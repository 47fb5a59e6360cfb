//! Rational maps on P^1 over Q, stored as coprime integer pairs `F / G`
//! together with their homogeneous lifts.

mod forms;
mod parse;
mod ramify;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{factor, ProjPoint, Rational};
use crate::error::{Error, Result};
use crate::poly::Poly;

pub use forms::{classify_special_form, FormKind, SpecialForm};
pub use parse::parse_rational_function;
pub use ramify::{
    critical_data, exceptional_points, fiber_shape, is_exceptional, nu, ramification_index, zero_pole_count,
    CriticalPoint, Locus,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    degree: usize,
    num_hom: Vec<BigInt>,
    den_hom: Vec<BigInt>,
}

fn padded_ints(p: &Poly, d: usize) -> Vec<BigInt> {
    (0..=d).map(|i| p.coeff(i).to_integer()).collect()
}

/// `sum c_i x^i z^(d-i)`.
fn eval_form(coeffs: &[BigInt], x: &BigInt, z: &BigInt) -> BigInt {
    let d = coeffs.len() - 1;
    let mut zpow = BigInt::one();
    let mut acc = BigInt::zero();
    // Horner in x, with the z powers accumulated from the top coefficient down.
    let mut terms = Vec::with_capacity(d + 1);
    for i in (0..=d).rev() {
        terms.push(&coeffs[i] * &zpow);
        zpow *= z;
    }
    for t in terms {
        acc = acc * x + t;
    }
    acc
}

impl RationalMap {
    /// Normalizes `F / G`: cancels the gcd, clears denominators and joint
    /// content, and makes the leading coefficient of `G` positive.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::arg("F and G are both zero"));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let mut all: Vec<Rational> = num.coeffs().to_vec();
        all.extend(den.coeffs().iter().cloned());
        let (_, scale) = Poly::from_coeffs(all).primitive_integer_coeffs();
        let mut inv = scale.recip();
        let sign_source = if den.is_zero() { num.leading() } else { den.leading() };
        if sign_source.is_negative() {
            inv = -inv;
        }
        let num = num.scale(&inv);
        let den = den.scale(&inv);
        let degree = num.deg().max(den.deg());
        let num_hom = padded_ints(&num, degree);
        let den_hom = padded_ints(&den, degree);
        Ok(RationalMap { num, den, degree, num_hom, den_hom })
    }

    pub fn polynomial(p: Poly) -> Result<Self> {
        Self::new(p, Poly::one())
    }

    /// `a X^k` for `k >= 0`, or `a X^(-|k|)`.
    pub fn monomial(a: Rational, k: i64) -> Result<Self> {
        let x = Poly::monomial(Rational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::new(x.scale(&a), Poly::one())
        } else {
            Self::new(Poly::constant(a), x)
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of the homogeneous numerator lift, `X^i Z^(d-i)` at index `i`.
    pub fn hom_numerator(&self) -> &[BigInt] {
        &self.num_hom
    }

    pub fn hom_denominator(&self) -> &[BigInt] {
        &self.den_hom
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant() && !self.den.is_zero()
    }

    pub(crate) fn require_degree_two(&self) -> Result<()> {
        if self.degree < 2 {
            return Err(Error::arg(format!("map has degree {}, need at least 2", self.degree)));
        }
        Ok(())
    }

    /// Raw homogeneous image `(F(x,z), G(x,z))` before normalization.
    pub fn eval_lift(&self, x: &BigInt, z: &BigInt) -> (BigInt, BigInt) {
        (eval_form(&self.num_hom, x, z), eval_form(&self.den_hom, x, z))
    }

    pub fn eval(&self, p: &ProjPoint) -> ProjPoint {
        let (a, b) = self.eval_lift(p.x(), p.z());
        ProjPoint::normalized(a, b)
    }

    /// Image of a finite rational value (`None` when it is a pole).
    pub fn eval_rational(&self, q: &Rational) -> Option<Rational> {
        self.eval(&ProjPoint::from_rational(q)).to_rational()
    }

    /// `alpha, f(alpha), ..., f^(n)(alpha)`.
    pub fn orbit(&self, alpha: &ProjPoint, n: usize) -> Vec<ProjPoint> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(alpha.clone());
        for i in 0..n {
            let next = self.eval(&out[i]);
            out.push(next);
        }
        out
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &RationalMap) -> RationalMap {
        let e = self.degree;
        let (f, g) = (&inner.num, &inner.den);
        let fpow: Vec<Poly> = (0..=e).map(|i| f.pow(i)).collect();
        let gpow: Vec<Poly> = (0..=e).map(|i| g.pow(i)).collect();
        let mut num = Poly::zero();
        let mut den = Poly::zero();
        for i in 0..=e {
            let basis = &fpow[i] * &gpow[e - i];
            num = &num + &basis.scale(&Rational::from_integer(self.num_hom[i].clone()));
            den = &den + &basis.scale(&Rational::from_integer(self.den_hom[i].clone()));
        }
        let out = RationalMap::new(num, den).expect("composition of morphisms is nonzero");
        assert_eq!(
            out.degree,
            self.degree * inner.degree,
            "degree of a composition must multiply"
        );
        out
    }

    pub fn iterate(&self, n: usize) -> RationalMap {
        let mut out = RationalMap::new(Poly::x(), Poly::one()).unwrap();
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    /// `1 / f(1 / X)`.
    pub fn invert_coordinates(&self) -> RationalMap {
        RationalMap::new(self.den.reversed(self.degree), self.num.reversed(self.degree))
            .expect("nonzero map")
    }

    /// Primes of bad reduction of a polynomial map: a coefficient with
    /// negative valuation or a leading coefficient with positive valuation.
    pub fn bad_reduction_primes(&self) -> Result<Vec<num_bigint::BigUint>> {
        if !self.is_polynomial() {
            return Err(Error::arg("bad reduction is defined here only for polynomials"));
        }
        let c = self.den.leading();
        let mut primes = Vec::new();
        for coeff in self.num.coeffs() {
            let q = coeff / &c;
            if !q.denom().is_one() {
                primes.extend(factor(q.denom())?.primes.into_iter().map(|(p, _)| p));
            }
        }
        let lead = self.num.leading() / &c;
        if !lead.numer().abs().is_one() {
            primes.extend(factor(lead.numer())?.primes.into_iter().map(|(p, _)| p));
        }
        primes.sort();
        primes.dedup();
        Ok(primes)
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.term_count() > 1 {
            write!(f, "({}) / ", self.num)?;
        } else {
            write!(f, "{} / ", self.num)?;
        }
        let bare = self.den.is_constant() || (self.den.term_count() == 1 && self.den.leading().is_one());
        if bare {
            write!(f, "{}", self.den)
        } else {
            write!(f, "({})", self.den)
        }
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMap[{self}]")
    }
}

impl FromStr for RationalMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = parse_rational_function(s)?;
        RationalMap::new(num, den)
    }
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
