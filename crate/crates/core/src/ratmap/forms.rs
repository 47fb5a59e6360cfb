use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::RationalMap;
use crate::arith::{rational_to_string, Rational};
use crate::poly::Poly;

/// The special shapes `f` or `1/f(1/X)` can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FormKind {
    /// `a X^d`
    Power,
    /// `a X^(-d)`
    InversePower,
    /// `a (X-b)^d`
    ShiftedPower,
    /// `a (X-b)^(-d)`
    ShiftedInversePower,
    /// `a (X-b)^d / (X-c)^d`
    PowerQuotient,
    /// `a X^d / (X-b)^(d-1)`
    PowerOverShift,
    /// `a X (X-b)^(d-1)`
    LinearTimesShift,
    /// `a X / (X-b)^d`
    LinearOverShift,
    /// `a X (X-b)^(d-1) / (X-c)^(d-1)`
    LinearShiftQuotient,
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormKind::Power => "aX^d",
            FormKind::InversePower => "aX^-d",
            FormKind::ShiftedPower => "a(X-b)^d",
            FormKind::ShiftedInversePower => "a(X-b)^-d",
            FormKind::PowerQuotient => "a(X-b)^d/(X-c)^d",
            FormKind::PowerOverShift => "aX^d/(X-b)^(d-1)",
            FormKind::LinearTimesShift => "aX(X-b)^(d-1)",
            FormKind::LinearOverShift => "aX/(X-b)^d",
            FormKind::LinearShiftQuotient => "aX(X-b)^(d-1)/(X-c)^(d-1)",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialForm {
    pub kind: FormKind,
    pub a: Rational,
    pub b: Option<Rational>,
    pub c: Option<Rational>,
    /// The match is for `1/f(1/X)` rather than `f`.
    pub inverted: bool,
}

impl Serialize for SpecialForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SpecialForm", 5)?;
        st.serialize_field("form", &self.kind.to_string())?;
        st.serialize_field("a", &rational_to_string(&self.a))?;
        st.serialize_field("b", &self.b.as_ref().map(rational_to_string))?;
        st.serialize_field("c", &self.c.as_ref().map(rational_to_string))?;
        st.serialize_field("inverted", &self.inverted)?;
        st.end()
    }
}

/// If `p = lead * (X - r)^k` exactly, returns `(lead, r)`; the root is read
/// from the subleading coefficient.
fn linear_power(p: &Poly, k: usize) -> Option<(Rational, Rational)> {
    if p.degree() != Some(k) || k == 0 {
        return None;
    }
    let lead = p.leading();
    let r = -p.coeff(k - 1) / (&lead * Rational::from_integer(k.into()));
    (Poly::linear_power(lead.clone(), &r, k) == *p).then_some((lead, r))
}

fn constant(p: &Poly) -> Option<Rational> {
    (p.degree() == Some(0)).then(|| p.leading())
}

/// `p = X * q` with `q = lead (X - b)^k`, `b != 0`.
fn x_times_shift(p: &Poly, k: usize) -> Option<(Rational, Rational)> {
    if p.ord_at_zero() != 1 {
        return None;
    }
    let q = p.shift_down(1);
    if k == 0 {
        return constant(&q).map(|c| (c, Rational::zero()));
    }
    linear_power(&q, k).filter(|(_, b)| !b.is_zero())
}

fn match_direct(f: &RationalMap) -> Option<(FormKind, Rational, Option<Rational>, Option<Rational>)> {
    let d = f.degree();
    let (num, den) = (f.numerator(), f.denominator());
    let nl = num.leading();
    let dl = den.leading();
    let a = &nl / &dl;
    if let Some(dc) = constant(den) {
        if let Some((l, r)) = linear_power(num, d) {
            let a = l / dc;
            return Some(if r.is_zero() {
                (FormKind::Power, a, None, None)
            } else {
                (FormKind::ShiftedPower, a, Some(r), None)
            });
        }
        if let Some((_, b)) = x_times_shift(num, d - 1) {
            return Some((FormKind::LinearTimesShift, a, Some(b), None));
        }
    }
    if let Some(nc) = constant(num) {
        if let Some((l, r)) = linear_power(den, d) {
            let a = nc / l;
            return Some(if r.is_zero() {
                (FormKind::InversePower, a, None, None)
            } else {
                (FormKind::ShiftedInversePower, a, Some(r), None)
            });
        }
    }
    if let (Some((_, b)), Some((_, c))) = (linear_power(num, d), linear_power(den, d)) {
        return Some((FormKind::PowerQuotient, a, Some(b), Some(c)));
    }
    if let Some((_, b)) = linear_power(den, d - 1) {
        if linear_power(num, d).is_some_and(|(_, r)| r.is_zero()) && !b.is_zero() {
            return Some((FormKind::PowerOverShift, a, Some(b), None));
        }
        if let Some((_, nb)) = x_times_shift(num, d - 1) {
            return Some((FormKind::LinearShiftQuotient, a, Some(nb), Some(b)));
        }
    }
    if num.degree() == Some(1) && num.ord_at_zero() == 1 {
        if let Some((_, b)) = linear_power(den, d) {
            return Some((FormKind::LinearOverShift, a, Some(b), None));
        }
    }
    None
}

/// Matches `f`, then `1/f(1/X)`, against the special shapes. Degree below 2
/// never matches.
pub fn classify_special_form(f: &RationalMap) -> Option<SpecialForm> {
    if f.degree() < 2 {
        return None;
    }
    for (g, inverted) in [(f.clone(), false), (f.invert_coordinates(), true)] {
        if let Some((kind, a, b, c)) = match_direct(&g) {
            return Some(SpecialForm { kind, a, b, c, inverted });
        }
    }
    None
}

impl SpecialForm {
    /// Rebuilds the matched map from the extracted constants.
    pub fn rebuild(&self, d: usize) -> RationalMap {
        let one = Rational::one();
        let x = Poly::x();
        let b = self.b.clone().unwrap_or_else(Rational::zero);
        let c = self.c.clone().unwrap_or_else(Rational::zero);
        let lp = |r: &Rational, k: usize| Poly::linear_power(one.clone(), r, k);
        let (num, den) = match self.kind {
            FormKind::Power => (lp(&Rational::zero(), d), Poly::one()),
            FormKind::InversePower => (Poly::one(), lp(&Rational::zero(), d)),
            FormKind::ShiftedPower => (lp(&b, d), Poly::one()),
            FormKind::ShiftedInversePower => (Poly::one(), lp(&b, d)),
            FormKind::PowerQuotient => (lp(&b, d), lp(&c, d)),
            FormKind::PowerOverShift => (lp(&Rational::zero(), d), lp(&b, d - 1)),
            FormKind::LinearTimesShift => (&x * &lp(&b, d - 1), Poly::one()),
            FormKind::LinearOverShift => (x, lp(&b, d)),
            FormKind::LinearShiftQuotient => (&x * &lp(&b, d - 1), lp(&c, d - 1)),
        };
        let g = RationalMap::new(num.scale(&self.a), den).expect("nonzero");
        if self.inverted {
            g.invert_coordinates()
        } else {
            g
        }
    }
}
