//! Genus and singular points of the curves `F(X) = c G(X) Y^m`, the
//! superelliptic genus, a Riemann-Hurwitz oracle, and the curves attached to
//! `f^(n)(X) = c Y^m X`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{rational_to_string, Rational};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratmap::{classify_special_form, Locus, RationalMap, SpecialForm};
use crate::unit_group::lcm_exponent;

/// Largest `d^n` for which `f^(n)` is expanded.
pub const ITERATE_DEGREE_LIMIT: u64 = 4096;

/// The affine curve `F(X) = c G(X) Y^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    f: Poly,
    g: Poly,
    c: Rational,
    m: BigInt,
}

impl CurveSpec {
    pub fn new(f: Poly, g: Poly, c: Rational, m: BigInt) -> Result<Self> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::arg("F and G must be nonzero"));
        }
        if f.is_constant() && g.is_constant() {
            return Err(Error::arg("F and G are both constant"));
        }
        if c.is_zero() {
            return Err(Error::arg("c must be nonzero"));
        }
        if m < BigInt::from(2) {
            return Err(Error::arg("m must be at least 2"));
        }
        if !f.gcd(&g).is_constant() {
            return Err(Error::arg("F and G have a common root"));
        }
        Ok(CurveSpec { f, g, c, m })
    }

    pub fn with_unit_c(f: Poly, g: Poly, m: BigInt) -> Result<Self> {
        CurveSpec::new(f, g, Rational::one(), m)
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    /// `nu(FG)`.
    pub fn nu(&self) -> usize {
        (&self.f * &self.g).distinct_root_count().expect("nonzero product")
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.f)?;
        if !self.c.is_one() {
            write!(f, "{}*", rational_to_string(&self.c))?;
        }
        if self.g.is_one() {
            write!(f, "Y^{}", self.m)
        } else {
            write!(f, "({})*Y^{}", self.g, self.m)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    /// `m >= deg F + 2`.
    pub m_large: bool,
    /// `gcd(m, (deg F)! (deg G)!) = 1`.
    pub gcd: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.m_large && self.gcd
    }
}

/// Both conditions, with `gcd(m, dF! dG!)` decided by `gcd(m, k) = 1` for
/// every `k <= max(dF, dG)`.
pub fn check_hypotheses(spec: &CurveSpec) -> HypothesisReport {
    let df = spec.f.deg();
    let dg = spec.g.deg();
    let mut reasons = Vec::new();
    let m_large = spec.m >= BigInt::from(df + 2);
    if !m_large {
        reasons.push(format!("m = {} < deg F + 2 = {}", spec.m, df + 2));
    }
    let bad = (2..=df.max(dg)).find(|&k| !spec.m.gcd(&BigInt::from(k)).is_one());
    if let Some(k) = bad {
        reasons.push(format!("gcd(m, {k}) > 1, so m shares a factor with dF! dG!"));
    }
    HypothesisReport { m_large, gcd: bad.is_none(), reasons }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeCase {
    Unequal,
    Equal,
}

impl Serialize for DegreeCase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            DegreeCase::Unequal => "dF≠dG",
            DegreeCase::Equal => "dF=dG",
        })
    }
}

/// A singular point of the projective closure in `P^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularPoint {
    /// `[1,0,0]`.
    XAxisAtInfinity,
    /// `[alpha,0,1]` for the roots of a squarefree factor of `F` of multiplicity `e >= 2`.
    RepeatedRoot { roots: Locus, e: usize },
    /// `[0,1,0]`.
    YAxisAtInfinity,
}

impl fmt::Display for SingularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularPoint::XAxisAtInfinity => write!(f, "[1,0,0]"),
            SingularPoint::RepeatedRoot { roots, .. } => write!(f, "[{roots},0,1]"),
            SingularPoint::YAxisAtInfinity => write!(f, "[0,1,0]"),
        }
    }
}

impl Serialize for SingularPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SingularPoint", 2)?;
        st.serialize_field("point", &self.to_string())?;
        let e = match self {
            SingularPoint::RepeatedRoot { e, .. } => Some(*e),
            _ => None,
        };
        st.serialize_field("e", &e)?;
        st.end()
    }
}

/// Singular points of the closure `F(X,Z) Z^(m+dG-dF) = c G(X,Z) Y^m`.
/// `[0,1,0]` lies on the closure only when `dG >= 1` and is singular
/// exactly when `dG >= 2`.
pub fn singular_points(spec: &CurveSpec) -> Result<Vec<SingularPoint>> {
    let df = spec.f.deg();
    if spec.m < BigInt::from(df + 2) {
        return Err(Error::Precondition(vec![format!("m = {} < deg F + 2 = {}", spec.m, df + 2)]));
    }
    let mut out = vec![SingularPoint::XAxisAtInfinity];
    for (factor, e) in spec.f.squarefree_decomposition() {
        if e >= 2 && !factor.is_constant() {
            out.push(SingularPoint::RepeatedRoot { roots: Locus::Roots(factor.monic()), e });
        }
    }
    if spec.g.deg() >= 2 {
        out.push(SingularPoint::YAxisAtInfinity);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusReport {
    pub hypotheses: HypothesisReport,
    pub nu: usize,
    pub case: DegreeCase,
    pub genus: BigInt,
    pub singular: Vec<SingularPoint>,
}

impl Serialize for GenusReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GenusReport", 5)?;
        match self.genus.to_i64() {
            Some(g) => st.serialize_field("genus", &g)?,
            None => st.serialize_field("genus", &self.genus.to_string())?,
        }
        st.serialize_field("nu", &self.nu)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("singular", &self.singular)?;
        st.serialize_field("hypotheses", &self.hypotheses)?;
        st.end()
    }
}

/// `(nu(FG) - 1)(m - 1)/2` if `dF != dG`, `(nu(FG) - 2)(m - 1)/2` otherwise.
pub fn genus(spec: &CurveSpec) -> Result<GenusReport> {
    let hypotheses = check_hypotheses(spec);
    if !hypotheses.ok() {
        return Err(Error::Precondition(hypotheses.reasons));
    }
    let nu = spec.nu();
    let case = if spec.f.deg() == spec.g.deg() { DegreeCase::Equal } else { DegreeCase::Unequal };
    let drop = if case == DegreeCase::Equal { 2 } else { 1 };
    let twice: BigInt = BigInt::from(nu as i64 - drop) * (&spec.m - BigInt::one());
    if twice.is_negative() || twice.is_odd() {
        return Err(Error::Integrity(format!("genus formula gave 2g = {twice}")));
    }
    Ok(GenusReport { nu, case, genus: twice / 2, singular: singular_points(spec)?, hypotheses })
}

/// `((m-1)(q-1) - gcd(m,q) + 1)/2` for `y^m = F(x)`, `F` squarefree of degree `q`.
pub fn superelliptic_genus(q: u64, m: &BigInt) -> Result<BigInt> {
    if q < 1 {
        return Err(Error::arg("q must be at least 1"));
    }
    if *m < BigInt::from(2) {
        return Err(Error::arg("m must be at least 2"));
    }
    let q = BigInt::from(q);
    let twice = (m - 1) * (&q - 1) - m.gcd(&q) + 1;
    Ok(twice / 2)
}

/// As [`superelliptic_genus`], reading `q` off a polynomial that must be squarefree.
pub fn superelliptic_genus_of(f: &Poly, m: &BigInt) -> Result<BigInt> {
    if f.is_zero() || !f.gcd(&f.derivative()).is_constant() {
        return Err(Error::arg("F must be squarefree"));
    }
    superelliptic_genus(f.deg() as u64, m)
}

/// Points of `P^1` over which the `Y`-projection has fewer than `m` preimages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fiber {
    pub over: Locus,
    #[serde(serialize_with = "ser_bigint")]
    pub size: BigInt,
}

fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Fibers of `(x, y) -> x` read off the local equations `(x - a)^e = y^m`:
/// `gcd(e, m)` points over a root of multiplicity `e` of `F` or `G`, and
/// `gcd(|dF - dG|, m)` over infinity (`m` when the degrees agree).
pub fn cover_fibers(spec: &CurveSpec) -> Vec<Fiber> {
    let mut out = Vec::new();
    for p in [&spec.f, &spec.g] {
        for (factor, e) in p.squarefree_decomposition() {
            if !factor.is_constant() {
                out.push(Fiber { over: Locus::Roots(factor.monic()), size: spec.m.gcd(&BigInt::from(e)) });
            }
        }
    }
    let gap = spec.f.deg().abs_diff(spec.g.deg());
    out.push(Fiber { over: Locus::Infinity, size: spec.m.gcd(&BigInt::from(gap)) });
    out
}

/// Genus of a degree-`m` cover of `P^1` from its fibers:
/// `2g = 2(1 - m) + sum (m - #fiber)`, each term counted once per point of
/// the locus.
pub fn riemann_hurwitz_genus(m: &BigInt, fibers: &[Fiber]) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(Error::arg("cover degree must be positive"));
    }
    let mut twice = BigInt::from(2) * (BigInt::one() - m);
    for fib in fibers {
        if !fib.size.is_positive() || fib.size > *m {
            return Err(Error::arg(format!("fiber size {} outside [1, {m}]", fib.size)));
        }
        twice += (m - &fib.size) * BigInt::from(fib.over.size());
    }
    if twice.is_negative() || twice.is_odd() {
        return Err(Error::Integrity(format!("Riemann-Hurwitz gave 2g = {twice}")));
    }
    Ok(twice / 2)
}

/// Shape of `f^(n)` at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZeroCase {
    /// `F_n(0) != 0`.
    A,
    /// Simple zero at 0.
    B,
    /// Zero of order `e >= 2`.
    C,
}

/// Genus-zero rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableRow {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl TableRow {
    pub fn conclusion(&self) -> &'static str {
        match self {
            TableRow::A1 => "F_n and G_n constant: f^(n) constant, impossible for d >= 2",
            TableRow::A2 => "G_n constant and deg F_n = 1: d^n = 1, impossible",
            TableRow::B1 => "f^(n)(X) = aX(X-b)^(d^n-1) or aX/(X-b)^(d^n)",
            TableRow::B2 => "f^(n)(X) = aX(X-b)^(d^n-1)/(X-c)^(d^n-1) with b, c, 0 distinct",
            TableRow::C1 => "f^(n)(X) = cX^e",
            TableRow::C2 => "f^(n)(X) = aX^(d^n)/(X-b)^(d^n-1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceCurveReport {
    pub n: usize,
    pub degree: usize,
    pub case: ZeroCase,
    /// Order of vanishing of `f^(n)` at 0.
    pub e: usize,
    pub f_n: Poly,
    pub g_n: Poly,
    pub curve: CurveSpec,
    /// `nu(F_n G_n)`.
    pub nu: usize,
    /// `2 genus / (m - 1)`.
    pub ratio: BigInt,
    pub genus: BigInt,
    pub row: Option<TableRow>,
    pub shape: Option<SpecialForm>,
    pub note: Option<String>,
}

impl Serialize for DependenceCurveReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        // m = LCM(2..d^n+1) + 1 runs to hundreds of digits; print it and the
        // genus only while short
        let short = |v: &BigInt| {
            let t = v.to_string();
            (t.len() <= 60).then_some(t)
        };
        let mut st = s.serialize_struct("DependenceCurveReport", 15)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("F_n", &self.f_n.to_string())?;
        st.serialize_field("G_n", &self.g_n.to_string())?;
        st.serialize_field("m", &short(&self.curve.m))?;
        st.serialize_field("m_digits", &self.curve.m.to_string().len())?;
        st.serialize_field("nu", &self.nu)?;
        st.serialize_field("ratio", &self.ratio.to_string())?;
        st.serialize_field("genus", &short(&self.genus))?;
        st.serialize_field("genus_is_zero", &self.genus.is_zero())?;
        st.serialize_field("row", &self.row)?;
        st.serialize_field("conclusion", &self.row.map(|r| r.conclusion()))?;
        st.serialize_field("shape", &self.shape)?;
        st.serialize_field("note", &self.note)?;
        st.end()
    }
}

/// Writes `f^(n) = X^e F_n / G_n`, builds the curve for `f^(n)(X) = c Y^m X`
/// with `m = LCM(2, ..., d^n + 1) + 1`, and computes its genus.
pub fn classify_dependence_curve(f: &RationalMap, n: usize) -> Result<DependenceCurveReport> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    if n < 1 {
        return Err(Error::arg("n must be at least 1"));
    }
    let dn = (d as u64)
        .checked_pow(n as u32)
        .filter(|&v| v <= ITERATE_DEGREE_LIMIT)
        .ok_or_else(|| Error::Resource {
            reason: format!("{d}^{n} exceeds the iterate degree limit {ITERATE_DEGREE_LIMIT}"),
            partial: None,
        })?;
    let it = f.iterate(n);
    let e = it.numerator().ord_at_zero();
    let f_n = it.numerator().shift_down(e);
    let g_n = it.denominator().clone();
    let m = lcm_exponent(d as u64, n as u32)?;
    let case = match e {
        0 => ZeroCase::A,
        1 => ZeroCase::B,
        _ => ZeroCase::C,
    };
    let (cf, cg) = match case {
        ZeroCase::A => (f_n.clone(), &Poly::x() * &g_n),
        ZeroCase::B => (f_n.clone(), g_n.clone()),
        ZeroCase::C => (&Poly::monomial(Rational::one(), e - 1) * &f_n, g_n.clone()),
    };
    let curve = CurveSpec::with_unit_c(cf, cg, m.clone())?;
    let report = genus(&curve)?;
    let nu = (&f_n * &g_n).distinct_root_count()?;
    let ratio = &report.genus * 2 / (&m - 1);
    let equal = report.case == DegreeCase::Equal;
    let mut note = None;
    if case == ZeroCase::A && g_n.ord_at_zero() > 0 {
        note = Some("G_n(0) = 0: X G_n has a double root at 0, so the ratio is nu(F_n G_n) - 1 + [dF = dG + 1]".to_string());
    }
    let row = if report.genus.is_zero() && note.is_none() {
        match (case, equal, nu) {
            (ZeroCase::A, false, 0) => Some(TableRow::A1),
            (ZeroCase::A, true, 1) => Some(TableRow::A2),
            (ZeroCase::B, false, 1) => Some(TableRow::B1),
            (ZeroCase::B, true, 2) => Some(TableRow::B2),
            (ZeroCase::C, false, 0) => Some(TableRow::C1),
            (ZeroCase::C, true, 1) => Some(TableRow::C2),
            _ => None,
        }
    } else {
        None
    };
    debug_assert!(dn as usize == it.degree());
    Ok(DependenceCurveReport {
        n,
        degree: d,
        case,
        e,
        f_n,
        g_n,
        curve,
        nu,
        ratio,
        genus: report.genus,
        row,
        shape: classify_special_form(&it),
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        let map: RationalMap = s.parse().unwrap();
        assert!(map.is_polynomial());
        map.numerator().clone()
    }

    fn spec(f: &str, g: &str, m: i64) -> CurveSpec {
        CurveSpec::with_unit_c(p(f), p(g), BigInt::from(m)).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn hypotheses() {
        assert!(check_hypotheses(&spec("X^3-X", "1", 5)).ok());
        let bad = check_hypotheses(&spec("X^3-X", "1", 4));
        assert!(!bad.m_large && !bad.gcd);
        assert_eq!(bad.reasons.len(), 2);
        assert!(check_hypotheses(&spec("X-1", "X+1", 3)).ok());
        assert!(CurveSpec::with_unit_c(p("X^2-1"), p("X-1"), big(5)).is_err());
        assert!(CurveSpec::with_unit_c(p("3"), p("2"), big(5)).is_err());
    }

    #[test]
    fn genus_examples() {
        let r = genus(&spec("X^3-X", "1", 5)).unwrap();
        assert_eq!((r.nu, r.case, r.genus.clone()), (3, DegreeCase::Unequal, big(4)));
        assert_eq!(superelliptic_genus(3, &big(5)).unwrap(), big(4));
        let r = genus(&spec("X-1", "X+1", 3)).unwrap();
        assert_eq!((r.nu, r.case, r.genus.clone()), (2, DegreeCase::Equal, big(0)));
        let r = genus(&spec("X^2-X", "1", 5)).unwrap();
        assert_eq!((r.nu, r.genus.clone()), (2, big(2)));
        assert!(matches!(genus(&spec("X^3-X", "1", 4)), Err(Error::Precondition(_))));
        let j = serde_json::to_value(genus(&spec("X^3-X", "1", 5)).unwrap()).unwrap();
        assert_eq!(j["genus"], 4);
        assert_eq!(j["case"], "dF≠dG");
        assert_eq!(j["hypotheses"]["m_large"], true);
    }

    #[test]
    fn superelliptic_values() {
        assert_eq!(superelliptic_genus(3, &big(9)).unwrap(), big(7));
        assert_eq!(superelliptic_genus(4, &big(4)).unwrap(), big(3));
        assert_eq!(superelliptic_genus(2, &big(8)).unwrap(), big(3));
        assert!(superelliptic_genus_of(&p("X^2"), &big(5)).is_err());
        assert_eq!(superelliptic_genus_of(&p("X^3-X"), &big(9)).unwrap(), big(7));
    }

    #[test]
    fn riemann_hurwitz_examples() {
        let pt = |s: &str| Locus::Roots(p(s));
        let ones = |v: Vec<Locus>| v.into_iter().map(|over| Fiber { over, size: big(1) }).collect::<Vec<_>>();
        let fibers = ones(vec![pt("X"), pt("X-1"), pt("X+1"), Locus::Infinity]);
        assert_eq!(riemann_hurwitz_genus(&big(5), &fibers).unwrap(), big(4));
        assert!(matches!(riemann_hurwitz_genus(&big(5), &[]), Err(Error::Integrity(_))));
        assert_eq!(riemann_hurwitz_genus(&big(1), &[]).unwrap(), big(0));
        let fibers = ones(vec![pt("X"), pt("X-1"), Locus::Infinity]);
        assert_eq!(riemann_hurwitz_genus(&big(5), &fibers).unwrap(), big(2));
        // a conjugate pair counts twice: y^3 = x^2 + 1 has genus 1
        let fibers = ones(vec![pt("X^2+1"), Locus::Infinity]);
        assert_eq!(riemann_hurwitz_genus(&big(3), &fibers).unwrap(), big(1));
        assert_eq!(superelliptic_genus(2, &big(3)).unwrap(), big(1));
    }

    /// Exact test of `[x:y:z]` on the closure and of the gradient there.
    fn closure_oracle(s: &CurveSpec, pt: [Rational; 3]) -> (bool, bool) {
        let m = s.m.to_usize().unwrap();
        let (df, dg) = (s.f.deg(), s.g.deg());
        let big_m = m + dg - df;
        let hom = |q: &Poly, deg: usize, x: &Rational, z: &Rational| -> Rational {
            (0..=deg).map(|i| q.coeff(i) * num_traits::pow(x.clone(), i) * num_traits::pow(z.clone(), deg - i)).sum()
        };
        let eval = |x: &Rational, y: &Rational, z: &Rational| {
            hom(&s.f, df, x, z) * num_traits::pow(z.clone(), big_m)
                - &s.c * hom(&s.g, dg, x, z) * num_traits::pow(y.clone(), m)
        };
        let [x, y, z] = pt;
        let on = eval(&x, &y, &z).is_zero();
        // partial derivatives by exact difference quotients of a polynomial:
        // use the coefficient of t in H(P + t e_i), extracted with two evaluations
        let deriv = |i: usize| {
            let shift = |t: i64| {
                let mut v = [x.clone(), y.clone(), z.clone()];
                v[i] += Rational::from_integer(t.into());
                eval(&v[0], &v[1], &v[2])
            };
            // H is a polynomial in t of degree at most m + dg; interpolate its linear coefficient
            let deg = m + dg + df + 1;
            let pts: Vec<Rational> = (0..=deg as i64).map(|t| Rational::from_integer(t.into())).collect();
            let vals: Vec<Rational> = (0..=deg as i64).map(shift).collect();
            linear_coefficient(&pts, &vals)
        };
        let singular = on && (0..3).all(|i| deriv(i).is_zero());
        (on, singular)
    }

    fn linear_coefficient(xs: &[Rational], ys: &[Rational]) -> Rational {
        // Lagrange interpolation, derivative at 0
        let n = xs.len();
        let mut total = Rational::zero();
        for i in 0..n {
            let mut basis = Poly::constant(ys[i].clone());
            for j in 0..n {
                if i != j {
                    let lin = Poly::from_coeffs(vec![-xs[j].clone(), Rational::one()]);
                    basis = &basis * &lin.scale(&(Rational::one() / (&xs[i] - &xs[j])));
                }
            }
            total += basis.coeff(1);
        }
        total
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn singular_point_examples() {
        let s = spec("(X-1)^2(X-2)", "X+3", 5);
        let pts: Vec<String> = singular_points(&s).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(pts, ["[1,0,0]", "[1,0,1]"]);
        // G = 1: [0,1,0] does not even lie on the closure, since there
        // c G(0,0) Y^m = c != 0 while the left side vanishes
        let s = spec("X^3-X", "1", 5);
        let pts: Vec<String> = singular_points(&s).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(pts, ["[1,0,0]"]);
        assert_eq!(closure_oracle(&s, [q(0), q(1), q(0)]), (false, false));
        let s = spec("X^2", "1", 5);
        let pts: Vec<String> = singular_points(&s).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(pts, ["[1,0,0]", "[0,0,1]"]);
        let s = spec("X", "X^2+1", 5);
        let pts: Vec<String> = singular_points(&s).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(pts, ["[1,0,0]", "[0,1,0]"]);
        assert!(singular_points(&spec("X^3-X", "1", 4)).is_err());
    }

    #[test]
    fn singular_points_match_gradient_oracle() {
        let cases = [
            ("(X-1)^2(X-2)", "X+3", 5),
            ("X^3-X", "1", 5),
            ("X^2", "X-1", 5),
            ("X^2-3", "X^2+X+1", 5),
            ("X(X+1)^3", "(X-2)^2", 7),
            ("X-2", "X^3", 5),
        ];
        for (f, g, m) in cases {
            let s = spec(f, g, m);
            let listed: Vec<String> = singular_points(&s).unwrap().iter().map(|p| p.to_string()).collect();
            let mut found = Vec::new();
            if closure_oracle(&s, [q(1), q(0), q(0)]).1 {
                found.push("[1,0,0]".to_string());
            }
            for r in -4..=4 {
                if closure_oracle(&s, [q(r), q(0), q(1)]).1 {
                    found.push(format!("[{r},0,1]"));
                }
            }
            if closure_oracle(&s, [q(0), q(1), q(0)]).1 {
                found.push("[0,1,0]".to_string());
            }
            assert_eq!(listed, found, "{f} = ({g}) Y^{m}");
        }
    }

    #[test]
    fn dependence_curve_examples() {
        let r = classify_dependence_curve(&"3X^2".parse().unwrap(), 2).unwrap();
        assert_eq!((r.case, r.row), (ZeroCase::C, Some(TableRow::C1)));
        assert!(r.genus.is_zero());
        let r = classify_dependence_curve(&"5X^2/(X-1)".parse().unwrap(), 1).unwrap();
        assert_eq!((r.case, r.row), (ZeroCase::C, Some(TableRow::C2)));
        assert_eq!(r.row.unwrap().conclusion(), "f^(n)(X) = aX^(d^n)/(X-b)^(d^n-1)");
        let r = classify_dependence_curve(&"X^2+1".parse().unwrap(), 1).unwrap();
        assert_eq!((r.case, r.nu, r.row), (ZeroCase::A, 2, None));
        assert_eq!(r.curve.m(), &big(7));
        assert_eq!(r.ratio, big(2));
        assert_eq!(r.genus, big(6));
        let r = classify_dependence_curve(&"X(X-2)".parse().unwrap(), 1).unwrap();
        assert_eq!((r.case, r.row), (ZeroCase::B, Some(TableRow::B1)));
        let r = classify_dependence_curve(&"X(X-2)/(X+1)".parse().unwrap(), 1).unwrap();
        assert_eq!((r.case, r.row), (ZeroCase::B, Some(TableRow::B2)));
        let r = classify_dependence_curve(&"2/X^2".parse().unwrap(), 1).unwrap();
        assert!(r.note.is_some());
        assert!(r.genus.is_zero());
        assert!(matches!(
            classify_dependence_curve(&"X^2+1".parse().unwrap(), 13),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn displayed_ratio_matches_when_no_pole_at_zero() {
        for s in ["X^2+1", "X^3-2X+1", "(X^2+1)/(X-2)", "X^2-X", "X^3/(X^2+1)", "(X-1)^2/X^2", "X^2 + X/3"] {
            let f: RationalMap = s.parse().unwrap();
            for n in 1..=2 {
                let r = classify_dependence_curve(&f, n).unwrap();
                if r.note.is_some() {
                    continue;
                }
                let (dfn, dgn) = (r.f_n.deg(), r.g_n.deg());
                let nu = r.nu as i64;
                let expect = match r.case {
                    ZeroCase::A => nu - i64::from(dfn == dgn + 1),
                    ZeroCase::B => nu - 1 - i64::from(dfn == dgn),
                    ZeroCase::C => nu - i64::from(dfn + r.e - 1 == dgn),
                };
                assert_eq!(r.ratio, big(expect), "{s} n={n}");
            }
        }
    }

    fn random_spec() -> impl Strategy<Value = CurveSpec> {
        let poly = |max: usize| {
            prop::collection::vec((-3i64..=3, 1usize..=3), 0..=max).prop_map(|roots| {
                roots.iter().fold(Poly::one(), |acc, &(r, e)| {
                    &acc * &Poly::linear_power(Rational::one(), &Rational::from_integer(r.into()), e)
                })
            })
        };
        (poly(3), poly(3), prop::sample::select(vec![5i64, 7, 11, 13, 17, 19, 23]), -3i64..=3)
            .prop_filter_map("valid spec", |(f, g, m, c)| {
                if c == 0 || f.deg() > 6 || g.deg() > 6 {
                    return None;
                }
                let s = CurveSpec::new(f, g, Rational::from_integer(c.into()), BigInt::from(m)).ok()?;
                check_hypotheses(&s).ok().then_some(s)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn formula_matches_riemann_hurwitz(s in random_spec()) {
            let g = genus(&s).unwrap().genus;
            prop_assert_eq!(&g, &riemann_hurwitz_genus(s.m(), &cover_fibers(&s)).unwrap());
            prop_assert!(!g.is_negative());
            let twice: BigInt = &g * 2;
            prop_assert!((twice % (s.m() - BigInt::one())).is_zero());
            if s.g().is_constant() && s.f().gcd(&s.f().derivative()).is_constant() {
                prop_assert_eq!(&g, &superelliptic_genus_of(s.f(), s.m()).unwrap());
            }
        }
    }
}
