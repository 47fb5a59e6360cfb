use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{parse_rational, rational_height_magnitude, rational_to_string, ProjPoint, Rational};
use crate::error::{Error, Result};
use crate::heights::{decide_preperiodic, Dynamics, StepBound};
use crate::interval::Interval;
use crate::ratmap::RationalMap;

/// `sum_i c_i prod_{j in J_i} T_j` where the `J_i` partition `{1, ..., k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMultilinearForm {
    k: usize,
    /// 1-based variable indices, each sorted.
    parts: Vec<Vec<usize>>,
    coeffs: Vec<Rational>,
}

impl SplitMultilinearForm {
    pub fn new(k: usize, parts: Vec<Vec<usize>>, coeffs: Vec<Rational>) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("a split form needs at least one variable"));
        }
        if parts.len() != coeffs.len() || parts.is_empty() {
            return Err(Error::arg("one coefficient per monomial"));
        }
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::arg("coefficients must be nonzero"));
        }
        let mut seen = vec![false; k + 1];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::arg("empty monomial"));
            }
            for &j in part {
                if j == 0 || j > k {
                    return Err(Error::arg(format!("variable T{j} outside 1..{k}")));
                }
                if seen[j] {
                    return Err(Error::arg(format!("T{j} appears twice")));
                }
                seen[j] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::arg("every variable must appear"));
        }
        let mut parts = parts;
        parts.iter_mut().for_each(|p| p.sort());
        Ok(SplitMultilinearForm { k, parts, coeffs })
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `h(F) = max h(c_i)`.
    pub fn height(&self) -> Interval {
        self.coeffs
            .iter()
            .map(|c| Interval::ln_biguint(&rational_height_magnitude(c)))
            .reduce(|a, b| a.max(&b))
            .expect("at least one monomial")
    }

    /// `F(t_1, ..., t_k)`.
    pub fn eval(&self, t: &[Rational]) -> Rational {
        assert_eq!(t.len(), self.k, "wrong number of arguments");
        self.parts
            .iter()
            .zip(&self.coeffs)
            .map(|(part, c)| part.iter().fold(c.clone(), |acc, &j| acc * &t[j - 1]))
            .sum()
    }
}

impl fmt::Display for SplitMultilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (part, c)) in self.parts.iter().zip(&self.coeffs).enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{}*", rational_to_string(&mag))?;
            }
            let vars: Vec<String> = part.iter().map(|j| format!("T{j}")).collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for SplitMultilinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses sums like `T1 - 3/2*T2*T3`; the arity is the largest index.
impl FromStr for SplitMultilinearForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::parse("empty form"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for ch in text.chars() {
            if ch == '+' || ch == '-' {
                if current.is_empty() {
                    negative ^= ch == '-';
                } else {
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = ch == '-';
                }
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(Error::parse(format!("trailing sign in {s:?}")));
        }
        terms.push((negative, current));

        let mut parts = Vec::new();
        let mut coeffs = Vec::new();
        for (negative, term) in terms {
            let mut c = Rational::one();
            let mut vars = Vec::new();
            for factor in term.split('*') {
                if let Some(idx) = factor.strip_prefix(['T', 't']) {
                    let j: usize = idx.parse().map_err(|_| Error::parse(format!("bad variable {factor:?}")))?;
                    vars.push(j);
                } else {
                    c *= parse_rational(factor)?;
                }
            }
            if vars.is_empty() {
                return Err(Error::parse(format!("constant term {term:?} in a multilinear form")));
            }
            parts.push(vars);
            coeffs.push(if negative { -c } else { c });
        }
        let k = parts.iter().flatten().copied().max().unwrap_or(0);
        SplitMultilinearForm::new(k, parts, coeffs)
    }
}

/// `(2k/d^(k-1)) h(F) + (7/3) c1 + (2/9) log 2`, an upper bound for `h(alpha)`
/// over relations of wandering points avoiding 0. Needs `d >= 3`.
pub fn thm19_height_bound(form: &SplitMultilinearForm, bound: &StepBound) -> Result<Interval> {
    let d = bound.degree;
    if d < 3 {
        return Err(Error::arg("the height bound needs degree at least 3; use the n1 bound instead"));
    }
    let k = form.arity();
    let coef = Rational::new(BigInt::from(2 * k), BigInt::from(d).pow(k as u32 - 1));
    let log2 = Interval::ln_u64(2).mul_rational(&Rational::new(2.into(), 9.into()));
    Ok(form
        .height()
        .mul_rational(&coef)
        .add(&bound.c1.mul_rational(&Rational::new(7.into(), 3.into())))
        .add(&log2))
}

/// Right side of `d^(n1) <= (d-1)/(d-2+d^(1-k)) (k c1 + k h(F) + log(k-1)) / c2`.
pub fn thm19_n1_rhs(form: &SplitMultilinearForm, bound: &StepBound, c2: &Rational) -> Result<Interval> {
    if !c2.is_positive() {
        return Err(Error::arg("c2 must be positive"));
    }
    let k = form.arity();
    if k < 2 {
        return Err(Error::arg("the n1 bound needs at least two variables"));
    }
    let d = BigInt::from(bound.degree);
    if bound.degree < 2 {
        return Err(Error::arg("degree must be at least 2"));
    }
    let dk = d.pow(k as u32 - 1);
    // (d-1)/(d-2+d^(1-k)) = (d-1) d^(k-1) / ((d-2) d^(k-1) + 1)
    let factor = Rational::new((&d - 1) * &dk, (&d - 2) * &dk + 1);
    let kk = Rational::from_integer(k.into());
    let inner = bound
        .c1
        .mul_rational(&kk)
        .add(&form.height().mul_rational(&kk))
        .add(&Interval::ln_u64(k as u64 - 1));
    Ok(inner.mul_rational(&(factor / c2)))
}

/// Largest `n1` with `d^(n1)` at most the right side (rounded up), or `None`
/// when the right side is below 1 and no relation can exist.
pub fn thm19_n1_bound(form: &SplitMultilinearForm, bound: &StepBound, c2: &Rational) -> Result<Option<u32>> {
    let rhs = thm19_n1_rhs(form, bound, c2)?.hi_rational();
    if rhs < Rational::one() {
        return Ok(None);
    }
    let d = Rational::from_integer(bound.degree.into());
    let mut n = 0u32;
    let mut power = d.clone();
    while power <= rhs {
        n += 1;
        power *= &d;
    }
    Ok(Some(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub n1_bound: Option<u32>,
    /// Largest `n1` actually enumerated.
    pub searched_up_to: Option<usize>,
    pub tuples: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

/// `0` is not in the forward orbit of the wandering point `alpha`: checked
/// exactly until `h(f^(n)(alpha)) > 2 c1`, after which
/// `hhat(f^(m)(alpha)) > c1 >= hhat(0)` for all `m >= n`.
fn orbit_avoids_zero(f: &RationalMap, bound: &StepBound, alpha: &ProjPoint) -> bool {
    if !decide_preperiodic(f, bound, &ProjPoint::zero()).is_wandering() {
        return true;
    }
    let threshold = bound.c1.mul_int(2);
    let mut p = alpha.clone();
    loop {
        if p.is_zero() {
            return false;
        }
        if threshold.certainly_lt(&Interval::ln_biguint(&p.magnitude())) {
            return true;
        }
        p = f.eval(&p);
    }
}

/// Every `n1 > ... > nk >= 0` with `F(f^(n1)(alpha), ..., f^(nk)(alpha)) = 0`
/// and `n1` at most the n1 bound (or `n_cap` when the bound does not apply
/// or is larger).
pub fn find_split_relations(
    form: &SplitMultilinearForm,
    f: &RationalMap,
    alpha: &ProjPoint,
    bound: &StepBound,
    c2: &Rational,
    n_cap: usize,
) -> Result<SplitReport> {
    let k = form.arity();
    let mut warnings = Vec::new();
    let dynamics = decide_preperiodic(f, bound, alpha);
    let guaranteed = match dynamics {
        Dynamics::Preperiodic { .. } => {
            warnings.push(format!("{alpha} is preperiodic; search truncated at n1 <= {n_cap}"));
            false
        }
        Dynamics::Wandering { .. } if !orbit_avoids_zero(f, bound, alpha) => {
            warnings.push(format!("0 is in the orbit of {alpha}; search truncated at n1 <= {n_cap}"));
            false
        }
        Dynamics::Wandering { .. } => true,
    };
    let n1_bound = if k >= 2 { thm19_n1_bound(form, bound, c2)? } else { None };
    let limit = match (guaranteed, n1_bound) {
        (true, _) if k < 2 => None,
        (true, None) => None,
        (true, Some(b)) if (b as usize) > n_cap => {
            warnings.push(format!("n1 bound {b} exceeds the cap; search truncated at n1 <= {n_cap}"));
            Some(n_cap)
        }
        (true, Some(b)) => Some(b as usize),
        (false, _) => Some(n_cap),
    };
    let Some(limit) = limit else {
        return Ok(SplitReport { n1_bound, searched_up_to: None, tuples: Vec::new(), warnings });
    };
    if limit + 1 < k {
        return Ok(SplitReport { n1_bound, searched_up_to: Some(limit), tuples: Vec::new(), warnings });
    }
    let values: Vec<Option<Rational>> = f.orbit(alpha, limit).iter().map(|p| p.to_rational()).collect();

    let mut tuples = Vec::new();
    // strictly decreasing index tuples, lexicographic in (n1, n2, ...)
    let mut idx: Vec<usize> = (0..k).rev().collect();
    loop {
        let args: Option<Vec<Rational>> = idx.iter().map(|&n| values[n].clone()).collect();
        if let Some(args) = args {
            if form.eval(&args).is_zero() {
                tuples.push(idx.clone());
            }
        }
        // next tuple: bump the last position that still has room below its left neighbour
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(SplitReport { n1_bound, searched_up_to: Some(limit), tuples, warnings });
            }
            pos -= 1;
            let cap = if pos == 0 { limit } else { idx[pos - 1] - 1 };
            if idx[pos] < cap {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = k - 1 - j;
                }
                break;
            }
        }
    }
}
