use anyhow::{bail, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};

use orbitlab::arith::{count_points, parse_rational, rational_to_string, weil_height, ProjPoint, Rational};
use orbitlab::genus::{classify_dependence_curve, genus, singular_points, CurveSpec};
use orbitlab::heights::{c1_bound, c2_bound, canonical_height, decide_preperiodic, C2Budget, StepBound};
use orbitlab::poly::Poly;
use orbitlab::ratmap::{
    classify_special_form, critical_data, exceptional_points, parse_rational_function, ramification_index,
    zero_pole_count, RationalMap,
};
use orbitlab::search::{
    find_e_set, find_f_set, find_g_set, find_pairwise_dependences, find_split_relations, thm19_height_bound,
    thm19_n1_bound, thm19_n1_rhs, zsigmondy, SearchConfig, SplitMultilinearForm,
};
use orbitlab::unit_group::{coset_reps_mod_powers, UnitGroup};
use orbitlab::Error;

use crate::{BoundCommand, Command, CurveArgs, GroupCommand, SearchCommand, SearchCommon};

/// JSON lines plus the derived constants recorded in the manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// Set when a budget cut the run short; the lines are partial.
    pub budget: Option<String>,
}

impl Outcome {
    fn push<T: Serialize>(&mut self, v: &T) {
        self.lines.push(serde_json::to_string(v).expect("JSON values serialize"));
    }

    fn with_c1(mut self, b: &StepBound) -> Self {
        self.c1 = Some(b.c1.hi_f64());
        self
    }
}

fn one<T: Serialize>(v: &T) -> Outcome {
    let mut out = Outcome::default();
    out.push(v);
    out
}

/// Integers that fit in a u64 print as JSON numbers, larger ones as strings.
fn big(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn map(s: &str) -> Result<RationalMap> {
    Ok(s.parse::<RationalMap>()?)
}

fn point(s: &str) -> Result<ProjPoint> {
    Ok(s.parse::<ProjPoint>()?)
}

fn group(s: &str) -> Result<UnitGroup> {
    Ok(s.parse::<UnitGroup>()?)
}

fn poly(s: &str) -> Result<Poly> {
    let (num, den) = parse_rational_function(s)?;
    if !den.is_constant() {
        return Err(Error::Parse(format!("{s:?} is not a polynomial")).into());
    }
    Ok(num.scale(&den.coeff(0).recip()))
}

fn primes(s: &str) -> Result<Vec<BigUint>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigUint>().map_err(|_| Error::Parse(format!("bad prime {t:?}")).into()))
        .collect()
}

fn curve(a: &CurveArgs) -> Result<CurveSpec> {
    let m: BigInt = a.m.trim().parse().map_err(|_| Error::Parse(format!("bad m {:?}", a.m)))?;
    Ok(CurveSpec::new(poly(&a.f)?, poly(&a.g)?, parse_rational(&a.c)?, m)?)
}

/// c1 of the filter the searches apply to starting points.
fn search_c1(f: &RationalMap) -> Option<f64> {
    (f.degree() >= 2).then(|| c1_bound(f).ok()).flatten().map(|b| b.c1.hi_f64())
}

/// The requested height, or the largest one whose point count fits the budget.
fn capped_height(c: &SearchCommon) -> Result<(u64, Option<String>)> {
    let Some(max) = c.max_points else { return Ok((c.height, None)) };
    let total = count_points(c.height);
    if total <= max {
        return Ok((c.height, None));
    }
    let mut h = c.height;
    while h > 1 && count_points(h) > max {
        h -= 1;
    }
    if count_points(h) > max {
        return Err(Error::Resource { reason: format!("no height fits --max-points {max}"), partial: None }.into());
    }
    let note = format!("{total} points at height {} exceed --max-points {max}; searched height {h}", c.height);
    Ok((h, Some(note)))
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    kind: &'a str,
    #[serde(flatten)]
    body: T,
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Height(a) => {
            let h = weil_height(&point(&a.point)?);
            let mag = h.magnitude();
            let shown = if mag.is_one() { "0".to_string() } else { format!("log {mag}") };
            Ok(one(&json!({ "h": shown, "magnitude": big(mag) })))
        }
        Command::CanonicalHeight(a) => {
            let f = map(&a.map)?;
            let p = point(&a.point)?;
            let bound = c1_bound(&f)?;
            let enc = canonical_height(&f, &bound, &p, a.depth);
            #[derive(Serialize)]
            struct Line<T: Serialize> {
                point: ProjPoint,
                #[serde(flatten)]
                enclosure: T,
            }
            Ok(one(&Line { point: p, enclosure: enc }).with_c1(&bound))
        }
        Command::Preperiodic(a) => {
            let f = map(&a.map)?;
            let p = point(&a.point)?;
            let bound = c1_bound(&f)?;
            let dynamics = decide_preperiodic(&f, &bound, &p);
            Ok(one(&json!({ "point": p, "dynamics": dynamics })).with_c1(&bound))
        }
        Command::Ramify(a) => {
            let f = map(&a.map)?;
            if let Some(s) = &a.point {
                let p = point(s)?;
                return Ok(one(&json!({ "point": p, "image": f.eval(&p), "e": ramification_index(&f, &p) })));
            }
            let mut out = Outcome::default();
            for c in critical_data(&f)? {
                out.push(&c);
            }
            Ok(out)
        }
        Command::Exceptional(a) => Ok(one(&json!({ "exceptional": exceptional_points(&map(&a.map)?)? }))),
        Command::Classify(a) => {
            let f = map(&a.map)?;
            Ok(one(&json!({
                "map": f,
                "degree": f.degree(),
                "form": classify_special_form(&f),
                "zeros_and_poles": zero_pole_count(&f),
            })))
        }
        Command::Reduction(a) => {
            let bad: Vec<Value> = map(&a.map)?.bad_reduction_primes()?.iter().map(big).collect();
            Ok(one(&json!({ "bad_primes": bad })))
        }
        Command::Group(g) => group_command(g),
        Command::Search(s) => search_command(s),
        Command::Zsigmondy(a) => {
            let f = map(&a.map)?;
            let r = zsigmondy(&f, &point(&a.point)?, a.nmax, a.include_m0)?;
            let mut out = Outcome::default();
            for e in &r.entries {
                out.push(&Tagged { kind: "entry", body: e });
            }
            out.push(&json!({
                "kind": "summary",
                "zsigmondy_set": r.zsigmondy_set,
                "include_m0": r.include_m0,
                "truncated": r.truncated,
                "warnings": r.warnings,
            }));
            Ok(out)
        }
        Command::Genus(a) => Ok(one(&genus(&curve(a)?)?)),
        Command::Singulars(a) => Ok(one(&json!({ "singular": singular_points(&curve(a)?)? }))),
        Command::CurveClassify(a) => Ok(one(&classify_dependence_curve(&map(&a.map)?, a.n)?)),
        Command::Bound(b) => bound_command(b),
    }
}

fn group_command(cmd: &GroupCommand) -> Result<Outcome> {
    match cmd {
        GroupCommand::Check { group: g, value } => {
            let g = group(g)?;
            let x = parse_rational(value)?;
            let w = g.in_group(&x);
            Ok(one(&json!({
                "group": g,
                "value": rational_to_string(&x),
                "member": w.is_some(),
                "exponents": w,
            })))
        }
        GroupCommand::Saturate { group: g } => {
            let g = group(g)?;
            Ok(one(&json!({ "group": g, "saturation": g.saturate() })))
        }
        GroupCommand::Cosets { primes: p, m, limit } => {
            let ps = primes(p)?;
            let reps = coset_reps_mod_powers(&ps, *m, *limit)?;
            let shown: Vec<String> = reps.iter().map(rational_to_string).collect();
            Ok(one(&json!({
                "primes": ps.iter().map(big).collect::<Vec<_>>(),
                "m": m,
                "count": shown.len(),
                "reps": shown,
            })))
        }
    }
}

fn search_command(cmd: &SearchCommand) -> Result<Outcome> {
    let common = match cmd {
        SearchCommand::G(c) => c,
        SearchCommand::F { common, .. } | SearchCommand::E { common, .. } | SearchCommand::Pairwise { common, .. } => {
            common
        }
    };
    let f = map(&common.map)?;
    let g = group(&common.group)?;
    let (height, budget) = capped_height(common)?;
    let mut out = Outcome { budget, c1: search_c1(&f), ..Default::default() };
    match cmd {
        SearchCommand::G(_) => {
            out.c1 = None;
            let hits = find_g_set(&f, &g, height)?;
            for h in &hits {
                out.push(&Tagged { kind: "G-hit", body: h });
            }
            out.push(&json!({ "kind": "summary", "height": height, "points": count_points(height), "hits": hits.len() }));
        }
        SearchCommand::F { nmin, nmax, .. } => {
            if nmin > nmax {
                bail!(Error::Argument(format!("--nmin {nmin} exceeds --nmax {nmax}")));
            }
            let hits = find_f_set(&f, &g, height, *nmin..=*nmax)?;
            for h in &hits {
                out.push(&Tagged { kind: "F-hit", body: h });
            }
            out.push(&json!({ "kind": "summary", "height": height, "points": count_points(height), "hits": hits.len() }));
        }
        SearchCommand::E { nmax, kmax, rmin, rmax, smin, smax, include_preperiodic, s_units, .. } => {
            let config = SearchConfig {
                height,
                n_max: *nmax,
                k_max: *kmax,
                r_range: *rmin..=*rmax,
                s_range: *smin..=*smax,
                wandering_only: !include_preperiodic,
                exact_group: !s_units,
            };
            if *include_preperiodic {
                out.c1 = None;
            }
            let r = find_e_set(&f, &g, &config)?;
            for w in &r.witnesses {
                out.push(w);
            }
            out.push(&json!({
                "kind": "summary",
                "height": height,
                "points": r.points,
                "witnesses": r.witnesses.len(),
                "preperiodic_excluded": r.preperiodic_excluded,
                "skipped_degenerate": r.skipped_degenerate,
            }));
        }
        SearchCommand::Pairwise { nmax, .. } => {
            let r = find_pairwise_dependences(&f, &g, height, *nmax)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            for h in &r.hits {
                out.push(&Tagged { kind: "pair", body: h });
            }
            out.push(&json!({
                "kind": "summary",
                "height": height,
                "points": r.points,
                "hits": r.hits.len(),
                "hypotheses": r.hypotheses,
                "warnings": r.warnings,
                "preperiodic_excluded": r.preperiodic_excluded,
                "skipped_degenerate": r.skipped_degenerate,
            }));
        }
    }
    Ok(out)
}

fn bound_command(cmd: &BoundCommand) -> Result<Outcome> {
    match cmd {
        BoundCommand::Thm19 { form, map: m } => {
            let form: SplitMultilinearForm = form.parse()?;
            let f = map(m)?;
            let bound = c1_bound(&f)?;
            let hb = thm19_height_bound(&form, &bound)?;
            Ok(one(&json!({ "form": form, "height_bound": hb.hi_f64() })).with_c1(&bound))
        }
        BoundCommand::N1 { form, map: m, c2, point: p, cap } => {
            let form: SplitMultilinearForm = form.parse()?;
            let f = map(m)?;
            let bound = c1_bound(&f)?;
            let c2: Rational = match c2 {
                Some(s) => parse_rational(s)?,
                None => c2_bound(&f, &bound, C2Budget::default())?.value,
            };
            let rhs = thm19_n1_rhs(&form, &bound, &c2)?;
            let n1 = thm19_n1_bound(&form, &bound, &c2)?;
            let mut out = Outcome::default().with_c1(&bound);
            out.c2 = c2.to_f64();
            out.push(&json!({
                "form": form,
                "c2": rational_to_string(&c2),
                "rhs": rhs.hi_f64(),
                "n1_bound": n1,
            }));
            if let Some(p) = p {
                let r = find_split_relations(&form, &f, &point(p)?, &bound, &c2, *cap)?;
                out.push(&Tagged { kind: "relations", body: &r });
            }
            Ok(out)
        }
    }
}
