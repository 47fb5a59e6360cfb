//! Browser demo: three operations returning JSON strings. The plain
//! functions are what the page calls through the `#[wasm_bindgen]` shims, and
//! they run natively for tests.

use serde_json::json;
use wasm_bindgen::prelude::*;

use orbitlab::arith::{rational_to_string, weil_height, ProjPoint};
use orbitlab::genus::{genus, CurveSpec};
use orbitlab::heights::{c1_bound, canonical_height, decide_preperiodic};
use orbitlab::ratmap::{classify_special_form, parse_rational_function, RationalMap};
use orbitlab::search::{find_e_set, SearchConfig};
use orbitlab::unit_group::UnitGroup;

/// Largest search height the page accepts; keeps the tab responsive.
pub const MAX_HEIGHT: u64 = 40;
const MAX_STEPS: usize = 12;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Orbit of a point with heights, plus the preperiodicity verdict and a
/// canonical height enclosure.
pub fn orbit_report(map: &str, point: &str, steps: usize) -> Result<String, String> {
    let f: RationalMap = map.parse().map_err(err)?;
    let p: ProjPoint = point.parse().map_err(err)?;
    let steps = steps.min(MAX_STEPS);
    let orbit: Vec<_> = f
        .orbit(&p, steps)
        .iter()
        .enumerate()
        .map(|(n, q)| {
            let h = weil_height(q);
            json!({ "n": n, "value": q, "digits": h.magnitude().to_string().len(), "h": h.approx() })
        })
        .collect();
    let mut out = json!({ "map": f, "degree": f.degree(), "orbit": orbit, "form": classify_special_form(&f) });
    if f.degree() >= 2 {
        let bound = c1_bound(&f).map_err(err)?;
        let enc = canonical_height(&f, &bound, &p, steps as u32);
        out["c1"] = json!(bound.c1.hi_f64());
        out["dynamics"] = json!(decide_preperiodic(&f, &bound, &p));
        out["canonical_height"] = json!(enc);
    }
    Ok(out.to_string())
}

/// Witnesses `f^(n+k)(alpha)^r = u f^(k)(alpha)^s` with `u` in the group.
pub fn dependence_search(map: &str, group: &str, height: u64, n_max: usize, k_max: usize) -> Result<String, String> {
    if height > MAX_HEIGHT {
        return Err(format!("height is capped at {MAX_HEIGHT} in the browser"));
    }
    let f: RationalMap = map.parse().map_err(err)?;
    let g: UnitGroup = group.parse().map_err(err)?;
    let config = SearchConfig { height, n_max, k_max, ..Default::default() };
    let r = find_e_set(&f, &g, &config).map_err(err)?;
    let rows: Vec<_> = r
        .witnesses
        .iter()
        .map(|w| json!({ "n": w.n, "k": w.k, "alpha": w.alpha, "u": rational_to_string(&w.u) }))
        .collect();
    Ok(json!({
        "witnesses": rows,
        "points": r.points,
        "preperiodic_excluded": r.preperiodic_excluded,
        "skipped_degenerate": r.skipped_degenerate,
    })
    .to_string())
}

/// Genus of `F(X) = G(X) Y^m`.
pub fn curve_genus(f: &str, g: &str, m: &str) -> Result<String, String> {
    let poly = |s: &str| {
        let (num, den) = parse_rational_function(s).map_err(err)?;
        if !den.is_constant() {
            return Err(format!("{s:?} is not a polynomial"));
        }
        Ok(num.scale(&den.coeff(0).recip()))
    };
    let m = m.trim().parse().map_err(|_| format!("bad m {m:?}"))?;
    let spec = CurveSpec::with_unit_c(poly(f)?, poly(g)?, m).map_err(err)?;
    serde_json::to_string(&genus(&spec).map_err(err)?).map_err(err)
}

#[wasm_bindgen]
pub fn orbit(map: &str, point: &str, steps: usize) -> Result<String, JsValue> {
    orbit_report(map, point, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn search(map: &str, group: &str, height: u32, n_max: u32, k_max: u32) -> Result<String, JsValue> {
    dependence_search(map, group, height.into(), n_max as usize, k_max as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = genus)]
pub fn genus_js(f: &str, g: &str, m: &str) -> Result<String, JsValue> {
    curve_genus(f, g, m).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn orbit_of_one_under_x2_plus_1() {
        let v = parse(&orbit_report("X^2+1", "1", 4).unwrap());
        let vals: Vec<&str> = v["orbit"].as_array().unwrap().iter().map(|o| o["value"].as_str().unwrap()).collect();
        assert_eq!(vals, ["1", "2", "5", "26", "677"]);
        assert_eq!(v["dynamics"]["kind"], "Wandering");
        assert!(v["canonical_height"]["lower"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn square_over_x_family() {
        let v = parse(&dependence_search("(1-X)^2/X", "2", 7, 1, 0).unwrap());
        let hits: Vec<(&str, &str)> = v["witnesses"]
            .as_array()
            .unwrap()
            .iter()
            .map(|w| (w["alpha"].as_str().unwrap(), w["u"].as_str().unwrap()))
            .collect();
        assert!(hits.contains(&("1/3", "4")));
        assert!(hits.contains(&("1/5", "16")));
        assert!(dependence_search("X^2", "2", MAX_HEIGHT + 1, 1, 0).is_err());
    }

    #[test]
    fn genus_values() {
        assert_eq!(parse(&curve_genus("X^3-X", "1", "5").unwrap())["genus"], 4);
        assert!(curve_genus("X^3-X", "1", "4").unwrap_err().contains("precondition"));
        assert!(curve_genus("1/X", "1", "5").is_err());
    }

    #[test]
    fn bad_input_is_an_error_not_a_panic() {
        assert!(orbit_report("X^^2", "1", 3).is_err());
        assert!(orbit_report("X^2", "1/0", 3).is_err());
        assert!(dependence_search("X^2", "0", 3, 1, 0).is_err());
    }
}
