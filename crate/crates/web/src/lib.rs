//! Three operations for the browser page: lattice order, point enumeration
//! and section gluing. Each takes text and returns a JSON report; the
//! `wasm_bindgen` exports are thin wrappers over the `*_report` functions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qcqs::algebra::{OrderKind, RadicalTester};
use qcqs::funscheme::{eval_points, FunctorialScheme};
use qcqs::schema::{FamilySpec, Refuted, SchemeSpec};
use qcqs::sheaf;
use qcqs::zarlattice::ZarElement;
use qcqs::{PresentedAlgebra, DEFAULT_CAP};

/// Largest test algebra (as a number of elements) the page will enumerate.
const MAX_TEST_SIZE: usize = 256;

fn text(e: impl ToString) -> String {
    e.to_string()
}

/// `D(u) ≤ D(v)` in the Zariski lattice of `ring`, with a witness generator on failure.
pub fn leq_report(ring: &str, u: &str, v: &str) -> Result<Value, String> {
    let a = PresentedAlgebra::parse(ring).map_err(text)?;
    let u = ZarElement::parse(&a, u).map_err(|e| format!("first open: {e}"))?;
    let v = ZarElement::parse(&a, v).map_err(|e| format!("second open: {e}"))?;
    let tester = RadicalTester::new(&a, v.generators());
    let witness = u.generators().iter().find(|g| !tester.contains(g)).map(|g| g.to_string());
    Ok(json!({
        "leq": witness.is_none(),
        "witness": witness,
        "u": u.display_form(),
        "v": v.display_form(),
    }))
}

/// Points of the scheme described by `scheme_json` over each `;`-separated test algebra.
pub fn points_report(scheme_json: &str, over: &str) -> Result<Value, String> {
    let spec = SchemeSpec::from_json(scheme_json).map_err(text)?;
    let x = match spec.build(OrderKind::Grevlex).map_err(text)? {
        Ok(x) => x,
        Err(Refuted(why)) => return Err(format!("gluing data does not glue: {why}")),
    };
    let fx = FunctorialScheme::from_lattice(&x);
    let mut rows = Vec::new();
    for t in over.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let b = PresentedAlgebra::parse(t).map_err(|e| format!("`{t}`: {e}"))?;
        let size = b.staircase().map(|s| s.len()).unwrap_or(usize::MAX);
        let q = b.field().characteristic() as f64;
        if !b.is_enumerable() || q.powi(size.min(64) as i32) > MAX_TEST_SIZE as f64 {
            return Err(format!("`{t}` is too large to enumerate here (at most {MAX_TEST_SIZE} elements)"));
        }
        let pts = eval_points(&fx, &b).map_err(text)?;
        rows.push(json!({
            "test": b.to_string(),
            "count": pts.len(),
            "points": pts.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(json!({ "charts": x.charts().len(), "results": rows }))
}

/// Glues a family of sections, or reports the first pair that disagrees.
pub fn glue_report(family_json: &str) -> Result<Value, String> {
    let spec = FamilySpec::from_json(family_json).map_err(text)?;
    let fam = match spec.build(OrderKind::Grevlex).map_err(text)? {
        Ok(f) => f,
        Err(Refuted(why)) => return Ok(json!({ "glued": null, "error": why })),
    };
    if let Some(w) = sheaf::first_incompatibility(&fam, DEFAULT_CAP).map_err(text)? {
        return Ok(json!({
            "glued": null,
            "incompatibility": { "i": w.i, "j": w.j, "left": w.left, "right": w.right },
        }));
    }
    let g = sheaf::glue(&fam, DEFAULT_CAP).map_err(text)?;
    Ok(json!({
        "glued": g.to_string(),
        "certificate": fam.cover().certificate().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    }))
}

fn export(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lattice_leq(ring: &str, u: &str, v: &str) -> Result<String, JsValue> {
    export(leq_report(ring, u, v))
}

#[wasm_bindgen]
pub fn count_points(scheme_json: &str, over: &str) -> Result<String, JsValue> {
    export(points_report(scheme_json, over))
}

#[wasm_bindgen]
pub fn glue_family(family_json: &str) -> Result<String, JsValue> {
    export(glue_report(family_json))
}
