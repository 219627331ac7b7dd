use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use serde_json::{json, Value};

use qcqs::compare::{comparison_check, functor_of_points};
use qcqs::funscheme::{check_locality, eval_points, FunctorialScheme};
use qcqs::latscheme::{invertibility_support_scheme, restrict_scheme, unit_eta, GlobalSection, LatticeScheme};
use qcqs::sheaf::{self, CoverData};
use qcqs::schema::{parse_open, FamilySpec, Refuted, SchemeSpec};
use qcqs::zarlattice::{self, ZarElement};
use qcqs::{AlgebraElement, PresentedAlgebra};

use crate::Options;

/// A finished command: `holds` is false for a mathematical refutation.
pub struct Outcome {
    pub holds: bool,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn new(holds: bool, text: String, json: Value) -> Outcome {
        Outcome { holds, text, json }
    }
}

#[derive(Subcommand)]
pub enum IdealOp {
    /// Is `f` in the ideal? Prints cofactors on success.
    Member { f: String, gens: Vec<String> },
    /// Is `f` in the radical of the ideal?
    Radical { f: String, gens: Vec<String> },
    /// Reduced Groebner basis with cofactors in the generators.
    Groebner { gens: Vec<String> },
}

#[derive(Subcommand)]
pub enum LatticeOp {
    /// Raw generators and display-normal form.
    Show { u: String },
    /// `u <= v`, with a generator of `u` outside the radical of `v` when false.
    Leq { u: String, v: String },
    /// Equality in the lattice (both inclusions).
    Eq { u: String, v: String },
    Join { u: String, v: String },
    Meet { u: String, v: String },
}

#[derive(Subcommand)]
pub enum SchemeOp {
    /// Check transitions, inverses and the cocycle condition.
    Validate { scheme: String },
    /// Check that chart values (one per chart) glue to a global section.
    Sections { scheme: String, values: Vec<String> },
    /// `eta*(D(s_1, ..))` for global sections written `v_0; v_1; ..`.
    Eta { scheme: String, sections: Vec<String> },
    /// Gluing data of the restriction to an open (one `D(...)` per chart).
    Restrict { scheme: String, open: Vec<String> },
}

fn ring_arg(o: &Options) -> Result<PresentedAlgebra> {
    let Some(text) = &o.ring else {
        bail!("--ring is required for this command");
    };
    PresentedAlgebra::parse_with_order(text, o.order.kind()).with_context(|| format!("--ring `{text}`"))
}

fn elements(a: &PresentedAlgebra, texts: &[String], what: &str) -> Result<Vec<AlgebraElement>> {
    texts
        .iter()
        .enumerate()
        .map(|(k, t)| a.parse_element(t).with_context(|| format!("{what}[{k}] `{t}`")))
        .collect()
}

fn zar(a: &PresentedAlgebra, text: &str) -> Result<ZarElement> {
    ZarElement::parse(a, text).with_context(|| format!("`{text}`"))
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn combination(cofactors: &[AlgebraElement], gens: &[AlgebraElement]) -> String {
    let terms: Vec<String> = cofactors
        .iter()
        .zip(gens)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, g)| format!("({c})*({g})"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn test_algebras(o: &Options) -> Result<Vec<PresentedAlgebra>> {
    if o.over.is_empty() {
        bail!("--over is required, e.g. --over 'GF(2);GF(3)'");
    }
    o.over
        .iter()
        .map(|t| PresentedAlgebra::parse(t.trim()).with_context(|| format!("--over `{t}`")))
        .collect()
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))
}

fn scheme_spec(path: &str) -> Result<SchemeSpec> {
    SchemeSpec::from_json(&read(path)?).with_context(|| path.to_string())
}

fn family_spec(path: &str) -> Result<FamilySpec> {
    FamilySpec::from_json(&read(path)?).with_context(|| path.to_string())
}

fn load_scheme(o: &Options, path: &str) -> Result<LatticeScheme> {
    match scheme_spec(path)?.build(o.order.kind()).with_context(|| path.to_string())? {
        Ok(x) => Ok(x),
        Err(Refuted(why)) => bail!("{path}: not valid gluing data: {why}"),
    }
}

pub fn ring(o: &Options, text: &str, elems: &[String]) -> Result<Outcome> {
    let a = PresentedAlgebra::parse_with_order(text, o.order.kind()).with_context(|| format!("ring `{text}`"))?;
    let gb = strings(a.groebner());
    let dim = a.staircase().map(|s| s.len());
    let nfs = elements(&a, elems, "elements")?;
    let mut t = String::new();
    writeln!(t, "ring: {a}")?;
    writeln!(t, "groebner basis: [{}]", gb.join(", "))?;
    writeln!(t, "trivial: {}", a.is_trivial())?;
    match dim {
        Some(d) => writeln!(t, "dimension over {}: {d}", a.field())?,
        None => writeln!(t, "dimension over {}: infinite", a.field())?,
    }
    for (src, nf) in elems.iter().zip(&nfs) {
        writeln!(t, "nf({src}) = {nf}")?;
    }
    let json = json!({
        "command": "ring",
        "ring": a.to_string(),
        "groebner_basis": gb,
        "trivial": a.is_trivial(),
        "dimension": dim,
        "normal_forms": elems.iter().zip(&nfs).map(|(s, n)| json!({"input": s, "normal_form": n.to_string()})).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(true, t, json))
}

pub fn ideal(o: &Options, op: IdealOp) -> Result<Outcome> {
    let a = ring_arg(o)?;
    match op {
        IdealOp::Member { f, gens } => {
            let fe = a.parse_element(&f).with_context(|| format!("`{f}`"))?;
            let g = elements(&a, &gens, "gens")?;
            let m = a.ideal_member(&fe, &g)?;
            let text = match &m.cofactors {
                Some(c) => format!("member: true\ncertificate: {f} = {}", combination(c, &g)),
                None => format!("member: false\nnormal form: {}", nf_modulo(&a, &fe, &g)?),
            };
            let json = json!({
                "command": "ideal member",
                "member": m.member,
                "cofactors": m.cofactors.as_ref().map(|c| strings(c)),
            });
            Ok(Outcome::new(m.member, text, json))
        }
        IdealOp::Radical { f, gens } => {
            let fe = a.parse_element(&f).with_context(|| format!("`{f}`"))?;
            let g = elements(&a, &gens, "gens")?;
            let r = a.radical_member(&fe, &g)?;
            let json = json!({"command": "ideal radical", "radical_member": r});
            Ok(Outcome::new(r, format!("radical member: {r}"), json))
        }
        IdealOp::Groebner { gens } => {
            let g = elements(&a, &gens, "gens")?;
            let mut all: Vec<_> = g.iter().map(|e| e.rep().clone()).collect();
            all.extend(a.groebner().iter().cloned());
            let gb = qcqs::algebra::groebner::compute(&all, a.ring(), true);
            let cof = gb.cofactors.unwrap_or_default();
            let mut t = String::new();
            let mut rows = Vec::new();
            for (b, c) in gb.basis.iter().zip(&cof) {
                let c: Vec<AlgebraElement> = c[..g.len()].iter().map(|p| a.normal_form(p)).collect::<qcqs::Result<_>>()?;
                writeln!(t, "{b} = {}", combination(&c, &g))?;
                rows.push(json!({"element": b.to_string(), "cofactors": strings(&c)}));
            }
            if gb.basis.is_empty() {
                writeln!(t, "zero ideal")?;
            }
            let json = json!({"command": "ideal groebner", "basis": rows});
            Ok(Outcome::new(true, t, json))
        }
    }
}

/// Normal form of `f` modulo `gens` and the relations.
fn nf_modulo(a: &PresentedAlgebra, f: &AlgebraElement, gens: &[AlgebraElement]) -> Result<String> {
    let q = a.quotient(gens)?;
    Ok(q.transfer(f)?.to_string())
}

pub fn lattice(o: &Options, op: LatticeOp) -> Result<Outcome> {
    let a = ring_arg(o)?;
    let forms = |u: &ZarElement| json!({"generators": u.to_string(), "display": u.display_form()});
    match op {
        LatticeOp::Show { u } => {
            let u = zar(&a, &u)?;
            let text = format!("generators: {u}\ndisplay: {}", u.display_form());
            Ok(Outcome::new(true, text, json!({"command": "lattice show", "element": forms(&u)})))
        }
        LatticeOp::Leq { u, v } => {
            let (u, v) = (zar(&a, &u)?, zar(&a, &v)?);
            let witness = leq_witness(&a, &u, &v)?;
            let holds = witness.is_none();
            let mut text = format!("{holds}");
            if let Some(g) = &witness {
                write!(text, "\nwitness: {g} is not in the radical of {v}")?;
            }
            let json = json!({"command": "lattice leq", "leq": holds, "witness": witness});
            Ok(Outcome::new(holds, text, json))
        }
        LatticeOp::Eq { u, v } => {
            let (u, v) = (zar(&a, &u)?, zar(&a, &v)?);
            let down = leq_witness(&a, &u, &v)?;
            let up = leq_witness(&a, &v, &u)?;
            let holds = down.is_none() && up.is_none();
            let mut text = format!("{holds}");
            if let Some(g) = &down {
                write!(text, "\nwitness: {g} is not in the radical of {v}")?;
            }
            if let Some(g) = &up {
                write!(text, "\nwitness: {g} is not in the radical of {u}")?;
            }
            let json = json!({"command": "lattice eq", "eq": holds, "witnesses": [down, up]});
            Ok(Outcome::new(holds, text, json))
        }
        LatticeOp::Join { u, v } => {
            let w = zarlattice::join(&zar(&a, &u)?, &zar(&a, &v)?)?;
            let text = format!("generators: {w}\ndisplay: {}", w.display_form());
            Ok(Outcome::new(true, text, json!({"command": "lattice join", "result": forms(&w)})))
        }
        LatticeOp::Meet { u, v } => {
            let w = zarlattice::meet(&zar(&a, &u)?, &zar(&a, &v)?)?;
            let text = format!("generators: {w}\ndisplay: {}", w.display_form());
            Ok(Outcome::new(true, text, json!({"command": "lattice meet", "result": forms(&w)})))
        }
    }
}

/// The first generator of `u` outside `√v`, if any.
fn leq_witness(a: &PresentedAlgebra, u: &ZarElement, v: &ZarElement) -> Result<Option<String>> {
    let tester = qcqs::algebra::RadicalTester::new(a, v.generators());
    Ok(u.generators().iter().find(|g| !tester.contains(g)).map(|g| g.to_string()))
}

pub fn glue(o: &Options, path: &str) -> Result<Outcome> {
    let fam = match family_spec(path)?.build(o.order.kind()).with_context(|| path.to_string())? {
        Ok(f) => f,
        Err(Refuted(why)) => {
            let json = json!({"command": "glue", "glued": null, "error": why});
            return Ok(Outcome::new(false, format!("not a cover: {why}"), json));
        }
    };
    let cover = fam.cover();
    let cert = format!("1 = {}", combination(cover.certificate(), cover.pieces()));
    if let Some(w) = sheaf::first_incompatibility(&fam, o.cap)? {
        let (fi, fj) = (&cover.pieces()[w.i], &cover.pieces()[w.j]);
        let text = format!(
            "incompatible: pieces {} and {} differ on D(({fi})*({fj})): {} vs {}",
            w.i, w.j, w.left, w.right
        );
        let json = json!({
            "command": "glue",
            "glued": null,
            "incompatibility": {"i": w.i, "j": w.j, "left": w.left, "right": w.right},
        });
        return Ok(Outcome::new(false, text, json));
    }
    let g = sheaf::glue(&fam, o.cap)?;
    let text = format!("glued: {g}\ncover certificate: {cert}");
    let json = json!({
        "command": "glue",
        "glued": g.to_string(),
        "cover_certificate": strings(cover.certificate()),
    });
    Ok(Outcome::new(true, text, json))
}

pub fn scheme(o: &Options, op: SchemeOp) -> Result<Outcome> {
    match op {
        SchemeOp::Validate { scheme } => {
            let x = match scheme_spec(&scheme)?.build(o.order.kind()).with_context(|| scheme.clone())? {
                Ok(x) => x,
                Err(Refuted(why)) => {
                    let json = json!({"command": "scheme validate", "valid": false, "error": why});
                    return Ok(Outcome::new(false, format!("invalid: {why}"), json));
                }
            };
            let pieces: usize = x.overlaps().iter().map(|ov| ov.pieces.len()).sum();
            let mut t = format!("valid: {} chart(s), {pieces} overlap piece(s)\n", x.charts().len());
            for (i, c) in x.charts().iter().enumerate() {
                writeln!(t, "chart {i}: {c}")?;
            }
            let json = json!({
                "command": "scheme validate",
                "valid": true,
                "charts": strings(x.charts()),
                "overlap_pieces": pieces,
            });
            Ok(Outcome::new(true, t, json))
        }
        SchemeOp::Sections { scheme, values } => {
            let x = load_scheme(o, &scheme)?;
            if values.len() != x.charts().len() {
                bail!("expected {} chart values, found {}", x.charts().len(), values.len());
            }
            let v: Vec<&str> = values.iter().map(String::as_str).collect();
            let s = GlobalSection::parse_chart_values(&x, &v)?;
            if let Some(c) = s.first_conflict()? {
                let text = format!(
                    "not a section: charts {} and {} disagree on their overlap: {} vs {}",
                    c.first, c.second, c.left, c.right
                );
                let json = json!({
                    "command": "scheme sections",
                    "section": false,
                    "conflict": {"first": c.first, "second": c.second, "left": c.left, "right": c.right},
                });
                return Ok(Outcome::new(false, text, json));
            }
            let support = invertibility_support_scheme(&s)?;
            let unit = support.is_top()?;
            let text = format!("section: {s}\ninvertible on: {support}\nunit: {unit}");
            let json = json!({
                "command": "scheme sections",
                "section": true,
                "value": s.to_string(),
                "invertible_on": support.to_string(),
                "unit": unit,
            });
            Ok(Outcome::new(true, text, json))
        }
        SchemeOp::Eta { scheme, sections } => {
            let x = load_scheme(o, &scheme)?;
            let mut gens = Vec::new();
            for (k, s) in sections.iter().enumerate() {
                let v: Vec<&str> = s.split(';').map(str::trim).collect();
                if v.len() != x.charts().len() {
                    bail!("sections[{k}]: expected {} chart values separated by `;`", x.charts().len());
                }
                let g = GlobalSection::parse_chart_values(&x, &v).with_context(|| format!("sections[{k}]"))?;
                if let Some(c) = g.first_conflict()? {
                    bail!("sections[{k}]: charts {} and {} disagree ({} vs {})", c.first, c.second, c.left, c.right);
                }
                gens.push(g);
            }
            let image = unit_eta(&x).eta_star(&gens)?;
            let top = image.is_top()?;
            let text = format!("eta*: {image}\ntop: {top}");
            let json = json!({"command": "scheme eta", "image": image.to_string(), "top": top});
            Ok(Outcome::new(true, text, json))
        }
        SchemeOp::Restrict { scheme, open } => {
            let x = load_scheme(o, &scheme)?;
            let u = parse_open(&x, &open, "open").context("restrict")?;
            let r = restrict_scheme(&x, &u)?;
            let spec = SchemeSpec::from_scheme(&r.scheme)?;
            let text = serde_json::to_string_pretty(&spec)?;
            let json = json!({"command": "scheme restrict", "scheme": spec});
            Ok(Outcome::new(true, text, json))
        }
    }
}

pub fn points(o: &Options, path: &str) -> Result<Outcome> {
    let x = FunctorialScheme::from_lattice(&load_scheme(o, path)?);
    let mut t = String::new();
    let mut rows = Vec::new();
    for b in test_algebras(o)? {
        let pts = eval_points(&x, &b)?;
        writeln!(t, "{b}: {} point(s)", pts.len())?;
        for p in &pts {
            writeln!(t, "  {p}")?;
        }
        rows.push(json!({"test": b.to_string(), "count": pts.len(), "points": strings(&pts)}));
    }
    Ok(Outcome::new(true, t, json!({"command": "points", "results": rows})))
}

pub fn cover_check(o: &Options, texts: &[String]) -> Result<Outcome> {
    let a = ring_arg(o)?;
    let pieces = elements(&a, texts, "elements")?;
    match CoverData::new(&a, pieces.clone()) {
        Ok(c) => {
            let verified = c.verify();
            let text = format!(
                "cover: true\ncertificate: 1 = {}\nverified: {verified}",
                combination(c.certificate(), &pieces)
            );
            let json = json!({
                "command": "cover-check",
                "cover": true,
                "certificate": strings(c.certificate()),
                "verified": verified,
            });
            Ok(Outcome::new(verified, text, json))
        }
        Err(qcqs::Error::NotACover(_)) => {
            let text = format!("cover: false\n1 is not in the ideal; normal form of 1: {}", nf_modulo(&a, &a.one(), &pieces)?);
            Ok(Outcome::new(false, text, json!({"command": "cover-check", "cover": false})))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn locality_check(o: &Options, path: &str, cover: &[String]) -> Result<Outcome> {
    let x = load_scheme(o, path)?;
    let h = functor_of_points(&x);
    let mut t = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for b in test_algebras(o)? {
        let pieces = if cover.is_empty() {
            b.primitive_idempotents()?
        } else {
            elements(&b, cover, "cover")?
        };
        let c = CoverData::new(&b, pieces).with_context(|| format!("cover of {b}"))?;
        let r = check_locality(&h, &b, &c)?;
        all &= r.holds();
        writeln!(
            t,
            "{b} on [{}]: {} global point(s), {} compatible famil(ies), injective {}, exact {}",
            strings(c.pieces()).join(", "),
            r.global_points,
            r.compatible_families,
            r.injective,
            r.exact
        )?;
        rows.push(json!({
            "test": b.to_string(),
            "cover": strings(c.pieces()),
            "global_points": r.global_points,
            "compatible_families": r.compatible_families,
            "injective": r.injective,
            "exact": r.exact,
        }));
    }
    writeln!(t, "{}", if all { "local" } else { "not local" })?;
    Ok(Outcome::new(all, t, json!({"command": "locality-check", "local": all, "results": rows})))
}

pub fn compare(o: &Options, path: &str) -> Result<Outcome> {
    let x = load_scheme(o, path)?;
    let report = comparison_check(&x, &test_algebras(o)?)?;
    let json = json!({"command": "compare", "report": serde_json::to_value(&report)?});
    Ok(Outcome::new(report.passed, report.to_string(), json))
}
