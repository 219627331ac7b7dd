mod common;

use std::error::Error as StdError;
use std::time::{Duration, Instant};

use common::{alg, count_tuples, nonzero_poly, open, poly, projective_line_count, rng};
use qcqs::compare::comparison_check;
use qcqs::funscheme::{eval_points, FunctorialScheme};
use qcqs::latscheme::{
    check_local_morphism, counit, counit_inverse, default_samples, mk_affine, projective_line, punctured_plane,
    spec_morphism, LatMap, MorphismPiece, SchemeCompactOpen, SchemeMorphism,
};
use qcqs::sheaf::{
    glue, invertibility_support_basic, is_invertible, restrict, section_equal, BasicOpenSection, CoverData,
    SectionFamily,
};
use qcqs::zarlattice::{self, d, psi_f, psi_f_inv, SupportMap};
use qcqs::{make_localization, AlgebraMorphism, Field, PresentedAlgebra, DEFAULT_CAP};
use rand::Rng;

type Outcome = Result<String, Box<dyn StdError>>;

const LAW_CASES: usize = 200;
const ORDER_PAIRS: usize = 200;
const PSI_INPUTS: usize = 100;
const GLUE_PAIRS: usize = 100;
const COUNIT_ELEMENTS: usize = 50;
const INVSUP_SAMPLES: usize = 100;
const LAW_BUDGET: Duration = Duration::from_secs(60);
const COUNT_BUDGET: Duration = Duration::from_secs(30);
const SUITE_BUDGET: Duration = Duration::from_secs(300);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), Box<dyn StdError>> {
    if cond {
        Ok(())
    } else {
        Err(what().into())
    }
}

fn lattice_laws() -> Outcome {
    let a = alg("QQ[x,y]");
    let mut r = rng(1);
    let (top, bot) = (zarlattice::top(&a), zarlattice::bottom(&a));
    let eq = |u: &_, v: &_| zarlattice::eq(u, v);
    let (join, meet) = (zarlattice::join, zarlattice::meet);
    for case in 0..LAW_CASES {
        let (u, v, w) = (open(&mut r, &a, 2, 3), open(&mut r, &a, 2, 3), open(&mut r, &a, 2, 3));
        let checks = [
            ("join commutes", eq(&join(&u, &v)?, &join(&v, &u)?)?),
            ("meet commutes", eq(&meet(&u, &v)?, &meet(&v, &u)?)?),
            ("join associates", eq(&join(&join(&u, &v)?, &w)?, &join(&u, &join(&v, &w)?)?)?),
            ("meet associates", eq(&meet(&meet(&u, &v)?, &w)?, &meet(&u, &meet(&v, &w)?)?)?),
            ("absorption", eq(&join(&u, &meet(&u, &v)?)?, &u)?),
            ("dual absorption", eq(&meet(&u, &join(&u, &v)?)?, &u)?),
            ("bottom", eq(&join(&u, &bot)?, &u)? && eq(&meet(&u, &bot)?, &bot)?),
            ("top", eq(&meet(&u, &top)?, &u)? && eq(&join(&u, &top)?, &top)?),
            (
                "distributivity",
                eq(&meet(&u, &join(&v, &w)?)?, &join(&meet(&u, &v)?, &meet(&u, &w)?)?)?,
            ),
        ];
        for (law, ok) in checks {
            ensure(ok, || format!("case {case}: {law} fails for {u}, {v}, {w}"))?;
        }
        let samples = [poly(&mut r, &a, 2, 3), poly(&mut r, &a, 2, 3)];
        SupportMap::canonical(&a)
            .check_laws(&samples)
            .map_err(|law| format!("case {case}: support law {law:?}"))?;
    }
    Ok(format!("{LAW_CASES} cases"))
}

fn order_oracle() -> Outcome {
    let a = alg("QQ[x,y]");
    let mut r = rng(2);
    let mut below = 0;
    for i in 0..ORDER_PAIRS {
        let u = open(&mut r, &a, 2, 3);
        let mut v = open(&mut r, &a, 2, 3);
        if i % 2 == 0 {
            // Bias towards comparable pairs.
            v = zarlattice::join(&v, &zarlattice::meet(&u, &open(&mut r, &a, 1, 2))?)?;
            if i % 4 == 0 {
                v = zarlattice::join(&v, &u)?;
            }
        }
        let oracle = u
            .generators()
            .iter()
            .map(|g| a.radical_member(g, v.generators()))
            .collect::<qcqs::Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        let got = zarlattice::leq(&u, &v)?;
        ensure(got == oracle, || format!("leq({u}, {v}) = {got}, radical membership says {oracle}"))?;
        below += usize::from(got);
    }
    Ok(format!("{ORDER_PAIRS} pairs, {below} comparable"))
}

fn psi_roundtrips() -> Outcome {
    let mut total = 0;
    for (seed, text) in [(3, "QQ[x]"), (4, "QQ[x,y]"), (5, "GF(5)[x,y]/(x^2 + y^2 - 1)")] {
        let a = alg(text);
        let mut r = rng(seed);
        let mut done = 0;
        while done < PSI_INPUTS {
            let f = nonzero_poly(&mut r, &a, 2, 2);
            let loc = make_localization(&a, &f)?;
            if loc.algebra().is_trivial() {
                continue;
            }
            let gens: Vec<_> = (0..r.gen_range(1..=3))
                .map(|_| {
                    let g = loc.to_local(&poly(&mut r, &a, 2, 3))?;
                    Ok(if r.gen_bool(0.5) { g.mul(&loc.inverse()) } else { g })
                })
                .collect::<qcqs::Result<_>>()?;
            let u = zarlattice::support_d(loc.algebra(), &gens)?;
            let back = psi_f_inv(&loc, &psi_f(&loc, &u, DEFAULT_CAP)?)?;
            ensure(zarlattice::eq(&back, &u)?, || format!("{text}: psi_inv(psi({u})) = {back} at f = {f}"))?;
            let w = zarlattice::meet(&open(&mut r, &a, 2, 3), &d(&f))?;
            let again = psi_f(&loc, &psi_f_inv(&loc, &w)?, DEFAULT_CAP)?;
            ensure(zarlattice::eq(&again, &w)?, || format!("{text}: psi(psi_inv({w})) = {again} at f = {f}"))?;
            done += 1;
            total += 1;
        }
    }
    Ok(format!("{total} inputs in each direction"))
}

fn split_glue() -> Outcome {
    let fixtures: [(&str, &[&str]); 5] = [
        ("QQ[x]", &["x", "1 - x"]),
        ("QQ[x]", &["x^2", "1 - x", "x + 2"]),
        ("QQ[x,y]", &["x", "y", "1 - x - y"]),
        ("QQ[x,y]", &["x^2", "1 - x*y"]),
        ("QQ[x,y]", &["x + y", "x - y", "1 - x^2"]),
    ];
    let mut r = rng(6);
    for i in 0..GLUE_PAIRS {
        let (text, pieces) = fixtures[i % fixtures.len()];
        let a = alg(text);
        let cover = CoverData::parse(&a, pieces)?;
        let s = poly(&mut r, &a, 3, 4);
        let fam = SectionFamily::split(&cover, &s)?;
        let g = glue(&fam, DEFAULT_CAP)?;
        ensure(g == s, || format!("glue(split({s})) = {g} over {pieces:?}"))?;
        for (piece, sec) in cover.pieces().iter().zip(fam.sections()) {
            let back = restrict(&BasicOpenSection::global(&g)?, piece, DEFAULT_CAP)?;
            ensure(section_equal(&back, sec)?, || format!("restriction of {g} to D({piece}) differs"))?;
        }
    }
    Ok(format!("{GLUE_PAIRS} pairs"))
}

fn counit_roundtrip() -> Outcome {
    let mut r = rng(7);
    for text in ["QQ[x]/(x^3 - x)", "GF(5)[x,y]/(x*y - 1)"] {
        let a = alg(text);
        let x = mk_affine(&a);
        for _ in 0..COUNIT_ELEMENTS {
            let e = poly(&mut r, &a, 3, 4);
            let s = counit_inverse(&x, &e)?;
            let back = counit(&s)?;
            ensure(back == e, || format!("{text}: counit(counit_inverse({e})) = {back}"))?;
            ensure(counit_inverse(&x, &back)?.equals(&s)?, || format!("{text}: section of {e} differs"))?;
        }
    }
    Ok(format!("{COUNIT_ELEMENTS} elements per algebra"))
}

fn point_counts() -> Outcome {
    let start = Instant::now();
    let f2 = alg("GF(2)");
    let f3 = alg("GF(3)");
    let f5 = alg("GF(5)");
    let f3sq = alg("GF(3)xGF(3)");
    let a1 = FunctorialScheme::affine_line(Field::Rationals);
    let gm = FunctorialScheme::multiplicative_group(Field::Rationals)?;
    let p1 = FunctorialScheme::glued(&projective_line(Field::Rationals)?);
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals)?.scheme);
    let cases: [(&str, &FunctorialScheme, &PresentedAlgebra, usize); 5] = [
        ("A1(F3)", &a1, &f3, count_tuples(3, 1, |_| true)),
        ("Gm(F5)", &gm, &f5, count_tuples(5, 2, |t| t[0] * t[1] % 5 == 1)),
        ("P1(F2)", &p1, &f2, projective_line_count(2)),
        ("P1(F3)", &p1, &f3, projective_line_count(3)),
        ("A2-0(F3)", &pp, &f3, count_tuples(3, 2, |t| t != [0, 0])),
    ];
    let mut summary = Vec::new();
    for (name, x, b, oracle) in cases {
        let n = eval_points(x, b)?.len();
        ensure(n == oracle, || format!("{name}: {n} points, oracle {oracle}"))?;
        summary.push(format!("{name}={n}"));
    }
    let over_f3: [(&str, &FunctorialScheme, usize); 4] = [
        ("A1", &a1, count_tuples(3, 1, |_| true)),
        ("Gm", &gm, count_tuples(3, 2, |t| t[0] * t[1] % 3 == 1)),
        ("P1", &p1, projective_line_count(3)),
        ("A2-0", &pp, count_tuples(3, 2, |t| t != [0, 0])),
    ];
    for (name, x, oracle) in over_f3 {
        let n = eval_points(x, &f3sq)?.len();
        ensure(n == oracle * oracle, || format!("{name}(F3xF3): {n}, expected {}", oracle * oracle))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < COUNT_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{}; products square", summary.join(" ")))
}

fn punctured_plane_witness() -> Outcome {
    let a = alg("QQ[x,y]");
    let one = zarlattice::top(&a);
    let u = zarlattice::ZarElement::parse(&a, "D(x, y)")?;
    let (m1, mu) = (zarlattice::meet(&one, &u)?, zarlattice::meet(&u, &u)?);
    ensure(zarlattice::eq(&m1, &mu)?, || "D(1) and D(x,y) differ after meeting with D(x,y)".into())?;
    ensure(!zarlattice::eq(&one, &u)?, || "D(1) eq D(x,y)".into())?;
    ensure(!a.radical_member(&a.one(), u.generators())?, || "1 is in the radical of (x, y)".into())?;
    Ok("D(1) and D(x,y) identified, not eq".into())
}

fn comparison() -> Outcome {
    let tests = [alg("GF(2)"), alg("GF(3)"), alg("GF(2)xGF(2)")];
    let fixtures = [
        ("affine", mk_affine(&alg("QQ[x,y]/(x^2 + y^2 - 1)"))),
        ("P1", projective_line(Field::Rationals)?),
        ("punctured plane", punctured_plane(Field::Rationals)?.scheme),
    ];
    let mut summary = Vec::new();
    for (name, g) in fixtures {
        let report = comparison_check(&g, &tests)?;
        ensure(report.passed, || format!("{name}:\n{report}"))?;
        let counts: Vec<String> = report
            .tests
            .iter()
            .map(|t| format!("{}={}", t.lattice_count, t.functorial_count))
            .collect();
        summary.push(format!("{name} {}", counts.join(",")));
    }
    Ok(summary.join("; "))
}

fn invertibility_supremum() -> Outcome {
    let a = alg("QQ[x,y]");
    let mut r = rng(9);
    let mut invertible = 0;
    for _ in 0..INVSUP_SAMPLES {
        let f = nonzero_poly(&mut r, &a, 1, 2);
        let num = nonzero_poly(&mut r, &a, 2, 2);
        let s = BasicOpenSection::fraction(&f, &num, r.gen_range(0..=2))?;
        let h = nonzero_poly(&mut r, &a, 1, 2);
        let g = if r.gen_bool(0.5) { f.mul(&num).mul(&h) } else { f.mul(&h) };
        ensure(zarlattice::leq(&d(&g), &d(&f))?, || format!("D({g}) not below D({f})"))?;
        let sup = invertibility_support_basic(&s, DEFAULT_CAP)?;
        ensure(zarlattice::leq(&sup, &d(&f))?, || format!("support {sup} not below D({f})"))?;
        if is_invertible(&restrict(&s, &g, DEFAULT_CAP)?, DEFAULT_CAP)? {
            invertible += 1;
            ensure(zarlattice::leq(&d(&g), &sup)?, || format!("D({g}) is not below {sup}"))?;
        }
        for p in sup.generators() {
            let piece = restrict(&s, p, DEFAULT_CAP)?;
            ensure(is_invertible(&piece, DEFAULT_CAP)?, || format!("s is not invertible on D({p})"))?;
        }
    }
    Ok(format!("{INVSUP_SAMPLES} samples, {invertible} invertible restrictions"))
}

fn local_morphisms() -> Outcome {
    let maps: [(&str, &str, &[&str]); 5] = [
        ("QQ[t]", "QQ[x,y]", &["x*y"]),
        ("QQ[t]", "QQ[x]/(x^3 - x)", &["x^2"]),
        ("QQ[u,v]", "QQ[x]", &["x", "x^2"]),
        ("GF(5)[t]", "GF(5)[x,y]/(x*y - 1)", &["x + y"]),
        ("QQ[t]", "QQ[x,y]/(x^2 + y^2 - 1)", &["x"]),
    ];
    for (src, dst, images) in maps {
        let phi = AlgebraMorphism::parse(&alg(src), &alg(dst), images)?;
        let pi = spec_morphism(&phi)?;
        let w = check_local_morphism(&pi, &default_samples(pi.target())?)?;
        ensure(w.is_none(), || format!("Spec of {phi} fails: {}", w.unwrap()))?;
    }
    let x = mk_affine(&alg("QQ[x]"));
    let a = x.chart(0);
    let local = make_localization(a, &a.one())?;
    let piece = MorphismPiece {
        source_chart: 0,
        target_chart: 0,
        comorphism: AlgebraMorphism::new(a, local.algebra(), vec![local.algebra().zero()])?,
        local,
    };
    let everything = LatMap::Custom(std::sync::Arc::new(|w: &SchemeCompactOpen| Ok(w.scheme().top())));
    let broken = SchemeMorphism::with_latmap(&x, &x, vec![piece], everything)?;
    let w = check_local_morphism(&broken, &default_samples(&x)?)?;
    let w = w.ok_or("the broken morphism passes")?;
    Ok(format!("{} spec morphisms local; broken one: {w}", maps.len()))
}

fn main() {
    let suite = Instant::now();
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("lattice and support laws", lattice_laws, Some(LAW_BUDGET)),
        ("order equals radical membership", order_oracle, None),
        ("psi_f roundtrips", psi_roundtrips, None),
        ("split then glue", split_glue, None),
        ("counit isomorphism", counit_roundtrip, None),
        ("point counts", point_counts, Some(COUNT_BUDGET)),
        ("punctured plane witness", punctured_plane_witness, None),
        ("comparison", comparison, None),
        ("invertibility supremum", invertibility_supremum, None),
        ("local morphisms", local_morphisms, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run);
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(Ok(detail)) => match budget {
                Some(b) if elapsed >= b => Err(format!("{detail}; over budget {b:?}")),
                _ => Ok(detail),
            },
            Ok(Err(e)) => Err(e.to_string()),
            Err(_) => Err("panicked".to_string()),
        };
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    let total = suite.elapsed();
    if failed == 0 && total < SUITE_BUDGET {
        println!("criterion 11 PASS exact suite within budget ({total:.2?} < {SUITE_BUDGET:?})");
    } else {
        failed += 1;
        println!("criterion 11 FAIL exact suite within budget ({total:.2?}, {failed} earlier failures)");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
