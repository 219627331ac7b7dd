use super::*;
use crate::algebra::{Field, PresentedAlgebra};
use crate::latscheme::{projective_line, punctured_plane};

fn alg(s: &str) -> PresentedAlgebra {
    PresentedAlgebra::parse(s).unwrap()
}

/// Points of P^1 over `F_p[e]/(e^2)`: unimodular pairs up to units, by brute force.
fn dual_number_p1_oracle(p: u64) -> usize {
    let elems: Vec<(u64, u64)> = (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).collect();
    let mul = |x: (u64, u64), y: (u64, u64)| ((x.0 * y.0) % p, (x.0 * y.1 + x.1 * y.0) % p);
    let units: Vec<_> = elems.iter().copied().filter(|x| x.0 != 0).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut classes = 0;
    for &a in &elems {
        for &b in &elems {
            if a.0 == 0 && b.0 == 0 {
                continue;
            }
            if seen.contains(&(a, b)) {
                continue;
            }
            classes += 1;
            for &u in &units {
                seen.insert((mul(u, a), mul(u, b)));
            }
        }
    }
    classes
}

/// `q + 1` lines through the origin of `F_q^2`, counted by brute force.
fn field_p1_oracle(q: u64) -> usize {
    let mut lines = std::collections::BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            if a == 0 && b == 0 {
                continue;
            }
            let line: std::collections::BTreeSet<_> = (1..q).map(|u| (u * a % q, u * b % q)).collect();
            lines.insert(line);
        }
    }
    lines.len()
}

#[test]
fn projective_line_counts_match_brute_force() {
    let h = functor_of_points(&projective_line(Field::Rationals).unwrap());
    assert_eq!(h.eval(&alg("GF(2)")).unwrap().len(), field_p1_oracle(2));
    assert_eq!(h.eval(&alg("GF(3)")).unwrap().len(), field_p1_oracle(3));
    assert_eq!(h.eval(&alg("GF(3)[e]/(e^2)")).unwrap().len(), dual_number_p1_oracle(3));
}

#[test]
fn trivial_test_algebra_has_one_point() {
    let h = functor_of_points(&projective_line(Field::Rationals).unwrap());
    assert_eq!(h.eval(&alg("GF(3)[e]/(1)")).unwrap().len(), 1);
}

#[test]
fn affine_points_are_homs() {
    let a = alg("QQ[x]/(x^2 - 1)");
    let h = functor_of_points(&mk_affine(&a));
    let b = alg("GF(3)[e]/(e^2)");
    // b^2 = 1 in F_3[e]/(e^2): b = ±1.
    assert_eq!(h.eval(&b).unwrap().len(), 2);
    assert_eq!(h.eval(&b).unwrap().len(), enumerate_homs(&a, &b).unwrap().len());
}

#[test]
fn epsilon_of_top_is_top() {
    let x = projective_line(Field::Rationals).unwrap();
    let eps = epsilon_star(&x, &x.top()).unwrap();
    let b = alg("GF(2)xGF(2)");
    let all = functor_of_points(&x).eval(&b).unwrap();
    assert_eq!(eps.points(&b).unwrap().len(), all.len());
    let none = epsilon_star(&x, &x.bottom()).unwrap();
    assert!(none.points(&b).unwrap().is_empty());
}

#[test]
fn epsilon_of_punctured_plane() {
    let a = alg("QQ[x,y]");
    let x = mk_affine(&a);
    let u = x.from_chart(0, &zarlattice::ZarElement::parse(&a, "D(x, y)").unwrap()).unwrap();
    let eps = epsilon_star(&x, &u).unwrap();
    let f3 = alg("GF(3)");
    assert_eq!(eps.points(&f3).unwrap().len(), 8);
    assert!(eps.check_restriction(&f3).unwrap());
    assert!(eps.check_restriction(&alg("GF(2)xGF(2)")).unwrap());
}

#[test]
fn epsilon_preserves_joins_and_meets() {
    let a = alg("QQ[x,y]");
    let x = mk_affine(&a);
    let open = |t: &str| x.from_chart(0, &zarlattice::ZarElement::parse(&a, t).unwrap()).unwrap();
    let (u, v) = (epsilon_star(&x, &open("D(x)")).unwrap(), epsilon_star(&x, &open("D(y - 1)")).unwrap());
    let (j, m) = (u.join(&v).unwrap(), u.meet(&v).unwrap());
    for p in functor_of_points(&x).eval(&alg("GF(2)[e]/(e^2)")).unwrap() {
        let (pu, pv) = (u.at(&p).unwrap(), v.at(&p).unwrap());
        assert!(zarlattice::eq(&j.at(&p).unwrap(), &zarlattice::join(&pu, &pv).unwrap()).unwrap());
        assert!(zarlattice::eq(&m.at(&p).unwrap(), &zarlattice::meet(&pu, &pv).unwrap()).unwrap());
    }
}

#[test]
fn support_on_representable() {
    let a = alg("QQ[x,y]");
    let x = FunctorialScheme::representable(&a);
    let u = x.open(0, "D(x)").unwrap();
    let real = realize(&x);
    let (r, ring) = real.sheaf(&u).unwrap();
    let RingOfFunctions::Algebra(ax) = ring else {
        panic!("a basic open of an affine is affine");
    };
    assert!(r.scheme.is_representable());
    let f = a.var(0);
    let s = BasicOpenSection::fraction(&f, &a.var(1), 2).unwrap();
    assert!(s.value().algebra().same(&ax));
    let sup = real.support(&r, &Function::Element(s.value().clone())).unwrap();
    let expected = x.open(0, "D(x*y)").unwrap();
    assert!(sup.eq(&expected).unwrap());
    assert!(sup.leq(&u).unwrap());
}

#[test]
fn comparison_on_fixtures() {
    let tests = [alg("GF(2)"), alg("GF(3)"), alg("GF(2)xGF(2)")];
    let p1 = projective_line(Field::Rationals).unwrap();
    let report = comparison_check(&p1, &tests).unwrap();
    assert!(report.passed, "{report}");
    let counts: Vec<_> = report.tests.iter().map(|t| (t.lattice_count, t.functorial_count)).collect();
    assert_eq!(counts, vec![(3, 3), (4, 4), (9, 9)]);
    let pp = punctured_plane(Field::Rationals).unwrap();
    let report = comparison_check(&pp.scheme, &tests[1..2]).unwrap();
    assert!(report.passed, "{report}");
    assert_eq!(report.tests[0].lattice_count, 8);
    let affine = mk_affine(&alg("QQ[x,y]/(x^2 + y^2 - 1)"));
    let report = comparison_check(&affine, &tests).unwrap();
    assert!(report.passed, "{report}");
    assert!(serde_json::to_string(&report).unwrap().contains("\"bijection\""));
}

#[test]
fn identity_flattens_to_yoneda() {
    let a = alg("GF(3)[x,y]/(x*y - 1)");
    let x = FunctorialScheme::representable(&a);
    let id = SchemeMorphism::identity(x.lattice());
    let alpha = adjunction_flat(&id, &x).unwrap();
    for b in [alg("GF(3)"), alg("GF(3)xGF(3)")] {
        for pt in eval_points(&x, &b).unwrap() {
            assert_eq!(alpha.at_point(&pt).unwrap().signature().unwrap(), pt.signature().unwrap());
        }
    }
}

#[test]
fn flat_and_sharp_are_inverse() {
    let pp = punctured_plane(Field::Rationals).unwrap();
    let x = FunctorialScheme::from_lattice(&pp.scheme);
    let alpha = adjunction_flat(&pp.inclusion, &x).unwrap();
    let pi = adjunction_sharp(&alpha).unwrap();
    assert!(pi.agrees_with(&pp.inclusion).unwrap());
    let again = adjunction_flat(&pi, &x).unwrap();
    for b in [alg("GF(2)"), alg("GF(3)")] {
        for pt in eval_points(&x, &b).unwrap() {
            let l = alpha.at_point(&pt).unwrap().signature().unwrap();
            let r = again.at_point(&pt).unwrap().signature().unwrap();
            assert_eq!(l, r);
        }
    }
}

#[test]
fn sharp_of_constant_is_constant() {
    let p1 = projective_line(Field::prime(3).unwrap()).unwrap();
    let line = mk_affine(&alg("GF(3)[t]"));
    let x = FunctorialScheme::glued(&p1);
    let target = line.clone();
    let alpha = NaturalTransformation::new(
        &x,
        &line,
        Box::new(move |m: &SchemeMorphism| {
            let b = m.source().chart(0);
            let phi = AlgebraMorphism::new(target.chart(0), b, vec![b.one()])?;
            SchemeMorphism::affine(m.source(), &target, &phi)
        }),
    );
    let pi = adjunction_sharp(&alpha).unwrap();
    let t = GlobalSection::on_chart(&line, 0, BasicOpenSection::global(&line.chart(0).var(0)).unwrap()).unwrap();
    let pulled = pi.pullback_section(&t).unwrap();
    let one = GlobalSection::parse_chart_values(&p1, &["1", "1"]).unwrap();
    assert!(pulled.equals(&one).unwrap());
}

#[test]
fn lattice_points_are_local() {
    let h = functor_of_points(&projective_line(Field::Rationals).unwrap());
    let b = alg("GF(3)xGF(3)");
    let ids = b.primitive_idempotents().unwrap();
    let report = check_locality(&h, &b, &CoverData::new(&b, ids).unwrap()).unwrap();
    assert!(report.holds());
    assert_eq!(report.global_points, 16);
}
