use super::*;
use crate::latscheme::{projective_line, projective_plane, punctured_plane};

fn alg(s: &str) -> PresentedAlgebra {
    PresentedAlgebra::parse(s).unwrap()
}

fn count(x: &FunctorialScheme, b: &str) -> usize {
    eval_points(x, &alg(b)).unwrap().len()
}

/// Points of P^n(F_q) as normalized nonzero vectors, by brute force.
fn projective_oracle(n: u32, q: u64) -> usize {
    let mut seen = BTreeSet::new();
    for code in 1..q.pow(n + 1) {
        let mut v: Vec<u64> = (0..=n).map(|i| code / q.pow(i) % q).collect();
        let lead = *v.iter().find(|c| **c != 0).unwrap();
        let inv = (1..q).find(|c| c * lead % q == 1).unwrap();
        v.iter_mut().for_each(|c| *c = *c * inv % q);
        seen.insert(v);
    }
    seen.len()
}

#[test]
fn point_counts_match_brute_force() {
    assert_eq!(count(&FunctorialScheme::affine_line(Field::Prime(3)), "GF(3)"), 3);
    let gm_oracle = (0..5u64).flat_map(|x| (0..5u64).map(move |y| (x, y))).filter(|(x, y)| x * y % 5 == 1).count();
    let gm = FunctorialScheme::multiplicative_group(Field::Prime(5)).unwrap();
    assert_eq!(count(&gm, "GF(5)"), gm_oracle);
    let p1 = FunctorialScheme::glued(&projective_line(Field::Rationals).unwrap());
    assert_eq!(count(&p1, "GF(2)"), projective_oracle(1, 2));
    assert_eq!(count(&p1, "GF(3)"), projective_oracle(1, 3));
    let p2 = FunctorialScheme::glued(&projective_plane(Field::Rationals).unwrap());
    assert_eq!(count(&p2, "GF(2)"), projective_oracle(2, 2));
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    let oracle = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).filter(|p| *p != (0, 0)).count();
    assert_eq!(count(&pp, "GF(3)"), oracle);
}

#[test]
fn products_of_fields_multiply() {
    let p1 = FunctorialScheme::glued(&projective_line(Field::Rationals).unwrap());
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    let a1 = FunctorialScheme::affine_line(Field::Rationals);
    for x in [&p1, &pp, &a1] {
        let n = count(x, "GF(3)");
        assert_eq!(count(x, "GF(3)xGF(3)"), n * n);
    }
}

#[test]
fn yoneda_consistency_and_trivial_test_algebra() {
    let a = alg("GF(3)[x,y]/(x^2 + y^2 - 1)");
    let sp = FunctorialScheme::representable(&a);
    for b in ["GF(3)", "GF(3)xGF(3)", "GF(3)[e]/(e^2)"] {
        let b = alg(b);
        let homs: BTreeSet<Vec<String>> = enumerate_homs(&a, &b)
            .unwrap()
            .iter()
            .map(|h| h.images().iter().map(|e| e.to_string()).collect())
            .collect();
        let pts: BTreeSet<Vec<String>> = eval_points(&sp, &b)
            .unwrap()
            .iter()
            .map(|p| p.signature().unwrap().0[0].1.clone())
            .collect();
        assert_eq!(homs, pts);
    }
    let zero = alg("GF(3)[e]/(1)");
    assert_eq!(eval_points(&sp, &zero).unwrap().len(), 1);
    let p1 = FunctorialScheme::glued(&projective_line(Field::Prime(3)).unwrap());
    assert_eq!(eval_points(&p1, &zero).unwrap().len(), 1);
}

#[test]
fn glued_schemes_reject_non_reduced_tests() {
    let p1 = FunctorialScheme::glued(&projective_line(Field::Prime(3)).unwrap());
    let err = eval_points(&p1, &alg("GF(3)[e]/(e^2)")).unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)), "{err}");
    assert!(matches!(
        eval_points(&p1, &alg("QQ[e]/(e^2)")).unwrap_err(),
        Error::NotEnumerable(_)
    ));
}

#[test]
fn zariski_lattice_of_small_fields() {
    assert_eq!(zar_points(&alg("GF(3)")).unwrap().len(), 2);
    assert_eq!(zar_points(&alg("GF(3)xGF(3)")).unwrap().len(), 4);
    let b = alg("GF(3)xGF(3)");
    let c = alg("GF(3)");
    let phi = AlgebraMorphism::parse(&b, &c, &["1"]).unwrap();
    for u in zar_points(&b).unwrap() {
        let direct = ZarFunctor.map(&u, &phi).unwrap();
        assert!(zarlattice::eq(&direct, &induced_hom(&phi, &u).unwrap()).unwrap());
    }
}

#[test]
fn functorial_action_composes() {
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    let b = alg("GF(3)xGF(3)");
    let swap = AlgebraMorphism::parse(&b, &b, &["1 - e"]).unwrap();
    let c = alg("GF(3)");
    let proj = AlgebraMorphism::parse(&b, &c, &["1"]).unwrap();
    let both = swap.then(&proj).unwrap();
    for pt in eval_points(&pp, &b).unwrap() {
        let step = map_point(&pp, &map_point(&pp, &pt, &swap).unwrap(), &proj).unwrap();
        let once = map_point(&pp, &pt, &both).unwrap();
        assert_eq!(step.signature().unwrap(), once.signature().unwrap());
        let twice = map_point(&pp, &map_point(&pp, &pt, &swap).unwrap(), &swap).unwrap();
        assert_eq!(twice.signature().unwrap(), pt.signature().unwrap());
    }
}

#[test]
fn realizations_and_membership() {
    let sp = FunctorialScheme::representable(&alg("GF(3)[x]"));
    let u = sp.open(0, "D(x)").unwrap();
    let r = realization(&sp, &u).unwrap();
    assert!(r.scheme.is_representable());
    let b = alg("GF(3)");
    assert_eq!(eval_points(&r.scheme, &b).unwrap().len(), 2);
    let members = eval_points(&sp, &b)
        .unwrap()
        .into_iter()
        .filter(|p| membership(&sp, p, &u).unwrap())
        .count();
    assert_eq!(members, 2);
    let top = realization(&sp, &sp.top()).unwrap();
    assert_eq!(eval_points(&top.scheme, &b).unwrap().len(), 3);
}

#[test]
fn realization_of_d_xy_is_the_punctured_plane() {
    let plane = FunctorialScheme::representable(&alg("QQ[x,y]"));
    let u = plane.open(0, "D(x, y)").unwrap();
    let r = realization(&plane, &u).unwrap();
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    for b in ["GF(2)", "GF(3)"] {
        let b = alg(b);
        let included: BTreeSet<PointSignature> = eval_points(&r.scheme, &b)
            .unwrap()
            .iter()
            .map(|p| r.include(p).unwrap().signature().unwrap())
            .collect();
        let members: BTreeSet<PointSignature> = eval_points(&plane, &b)
            .unwrap()
            .into_iter()
            .filter(|p| membership(&plane, p, &u).unwrap())
            .map(|p| p.signature().unwrap())
            .collect();
        assert_eq!(included, members);
        assert_eq!(eval_points(&pp, &b).unwrap().len(), members.len());
    }
}

#[test]
fn covers_and_psi() {
    let line = FunctorialScheme::representable(&alg("QQ[x]"));
    assert!(is_open_cover(&[line.open(0, "D(x)").unwrap(), line.open(0, "D(1 - x)").unwrap()]).unwrap());
    let plane = FunctorialScheme::representable(&alg("QQ[x,y]"));
    assert!(!is_open_cover(&[plane.open(0, "D(x)").unwrap(), plane.open(0, "D(y)").unwrap()]).unwrap());
    let u = plane.open(0, "D(x, y)").unwrap();
    let r = realization(&plane, &u).unwrap();
    let charts = &r.scheme;
    let chart_opens: Vec<_> = (0..2).map(|i| charts.open(i, "D(1)").unwrap()).collect();
    assert!(is_open_cover(&chart_opens).unwrap());
    // V = D(x) on every chart
    let comps = (0..2)
        .map(|i| {
            let c = charts.lattice().chart(i);
            zarlattice::d(&c.var_named("x").unwrap())
        })
        .collect();
    let v = charts.lattice().compact_open(comps).unwrap();
    let image = r.psi(&v).unwrap();
    assert!(image.eq(&plane.open(0, "D(x)").unwrap()).unwrap());
    assert!(r.psi_inv(&image).unwrap().eq(&v).unwrap());
    assert!(r.psi(&charts.top()).unwrap().eq(&u).unwrap());
    assert!(r.psi_inv(&plane.top()).is_err());
}

#[test]
fn locality_on_idempotent_covers() {
    let b = alg("GF(3)xGF(3)");
    let cover = CoverData::parse(&b, &["e", "1 - e"]).unwrap();
    let sp = FunctorialScheme::representable(&alg("GF(3)[x,y]/(x^2 + y^2 - 1)"));
    let rep = check_locality(&sp, &b, &cover).unwrap();
    assert!(rep.holds(), "{rep:?}");
    let n = count(&sp, "GF(3)");
    assert_eq!(rep.global_points, n * n);
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    let rep = check_locality(&pp, &b, &cover).unwrap();
    assert!(rep.holds());
    assert_eq!(rep.global_points, 64);
    let trivial = CoverData::parse(&b, &["1"]).unwrap();
    assert!(check_locality(&pp, &b, &trivial).unwrap().holds());
    assert!(check_locality(&ZarFunctor, &b, &cover).unwrap().holds());
}

#[test]
fn covers_pull_back() {
    let b = alg("GF(3)xGF(3)");
    let cover = CoverData::parse(&b, &["e", "1 - e"]).unwrap();
    let c = alg("GF(3)");
    let phi = AlgebraMorphism::parse(&b, &c, &["1"]).unwrap();
    assert!(pullback_cover(&cover, &phi).unwrap().verify());
}

#[test]
fn gluing_point_maps() {
    let pp = FunctorialScheme::glued(&punctured_plane(Field::Rationals).unwrap().scheme);
    let x = pp.lattice();
    let cover = vec![
        x.from_chart(0, &zarlattice::top(x.chart(0))).unwrap(),
        x.from_chart(1, &zarlattice::top(x.chart(1))).unwrap(),
    ];
    let tests = [alg("GF(2)"), alg("GF(3)")];
    let ident: Vec<PointMap> = vec![Box::new(|p: &SchemePoint| Ok(p.clone())), Box::new(|p: &SchemePoint| Ok(p.clone()))];
    let g = glue_morphism(&pp, cover.clone(), ident, &pp, &tests).unwrap();
    for b in &tests {
        for p in eval_points(&pp, b).unwrap() {
            assert_eq!(g.eval(&p).unwrap().signature().unwrap(), p.signature().unwrap());
        }
    }
    let line = FunctorialScheme::affine_line(Field::Rationals);
    let constant = |c: i64| {
        let line = line.clone();
        move |p: &SchemePoint| {
            let b = p.test();
            point_from_images(&line, b, 0, vec![b.from_i64(c)])
        }
    };
    let maps: Vec<PointMap> = vec![Box::new(constant(1)), Box::new(constant(1))];
    let g = glue_morphism(&pp, cover.clone(), maps, &line, &tests).unwrap();
    let b = alg("GF(3)xGF(3)");
    for p in eval_points(&pp, &b).unwrap() {
        assert_eq!(g.eval(&p).unwrap().signature().unwrap().to_string(), "chart 0: (1)");
    }
    let maps: Vec<PointMap> = vec![Box::new(constant(0)), Box::new(constant(1))];
    match glue_morphism(&pp, cover, maps, &line, &tests) {
        Err(Error::Incompatible { i: 0, j: 1, left, right }) => {
            assert!(left.starts_with("chart 0: (0)"), "{left}");
            assert!(right.starts_with("chart 0: (1)"), "{right}");
        }
        Err(e) => panic!("{e}"),
        Ok(_) => panic!("incompatible maps glued"),
    }
}

#[test]
fn functions_evaluate_pointwise() {
    let a = alg("QQ[x]/(x^2)");
    let sp = FunctorialScheme::representable(&a);
    let RingOfFunctions::Algebra(o) = ring_of_functions(&sp) else {
        panic!("representable ring of functions is the algebra")
    };
    assert!(o.same(&a));
    let b = alg("GF(3)[e]/(e^2)");
    let f = a.parse_element("x").unwrap();
    let g = a.parse_element("3*x + 1").unwrap();
    for p in eval_points(&sp, &b).unwrap() {
        let ev = |h: &AlgebraElement| evaluate_function(&sp, &Function::Element(h.clone()), &p).unwrap();
        assert_eq!(ev(&f.add(&g)), ev(&f).add(&ev(&g)));
        assert_eq!(ev(&f.mul(&g)), ev(&f).mul(&ev(&g)));
    }
    let p1 = FunctorialScheme::glued(&projective_line(Field::Rationals).unwrap());
    let RingOfFunctions::Sections(gamma) = ring_of_functions(&p1) else {
        panic!("glued ring of functions is a section ring")
    };
    let one = gamma.one().unwrap();
    let two = one.add(&one).unwrap();
    let b = alg("GF(3)xGF(3)");
    for p in eval_points(&p1, &b).unwrap() {
        let v = evaluate_function(&p1, &Function::Section(two.clone()), &p).unwrap();
        assert_eq!(v, b.from_i64(2));
    }
    // a coordinate on the punctured plane, evaluated at its points
    let pp = punctured_plane(Field::Rationals).unwrap();
    let fpp = FunctorialScheme::glued(&pp.scheme);
    let plane = pp.inclusion.target();
    let xs = pp
        .inclusion
        .pullback_section(&GlobalSection::parse_chart_values(plane, &["x"]).unwrap())
        .unwrap();
    let b = alg("GF(3)");
    let mut values: Vec<String> = eval_points(&fpp, &b)
        .unwrap()
        .iter()
        .map(|p| evaluate_function(&fpp, &Function::Section(xs.clone()), p).unwrap().to_string())
        .collect();
    values.sort();
    assert_eq!(values, ["0", "0", "1", "1", "1", "2", "2", "2"]);
}
