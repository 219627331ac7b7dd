use proptest::prelude::*;
use qcqs::zarlattice::{d, eq, join, leq, meet, ZarElement};
use qcqs::{AlgebraElement, PresentedAlgebra};

fn ring() -> PresentedAlgebra {
    PresentedAlgebra::parse("GF(5)[x,y]/(x^2*y - y)").unwrap()
}

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec((-2i64..=2, 0u32..=2, 0u32..=2), 1..=3).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(c, i, j)| format!("({c})*x^{i}*y^{j}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn el(a: &PresentedAlgebra, s: &str) -> AlgebraElement {
    a.parse_element(s).unwrap()
}

fn zar(a: &PresentedAlgebra, gens: &[String]) -> ZarElement {
    ZarElement::parse(a, &format!("D({})", gens.join(", "))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn join_and_meet_are_bounds(u in prop::collection::vec(poly(), 0..=2), v in prop::collection::vec(poly(), 0..=2)) {
        let a = ring();
        let (u, v) = (zar(&a, &u), zar(&a, &v));
        let j = join(&u, &v).unwrap();
        let m = meet(&u, &v).unwrap();
        prop_assert!(leq(&u, &j).unwrap() && leq(&v, &j).unwrap());
        prop_assert!(leq(&m, &u).unwrap() && leq(&m, &v).unwrap());
        prop_assert!(eq(&join(&m, &u).unwrap(), &u).unwrap());
        prop_assert!(eq(&meet(&j, &u).unwrap(), &u).unwrap());
        prop_assert_eq!(leq(&u, &v).unwrap(), eq(&m, &u).unwrap());
    }

    #[test]
    fn d_of_products_and_powers(f in poly(), g in poly(), k in 1u32..=3) {
        let a = ring();
        let (f, g) = (el(&a, &f), el(&a, &g));
        let fg = f.mul(&g);
        prop_assert!(eq(&d(&fg), &meet(&d(&f), &d(&g)).unwrap()).unwrap());
        let fk = f.pow(k);
        prop_assert!(eq(&d(&fk), &d(&f)).unwrap());
    }

    #[test]
    fn d_of_sum_is_below_join(f in poly(), g in poly()) {
        let a = ring();
        let (f, g) = (el(&a, &f), el(&a, &g));
        let s = f.add(&g);
        prop_assert!(leq(&d(&s), &join(&d(&f), &d(&g)).unwrap()).unwrap());
    }
}
