//! The Zariski lattice `L_A`: finitely generated radical ideals of `A`,
//! stored as generator lists `D(f_1, ..., f_n)` and compared by radical membership.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{
    parse, AlgebraElement, AlgebraMorphism, Localization, PresentedAlgebra, RadicalTester, Scalar,
};
use crate::error::{Error, Result};

/// `D(f_1, ..., f_n)`. Generators are canonical: no zeros, no duplicates,
/// sorted, and collapsed to `[1]` when a nonzero constant occurs.
#[derive(Clone)]
pub struct ZarElement {
    alg: PresentedAlgebra,
    gens: Vec<AlgebraElement>,
}

impl fmt::Debug for ZarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ZarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "D({})", parts.join(", "))
    }
}

fn scalar_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => x.cmp(y),
        (Scalar::Mod { v: x, .. }, Scalar::Mod { v: y, .. }) => x.cmp(y),
        _ => Ordering::Equal,
    }
}

/// Total order on normal forms: term by term under the ring's monomial order.
pub fn element_cmp(a: &AlgebraElement, b: &AlgebraElement) -> Ordering {
    let order = &a.algebra().ring().order;
    let (ta, tb) = (a.rep().terms(), b.rep().terms());
    for ((ma, ca), (mb, cb)) in ta.iter().zip(tb) {
        let o = order.cmp(ma, mb).then_with(|| scalar_cmp(ca, cb));
        if o != Ordering::Equal {
            return o;
        }
    }
    ta.len().cmp(&tb.len())
}

impl ZarElement {
    fn canonical(alg: &PresentedAlgebra, gens: Vec<AlgebraElement>) -> ZarElement {
        let mut gens: Vec<AlgebraElement> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.iter().any(|g| g.rep().is_constant()) {
            gens = vec![alg.one()];
        }
        gens.sort_by(|a, b| element_cmp(b, a));
        gens.dedup();
        ZarElement {
            alg: alg.clone(),
            gens,
        }
    }

    pub fn algebra(&self) -> &PresentedAlgebra {
        &self.alg
    }

    pub fn generators(&self) -> &[AlgebraElement] {
        &self.gens
    }

    /// Parses `D(f1, f2, ...)` (or a bare generator list) in `alg`.
    pub fn parse(alg: &PresentedAlgebra, text: &str) -> Result<ZarElement> {
        let t = text.trim();
        let inner = t
            .strip_prefix("D(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(t);
        let gens = parse::split_top_level(inner)
            .into_iter()
            .map(|g| alg.parse_element(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZarElement::canonical(alg, gens))
    }

    fn same_owner(&self, other: &ZarElement) -> Result<()> {
        if self.alg.same(&other.alg) {
            Ok(())
        } else {
            Err(Error::OwnerMismatch(format!(
                "{} lives in L of {}, {} in L of {}",
                self, self.alg, other, other.alg
            )))
        }
    }

    pub fn is_bottom(&self) -> bool {
        self.gens.is_empty() || self.alg.is_trivial()
    }

    /// Stable display form: the reduced Gröbner basis of the generated ideal
    /// (not its radical), modulo the relations.
    pub fn display_form(&self) -> String {
        let mut all: Vec<_> = self.alg.groebner().to_vec();
        all.extend(self.gens.iter().map(|g| g.rep().clone()));
        let gb = crate::algebra::groebner::compute(&all, self.alg.ring(), false);
        let gens: Vec<AlgebraElement> = gb
            .basis
            .iter()
            .filter_map(|g| {
                let e = self.alg.normal_form(g).ok()?;
                (!e.is_zero()).then_some(e)
            })
            .collect();
        ZarElement::canonical(&self.alg, gens).to_string()
    }
}

/// `D(f_1, ..., f_n)` for elements of `alg`.
pub fn support_d(alg: &PresentedAlgebra, elems: &[AlgebraElement]) -> Result<ZarElement> {
    for e in elems {
        if !e.algebra().same(alg) {
            return Err(Error::OwnerMismatch(format!("{e} is not in {alg}")));
        }
    }
    Ok(ZarElement::canonical(alg, elems.to_vec()))
}

pub fn d(f: &AlgebraElement) -> ZarElement {
    ZarElement::canonical(f.algebra(), vec![f.clone()])
}

pub fn top(alg: &PresentedAlgebra) -> ZarElement {
    ZarElement::canonical(alg, vec![alg.one()])
}

pub fn bottom(alg: &PresentedAlgebra) -> ZarElement {
    ZarElement::canonical(alg, Vec::new())
}

/// `u ≤ v` iff every generator of `u` lies in the radical of `v`'s generators.
pub fn leq(u: &ZarElement, v: &ZarElement) -> Result<bool> {
    u.same_owner(v)?;
    if u.gens.is_empty() {
        return Ok(true);
    }
    let tester = RadicalTester::new(&v.alg, &v.gens);
    Ok(u.gens.iter().all(|g| tester.contains(g)))
}

pub fn eq(u: &ZarElement, v: &ZarElement) -> Result<bool> {
    Ok(leq(u, v)? && leq(v, u)?)
}

pub fn join(u: &ZarElement, v: &ZarElement) -> Result<ZarElement> {
    u.same_owner(v)?;
    let mut gens = u.gens.clone();
    gens.extend(v.gens.iter().cloned());
    Ok(ZarElement::canonical(&u.alg, gens))
}

pub fn meet(u: &ZarElement, v: &ZarElement) -> Result<ZarElement> {
    u.same_owner(v)?;
    let mut gens = Vec::with_capacity(u.gens.len() * v.gens.len());
    for a in &u.gens {
        for b in &v.gens {
            gens.push(a.mul(b));
        }
    }
    Ok(ZarElement::canonical(&u.alg, gens))
}

pub fn join_all<'a>(alg: &PresentedAlgebra, us: impl IntoIterator<Item = &'a ZarElement>) -> Result<ZarElement> {
    us.into_iter().try_fold(bottom(alg), |acc, u| join(&acc, u))
}

/// `φ^L(D(f_1..f_n)) = D(φ(f_1)..φ(f_n))`.
pub fn induced_hom(phi: &AlgebraMorphism, u: &ZarElement) -> Result<ZarElement> {
    if !phi.source().same(&u.alg) {
        return Err(Error::OwnerMismatch(format!(
            "{u} is not in L of the source {}",
            phi.source()
        )));
    }
    let gens = u
        .gens
        .iter()
        .map(|g| phi.apply(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZarElement::canonical(phi.target(), gens))
}

/// `ψ_f : L_{A_f} → ↓D(f)`, `D(r/f^n) ↦ D(r·f)`.
pub fn psi_f(loc: &Localization, u: &ZarElement, cap: u32) -> Result<ZarElement> {
    if !u.alg.same(loc.algebra()) {
        return Err(Error::OwnerMismatch(format!("{u} is not in L of {}", loc.algebra())));
    }
    let f = loc.denominator();
    let gens = u
        .gens
        .iter()
        .map(|s| loc.numerator(s, cap).map(|(_, r)| r.mul(f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZarElement::canonical(loc.base(), gens))
}

/// Inverse of [`psi_f`] on `↓D(f)`, through the canonical map `A → A_f`.
pub fn psi_f_inv(loc: &Localization, u: &ZarElement) -> Result<ZarElement> {
    if !leq(u, &d(loc.denominator()))? {
        return Err(Error::Precondition(format!(
            "{u} is not below D({})",
            loc.denominator()
        )));
    }
    induced_hom(&loc.canonical(), u)
}

/// A bounded distributive lattice given by its operations.
pub trait SupportLattice {
    type Value: Clone + fmt::Debug;
    fn bottom(&self) -> Self::Value;
    fn top(&self) -> Self::Value;
    fn join(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn meet(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn eq(&self, a: &Self::Value, b: &Self::Value) -> bool;
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        self.eq(&self.join(a, b), b)
    }
}

/// `L_A` itself as a carrier.
#[derive(Clone, Debug)]
pub struct ZarLattice(pub PresentedAlgebra);

impl SupportLattice for ZarLattice {
    type Value = ZarElement;
    fn bottom(&self) -> ZarElement {
        bottom(&self.0)
    }
    fn top(&self) -> ZarElement {
        top(&self.0)
    }
    fn join(&self, a: &ZarElement, b: &ZarElement) -> ZarElement {
        join(a, b).expect("same owner")
    }
    fn meet(&self, a: &ZarElement, b: &ZarElement) -> ZarElement {
        meet(a, b).expect("same owner")
    }
    fn eq(&self, a: &ZarElement, b: &ZarElement) -> bool {
        eq(a, b).expect("same owner")
    }
    fn leq(&self, a: &ZarElement, b: &ZarElement) -> bool {
        leq(a, b).expect("same owner")
    }
}

/// A map `d : A → L` that the caller claims is a support.
pub struct SupportMap<'a, L: SupportLattice> {
    pub source: PresentedAlgebra,
    pub lattice: L,
    map: Box<dyn Fn(&AlgebraElement) -> L::Value + 'a>,
}

impl<'a> SupportMap<'a, ZarLattice> {
    /// The universal support `D : A → L_A`.
    pub fn canonical(alg: &PresentedAlgebra) -> SupportMap<'a, ZarLattice> {
        SupportMap::new(alg, ZarLattice(alg.clone()), d)
    }

    /// `D ∘ φ : A → L_B`.
    pub fn through(phi: &'a AlgebraMorphism) -> SupportMap<'a, ZarLattice> {
        SupportMap::new(phi.source(), ZarLattice(phi.target().clone()), move |x| {
            d(&phi.apply(x).expect("owned by source"))
        })
    }
}

/// A violated support law, with the offending inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportLaw {
    Zero,
    One,
    Product(String, String),
    Sum(String, String),
}

impl<'a, L: SupportLattice> SupportMap<'a, L> {
    pub fn new(
        source: &PresentedAlgebra,
        lattice: L,
        map: impl Fn(&AlgebraElement) -> L::Value + 'a,
    ) -> Self {
        SupportMap {
            source: source.clone(),
            lattice,
            map: Box::new(map),
        }
    }

    pub fn apply(&self, x: &AlgebraElement) -> L::Value {
        (self.map)(x)
    }

    /// Checks `d(0)=0`, `d(1)=1`, `d(xy)=d(x)∧d(y)`, `d(x+y) ≤ d(x)∨d(y)` on all sample pairs.
    pub fn check_laws(&self, samples: &[AlgebraElement]) -> std::result::Result<(), SupportLaw> {
        let l = &self.lattice;
        if !l.eq(&self.apply(&self.source.zero()), &l.bottom()) {
            return Err(SupportLaw::Zero);
        }
        if !l.eq(&self.apply(&self.source.one()), &l.top()) {
            return Err(SupportLaw::One);
        }
        for x in samples {
            for y in samples {
                let (dx, dy) = (self.apply(x), self.apply(y));
                if !l.eq(&self.apply(&x.mul(y)), &l.meet(&dx, &dy)) {
                    return Err(SupportLaw::Product(x.to_string(), y.to_string()));
                }
                if !l.leq(&self.apply(&x.add(y)), &l.join(&dx, &dy)) {
                    return Err(SupportLaw::Sum(x.to_string(), y.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// The unique lattice map `L_A → L` extending `d`: `D(f_1..f_n) ↦ ⋁ d(f_i)`.
pub fn extend_support<L: SupportLattice>(d: &SupportMap<'_, L>, u: &ZarElement) -> Result<L::Value> {
    if !u.alg.same(&d.source) {
        return Err(Error::OwnerMismatch(format!("{u} is not in L of {}", d.source)));
    }
    Ok(u.gens
        .iter()
        .fold(d.lattice.bottom(), |acc, g| d.lattice.join(&acc, &d.apply(g))))
}

/// One representative per eq-class of `L_B` for a finite algebra `B`,
/// obtained as the join-closure of the basic opens `D(b)`.
pub fn eq_classes(alg: &PresentedAlgebra) -> Result<Vec<ZarElement>> {
    let elems = alg.enumerate_elements()?;
    let mut basics: Vec<ZarElement> = Vec::new();
    for b in &elems {
        let u = d(b);
        if !contains_class(&basics, &u)? {
            basics.push(u);
        }
    }
    let mut classes = vec![bottom(alg)];
    let mut frontier = classes.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for u in &frontier {
            for b in &basics {
                let v = join(u, b)?;
                if !contains_class(&classes, &v)? {
                    classes.push(v.clone());
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    Ok(classes)
}

fn contains_class(classes: &[ZarElement], u: &ZarElement) -> Result<bool> {
    for c in classes {
        if eq(c, u)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_localization;

    fn alg(t: &str) -> PresentedAlgebra {
        PresentedAlgebra::parse(t).unwrap()
    }

    fn z(a: &PresentedAlgebra, t: &str) -> ZarElement {
        ZarElement::parse(a, t).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = alg("QQ[x,y]");
        assert_eq!(z(&a, "D(y, 0, x, y)").to_string(), "D(x, y)");
        assert_eq!(z(&a, "D(x, 3)").to_string(), "D(1)");
        assert!(z(&a, "D()").is_bottom());
    }

    #[test]
    fn support_examples() {
        let a = alg("QQ[x,y]");
        assert!(eq(&z(&a, "D(0)"), &bottom(&a)).unwrap());
        let xy = z(&a, "D(x*y)");
        assert!(eq(&xy, &meet(&z(&a, "D(x)"), &z(&a, "D(y)")).unwrap()).unwrap());
        assert!(eq(&z(&a, "D(x, x^2)"), &z(&a, "D(x)")).unwrap());
    }

    #[test]
    fn order_examples() {
        let a = alg("QQ[x,y]");
        assert!(leq(&z(&a, "D(x)"), &z(&a, "D(x,y)")).unwrap());
        assert!(!leq(&top(&a), &z(&a, "D(x,y)")).unwrap());
        assert!(leq(&z(&a, "D(x+y)"), &z(&a, "D(x,y)")).unwrap());
        let b = alg("QQ[x]");
        assert!(leq(&z(&a, "D(x)"), &z(&b, "D(x)")).is_err());
    }

    #[test]
    fn lattice_examples() {
        let a = alg("QQ[x,y]");
        assert_eq!(join(&z(&a, "D(x)"), &z(&a, "D(y)")).unwrap().to_string(), "D(x, y)");
        let u = z(&a, "D(x,y)");
        let m = meet(&u, &u).unwrap();
        assert_ne!(m.to_string(), u.to_string());
        assert!(eq(&m, &u).unwrap());
        assert!(eq(&meet(&u, &top(&a)).unwrap(), &u).unwrap());
    }

    #[test]
    fn induced_hom_examples() {
        let a = alg("QQ[x]");
        let id = AlgebraMorphism::identity(&a);
        let u = z(&a, "D(x^2-1, x)");
        assert!(eq(&induced_hom(&id, &u).unwrap(), &u).unwrap());
        let sq = AlgebraMorphism::parse(&a, &a, &["x^2"]).unwrap();
        let img = induced_hom(&sq, &z(&a, "D(x)")).unwrap();
        assert_eq!(img.to_string(), "D(x^2)");
        assert!(eq(&img, &z(&a, "D(x)")).unwrap());
    }

    #[test]
    fn extension_examples() {
        let a = alg("QQ[x,y]");
        let canon = SupportMap::canonical(&a);
        let u = z(&a, "D(x^2, x*y - 1)");
        assert!(eq(&extend_support(&canon, &u).unwrap(), &u).unwrap());
        assert!(extend_support(&canon, &bottom(&a)).unwrap().is_bottom());
        let b = alg("QQ[t]");
        let phi = AlgebraMorphism::parse(&a, &b, &["t^2", "t+1"]).unwrap();
        let through = SupportMap::through(&phi);
        assert!(eq(
            &extend_support(&through, &u).unwrap(),
            &induced_hom(&phi, &u).unwrap()
        )
        .unwrap());
    }

    #[test]
    fn law_checker_finds_violations() {
        let a = alg("QQ[x]");
        let samples: Vec<AlgebraElement> = ["x", "x-1", "x^2+1", "0", "2"]
            .iter()
            .map(|t| a.parse_element(t).unwrap())
            .collect();
        assert_eq!(SupportMap::canonical(&a).check_laws(&samples), Ok(()));
        let lat = ZarLattice(a.clone());
        let constant_top = SupportMap::new(&a, lat, |_| top(&a));
        assert_eq!(constant_top.check_laws(&samples), Err(SupportLaw::Zero));
    }

    #[test]
    fn psi_examples() {
        let a = alg("QQ[x,y]");
        let f = a.parse_element("x").unwrap();
        let l = make_localization(&a, &f).unwrap();
        let af = l.algebra();
        assert!(eq(&psi_f_inv(&l, &d(&f)).unwrap(), &top(af)).unwrap());
        assert!(eq(&psi_f(&l, &top(af), 64).unwrap(), &d(&f)).unwrap());
        let y1 = z(af, "D(y)");
        assert!(eq(&psi_f(&l, &y1, 64).unwrap(), &z(&a, "D(x*y)")).unwrap());
        assert!(matches!(
            psi_f_inv(&l, &z(&a, "D(y)")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn field_lattice_has_two_classes() {
        assert_eq!(eq_classes(&alg("GF(3)")).unwrap().len(), 2);
        assert_eq!(eq_classes(&alg("GF(3)xGF(3)")).unwrap().len(), 4);
    }
}
