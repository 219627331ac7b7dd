//! The functor of points of a lattice scheme, the geometric realization of a
//! functorial scheme, and the extensional comparison of the two.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::algebra::{enumerate_homs, make_localization, AlgebraMorphism, PresentedAlgebra};
use crate::error::{Error, Result};
use crate::funscheme::{
    check_locality, eval_points, field_factors, map_point, realization, CompactOpenNat, FiniteFunctor, Function,
    FunctorialScheme, PointData, PointSignature, Realization, RingOfFunctions, SchemePoint,
};
use crate::latscheme::{
    invertibility_support_scheme, mk_affine, restrict_scheme, section_value_on, GlobalSection, LatticeScheme,
    MorphismPiece, SchemeCompactOpen, SchemeMorphism,
};
use crate::sheaf::{BasicOpenSection, CoverData};
use crate::zarlattice::{self, induced_hom, ZarElement};
use crate::DEFAULT_CAP;

/// A morphism `Spec B → X` over the field of `B`.
#[derive(Clone, Debug)]
pub struct LatticePoint {
    morphism: SchemeMorphism,
}

impl LatticePoint {
    pub fn test(&self) -> &PresentedAlgebra {
        self.morphism.source().chart(0)
    }

    pub fn morphism(&self) -> &SchemeMorphism {
        &self.morphism
    }

    pub fn signature(&self) -> Result<PointSignature> {
        canonical_signature(&self.morphism)
    }
}

/// `h_X : B ↦ Hom(Spec B, X)` on finite test algebras.
#[derive(Clone, Debug)]
pub struct PointsEvaluator {
    source: LatticeScheme,
}

pub fn functor_of_points(x: &LatticeScheme) -> PointsEvaluator {
    PointsEvaluator { source: x.clone() }
}

impl PointsEvaluator {
    pub fn source(&self) -> &LatticeScheme {
        &self.source
    }

    /// Wraps a morphism `Spec B → X_k`.
    pub fn point(&self, m: SchemeMorphism) -> Result<LatticePoint> {
        if m.source().charts().len() != 1 {
            return Err(Error::Precondition("points are morphisms out of an affine scheme".into()));
        }
        let xs = self.source.base_change(m.source().chart(0).field())?;
        if m.target() != &xs {
            return Err(Error::OwnerMismatch("morphism into a different scheme".into()));
        }
        Ok(LatticePoint { morphism: m })
    }

    /// `h_X(B)`, sorted by signature.
    pub fn eval(&self, b: &PresentedAlgebra) -> Result<Vec<LatticePoint>> {
        if !b.is_enumerable() {
            return Err(Error::NotEnumerable(b.to_string()));
        }
        let xs = self.source.base_change(b.field())?;
        let spec = mk_affine(b);
        let mut out = Vec::new();
        if xs.charts().len() == 1 {
            for h in enumerate_homs(xs.chart(0), b)? {
                out.push(LatticePoint {
                    morphism: SchemeMorphism::affine(&spec, &xs, &h)?,
                });
            }
            return sort(out);
        }
        // Each connected factor B_e is local, so a morphism out of it lands in one chart.
        let mut per_factor = Vec::new();
        for e in b.primitive_idempotents()? {
            let loc = make_localization(b, &e)?;
            let mut cands = Vec::new();
            for k in 0..xs.charts().len() {
                'homs: for h in enumerate_homs(xs.chart(k), loc.algebra())? {
                    for l in 0..k {
                        let there = induced_hom(&h, &xs.overlap_open(k, l))?;
                        if zarlattice::eq(&there, &zarlattice::top(loc.algebra()))? {
                            continue 'homs;
                        }
                    }
                    cands.push(MorphismPiece {
                        source_chart: 0,
                        target_chart: k,
                        local: loc.clone(),
                        comorphism: h,
                    });
                }
            }
            per_factor.push(cands);
        }
        for choice in product(&per_factor) {
            out.push(LatticePoint {
                morphism: SchemeMorphism::new(&spec, &xs, choice)?,
            });
        }
        sort(out)
    }

    /// `h_X(φ)` for `φ : B → C`: precomposition with `Spec φ`.
    pub fn map(&self, pt: &LatticePoint, phi: &AlgebraMorphism) -> Result<LatticePoint> {
        if !phi.source().same(pt.test()) {
            return Err(Error::OwnerMismatch(format!("{phi} does not start at {}", pt.test())));
        }
        let spec_c = mk_affine(phi.target());
        let m = SchemeMorphism::affine(&spec_c, pt.morphism.source(), phi)?.then(&pt.morphism)?;
        Ok(LatticePoint { morphism: m })
    }
}

impl FiniteFunctor for PointsEvaluator {
    type Point = LatticePoint;

    fn eval(&self, b: &PresentedAlgebra) -> Result<Vec<LatticePoint>> {
        PointsEvaluator::eval(self, b)
    }

    fn map(&self, x: &LatticePoint, phi: &AlgebraMorphism) -> Result<LatticePoint> {
        PointsEvaluator::map(self, x, phi)
    }

    fn key(&self, x: &LatticePoint) -> Result<String> {
        Ok(x.signature()?.to_string())
    }
}

fn product(per_factor: &[Vec<MorphismPiece>]) -> Vec<Vec<MorphismPiece>> {
    let mut acc: Vec<Vec<MorphismPiece>> = vec![Vec::new()];
    for cands in per_factor {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                cands.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

fn sort(pts: Vec<LatticePoint>) -> Result<Vec<LatticePoint>> {
    let mut keyed = pts
        .into_iter()
        .map(|p| Ok((p.signature()?, p)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Defect(format!("two enumerated morphisms share the normal form {}", w[0].0)));
    }
    Ok(keyed.into_iter().map(|(_, p)| p).collect())
}

fn coordinate(x: &LatticeScheme, chart: usize, v: usize) -> Result<GlobalSection> {
    GlobalSection::on_chart(x, chart, BasicOpenSection::global(&x.chart(chart).var(v))?)
}

/// The normal form of `m : Spec B → X`, read from `m*` and `m♯` alone: per
/// connected factor `e`, the lowest chart whose preimage contains `D(e)` and
/// the pulled-back chart coordinates as elements of `B e`.
pub fn canonical_signature(m: &SchemeMorphism) -> Result<PointSignature> {
    let spec = m.source();
    let xs = m.target();
    if spec.charts().len() != 1 {
        return Err(Error::Precondition("signatures are defined for affine sources".into()));
    }
    let b = spec.chart(0);
    if xs.charts().len() == 1 {
        let images = (0..xs.chart(0).arity())
            .map(|v| Ok(m.pullback_section(&coordinate(xs, 0, v)?)?.to_algebra_element()?.to_string()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(PointSignature(vec![(0, images)]));
    }
    let mut out = Vec::new();
    for e in b.primitive_idempotents()? {
        let de = zarlattice::d(&e);
        let mut chart = None;
        for l in 0..xs.charts().len() {
            let pre = m.pullback_open(&xs.from_chart(l, &zarlattice::top(xs.chart(l)))?)?;
            if zarlattice::leq(&de, &pre.components()[0])? {
                chart = Some(l);
                break;
            }
        }
        let l = chart.ok_or_else(|| Error::Defect(format!("D({e}) lies in no chart preimage")))?;
        let loc = make_localization(b, &e)?;
        let mut images = Vec::new();
        for v in 0..xs.chart(l).arity() {
            let s = m.pullback_section(&coordinate(xs, l, v)?)?;
            let val = section_value_on(&s, 0, &loc)?;
            let (_, r) = loc.numerator(&val, DEFAULT_CAP)?;
            images.push(r.mul(&e).to_string());
        }
        out.push((l, images));
    }
    Ok(PointSignature(out))
}

/// The morphism `Spec B → X` of a functorial point.
pub fn point_to_morphism(x: &FunctorialScheme, pt: &SchemePoint) -> Result<LatticePoint> {
    let b = pt.test();
    let xs = x.lattice().base_change(b.field())?;
    let spec = mk_affine(b);
    let m = match pt.data() {
        PointData::Hom(h) => SchemeMorphism::affine(&spec, &xs, h)?,
        PointData::Factors(fs) => {
            let mut pieces = Vec::new();
            for f in fs {
                let loc = make_localization(b, &f.idempotent)?;
                let images = (0..b.arity())
                    .map(|v| loc.to_local(&b.var(v)))
                    .collect::<Result<Vec<_>>>()?;
                let into_local = AlgebraMorphism::new(&f.field, loc.algebra(), images)?;
                pieces.push(MorphismPiece {
                    source_chart: 0,
                    target_chart: f.chart,
                    comorphism: f.hom.then(&into_local)?,
                    local: loc,
                });
            }
            SchemeMorphism::new(&spec, &xs, pieces)?
        }
    };
    Ok(LatticePoint { morphism: m })
}

/// `ε*(u) : π ↦ π*(u)`, a compact open of `h_X`.
#[derive(Clone, Debug)]
pub struct EpsilonOpen {
    evaluator: PointsEvaluator,
    open: SchemeCompactOpen,
}

pub fn epsilon_star(x: &LatticeScheme, u: &SchemeCompactOpen) -> Result<EpsilonOpen> {
    if u.scheme() != x {
        return Err(Error::OwnerMismatch("open of a different scheme".into()));
    }
    Ok(EpsilonOpen {
        evaluator: functor_of_points(x),
        open: u.clone(),
    })
}

impl EpsilonOpen {
    pub fn open(&self) -> &SchemeCompactOpen {
        &self.open
    }

    /// `π*(u) ∈ L_B`.
    pub fn at(&self, pt: &LatticePoint) -> Result<ZarElement> {
        let xs = pt.morphism.target();
        let w = xs.carry_open(&self.open)?;
        Ok(pt.morphism.pullback_open(&w)?.components()[0].clone())
    }

    pub fn contains(&self, pt: &LatticePoint) -> Result<bool> {
        zarlattice::eq(&self.at(pt)?, &zarlattice::top(pt.test()))
    }

    /// `⟦ε*(u)⟧(B)`.
    pub fn points(&self, b: &PresentedAlgebra) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        for p in self.evaluator.eval(b)? {
            if self.contains(&p)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    pub fn join(&self, other: &EpsilonOpen) -> Result<EpsilonOpen> {
        epsilon_star(&self.evaluator.source, &self.open.join(&other.open)?)
    }

    pub fn meet(&self, other: &EpsilonOpen) -> Result<EpsilonOpen> {
        epsilon_star(&self.evaluator.source, &self.open.meet(&other.open)?)
    }

    /// Checks `⟦ε*(u)⟧(B) ≅ h_{X|u}(B)` through the inclusion `X|u → X`.
    pub fn check_restriction(&self, b: &PresentedAlgebra) -> Result<bool> {
        let r = restrict_scheme(&self.evaluator.source, &self.open)?;
        let incl = r.inclusion.base_change(b.field())?;
        let mut pushed = BTreeSet::new();
        let inner = functor_of_points(&r.scheme).eval(b)?;
        for p in &inner {
            pushed.insert(canonical_signature(&p.morphism.then(&incl)?)?);
        }
        let here = self
            .points(b)?
            .iter()
            .map(|p| p.signature())
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(pushed.len() == inner.len() && pushed == here)
    }
}

/// `|X|`: compact opens of `X`, with `O(U) = O(⟦U⟧)` and `D_U(s) = ψ_U(U_s)`.
#[derive(Clone, Debug)]
pub struct RealizationData {
    source: FunctorialScheme,
}

pub fn realize(x: &FunctorialScheme) -> RealizationData {
    RealizationData { source: x.clone() }
}

impl RealizationData {
    pub fn source(&self) -> &FunctorialScheme {
        &self.source
    }

    /// The scheme whose compact opens form the lattice.
    pub fn lattice(&self) -> &LatticeScheme {
        self.source.lattice()
    }

    pub fn top(&self) -> CompactOpenNat {
        self.source.top()
    }

    pub fn bottom(&self) -> CompactOpenNat {
        self.source.bottom()
    }

    /// `O(⟦U⟧)` together with `⟦U⟧`.
    pub fn sheaf(&self, u: &CompactOpenNat) -> Result<(Realization, RingOfFunctions)> {
        let r = realization(&self.source, u)?;
        let ring = crate::funscheme::ring_of_functions(&r.scheme);
        Ok((r, ring))
    }

    /// `ψ_U(U_s)` for a function `s` on `⟦U⟧`, with `⟦U⟧` as returned by [`Self::sheaf`].
    pub fn support(&self, r: &Realization, s: &Function) -> Result<CompactOpenNat> {
        if r.open().scheme() != self.source.lattice() {
            return Err(Error::OwnerMismatch("realization of a different scheme".into()));
        }
        let inner = r.scheme.lattice();
        let us = match s {
            Function::Section(t) => {
                if t.scheme() != inner {
                    return Err(Error::OwnerMismatch("function on a different realization".into()));
                }
                invertibility_support_scheme(t)?
            }
            Function::Element(a) => {
                if inner.charts().len() != 1 || !a.algebra().same(inner.chart(0)) {
                    return Err(Error::OwnerMismatch("function on a different realization".into()));
                }
                inner.from_chart(0, &zarlattice::d(a))?
            }
        };
        r.psi(&us)
    }
}

/// A natural transformation `X ⇒ h_Y`, acting on morphisms `Spec B → X`.
pub type NatMap<'a> = Box<dyn Fn(&SchemeMorphism) -> Result<SchemeMorphism> + 'a>;

pub struct NaturalTransformation<'a> {
    source: FunctorialScheme,
    target: LatticeScheme,
    map: NatMap<'a>,
}

impl<'a> NaturalTransformation<'a> {
    pub fn new(source: &FunctorialScheme, target: &LatticeScheme, map: NatMap<'a>) -> NaturalTransformation<'a> {
        NaturalTransformation {
            source: source.clone(),
            target: target.clone(),
            map,
        }
    }

    pub fn source(&self) -> &FunctorialScheme {
        &self.source
    }

    pub fn target(&self) -> &LatticeScheme {
        &self.target
    }

    pub fn apply(&self, m: &SchemeMorphism) -> Result<SchemeMorphism> {
        if m.source().charts().len() != 1 {
            return Err(Error::Precondition("expected a morphism out of an affine scheme".into()));
        }
        let field = m.source().chart(0).field();
        if m.target() != &self.source.lattice().base_change(field)? {
            return Err(Error::OwnerMismatch("morphism into a different scheme".into()));
        }
        let out = (self.map)(m)?;
        if out.source() != m.source() || out.target() != &self.target.base_change(field)? {
            return Err(Error::OwnerMismatch("transformation left its target".into()));
        }
        Ok(out)
    }

    /// `α_B(x)` for a functorial point `x ∈ X(B)`.
    pub fn at_point(&self, pt: &SchemePoint) -> Result<LatticePoint> {
        let m = point_to_morphism(&self.source, pt)?;
        Ok(LatticePoint {
            morphism: self.apply(&m.morphism)?,
        })
    }
}

/// The chart inclusion `Spec A_i → X`.
pub fn universal_point(x: &FunctorialScheme, chart: usize) -> Result<SchemeMorphism> {
    let xl = x.lattice();
    if chart >= xl.charts().len() {
        return Err(Error::Precondition(format!("no chart {chart}")));
    }
    let a = xl.chart(chart);
    let local = make_localization(a, &a.one())?;
    let piece = MorphismPiece {
        source_chart: 0,
        target_chart: chart,
        comorphism: local.canonical(),
        local,
    };
    SchemeMorphism::new(&mk_affine(a), xl, vec![piece])
}

/// `π♭ : x ↦ π ∘ x̂`.
pub fn adjunction_flat<'a>(pi: &'a SchemeMorphism, x: &FunctorialScheme) -> Result<NaturalTransformation<'a>> {
    if pi.source() != x.lattice() {
        return Err(Error::OwnerMismatch("morphism out of a different scheme".into()));
    }
    let map: NatMap<'a> = Box::new(move |m: &SchemeMorphism| {
        let field = m.source().chart(0).field();
        m.then(&pi.base_change(field)?)
    });
    Ok(NaturalTransformation::new(x, pi.target(), map))
}

/// `α♯ : X → Y`, assembled from `α` at the chart inclusions: on chart `i`
/// the pieces of `α(Spec A_i → X)`.
pub fn adjunction_sharp(alpha: &NaturalTransformation<'_>) -> Result<SchemeMorphism> {
    let xl = alpha.source.lattice();
    let mut pieces = Vec::new();
    for i in 0..xl.charts().len() {
        let m = alpha.apply(&universal_point(&alpha.source, i)?)?;
        for q in m.pieces() {
            pieces.push(MorphismPiece {
                source_chart: i,
                target_chart: q.target_chart,
                local: q.local.clone(),
                comorphism: q.comorphism.clone(),
            });
        }
    }
    SchemeMorphism::new(xl, &alpha.target, pieces)
}

#[derive(Clone, Debug, Serialize)]
pub struct BijectionRow {
    pub functorial: String,
    pub lattice: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub test: String,
    pub lattice_count: usize,
    pub functorial_count: usize,
    pub bijection: Vec<BijectionRow>,
    pub naturality_checked: usize,
    pub mismatches: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub charts: usize,
    pub tests: Vec<TestReport>,
    pub certificates: Vec<Certificate>,
    pub passed: bool,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme with {} chart(s)", self.charts)?;
        for t in &self.tests {
            let mark = if t.passed { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{}: {} = {} ({} naturality checks) {mark}",
                t.test, t.lattice_count, t.functorial_count, t.naturality_checked
            )?;
            for row in &t.bijection {
                writeln!(f, "  {} <-> {}", row.functorial, row.lattice)?;
            }
            for m in &t.mismatches {
                writeln!(f, "  mismatch: {m}")?;
            }
        }
        for c in &self.certificates {
            let mark = if c.passed { "ok" } else { "FAIL" };
            writeln!(f, "certificate {}: {mark} ({})", c.name, c.detail)?;
        }
        write!(f, "{}", if self.passed { "comparison holds" } else { "comparison fails" })
    }
}

/// Maximum number of test morphisms `B → B'` checked per ordered pair.
const NATURALITY_HOMS: usize = 16;

/// Checks `h_G(B) ≅ G(B)` naturally in the tested morphisms, and that the
/// realization of the functorial reading of `G` recovers `G`.
pub fn comparison_check(g: &LatticeScheme, tests: &[PresentedAlgebra]) -> Result<ComparisonReport> {
    let x = FunctorialScheme::from_lattice(g);
    let h = functor_of_points(g);
    let mut reports = Vec::new();
    for b in tests {
        reports.push(compare_at(&x, &h, b, tests)?);
    }
    let mut certificates = vec![realization_certificate(&x)?, adjunction_certificate(&x)?];
    certificates.push(epsilon_certificate(g, tests)?);
    certificates.push(locality_certificate(&h, tests)?);
    let passed = reports.iter().all(|r| r.passed) && certificates.iter().all(|c| c.passed);
    Ok(ComparisonReport {
        charts: g.charts().len(),
        tests: reports,
        certificates,
        passed,
    })
}

fn compare_at(
    x: &FunctorialScheme,
    h: &PointsEvaluator,
    b: &PresentedAlgebra,
    tests: &[PresentedAlgebra],
) -> Result<TestReport> {
    let lat = h.eval(b)?;
    let fun = eval_points(x, b)?;
    let lat_sigs = lat.iter().map(|p| p.signature()).collect::<Result<BTreeSet<_>>>()?;
    let mut mismatches = Vec::new();
    let mut rows = Vec::new();
    let mut hit = BTreeSet::new();
    for pt in &fun {
        let fs = pt.signature()?;
        let ls = point_to_morphism(x, pt)?.signature()?;
        if fs != ls {
            mismatches.push(format!("{fs} corresponds to {ls}"));
        }
        if !lat_sigs.contains(&ls) {
            mismatches.push(format!("{ls} is not among the enumerated morphisms"));
        }
        if !hit.insert(ls.clone()) {
            mismatches.push(format!("{ls} is hit twice"));
        }
        rows.push(BijectionRow {
            functorial: fs.to_string(),
            lattice: ls.to_string(),
        });
    }
    for missed in lat_sigs.difference(&hit) {
        mismatches.push(format!("{missed} is not hit"));
    }
    let mut checked = 0;
    for c in tests.iter().filter(|c| c.field() == b.field()) {
        for phi in enumerate_homs(b, c)?.into_iter().take(NATURALITY_HOMS) {
            for pt in &fun {
                let left = point_to_morphism(x, &map_point(x, pt, &phi)?)?.signature()?;
                let right = h.map(&point_to_morphism(x, pt)?, &phi)?.signature()?;
                checked += 1;
                if left != right {
                    mismatches.push(format!("along {phi}: {left} vs {right}"));
                }
            }
        }
    }
    Ok(TestReport {
        test: b.to_string(),
        lattice_count: lat.len(),
        functorial_count: fun.len(),
        bijection: rows,
        naturality_checked: checked,
        passed: mismatches.is_empty() && lat.len() == fun.len(),
        mismatches,
    })
}

fn generator_opens(x: &LatticeScheme) -> Result<Vec<SchemeCompactOpen>> {
    let mut out = Vec::new();
    for (i, a) in x.charts().iter().enumerate() {
        out.push(x.from_chart(i, &zarlattice::top(a))?);
        for v in 0..a.arity() {
            out.push(x.from_chart(i, &zarlattice::d(&a.var(v)))?);
        }
    }
    Ok(out)
}

/// `ψ_U` identifies the top of `⟦U⟧` with `U`, `ψ_U ψ_U^{-1}` fixes `U ∧ V`,
/// and supports of coordinates computed through `⟦U⟧` match `G`.
fn realization_certificate(x: &FunctorialScheme) -> Result<Certificate> {
    let real = realize(x);
    let g = real.lattice();
    let opens = generator_opens(g)?;
    let mut failures = Vec::new();
    let mut checked = 0;
    for u in &opens {
        if u.is_bottom()? {
            continue;
        }
        let (r, _) = real.sheaf(u)?;
        checked += 1;
        if !r.psi(&r.scheme.top())?.eq(u)? {
            failures.push(format!("psi(top) differs from {u}"));
        }
        for v in &opens {
            let w = u.meet(v)?;
            if !r.psi(&r.psi_inv(&w)?)?.eq(&w)? {
                failures.push(format!("psi does not fix {w}"));
            }
        }
    }
    for (i, a) in g.charts().iter().enumerate() {
        let u = g.from_chart(i, &zarlattice::top(a))?;
        let (r, _) = real.sheaf(&u)?;
        for v in 0..a.arity() {
            let s = coordinate(g, i, v)?;
            let pulled = r.restricted.inclusion.pullback_section(&s)?;
            let via = real.support(&r, &Function::Section(pulled))?;
            let direct = invertibility_support_scheme(&s)?;
            checked += 1;
            if !via.eq(&direct)? {
                failures.push(format!("support of coordinate {v} on chart {i}: {via} vs {direct}"));
            }
        }
    }
    Ok(certificate("realization", checked, failures))
}

/// `(id♭)♯ = id`.
fn adjunction_certificate(x: &FunctorialScheme) -> Result<Certificate> {
    let id = SchemeMorphism::identity(x.lattice());
    let alpha = adjunction_flat(&id, x)?;
    let back = adjunction_sharp(&alpha)?;
    let failures = if back.agrees_with(&id)? {
        Vec::new()
    } else {
        vec!["sharp of flat of the identity is not the identity".to_string()]
    };
    Ok(certificate("adjunction", 1, failures))
}

/// `⟦ε*(U_i)⟧ ≅ h_{X|U_i}` for the chart opens at every test algebra.
fn epsilon_certificate(g: &LatticeScheme, tests: &[PresentedAlgebra]) -> Result<Certificate> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (i, a) in g.charts().iter().enumerate() {
        let eps = epsilon_star(g, &g.from_chart(i, &zarlattice::top(a))?)?;
        for b in tests {
            checked += 1;
            if !eps.check_restriction(b)? {
                failures.push(format!("chart {i} over {b}"));
            }
        }
    }
    Ok(certificate("epsilon", checked, failures))
}

/// `h_G` is local on idempotent covers of the test algebras.
fn locality_certificate(h: &PointsEvaluator, tests: &[PresentedAlgebra]) -> Result<Certificate> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for b in tests {
        let ids = match field_factors(b) {
            Ok(fs) => fs.into_iter().map(|f| f.idempotent).collect::<Vec<_>>(),
            Err(_) => b.primitive_idempotents()?,
        };
        if ids.len() < 2 {
            continue;
        }
        let report = check_locality(h, b, &CoverData::new(b, ids)?)?;
        checked += 1;
        if !report.holds() {
            failures.push(format!("over {b}: {report:?}"));
        }
    }
    Ok(certificate("locality", checked, failures))
}

fn certificate(name: &str, checked: usize, failures: Vec<String>) -> Certificate {
    Certificate {
        name: name.to_string(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} checks")
        } else {
            failures.join("; ")
        },
    }
}

#[cfg(test)]
mod tests;
