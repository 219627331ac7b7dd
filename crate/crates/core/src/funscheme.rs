//! Schemes as functors on finitely presented algebras, evaluated at finite
//! test algebras.
//!
//! Points of a glued scheme over a reduced finite `B = F_1 × ... × F_n` are
//! stored factorwise: each factor gets the lowest chart containing it and a
//! morphism from that chart into the factor field.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{enumerate_homs, make_localization, AlgebraElement, AlgebraMorphism, Field, PresentedAlgebra};
use crate::error::{Error, Result};
use crate::latscheme::{
    is_cover, mk_affine, restrict_scheme, GlobalSection, LatticeScheme, RestrictedScheme, SchemeCompactOpen,
    SchemeMorphism, SectionRing,
};
use crate::sheaf::{restriction_morphism, CoverData};
use crate::zarlattice::{self, eq_classes, induced_hom, ZarElement};
use crate::DEFAULT_CAP;

/// A compact open `U : X ⇒ L`, one lattice element per chart.
pub type CompactOpenNat = SchemeCompactOpen;

/// `Sp(A)` or a scheme glued from affine charts.
#[derive(Clone, Debug)]
pub struct FunctorialScheme {
    lattice: LatticeScheme,
    representable: bool,
}

impl FunctorialScheme {
    pub fn representable(a: &PresentedAlgebra) -> FunctorialScheme {
        FunctorialScheme {
            lattice: mk_affine(a),
            representable: true,
        }
    }

    pub fn glued(x: &LatticeScheme) -> FunctorialScheme {
        FunctorialScheme {
            lattice: x.clone(),
            representable: false,
        }
    }

    /// `Sp(A)` for single-chart data, the glued functor otherwise.
    pub fn from_lattice(x: &LatticeScheme) -> FunctorialScheme {
        FunctorialScheme {
            lattice: x.clone(),
            representable: x.charts().len() == 1,
        }
    }

    /// `A^1 = Sp(k[x])`.
    pub fn affine_line(field: Field) -> FunctorialScheme {
        FunctorialScheme::representable(&PresentedAlgebra::free(field, &["x"]))
    }

    /// `G_m = Sp(k[x,y]/(xy - 1))`.
    pub fn multiplicative_group(field: Field) -> Result<FunctorialScheme> {
        let a = PresentedAlgebra::parse(&format!("{field}[x,y]/(x*y - 1)"))?;
        Ok(FunctorialScheme::representable(&a))
    }

    pub fn lattice(&self) -> &LatticeScheme {
        &self.lattice
    }

    pub fn is_representable(&self) -> bool {
        self.representable
    }

    pub fn top(&self) -> CompactOpenNat {
        self.lattice.top()
    }

    pub fn bottom(&self) -> CompactOpenNat {
        self.lattice.bottom()
    }

    /// The compact open generated by `D(...)` on one chart.
    pub fn open(&self, chart: usize, text: &str) -> Result<CompactOpenNat> {
        if chart >= self.lattice.charts().len() {
            return Err(Error::Precondition(format!("no chart {chart}")));
        }
        let w = ZarElement::parse(self.lattice.chart(chart), text)?;
        self.lattice.from_chart(chart, &w)
    }

    fn over(&self, field: Field) -> Result<LatticeScheme> {
        self.lattice.base_change(field)
    }

    fn own(&self, u: &CompactOpenNat) -> Result<()> {
        if u.scheme() != &self.lattice {
            return Err(Error::OwnerMismatch("compact open of a different scheme".into()));
        }
        Ok(())
    }
}

/// A connected factor `B e` of a reduced finite algebra, presented as `B / (1 - e)`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub idempotent: AlgebraElement,
    pub field: PresentedAlgebra,
}

/// The field factors of a reduced finite algebra, in a deterministic order.
pub fn field_factors(b: &PresentedAlgebra) -> Result<Vec<Factor>> {
    if !b.is_enumerable() {
        return Err(Error::NotEnumerable(b.to_string()));
    }
    if !b.is_reduced_finite()? {
        return Err(Error::Unsupported(format!(
            "{b} is not reduced; glued schemes are only evaluated at products of finite fields"
        )));
    }
    b.primitive_idempotents()?
        .into_iter()
        .map(|e| {
            Ok(Factor {
                field: b.quotient(&[b.one().sub(&e)])?,
                idempotent: e,
            })
        })
        .collect()
}

/// One factor of a glued point.
#[derive(Clone, Debug)]
pub struct FactorPoint {
    pub idempotent: AlgebraElement,
    pub field: PresentedAlgebra,
    pub chart: usize,
    /// `A_chart → field`.
    pub hom: AlgebraMorphism,
}

#[derive(Clone, Debug)]
pub enum PointData {
    /// A morphism `A → B` of a representable.
    Hom(AlgebraMorphism),
    Factors(Vec<FactorPoint>),
}

/// A `B`-valued point.
#[derive(Clone, Debug)]
pub struct SchemePoint {
    test: PresentedAlgebra,
    data: PointData,
}

/// Canonical description of a point: per factor, the chart and the images
/// of the chart variables read in `B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointSignature(pub Vec<(usize, Vec<String>)>);

impl fmt::Display for PointSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("chart {k}: ({})", v.join(", ")))
            .collect();
        if parts.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "{}", parts.join(" | "))
        }
    }
}

/// The element of `B e` with the given image in `B / (1 - e)`.
pub fn lift_from_factor(b: &PresentedAlgebra, e: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
    Ok(b.transfer(v)?.mul(e))
}

impl SchemePoint {
    pub fn test(&self) -> &PresentedAlgebra {
        &self.test
    }

    pub fn data(&self) -> &PointData {
        &self.data
    }

    pub fn signature(&self) -> Result<PointSignature> {
        match &self.data {
            PointData::Hom(h) => Ok(PointSignature(vec![(
                0,
                h.images().iter().map(|e| e.to_string()).collect(),
            )])),
            PointData::Factors(fs) => fs
                .iter()
                .map(|f| {
                    let imgs = f
                        .hom
                        .images()
                        .iter()
                        .map(|v| Ok(lift_from_factor(&self.test, &f.idempotent, v)?.to_string()))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((f.chart, imgs))
                })
                .collect::<Result<Vec<_>>>()
                .map(PointSignature),
        }
    }

    /// When every factor uses the same chart: the morphism `A_chart → B`.
    pub fn as_hom(&self) -> Result<Option<(usize, AlgebraMorphism)>> {
        match &self.data {
            PointData::Hom(h) => Ok(Some((0, h.clone()))),
            PointData::Factors(fs) => {
                let Some(first) = fs.first() else {
                    return Ok(None);
                };
                if fs.iter().any(|f| f.chart != first.chart) {
                    return Ok(None);
                }
                let a = first.hom.source();
                let mut images = vec![self.test.zero(); a.arity()];
                for f in fs {
                    for (slot, v) in images.iter_mut().zip(f.hom.images()) {
                        *slot = slot.add(&lift_from_factor(&self.test, &f.idempotent, v)?);
                    }
                }
                Ok(Some((first.chart, AlgebraMorphism::new(a, &self.test, images)?)))
            }
        }
    }
}

impl fmt::Display for SchemePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.signature() {
            Ok(s) => write!(f, "{s}"),
            Err(e) => write!(f, "<{e}>"),
        }
    }
}

fn lowest_chart(x: &LatticeScheme, k: usize, h: &AlgebraMorphism) -> Result<usize> {
    for l in 0..k {
        for p in x.pieces(k, l) {
            if !h.apply(p.here.denominator())?.is_zero() {
                return Ok(l);
            }
        }
    }
    Ok(k)
}

/// Rewrites a field point of chart `k` on chart `l`, if it lies there.
fn move_to_chart(x: &LatticeScheme, k: usize, h: &AlgebraMorphism, l: usize) -> Result<Option<AlgebraMorphism>> {
    for p in x.pieces(k, l) {
        if h.apply(p.here.denominator())?.is_zero() {
            continue;
        }
        let lifted = p.here.lift_morphism(h)?;
        return Ok(Some(p.there.canonical().then(&p.into_here)?.then(&lifted)?));
    }
    Ok(None)
}

fn normalize(x: &LatticeScheme, k: usize, h: AlgebraMorphism) -> Result<(usize, AlgebraMorphism)> {
    let l = lowest_chart(x, k, &h)?;
    if l == k {
        return Ok((k, h));
    }
    let moved = move_to_chart(x, k, &h, l)?.ok_or_else(|| Error::Defect("point left its chart".into()))?;
    Ok((l, moved))
}

/// Points of a glued scheme over a finite field, one per point, on its lowest chart.
fn field_points(x: &LatticeScheme, f: &PresentedAlgebra) -> Result<Vec<(usize, AlgebraMorphism)>> {
    let mut out = Vec::new();
    for k in 0..x.charts().len() {
        for h in enumerate_homs(x.chart(k), f)? {
            if lowest_chart(x, k, &h)? == k {
                out.push((k, h));
            }
        }
    }
    Ok(out)
}

fn sort_points(mut pts: Vec<SchemePoint>) -> Result<Vec<SchemePoint>> {
    let mut keyed = pts
        .drain(..)
        .map(|p| Ok((p.signature()?, p)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, p)| p).collect())
}

/// `X(B)` for a finite test algebra `B`, sorted by signature.
pub fn eval_points(x: &FunctorialScheme, b: &PresentedAlgebra) -> Result<Vec<SchemePoint>> {
    if !b.is_enumerable() {
        return Err(Error::NotEnumerable(b.to_string()));
    }
    if x.representable {
        let pts = enumerate_homs(x.lattice.chart(0), b)?
            .into_iter()
            .map(|h| SchemePoint {
                test: b.clone(),
                data: PointData::Hom(h),
            })
            .collect();
        return sort_points(pts);
    }
    let xs = x.over(b.field())?;
    let factors = field_factors(b)?;
    let per_factor = factors
        .iter()
        .map(|f| field_points(&xs, &f.field))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; factors.len()];
    if per_factor.iter().any(|v| v.is_empty()) {
        return Ok(out);
    }
    loop {
        let fs = factors
            .iter()
            .zip(&idx)
            .enumerate()
            .map(|(j, (f, &i))| {
                let (chart, hom) = per_factor[j][i].clone();
                FactorPoint {
                    idempotent: f.idempotent.clone(),
                    field: f.field.clone(),
                    chart,
                    hom,
                }
            })
            .collect();
        out.push(SchemePoint {
            test: b.clone(),
            data: PointData::Factors(fs),
        });
        let mut j = 0;
        loop {
            if j == idx.len() {
                return sort_points(out);
            }
            idx[j] += 1;
            if idx[j] < per_factor[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// A point given by chart-variable images in `B`.
pub fn point_from_images(
    x: &FunctorialScheme,
    b: &PresentedAlgebra,
    chart: usize,
    images: Vec<AlgebraElement>,
) -> Result<SchemePoint> {
    let xs = x.over(b.field())?;
    if chart >= xs.charts().len() {
        return Err(Error::Precondition(format!("no chart {chart}")));
    }
    let h = AlgebraMorphism::new(xs.chart(chart), b, images)?;
    if x.representable {
        return Ok(SchemePoint {
            test: b.clone(),
            data: PointData::Hom(h),
        });
    }
    to_factors(&xs, b, chart, &h)
}

fn to_factors(xs: &LatticeScheme, b: &PresentedAlgebra, chart: usize, h: &AlgebraMorphism) -> Result<SchemePoint> {
    let mut fs = Vec::new();
    for f in field_factors(b)? {
        let proj = AlgebraMorphism::new(b, &f.field, (0..b.arity()).map(|i| f.field.var(i)).collect())?;
        let (k, hom) = normalize(xs, chart, h.then(&proj)?)?;
        fs.push(FactorPoint {
            idempotent: f.idempotent,
            field: f.field,
            chart: k,
            hom,
        });
    }
    Ok(SchemePoint {
        test: b.clone(),
        data: PointData::Factors(fs),
    })
}

fn factor_list(x: &FunctorialScheme, pt: &SchemePoint) -> Result<Vec<FactorPoint>> {
    match &pt.data {
        PointData::Factors(fs) => Ok(fs.clone()),
        PointData::Hom(h) => {
            let xs = x.over(pt.test.field())?;
            match to_factors(&xs, &pt.test, 0, h)?.data {
                PointData::Factors(fs) => Ok(fs),
                PointData::Hom(_) => unreachable!("to_factors builds factor data"),
            }
        }
    }
}

/// `X(φ) : X(B) → X(C)`.
pub fn map_point(x: &FunctorialScheme, pt: &SchemePoint, phi: &AlgebraMorphism) -> Result<SchemePoint> {
    if !phi.source().same(&pt.test) {
        return Err(Error::OwnerMismatch(format!("{phi} does not start at {}", pt.test)));
    }
    let c = phi.target();
    if let PointData::Hom(h) = &pt.data {
        return Ok(SchemePoint {
            test: c.clone(),
            data: PointData::Hom(h.then(phi)?),
        });
    }
    let xs = x.over(c.field())?;
    let fs = factor_list(x, pt)?;
    let b = &pt.test;
    let mut out = Vec::new();
    for g in field_factors(c)? {
        let to_g = |e: &AlgebraElement| -> Result<AlgebraElement> { g.field.transfer(&phi.apply(e)?) };
        let src = fs
            .iter()
            .map(|f| Ok((to_g(&f.idempotent)?.is_one(), f)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|(hit, _)| *hit)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Defect("no factor of the source maps onto a factor of the target".into()))?;
        let images = (0..b.arity()).map(|i| to_g(&b.var(i))).collect::<Result<Vec<_>>>()?;
        let m = AlgebraMorphism::new(&src.field, &g.field, images)?;
        let (chart, hom) = normalize(&xs, src.chart, src.hom.then(&m)?)?;
        out.push(FactorPoint {
            idempotent: g.idempotent,
            field: g.field,
            chart,
            hom,
        });
    }
    Ok(SchemePoint {
        test: c.clone(),
        data: PointData::Factors(out),
    })
}

/// The factors of a point as points over the factor fields.
pub fn factor_points(x: &FunctorialScheme, pt: &SchemePoint) -> Result<Vec<SchemePoint>> {
    Ok(factor_list(x, pt)?
        .into_iter()
        .map(|f| {
            let field = f.field.clone();
            SchemePoint {
                test: field.clone(),
                data: PointData::Factors(vec![FactorPoint {
                    idempotent: field.one(),
                    field,
                    chart: f.chart,
                    hom: f.hom,
                }]),
            }
        })
        .collect())
}

/// Reassembles a point over `B` from points over its factor fields (in the order of [`field_factors`]).
pub fn assemble_point(y: &FunctorialScheme, b: &PresentedAlgebra, parts: &[SchemePoint]) -> Result<SchemePoint> {
    let factors = field_factors(b)?;
    if factors.len() != parts.len() {
        return Err(Error::ArityMismatch {
            expected: factors.len(),
            found: parts.len(),
        });
    }
    let ys = y.over(b.field())?;
    let mut out = Vec::new();
    for (f, p) in factors.into_iter().zip(parts) {
        let inner = factor_list(y, p)?;
        let [single] = inner.as_slice() else {
            return Err(Error::Precondition("expected a point over a field".into()));
        };
        let images = single
            .hom
            .images()
            .iter()
            .map(|v| f.field.transfer(v))
            .collect::<Result<Vec<_>>>()?;
        let hom = AlgebraMorphism::new(ys.chart(single.chart), &f.field, images)?;
        out.push(FactorPoint {
            idempotent: f.idempotent,
            field: f.field,
            chart: single.chart,
            hom,
        });
    }
    finish_point(y, b, out)
}

/// Factor data as a point of `y`, in morphism form when `y` is representable.
fn finish_point(y: &FunctorialScheme, b: &PresentedAlgebra, factors: Vec<FactorPoint>) -> Result<SchemePoint> {
    let pt = SchemePoint {
        test: b.clone(),
        data: PointData::Factors(factors),
    };
    if !y.representable {
        return Ok(pt);
    }
    let h = match pt.as_hom()? {
        Some((_, h)) => h,
        None => {
            let a = y.over(b.field())?.chart(0).clone();
            AlgebraMorphism::new(&a, b, vec![b.zero(); a.arity()])?
        }
    };
    Ok(SchemePoint {
        test: b.clone(),
        data: PointData::Hom(h),
    })
}

/// `U(x) ∈ L_B`.
pub fn evaluate_open(x: &FunctorialScheme, u: &CompactOpenNat, pt: &SchemePoint) -> Result<ZarElement> {
    x.own(u)?;
    let xs = x.over(pt.test.field())?;
    let up = xs.carry_open(u)?;
    match &pt.data {
        PointData::Hom(h) => induced_hom(h, &up.components()[0]),
        PointData::Factors(fs) => {
            let mut gens = Vec::new();
            for f in fs {
                for g in up.components()[f.chart].generators() {
                    gens.push(lift_from_factor(&pt.test, &f.idempotent, &f.hom.apply(g)?)?);
                }
            }
            zarlattice::support_d(&pt.test, &gens)
        }
    }
}

/// `U(x) = D(1)`: the point lies in the realization of `U`.
pub fn membership(x: &FunctorialScheme, pt: &SchemePoint, u: &CompactOpenNat) -> Result<bool> {
    zarlattice::eq(&evaluate_open(x, u, pt)?, &zarlattice::top(&pt.test))
}

/// `⟦U⟧` with the maps relating its compact opens to `↓U`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub scheme: FunctorialScheme,
    pub restricted: RestrictedScheme,
    open: CompactOpenNat,
    parent: FunctorialScheme,
}

pub fn realization(x: &FunctorialScheme, u: &CompactOpenNat) -> Result<Realization> {
    x.own(u)?;
    let r = restrict_scheme(&x.lattice, u)?;
    let scheme = FunctorialScheme {
        lattice: r.scheme.clone(),
        representable: x.representable && r.scheme.charts().len() == 1,
    };
    Ok(Realization {
        scheme,
        restricted: r,
        open: u.clone(),
        parent: x.clone(),
    })
}

impl Realization {
    pub fn open(&self) -> &CompactOpenNat {
        &self.open
    }

    /// `ψ_U : CompOpen(⟦U⟧) → ↓U`.
    pub fn psi(&self, v: &CompactOpenNat) -> Result<CompactOpenNat> {
        self.restricted.psi(v)
    }

    /// `ψ_U^{-1}`, defined below `U`.
    pub fn psi_inv(&self, w: &CompactOpenNat) -> Result<CompactOpenNat> {
        if !w.leq(&self.open)? {
            return Err(Error::Precondition(format!("{w} is not below {}", self.open)));
        }
        self.restricted.psi_inv(w)
    }

    /// The image of a point of `⟦U⟧` in `X`.
    pub fn include(&self, pt: &SchemePoint) -> Result<SchemePoint> {
        push_point(&self.restricted.inclusion, &self.scheme, &self.parent, pt)
    }
}

/// `π(x)` for a lattice-scheme morphism `π : X → Y` read functorially.
pub fn push_point(
    pi: &SchemeMorphism,
    x: &FunctorialScheme,
    y: &FunctorialScheme,
    pt: &SchemePoint,
) -> Result<SchemePoint> {
    if pi.source() != &x.lattice || pi.target() != &y.lattice {
        return Err(Error::OwnerMismatch("morphism does not connect the schemes".into()));
    }
    let b = &pt.test;
    let ys = y.over(b.field())?;
    let push = |chart: usize, hom: &AlgebraMorphism| -> Result<(usize, AlgebraMorphism)> {
        let ap = hom.source();
        for piece in pi.pieces().iter().filter(|p| p.source_chart == chart) {
            let d = piece.denominator().base_change_into(ap)?;
            let dv = hom.apply(&d)?;
            if !hom.target().is_unit(&dv) {
                continue;
            }
            let loc = make_localization(ap, &d)?;
            let lifted = loc.lift_morphism(hom)?;
            let images = piece
                .comorphism
                .images()
                .iter()
                .map(|e| lifted.apply(&e.base_change_into(loc.algebra())?))
                .collect::<Result<Vec<_>>>()?;
            let target_chart = piece.target_chart;
            return Ok((
                target_chart,
                AlgebraMorphism::new(ys.chart(target_chart), hom.target(), images)?,
            ));
        }
        Err(Error::Unsupported(format!(
            "no piece of the morphism contains the point on chart {chart}; split the test algebra first"
        )))
    };
    match &pt.data {
        PointData::Hom(h) if y.representable => {
            let (_, hom) = push(0, h)?;
            Ok(SchemePoint {
                test: b.clone(),
                data: PointData::Hom(hom),
            })
        }
        _ => {
            let mut out = Vec::new();
            for f in factor_list(x, pt)? {
                let (k, hom) = push(f.chart, &f.hom)?;
                let (chart, hom) = normalize(&ys, k, hom)?;
                out.push(FactorPoint {
                    idempotent: f.idempotent,
                    field: f.field,
                    chart,
                    hom,
                });
            }
            finish_point(y, b, out)
        }
    }
}

/// `1 = U_1 ∨ ... ∨ U_n`.
pub fn is_open_cover(opens: &[CompactOpenNat]) -> Result<bool> {
    is_cover(opens)
}

/// A functor on finite test algebras, evaluated extensionally.
pub trait FiniteFunctor {
    type Point: Clone;
    fn eval(&self, b: &PresentedAlgebra) -> Result<Vec<Self::Point>>;
    fn map(&self, x: &Self::Point, phi: &AlgebraMorphism) -> Result<Self::Point>;
    /// Equal keys exactly for equal points.
    fn key(&self, x: &Self::Point) -> Result<String>;
}

impl FiniteFunctor for FunctorialScheme {
    type Point = SchemePoint;

    fn eval(&self, b: &PresentedAlgebra) -> Result<Vec<SchemePoint>> {
        eval_points(self, b)
    }

    fn map(&self, x: &SchemePoint, phi: &AlgebraMorphism) -> Result<SchemePoint> {
        map_point(self, x, phi)
    }

    fn key(&self, x: &SchemePoint) -> Result<String> {
        Ok(x.signature()?.to_string())
    }
}

/// The Zariski lattice as a functor: `B ↦ L_B`, by eq-classes.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZarFunctor;

/// `L_B` for a finite test algebra, one representative per eq-class.
pub fn zar_points(b: &PresentedAlgebra) -> Result<Vec<ZarElement>> {
    eq_classes(b)
}

impl FiniteFunctor for ZarFunctor {
    type Point = ZarElement;

    fn eval(&self, b: &PresentedAlgebra) -> Result<Vec<ZarElement>> {
        eq_classes(b)
    }

    fn map(&self, x: &ZarElement, phi: &AlgebraMorphism) -> Result<ZarElement> {
        let img = induced_hom(phi, x)?;
        for c in eq_classes(phi.target())? {
            if zarlattice::eq(&c, &img)? {
                return Ok(c);
            }
        }
        Err(Error::Defect(format!("{img} has no eq-class representative")))
    }

    fn key(&self, x: &ZarElement) -> Result<String> {
        Ok(x.to_string())
    }
}

/// Outcome of the equalizer check `F(B) → ∏ F(B_i) ⇉ ∏ F(B_ij)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityReport {
    pub global_points: usize,
    pub compatible_families: usize,
    pub injective: bool,
    pub exact: bool,
}

impl LocalityReport {
    pub fn holds(&self) -> bool {
        self.injective && self.exact
    }
}

const MAX_FAMILIES: usize = 1 << 20;

pub fn check_locality<F: FiniteFunctor>(f: &F, b: &PresentedAlgebra, cover: &CoverData) -> Result<LocalityReport> {
    if !cover.base().same(b) {
        return Err(Error::OwnerMismatch(format!("cover of {} used over {b}", cover.base())));
    }
    let pieces = cover.pieces();
    let locs = pieces
        .iter()
        .map(|p| make_localization(b, p))
        .collect::<Result<Vec<_>>>()?;
    let global = f.eval(b)?;
    let local = locs.iter().map(|l| f.eval(l.algebra())).collect::<Result<Vec<_>>>()?;
    let n = pieces.len();
    let mut restr = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let target = make_localization(b, &pieces[i].mul(&pieces[j]))?;
                restr[i][j] = Some(restriction_morphism(&locs[i], &target, DEFAULT_CAP)?);
            }
        }
    }
    let mut image = BTreeSet::new();
    for x in &global {
        let tuple = locs
            .iter()
            .map(|l| f.key(&f.map(x, &l.canonical())?))
            .collect::<Result<Vec<_>>>()?;
        image.insert(tuple);
    }
    let injective = image.len() == global.len();
    let total = local.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    if total.is_none_or(|t| t > MAX_FAMILIES) {
        return Err(Error::NotEnumerable("too many candidate families".into()));
    }
    let mut families = BTreeSet::new();
    if local.iter().all(|v| !v.is_empty()) {
        let mut idx = vec![0usize; n];
        'outer: loop {
            let mut ok = true;
            'check: for i in 0..n {
                for j in i + 1..n {
                    let a = f.key(&f.map(&local[i][idx[i]], restr[i][j].as_ref().unwrap())?)?;
                    let c = f.key(&f.map(&local[j][idx[j]], restr[j][i].as_ref().unwrap())?)?;
                    if a != c {
                        ok = false;
                        break 'check;
                    }
                }
            }
            if ok {
                let tuple = (0..n)
                    .map(|i| f.key(&local[i][idx[i]]))
                    .collect::<Result<Vec<_>>>()?;
                families.insert(tuple);
            }
            let mut k = 0;
            loop {
                if k == n {
                    break 'outer;
                }
                idx[k] += 1;
                if idx[k] < local[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
    Ok(LocalityReport {
        global_points: global.len(),
        compatible_families: families.len(),
        injective,
        exact: families == image,
    })
}

/// The image of a cover under `φ : B → C`; fails if it is not a cover of `C`.
pub fn pullback_cover(cover: &CoverData, phi: &AlgebraMorphism) -> Result<CoverData> {
    let pieces = cover
        .pieces()
        .iter()
        .map(|p| phi.apply(p))
        .collect::<Result<Vec<_>>>()?;
    let mapped = CoverData::new(phi.target(), pieces)?;
    let mut total = phi.target().zero();
    for (c, p) in cover.certificate().iter().zip(cover.pieces()) {
        total = total.add(&phi.apply(&c.mul(p))?);
    }
    if !total.is_one() {
        return Err(Error::Defect("certificate does not map to a certificate".into()));
    }
    Ok(mapped)
}

/// A point map defined on the points of one cover member.
pub type PointMap<'a> = Box<dyn Fn(&SchemePoint) -> Result<SchemePoint> + 'a>;

/// A morphism `X → Y` glued from maps on the members of a cover of `X`.
pub struct GluedMorphism<'a> {
    source: FunctorialScheme,
    target: FunctorialScheme,
    cover: Vec<CompactOpenNat>,
    maps: Vec<PointMap<'a>>,
}

/// Checks that the maps agree wherever members of the cover overlap, at
/// every field factor of every test algebra.
pub fn glue_morphism<'a>(
    x: &FunctorialScheme,
    cover: Vec<CompactOpenNat>,
    maps: Vec<PointMap<'a>>,
    y: &FunctorialScheme,
    tests: &[PresentedAlgebra],
) -> Result<GluedMorphism<'a>> {
    if cover.len() != maps.len() {
        return Err(Error::ArityMismatch {
            expected: cover.len(),
            found: maps.len(),
        });
    }
    for u in &cover {
        x.own(u)?;
    }
    if !is_cover(&cover)? {
        return Err(Error::NotACover("the opens do not cover the scheme".into()));
    }
    let g = GluedMorphism {
        source: x.clone(),
        target: y.clone(),
        cover,
        maps,
    };
    for b in tests {
        for pt in eval_points(x, b)? {
            for fp in factor_points(x, &pt)? {
                let mut first: Option<(usize, String)> = None;
                for (i, u) in g.cover.iter().enumerate() {
                    if !membership(x, &fp, u)? {
                        continue;
                    }
                    let val = (g.maps[i])(&fp)?.signature()?.to_string();
                    match &first {
                        None => first = Some((i, val)),
                        Some((i0, v0)) if *v0 != val => {
                            return Err(Error::Incompatible {
                                i: *i0,
                                j: i,
                                left: format!("{v0} at {fp}"),
                                right: format!("{val} at {fp}"),
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(g)
}

impl GluedMorphism<'_> {
    pub fn source(&self) -> &FunctorialScheme {
        &self.source
    }

    pub fn target(&self) -> &FunctorialScheme {
        &self.target
    }

    /// `α(x)`, computed factorwise through the first cover member containing each factor.
    pub fn eval(&self, pt: &SchemePoint) -> Result<SchemePoint> {
        let mut parts = Vec::new();
        for fp in factor_points(&self.source, pt)? {
            let mut hit = None;
            for (i, u) in self.cover.iter().enumerate() {
                if membership(&self.source, &fp, u)? {
                    hit = Some(i);
                    break;
                }
            }
            let i = hit.ok_or_else(|| Error::Defect(format!("{fp} lies in no member of the cover")))?;
            parts.push((self.maps[i])(&fp)?);
        }
        assemble_point(&self.target, pt.test(), &parts)
    }
}

/// `O(X) = Hom(X, A^1)`.
#[derive(Clone, Debug)]
pub enum RingOfFunctions {
    /// `O(Sp A) = A`, acting by `φ ↦ φ(a)`.
    Algebra(PresentedAlgebra),
    Sections(SectionRing),
}

/// An element of [`RingOfFunctions`].
#[derive(Clone, Debug)]
pub enum Function {
    Element(AlgebraElement),
    Section(GlobalSection),
}

pub fn ring_of_functions(x: &FunctorialScheme) -> RingOfFunctions {
    if x.representable {
        RingOfFunctions::Algebra(x.lattice.chart(0).clone())
    } else {
        RingOfFunctions::Sections(SectionRing::global(&x.lattice))
    }
}

/// The value of a function at a point, in `B`.
pub fn evaluate_function(x: &FunctorialScheme, f: &Function, pt: &SchemePoint) -> Result<AlgebraElement> {
    let b = &pt.test;
    match (f, &pt.data) {
        (Function::Element(a), PointData::Hom(h)) => h.apply(&a.base_change_into(h.source())?),
        (Function::Element(a), PointData::Factors(_)) => {
            let mut acc = b.zero();
            for fp in factor_list(x, pt)? {
                let v = fp.hom.apply(&a.base_change_into(fp.hom.source())?)?;
                acc = acc.add(&lift_from_factor(b, &fp.idempotent, &v)?);
            }
            Ok(acc)
        }
        (Function::Section(s), _) => {
            if s.scheme() != &x.lattice {
                return Err(Error::OwnerMismatch("section of a different scheme".into()));
            }
            let xs = x.over(b.field())?;
            let mut acc = b.zero();
            for fp in factor_list(x, pt)? {
                let v = section_at(&xs, s, &fp)?;
                acc = acc.add(&lift_from_factor(b, &fp.idempotent, &v)?);
            }
            Ok(acc)
        }
    }
}

fn section_at(xs: &LatticeScheme, s: &GlobalSection, fp: &FactorPoint) -> Result<AlgebraElement> {
    for part in s.parts() {
        let Some(h) = move_to_chart(xs, fp.chart, &fp.hom, part.chart)? else {
            continue;
        };
        let a = h.source();
        let g = part.section.denominator().base_change_into(a)?;
        if h.apply(&g)?.is_zero() {
            continue;
        }
        let loc = make_localization(a, &g)?;
        let v = part.section.value().base_change_into(loc.algebra())?;
        return loc.lift_morphism(&h)?.apply(&v);
    }
    Err(Error::Precondition(format!(
        "the section is not defined at the point on chart {}",
        fp.chart
    )))
}

#[cfg(test)]
mod tests;
