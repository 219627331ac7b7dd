use std::fmt;
use std::sync::Arc;

use super::{GlobalSection, LatticeScheme, Part, SchemeCompactOpen};
use crate::algebra::{make_localization, AlgebraElement, AlgebraMorphism, Field, Localization, PresentedAlgebra};
use crate::error::{Error, Result};
use crate::latscheme::sections::invertibility_support_scheme;
use crate::sheaf::{glue, restrict, restriction_morphism, BasicOpenSection, CoverData, SectionFamily};
use crate::zarlattice::{self, d, induced_hom, psi_f};
use crate::DEFAULT_CAP;

/// On `D(denom) ⊂ Spec A_a` the morphism lands in chart `b` of the target,
/// with comorphism `B_b → (A_a)_denom`.
#[derive(Clone, Debug)]
pub struct MorphismPiece {
    pub source_chart: usize,
    pub target_chart: usize,
    pub local: Localization,
    pub comorphism: AlgebraMorphism,
}

impl MorphismPiece {
    pub fn denominator(&self) -> &AlgebraElement {
        self.local.denominator()
    }
}

type OpenMap = dyn Fn(&SchemeCompactOpen) -> Result<SchemeCompactOpen> + Send + Sync;

/// How `π*` acts on compact opens.
#[derive(Clone)]
pub enum LatMap {
    /// Induced chartwise by the comorphisms.
    Induced,
    /// An arbitrary assignment, used for ringed-lattice morphisms that need
    /// not come from algebra maps.
    Custom(Arc<OpenMap>),
}

impl fmt::Debug for LatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatMap::Induced => write!(f, "Induced"),
            LatMap::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A morphism `π : X → Y` given by its pieces.
#[derive(Clone, Debug)]
pub struct SchemeMorphism {
    source: LatticeScheme,
    target: LatticeScheme,
    pieces: Vec<MorphismPiece>,
    latmap: LatMap,
}

impl SchemeMorphism {
    /// Validates owners, that the piece denominators cover every source
    /// chart, and that pieces agree on pulled-back coordinates.
    pub fn new(source: &LatticeScheme, target: &LatticeScheme, pieces: Vec<MorphismPiece>) -> Result<SchemeMorphism> {
        SchemeMorphism::with_latmap(source, target, pieces, LatMap::Induced)
    }

    pub fn with_latmap(
        source: &LatticeScheme,
        target: &LatticeScheme,
        pieces: Vec<MorphismPiece>,
        latmap: LatMap,
    ) -> Result<SchemeMorphism> {
        for (k, p) in pieces.iter().enumerate() {
            if p.source_chart >= source.charts().len() || p.target_chart >= target.charts().len() {
                return Err(Error::Precondition(format!("piece {k} refers to a missing chart")));
            }
            if !p.local.base().same(source.chart(p.source_chart))
                || !p.comorphism.source().same(target.chart(p.target_chart))
                || !p.comorphism.target().same(p.local.algebra())
            {
                return Err(Error::OwnerMismatch(format!("piece {k} does not connect its charts")));
            }
            p.comorphism.check()?;
        }
        for (a, alg) in source.charts().iter().enumerate() {
            let dens: Vec<AlgebraElement> = pieces
                .iter()
                .filter(|p| p.source_chart == a)
                .map(|p| p.denominator().clone())
                .collect();
            if !zarlattice::eq(&zarlattice::support_d(alg, &dens)?, &zarlattice::top(alg))? {
                return Err(Error::NotACover(format!(
                    "piece denominators on source chart {a}: {}",
                    dens.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        let pi = SchemeMorphism {
            source: source.clone(),
            target: target.clone(),
            pieces,
            latmap,
        };
        for (b, alg) in target.charts().iter().enumerate() {
            for v in 0..alg.arity() {
                let coord = GlobalSection::on_chart(target, b, BasicOpenSection::global(&alg.var(v))?)?;
                if let Some(c) = pi.pullback_section(&coord)?.first_conflict()? {
                    return Err(Error::InvalidGluing(format!(
                        "pieces disagree on coordinate {} of target chart {b}: {} vs {}",
                        alg.vars()[v],
                        c.left,
                        c.right
                    )));
                }
            }
        }
        Ok(pi)
    }

    pub fn identity(x: &LatticeScheme) -> SchemeMorphism {
        let pieces = x
            .charts()
            .iter()
            .enumerate()
            .map(|(a, alg)| {
                let local = make_localization(alg, &alg.one()).expect("owned");
                MorphismPiece {
                    source_chart: a,
                    target_chart: a,
                    comorphism: local.canonical(),
                    local,
                }
            })
            .collect();
        SchemeMorphism {
            source: x.clone(),
            target: x.clone(),
            pieces,
            latmap: LatMap::Induced,
        }
    }

    /// `Spec(φ) : x → y` for single-chart schemes on `φ`'s target and source.
    pub fn affine(x: &LatticeScheme, y: &LatticeScheme, phi: &AlgebraMorphism) -> Result<SchemeMorphism> {
        if x.charts().len() != 1 || y.charts().len() != 1 {
            return Err(Error::Precondition("affine morphisms need single-chart schemes".into()));
        }
        if !phi.source().same(y.chart(0)) || !phi.target().same(x.chart(0)) {
            return Err(Error::OwnerMismatch(format!("{phi} does not map {} to {}", y.chart(0), x.chart(0))));
        }
        phi.check()?;
        let a = x.chart(0);
        let local = make_localization(a, &a.one())?;
        let comorphism = phi.then(&local.canonical())?;
        Ok(SchemeMorphism {
            source: x.clone(),
            target: y.clone(),
            pieces: vec![MorphismPiece {
                source_chart: 0,
                target_chart: 0,
                local,
                comorphism,
            }],
            latmap: LatMap::Induced,
        })
    }

    pub fn source(&self) -> &LatticeScheme {
        &self.source
    }

    pub fn target(&self) -> &LatticeScheme {
        &self.target
    }

    pub fn pieces(&self) -> &[MorphismPiece] {
        &self.pieces
    }

    pub fn latmap(&self) -> &LatMap {
        &self.latmap
    }

    /// `π*(w)`.
    pub fn pullback_open(&self, w: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        if w.scheme() != &self.target {
            return Err(Error::OwnerMismatch("open of a different scheme".into()));
        }
        match &self.latmap {
            LatMap::Custom(f) => f(w),
            LatMap::Induced => self.induced_pullback(w),
        }
    }

    fn induced_pullback(&self, w: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        let mut comps: Vec<_> = self.source.charts().iter().map(zarlattice::bottom).collect();
        for p in &self.pieces {
            let local = induced_hom(&p.comorphism, &w.components()[p.target_chart])?;
            let here = psi_f(&p.local, &local, DEFAULT_CAP)?;
            comps[p.source_chart] = zarlattice::join(&comps[p.source_chart], &here)?;
        }
        self.source.compact_open(comps)
    }

    /// `π♯(t)` for a section `t` of the target.
    pub fn pullback_section(&self, t: &GlobalSection) -> Result<GlobalSection> {
        if t.scheme() != &self.target {
            return Err(Error::OwnerMismatch("section of a different scheme".into()));
        }
        let mut parts = Vec::new();
        for p in &self.pieces {
            for tp in t.parts() {
                let moved = if tp.chart == p.target_chart {
                    vec![tp.section.clone()]
                } else {
                    self.target
                        .pieces(p.target_chart, tp.chart)
                        .iter()
                        .map(|v| self.target.transport_section(v, &tp.section))
                        .collect::<Result<Vec<_>>>()?
                };
                for s in moved {
                    if let Some(part) = self.pull_basic(p, &s)? {
                        parts.push(part);
                    }
                }
            }
        }
        GlobalSection::new(&self.source, parts)
    }

    /// Pulls back a section over `D(g) ⊂ Spec B_b` through one piece.
    fn pull_basic(&self, p: &MorphismPiece, s: &BasicOpenSection) -> Result<Option<Part>> {
        let a = p.local.base();
        let img = p.comorphism.apply(s.denominator())?;
        let (_, num) = p.local.numerator(&img, DEFAULT_CAP)?;
        let target = make_localization(a, &p.denominator().mul(&num))?;
        if target.algebra().is_trivial() {
            return Ok(None);
        }
        let restr = restriction_morphism(&p.local, &target, DEFAULT_CAP)?;
        let base = p.comorphism.then(&restr)?;
        let lifted = s.localization().lift_morphism(&base)?;
        let value = lifted.apply(s.value())?;
        Ok(Some(Part {
            chart: p.source_chart,
            section: BasicOpenSection::new(&target, value)?,
        }))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SchemeMorphism) -> Result<SchemeMorphism> {
        if self.target != next.source {
            return Err(Error::OwnerMismatch("morphisms do not compose".into()));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in next.pieces.iter().filter(|q| q.source_chart == p.target_chart) {
                let a = p.local.base();
                let img = p.comorphism.apply(q.denominator())?;
                let (_, num) = p.local.numerator(&img, DEFAULT_CAP)?;
                let local = make_localization(a, &p.denominator().mul(&num))?;
                if local.algebra().is_trivial() {
                    continue;
                }
                let restr = restriction_morphism(&p.local, &local, DEFAULT_CAP)?;
                let inner = q.local.lift_morphism(&p.comorphism.then(&restr)?)?;
                pieces.push(MorphismPiece {
                    source_chart: p.source_chart,
                    target_chart: q.target_chart,
                    comorphism: q.comorphism.then(&inner)?,
                    local,
                });
            }
        }
        let latmap = match (&self.latmap, &next.latmap) {
            (LatMap::Induced, LatMap::Induced) => LatMap::Induced,
            _ => {
                let (first, second) = (self.clone(), next.clone());
                LatMap::Custom(Arc::new(move |w| first.pullback_open(&second.pullback_open(w)?)))
            }
        };
        Ok(SchemeMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            pieces,
            latmap,
        })
    }

    /// The same morphism between base changes of source and target.
    pub fn base_change(&self, field: Field) -> Result<SchemeMorphism> {
        let xs = self.source.base_change(field)?;
        let ys = self.target.base_change(field)?;
        if xs == self.source && ys == self.target {
            return Ok(self.clone());
        }
        if matches!(self.latmap, LatMap::Custom(_)) {
            return Err(Error::Unsupported("base change of a custom lattice map".into()));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let a = xs.chart(p.source_chart);
            let local = make_localization(a, &p.denominator().base_change_into(a)?)?;
            let images = p
                .comorphism
                .images()
                .iter()
                .map(|e| e.base_change_into(local.algebra()))
                .collect::<Result<Vec<_>>>()?;
            pieces.push(MorphismPiece {
                source_chart: p.source_chart,
                target_chart: p.target_chart,
                comorphism: AlgebraMorphism::new(ys.chart(p.target_chart), local.algebra(), images)?,
                local,
            });
        }
        Ok(SchemeMorphism {
            source: xs,
            target: ys,
            pieces,
            latmap: LatMap::Induced,
        })
    }

    /// Same pullbacks of chart generators and of coordinate sections.
    pub fn agrees_with(&self, other: &SchemeMorphism) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Ok(false);
        }
        for w in generator_opens(&self.target)? {
            if !self.pullback_open(&w)?.eq(&other.pullback_open(&w)?)? {
                return Ok(false);
            }
        }
        for t in coordinate_sections(&self.target)? {
            if !self.pullback_section(&t)?.equals(&other.pullback_section(&t)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A single-chart scheme on `a`.
pub fn mk_affine(a: &PresentedAlgebra) -> LatticeScheme {
    LatticeScheme::glue(vec![a.clone()], Vec::new()).expect("one chart has no overlaps")
}

/// `Spec(φ) : Spec A → Spec R` for `φ : R → A`, on freshly built affine schemes.
pub fn spec_morphism(phi: &AlgebraMorphism) -> Result<SchemeMorphism> {
    phi.check()?;
    SchemeMorphism::affine(&mk_affine(phi.target()), &mk_affine(phi.source()), phi)
}

/// Chart tops, each chart's variables as sections over the chart, plus the
/// sections `v + 1` and `1`.
pub fn default_samples(y: &LatticeScheme) -> Result<Vec<GlobalSection>> {
    let mut out = Vec::new();
    for (b, alg) in y.charts().iter().enumerate() {
        let mut vals = vec![alg.one()];
        for v in 0..alg.arity() {
            vals.push(alg.var(v));
            vals.push(alg.var(v).add(&alg.one()));
        }
        for e in vals {
            out.push(GlobalSection::on_chart(y, b, BasicOpenSection::global(&e)?)?);
        }
    }
    Ok(out)
}

fn coordinate_sections(y: &LatticeScheme) -> Result<Vec<GlobalSection>> {
    let mut out = Vec::new();
    for (b, alg) in y.charts().iter().enumerate() {
        for v in 0..alg.arity() {
            out.push(GlobalSection::on_chart(y, b, BasicOpenSection::global(&alg.var(v))?)?);
        }
    }
    Ok(out)
}

fn generator_opens(y: &LatticeScheme) -> Result<Vec<SchemeCompactOpen>> {
    let mut out = Vec::new();
    for (b, alg) in y.charts().iter().enumerate() {
        out.push(y.from_chart(b, &zarlattice::top(alg))?);
        for v in 0..alg.arity() {
            out.push(y.from_chart(b, &d(&alg.var(v)))?);
        }
    }
    Ok(out)
}

/// A sample on which `π*(𝒟_u(s)) = 𝒟_{π*u}(π♯ s)` fails.
#[derive(Clone, Debug)]
pub struct LocalityWitness {
    pub section: String,
    pub open: String,
    pub lattice_side: String,
    pub ring_side: String,
    /// Whether the always-valid inequality `π*(𝒟) ≤ 𝒟(π♯)` held on this sample.
    pub one_sided: bool,
}

impl fmt::Display for LocalityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on u = {} with s = {}: pi*(D_u(s)) = {} but D_(pi* u)(pi# s) = {}",
            self.open, self.section, self.lattice_side, self.ring_side
        )
    }
}

/// `None` when the locality condition holds on every sample.
pub fn check_local_morphism(pi: &SchemeMorphism, samples: &[GlobalSection]) -> Result<Option<LocalityWitness>> {
    for s in samples {
        let u = s.open()?;
        let lattice_side = pi.pullback_open(&invertibility_support_scheme(s)?)?;
        let ring_side = invertibility_support_scheme(&pi.pullback_section(s)?)?;
        if !lattice_side.eq(&ring_side)? {
            return Ok(Some(LocalityWitness {
                section: s.to_string(),
                open: u.to_string(),
                lattice_side: lattice_side.to_string(),
                ring_side: ring_side.to_string(),
                one_sided: lattice_side.leq(&ring_side)?,
            }));
        }
    }
    Ok(None)
}

/// `D(denom) ⊂ Spec A_{source_chart}` is claimed to map into chart `target_chart`.
#[derive(Clone, Debug)]
pub struct AffinePatch {
    pub source_chart: usize,
    pub denom: AlgebraElement,
    pub target_chart: usize,
}

impl AffinePatch {
    /// The patches recorded by the morphism's own pieces.
    pub fn from_morphism(pi: &SchemeMorphism) -> Vec<AffinePatch> {
        pi.pieces
            .iter()
            .map(|p| AffinePatch {
                source_chart: p.source_chart,
                denom: p.denominator().clone(),
                target_chart: p.target_chart,
            })
            .collect()
    }
}

/// For every patch `D(h) → Spec B_b` the square with `Spec` of the
/// comorphism read off from pulled-back coordinates commutes on chart
/// generators. Errors if the patches do not cover the source or a patch is
/// not inside the preimage of its target chart.
pub fn check_locally_affine(pi: &SchemeMorphism, patches: &[AffinePatch]) -> Result<bool> {
    let x = pi.source();
    let y = pi.target();
    let mut cover = x.bottom();
    for (k, p) in patches.iter().enumerate() {
        if p.source_chart >= x.charts().len() || p.target_chart >= y.charts().len() {
            return Err(Error::Precondition(format!("patch {k} refers to a missing chart")));
        }
        let u = x.from_chart(p.source_chart, &d(&p.denom))?;
        let pre = pi.pullback_open(&y.from_chart(p.target_chart, &zarlattice::top(y.chart(p.target_chart)))?)?;
        if !u.leq(&pre)? {
            return Err(Error::Precondition(format!(
                "patch {k}: {u} is not inside the preimage {pre} of target chart {}",
                p.target_chart
            )));
        }
        cover = cover.join(&u)?;
    }
    if !cover.is_top()? {
        return Err(Error::NotACover(format!("patches cover only {cover}")));
    }
    for p in patches {
        let a = x.chart(p.source_chart);
        let b = y.chart(p.target_chart);
        let local = make_localization(a, &p.denom)?;
        let mut images = Vec::new();
        for v in 0..b.arity() {
            let coord = GlobalSection::on_chart(y, p.target_chart, BasicOpenSection::global(&b.var(v))?)?;
            images.push(section_value_on(&pi.pullback_section(&coord)?, p.source_chart, &local)?);
        }
        let phi = AlgebraMorphism::new(b, local.algebra(), images)?;
        for g in chart_generators(b) {
            let lattice = pi
                .pullback_open(&y.from_chart(p.target_chart, &d(&g))?)?
                .meet(&x.from_chart(p.source_chart, &d(&p.denom))?)?;
            let local_image = psi_f(&local, &d(&phi.apply(&g)?), DEFAULT_CAP)?;
            if !lattice.eq(&x.from_chart(p.source_chart, &local_image)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn chart_generators(b: &PresentedAlgebra) -> Vec<AlgebraElement> {
    let mut gens = vec![b.one()];
    for v in 0..b.arity() {
        gens.push(b.var(v));
        gens.push(b.var(v).add(&b.one()));
    }
    gens
}

/// The value of `s` on `D(h) ⊂ Spec A_chart`, glued from its parts there.
pub fn section_value_on(s: &GlobalSection, chart: usize, local: &Localization) -> Result<AlgebraElement> {
    let a = local.base();
    let h = local.denominator();
    let mut dens = Vec::new();
    let mut secs = Vec::new();
    for p in s.parts().iter().filter(|p| p.chart == chart) {
        let hg = p.section.denominator().mul(h);
        if make_localization(a, &hg)?.algebra().is_trivial() {
            continue;
        }
        let r = restrict(&p.section, &hg, DEFAULT_CAP)?;
        let inner = make_localization(local.algebra(), &local.to_local(p.section.denominator())?)?;
        let lifted = lift_to_inner(&r, local, &inner)?;
        dens.push(inner.denominator().clone());
        secs.push(BasicOpenSection::new(&inner, lifted)?);
    }
    let cover = CoverData::new(local.algebra(), dens)?;
    let fam = SectionFamily::new(cover, secs)?;
    glue(&fam, DEFAULT_CAP)
}

/// Rewrites a section over `D(h g) ⊂ Spec A` as an element of `(A_h)_g`.
fn lift_to_inner(r: &BasicOpenSection, local: &Localization, inner: &Localization) -> Result<AlgebraElement> {
    let base = local.canonical().then(&inner.canonical())?;
    let phi = r.localization().lift_morphism(&base)?;
    phi.apply(r.value())
}

/// Checks that `to : X → Spec A` and `from : Spec A → X` are mutually
/// inverse on chart generators and coordinate sections.
pub fn verify_affine_certificate(
    x: &LatticeScheme,
    a: &LatticeScheme,
    to: &SchemeMorphism,
    from: &SchemeMorphism,
) -> Result<bool> {
    if a.charts().len() != 1 {
        return Err(Error::Precondition("the affine side needs a single chart".into()));
    }
    if to.source() != x || to.target() != a || from.source() != a || from.target() != x {
        return Err(Error::OwnerMismatch("certificate morphisms do not connect X and Spec A".into()));
    }
    let on_a = from.then(to)?;
    let on_x = to.then(from)?;
    Ok(on_a.agrees_with(&SchemeMorphism::identity(a))? && on_x.agrees_with(&SchemeMorphism::identity(x))?)
}
