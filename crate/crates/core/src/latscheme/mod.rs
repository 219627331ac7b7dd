//! Qcqs schemes as locally ringed lattices, given by finite affine gluing data.
//!
//! Chart `i` is `Spec A_i`. For `i < j` the overlap is a list of matched basic
//! pieces `D(f_k) ⊂ Spec A_i` and `D(g_k) ⊂ Spec A_j` with mutually inverse
//! isomorphisms `(A_j)_{g_k} ≅ (A_i)_{f_k}`.

mod morphism;
mod restrict;
mod sections;
mod standard;

use std::fmt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub use morphism::{
    check_local_morphism, check_locally_affine, default_samples, mk_affine, section_value_on, spec_morphism,
    verify_affine_certificate, AffinePatch, LatMap, LocalityWitness, MorphismPiece, SchemeMorphism,
};
pub use restrict::{restrict_scheme, RestrictedScheme};
pub use standard::{projective_line, projective_plane, punctured_plane, two_lines};
pub use sections::{
    counit, counit_inverse, invertibility_support_scheme, qcqs_lemma_check, unit_eta, EtaData,
    GlobalSection, Part, SectionConflict, SectionRing,
};

use crate::algebra::{make_localization, AlgebraElement, AlgebraMorphism, Field, Localization, PresentedAlgebra};
use crate::error::{Error, Result};
use crate::sheaf::restriction_morphism;
use crate::zarlattice::{self, d, induced_hom, psi_f, ZarElement};
use crate::DEFAULT_CAP;

/// One matched pair of basic pieces with its transition isomorphisms.
#[derive(Clone, Debug)]
pub struct OverlapPiece {
    /// `(A_i)_{f}` on the lower-indexed chart.
    pub left: Localization,
    /// `(A_j)_{g}` on the higher-indexed chart.
    pub right: Localization,
    /// `(A_j)_g → (A_i)_f`.
    pub to_left: AlgebraMorphism,
    /// `(A_i)_f → (A_j)_g`.
    pub to_right: AlgebraMorphism,
}

impl OverlapPiece {
    /// Builds a piece from the images of the chart variables: `forward` gives
    /// each variable of `A_j` as an element of `(A_i)_f`, `inverse` each
    /// variable of `A_i` as an element of `(A_j)_g`.
    pub fn from_images(
        left: &Localization,
        right: &Localization,
        forward: Vec<AlgebraElement>,
        inverse: Vec<AlgebraElement>,
    ) -> Result<OverlapPiece> {
        let to_left = right.lift(left.algebra(), forward)?;
        let to_right = left.lift(right.algebra(), inverse)?;
        to_left.check()?;
        to_right.check()?;
        Ok(OverlapPiece {
            left: left.clone(),
            right: right.clone(),
            to_left,
            to_right,
        })
    }

    fn flipped(&self) -> OverlapPiece {
        OverlapPiece {
            left: self.right.clone(),
            right: self.left.clone(),
            to_left: self.to_right.clone(),
            to_right: self.to_left.clone(),
        }
    }
}

/// Overlap data for the pair `(left, right)` with `left < right`.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub left: usize,
    pub right: usize,
    pub pieces: Vec<OverlapPiece>,
}

struct SchemeData {
    charts: Vec<PresentedAlgebra>,
    overlaps: Vec<Overlap>,
    base_changes: Mutex<HashMap<Field, LatticeScheme>>,
}

/// A validated qcqs scheme.
#[derive(Clone)]
pub struct LatticeScheme(Arc<SchemeData>);

impl fmt::Debug for LatticeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let charts: Vec<String> = self.charts().iter().map(|c| c.to_string()).collect();
        write!(f, "LatticeScheme[{}]", charts.join("; "))
    }
}

impl PartialEq for LatticeScheme {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// A view of an overlap piece oriented from chart `here` to chart `there`.
#[derive(Clone, Debug)]
pub struct PieceView {
    pub here: Localization,
    pub there: Localization,
    /// `(A_there)_g → (A_here)_f`.
    pub into_here: AlgebraMorphism,
    /// `(A_here)_f → (A_there)_g`.
    pub into_there: AlgebraMorphism,
}

impl LatticeScheme {
    /// Validates gluing data: transitions are valid mutually inverse
    /// morphisms and the cocycle condition holds on every triple overlap.
    pub fn glue(charts: Vec<PresentedAlgebra>, overlaps: Vec<Overlap>) -> Result<LatticeScheme> {
        let x = LatticeScheme::assemble(charts, overlaps)?;
        x.validate()?;
        Ok(x)
    }

    fn assemble(charts: Vec<PresentedAlgebra>, overlaps: Vec<Overlap>) -> Result<LatticeScheme> {
        let n = charts.len();
        let mut seen = std::collections::BTreeMap::new();
        for ov in overlaps {
            let ov = if ov.left > ov.right {
                Overlap {
                    left: ov.right,
                    right: ov.left,
                    pieces: ov.pieces.iter().map(|p| p.flipped()).collect(),
                }
            } else {
                ov
            };
            if ov.left == ov.right || ov.right >= n {
                return Err(Error::InvalidGluing(format!(
                    "overlap pair ({}, {}) is not a pair of distinct charts below {n}",
                    ov.left, ov.right
                )));
            }
            for (k, p) in ov.pieces.iter().enumerate() {
                if !p.left.base().same(&charts[ov.left]) || !p.right.base().same(&charts[ov.right]) {
                    return Err(Error::InvalidGluing(format!(
                        "piece {k} of overlap ({}, {}) does not localize the charts",
                        ov.left, ov.right
                    )));
                }
            }
            if seen.insert((ov.left, ov.right), ov).is_some() {
                return Err(Error::InvalidGluing("an overlap pair is listed twice".into()));
            }
        }
        Ok(LatticeScheme(Arc::new(SchemeData {
            charts,
            overlaps: seen.into_values().collect(),
            base_changes: Mutex::new(HashMap::new()),
        })))
    }

    /// The same gluing data over another field, revalidated. Data over `QQ`
    /// is read through its integral model.
    pub fn base_change(&self, field: Field) -> Result<LatticeScheme> {
        if self.charts().iter().all(|c| c.field() == field) {
            return Ok(self.clone());
        }
        if let Some(x) = self.0.base_changes.lock().unwrap().get(&field) {
            return Ok(x.clone());
        }
        let charts = self
            .charts()
            .iter()
            .map(|c| c.base_change(field))
            .collect::<Result<Vec<_>>>()?;
        let mut overlaps = Vec::new();
        for ov in self.overlaps() {
            let (a, b) = (&charts[ov.left], &charts[ov.right]);
            let mut pieces = Vec::new();
            for p in &ov.pieces {
                let left = make_localization(a, &p.left.denominator().base_change_into(a)?)?;
                let right = make_localization(b, &p.right.denominator().base_change_into(b)?)?;
                let carry = |m: &AlgebraMorphism, s: &Localization, t: &Localization| -> Result<AlgebraMorphism> {
                    let images = m
                        .images()
                        .iter()
                        .map(|e| e.base_change_into(t.algebra()))
                        .collect::<Result<Vec<_>>>()?;
                    AlgebraMorphism::new(s.algebra(), t.algebra(), images)
                };
                pieces.push(OverlapPiece {
                    to_left: carry(&p.to_left, &right, &left)?,
                    to_right: carry(&p.to_right, &left, &right)?,
                    left,
                    right,
                });
            }
            overlaps.push(Overlap {
                left: ov.left,
                right: ov.right,
                pieces,
            });
        }
        let x = LatticeScheme::glue(charts, overlaps)?;
        self.0.base_changes.lock().unwrap().insert(field, x.clone());
        Ok(x)
    }

    /// Reads a compact open of this scheme in a base change of it.
    pub fn carry_open(&self, w: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        let comps = w
            .components()
            .iter()
            .zip(self.charts())
            .map(|(c, a)| {
                let gens = c
                    .generators()
                    .iter()
                    .map(|g| g.base_change_into(a))
                    .collect::<Result<Vec<_>>>()?;
                zarlattice::support_d(a, &gens)
            })
            .collect::<Result<Vec<_>>>()?;
        self.compact_open(comps)
    }

    pub fn charts(&self) -> &[PresentedAlgebra] {
        &self.0.charts
    }

    pub fn chart(&self, i: usize) -> &PresentedAlgebra {
        &self.0.charts[i]
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.0.overlaps
    }

    pub fn is_empty(&self) -> bool {
        self.0.charts.is_empty()
    }

    /// Pieces between two charts, oriented from `i` to `j`. For `i == j`
    /// this is the single identity piece `D(1)`.
    pub fn pieces(&self, i: usize, j: usize) -> Vec<PieceView> {
        if i == j {
            let a = self.chart(i);
            let l = make_localization(a, &a.one()).expect("owned");
            let id = AlgebraMorphism::identity(l.algebra());
            return vec![PieceView {
                here: l.clone(),
                there: l,
                into_here: id.clone(),
                into_there: id,
            }];
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let Some(ov) = self.0.overlaps.iter().find(|o| o.left == lo && o.right == hi) else {
            return Vec::new();
        };
        ov.pieces
            .iter()
            .map(|p| {
                let p = if i == lo { p.clone() } else { p.flipped() };
                PieceView {
                    here: p.left,
                    there: p.right,
                    into_here: p.to_left,
                    into_there: p.to_right,
                }
            })
            .collect()
    }

    /// `u_ij ∈ L_{A_i}`: the part of chart `i` that lies in chart `j`.
    pub fn overlap_open(&self, i: usize, j: usize) -> ZarElement {
        let a = self.chart(i);
        let gens: Vec<AlgebraElement> = self
            .pieces(i, j)
            .iter()
            .map(|p| p.here.denominator().clone())
            .collect();
        zarlattice::support_d(a, &gens).expect("owned")
    }

    fn validate(&self) -> Result<()> {
        for ov in self.overlaps() {
            for (k, p) in ov.pieces.iter().enumerate() {
                let back = p.to_right.then(&p.to_left)?;
                let forth = p.to_left.then(&p.to_right)?;
                if back != AlgebraMorphism::identity(p.left.algebra())
                    || forth != AlgebraMorphism::identity(p.right.algebra())
                {
                    return Err(Error::InvalidGluing(format!(
                        "transitions of piece {k} on charts ({}, {}) are not mutually inverse: {} then {}",
                        ov.left, ov.right, p.to_right, p.to_left
                    )));
                }
            }
        }
        let n = self.charts().len();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if i == j && j == l {
                        continue;
                    }
                    self.check_cocycle(i, j, l)?;
                }
            }
        }
        Ok(())
    }

    /// Image of an element of chart `j` (or of `(A_j)_g`) on chart `i`
    /// through piece `p`, as an element of `(A_i)_f`.
    fn carry(&self, p: &PieceView, e: &AlgebraElement) -> Result<AlgebraElement> {
        let local = p.there.to_local(e)?;
        p.into_here.apply(&local)
    }

    /// `(k, num)` with `carry(e) = num / f^k`.
    fn carried_numerator(&self, p: &PieceView, e: &AlgebraElement) -> Result<AlgebraElement> {
        let img = self.carry(p, e)?;
        Ok(p.here.numerator(&img, DEFAULT_CAP)?.1)
    }

    /// `A_j → L` where `L` localizes chart `i` inside `D(f)` of piece `p`.
    fn chart_map_into(&self, p: &PieceView, target: &Localization) -> Result<AlgebraMorphism> {
        let restr = restriction_morphism(&p.here, target, DEFAULT_CAP)?;
        p.there.canonical().then(&p.into_here)?.then(&restr)
    }

    fn check_cocycle(&self, i: usize, j: usize, l: usize) -> Result<()> {
        let a_i = self.chart(i);
        let a_l = self.chart(l);
        for (k, pij) in self.pieces(i, j).iter().enumerate() {
            for (n, pil) in self.pieces(i, l).iter().enumerate() {
                for (m, pjl) in self.pieces(j, l).iter().enumerate() {
                    let num = self.carried_numerator(pij, pjl.here.denominator())?;
                    let h = pij
                        .here
                        .denominator()
                        .mul(pil.here.denominator())
                        .mul(&num);
                    let lh = make_localization(a_i, &h)?;
                    if lh.algebra().is_trivial() {
                        continue;
                    }
                    // route 1: A_l → (A_i)_{f'} → (A_i)_h
                    let direct = self.chart_map_into(pil, &lh)?;
                    // route 2: A_l → (A_j)_{f''} → (A_i)_h
                    let j_to_h = self.chart_map_into(pij, &lh)?;
                    let lifted = pjl.here.lift_morphism(&j_to_h)?;
                    let via = pjl.there.canonical().then(&pjl.into_here)?.then(&lifted)?;
                    for v in 0..a_l.arity() {
                        if direct.images()[v] != via.images()[v] {
                            return Err(Error::InvalidGluing(format!(
                                "cocycle fails on charts ({i}, {j}, {l}), pieces ({k}, {n}, {m}) over D({h}): {} maps to {} directly but {} through chart {j}",
                                a_l.vars()[v],
                                direct.images()[v],
                                via.images()[v]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Carries `w ∈ L_{A_j}` to `L_{A_i}`: `⋁_k ψ_{f_k}(φ_k^L(ψ_{g_k}^{-1}(w ∧ D(g_k))))`.
    pub fn transport_open(&self, j: usize, i: usize, w: &ZarElement) -> Result<ZarElement> {
        if i == j {
            return Ok(w.clone());
        }
        let mut acc = zarlattice::bottom(self.chart(i));
        for p in self.pieces(i, j) {
            let cut = zarlattice::meet(w, &d(p.there.denominator()))?;
            let local = induced_hom(&p.there.canonical(), &cut)?;
            let moved = induced_hom(&p.into_here, &local)?;
            acc = zarlattice::join(&acc, &psi_f(&p.here, &moved, DEFAULT_CAP)?)?;
        }
        Ok(acc)
    }

    pub fn top(&self) -> SchemeCompactOpen {
        SchemeCompactOpen {
            scheme: self.clone(),
            comps: self.charts().iter().map(zarlattice::top).collect(),
        }
    }

    pub fn bottom(&self) -> SchemeCompactOpen {
        SchemeCompactOpen {
            scheme: self.clone(),
            comps: self.charts().iter().map(zarlattice::bottom).collect(),
        }
    }

    /// The compact open of `X` generated by `w ⊂ Spec A_i`.
    pub fn from_chart(&self, i: usize, w: &ZarElement) -> Result<SchemeCompactOpen> {
        if !w.algebra().same(self.chart(i)) {
            return Err(Error::OwnerMismatch(format!("{w} is not in L of chart {i}")));
        }
        let comps = (0..self.charts().len())
            .map(|j| self.transport_open(i, j, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SchemeCompactOpen {
            scheme: self.clone(),
            comps,
        })
    }

    /// Checks that per-chart components agree on overlaps.
    pub fn compact_open(&self, comps: Vec<ZarElement>) -> Result<SchemeCompactOpen> {
        if comps.len() != self.charts().len() {
            return Err(Error::ArityMismatch {
                expected: self.charts().len(),
                found: comps.len(),
            });
        }
        for (i, c) in comps.iter().enumerate() {
            if !c.algebra().same(self.chart(i)) {
                return Err(Error::OwnerMismatch(format!("{c} is not in L of chart {i}")));
            }
        }
        for i in 0..comps.len() {
            for j in 0..comps.len() {
                if i == j {
                    continue;
                }
                let carried = self.transport_open(j, i, &comps[j])?;
                let local = zarlattice::meet(&comps[i], &self.overlap_open(i, j))?;
                if !zarlattice::eq(&carried, &local)? {
                    return Err(Error::InvalidGluing(format!(
                        "compact open components disagree: chart {j} gives {carried} on chart {i}, which has {local}"
                    )));
                }
            }
        }
        Ok(SchemeCompactOpen {
            scheme: self.clone(),
            comps,
        })
    }
}

/// A compact open of a lattice scheme: one lattice element per chart.
#[derive(Clone)]
pub struct SchemeCompactOpen {
    scheme: LatticeScheme,
    comps: Vec<ZarElement>,
}

impl fmt::Debug for SchemeCompactOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SchemeCompactOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

impl SchemeCompactOpen {
    pub fn scheme(&self) -> &LatticeScheme {
        &self.scheme
    }

    pub fn components(&self) -> &[ZarElement] {
        &self.comps
    }

    fn same_owner(&self, other: &SchemeCompactOpen) -> Result<()> {
        if self.scheme == other.scheme {
            Ok(())
        } else {
            Err(Error::OwnerMismatch("compact opens of different schemes".into()))
        }
    }

    fn zip(
        &self,
        other: &SchemeCompactOpen,
        op: fn(&ZarElement, &ZarElement) -> Result<ZarElement>,
    ) -> Result<SchemeCompactOpen> {
        self.same_owner(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| op(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SchemeCompactOpen {
            scheme: self.scheme.clone(),
            comps,
        })
    }

    pub fn join(&self, other: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        self.zip(other, zarlattice::join)
    }

    pub fn meet(&self, other: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        self.zip(other, zarlattice::meet)
    }

    pub fn leq(&self, other: &SchemeCompactOpen) -> Result<bool> {
        self.same_owner(other)?;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            if !zarlattice::leq(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eq(&self, other: &SchemeCompactOpen) -> Result<bool> {
        Ok(self.leq(other)? && other.leq(self)?)
    }

    pub fn is_top(&self) -> Result<bool> {
        self.eq(&self.scheme.top())
    }

    pub fn is_bottom(&self) -> Result<bool> {
        self.eq(&self.scheme.bottom())
    }
}

/// `1 = u_1 ∨ ... ∨ u_n`.
pub fn is_cover(opens: &[SchemeCompactOpen]) -> Result<bool> {
    let Some(first) = opens.first() else {
        return Ok(false);
    };
    let mut acc = first.scheme.bottom();
    for u in opens {
        acc = acc.join(u)?;
    }
    acc.is_top()
}
