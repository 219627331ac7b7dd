use super::{LatticeScheme, MorphismPiece, Overlap, OverlapPiece, SchemeCompactOpen, SchemeMorphism};
use crate::algebra::{make_localization, AlgebraElement, AlgebraMorphism, Localization};
use crate::error::{Error, Result};
use crate::zarlattice::psi_f;
use crate::DEFAULT_CAP;

/// `X|_u` with its inclusion into `X`.
#[derive(Clone, Debug)]
pub struct RestrictedScheme {
    pub scheme: LatticeScheme,
    /// For each new chart, the original chart and the generator of `u` it localizes at.
    pub origins: Vec<(usize, AlgebraElement)>,
    pub inclusion: SchemeMorphism,
    parent: LatticeScheme,
}

impl RestrictedScheme {
    /// `ψ_u : L_{X|u} → ↓u ⊂ L_X`.
    pub fn psi(&self, v: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        if v.scheme() != &self.scheme {
            return Err(Error::OwnerMismatch("open of a different scheme".into()));
        }
        let mut acc = self.parent.bottom();
        for (k, (i, c)) in self.origins.iter().enumerate() {
            let loc = make_localization(self.parent.chart(*i), c)?;
            let w = psi_f(&loc, &v.components()[k], DEFAULT_CAP)?;
            acc = acc.join(&self.parent.from_chart(*i, &w)?)?;
        }
        Ok(acc)
    }

    /// `ψ_u^{-1}(w) = w ∧ u` read in `L_{X|u}`.
    pub fn psi_inv(&self, w: &SchemeCompactOpen) -> Result<SchemeCompactOpen> {
        self.inclusion.pullback_open(w)
    }
}

/// Extends `A → T` to the double localization `(A_c)_d → T`.
fn lift_twice(inner: &Localization, outer: &Localization, base: &AlgebraMorphism) -> Result<AlgebraMorphism> {
    outer.lift_morphism(&inner.lift_morphism(base)?)
}

/// Charts are `(A_i)_c` for the generators `c` of each component of `u`.
pub fn restrict_scheme(x: &LatticeScheme, u: &SchemeCompactOpen) -> Result<RestrictedScheme> {
    if u.scheme() != x {
        return Err(Error::OwnerMismatch("open of a different scheme".into()));
    }
    let mut origins = Vec::new();
    let mut locs: Vec<Localization> = Vec::new();
    for (i, w) in u.components().iter().enumerate() {
        for c in w.generators() {
            let loc = make_localization(x.chart(i), c)?;
            if loc.algebra().is_trivial() {
                continue;
            }
            origins.push((i, c.clone()));
            locs.push(loc);
        }
    }
    let mut overlaps = Vec::new();
    for al in 0..locs.len() {
        for be in al + 1..locs.len() {
            let pieces = overlap_pieces(x, &origins, &locs, al, be)?;
            if !pieces.is_empty() {
                overlaps.push(Overlap {
                    left: al,
                    right: be,
                    pieces,
                });
            }
        }
    }
    let charts = locs.iter().map(|l| l.algebra().clone()).collect();
    let scheme = LatticeScheme::glue(charts, overlaps)?;
    let mut pieces = Vec::new();
    for (k, (i, _)) in origins.iter().enumerate() {
        let a = scheme.chart(k);
        let local = make_localization(a, &a.one())?;
        pieces.push(MorphismPiece {
            source_chart: k,
            target_chart: *i,
            comorphism: locs[k].canonical().then(&local.canonical())?,
            local,
        });
    }
    let inclusion = SchemeMorphism::new(&scheme, x, pieces)?;
    Ok(RestrictedScheme {
        scheme,
        origins,
        inclusion,
        parent: x.clone(),
    })
}

fn overlap_pieces(
    x: &LatticeScheme,
    origins: &[(usize, AlgebraElement)],
    locs: &[Localization],
    al: usize,
    be: usize,
) -> Result<Vec<OverlapPiece>> {
    let ((i, c), (j, c2)) = (&origins[al], &origins[be]);
    let (li, lj) = (&locs[al], &locs[be]);
    let mut out = Vec::new();
    if i == j {
        let left = make_localization(li.algebra(), &li.to_local(c2)?)?;
        let right = make_localization(lj.algebra(), &lj.to_local(c)?)?;
        if left.algebra().is_trivial() {
            return Ok(out);
        }
        let into_left = li.canonical().then(&left.canonical())?;
        let into_right = lj.canonical().then(&right.canonical())?;
        out.push(OverlapPiece {
            to_left: lift_twice(lj, &right, &into_left)?,
            to_right: lift_twice(li, &left, &into_right)?,
            left,
            right,
        });
        return Ok(out);
    }
    let forward = x.pieces(*i, *j);
    let backward = x.pieces(*j, *i);
    for (p, q) in forward.iter().zip(&backward) {
        let n = x.carried_numerator(p, c2)?;
        let m = x.carried_numerator(q, c)?;
        let left = make_localization(li.algebra(), &li.to_local(&p.here.denominator().mul(&n))?)?;
        let right = make_localization(lj.algebra(), &lj.to_local(&q.here.denominator().mul(&m))?)?;
        if left.algebra().is_trivial() {
            continue;
        }
        let to_left = cross(p, li, &left, lj, &right)?;
        let to_right = cross(q, lj, &right, li, &left)?;
        out.push(OverlapPiece {
            left,
            right,
            to_left,
            to_right,
        });
    }
    Ok(out)
}

/// `((A_j)_{c'})_{g m} → ((A_i)_c)_{f n}` induced by piece `p` from chart `i` to chart `j`.
fn cross(
    p: &super::PieceView,
    here_loc: &Localization,
    here_outer: &Localization,
    there_loc: &Localization,
    there_outer: &Localization,
) -> Result<AlgebraMorphism> {
    let into_target = here_loc.canonical().then(&here_outer.canonical())?;
    let f_to_target = p.here.lift_morphism(&into_target)?;
    let base = p.there.canonical().then(&p.into_here)?.then(&f_to_target)?;
    lift_twice(there_loc, there_outer, &base)
}
