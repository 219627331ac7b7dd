//! The structure sheaf of `Spec A` on basic opens: `O(D(f)) = A_f`.

use std::fmt;

use crate::algebra::{make_localization, AlgebraElement, AlgebraMorphism, Localization, PresentedAlgebra};
use crate::error::{Error, Result};
use crate::zarlattice::{self, d, ZarElement};

/// A section `r / f^n` over the basic open `D(f)`, stored as a normal form in `A_f`.
#[derive(Clone)]
pub struct BasicOpenSection {
    loc: Localization,
    value: AlgebraElement,
}

impl fmt::Debug for BasicOpenSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over D({})", self.value, self.loc.denominator())
    }
}

impl BasicOpenSection {
    pub fn new(loc: &Localization, value: AlgebraElement) -> Result<BasicOpenSection> {
        if !value.algebra().same(loc.algebra()) {
            return Err(Error::OwnerMismatch(format!(
                "{value} is not an element of {}",
                loc.algebra()
            )));
        }
        Ok(BasicOpenSection {
            loc: loc.clone(),
            value,
        })
    }

    /// `a / 1` over `D(1)`.
    pub fn global(a: &AlgebraElement) -> Result<BasicOpenSection> {
        let loc = make_localization(a.algebra(), &a.algebra().one())?;
        let value = loc.to_local(a)?;
        Ok(BasicOpenSection { loc, value })
    }

    /// `r / f^n`.
    pub fn fraction(f: &AlgebraElement, r: &AlgebraElement, n: u32) -> Result<BasicOpenSection> {
        let loc = make_localization(f.algebra(), f)?;
        let value = loc.fraction(r, n)?;
        Ok(BasicOpenSection { loc, value })
    }

    /// Parses a section such as `x/f^2 + 1` in `A_f`; `1/f` is always available.
    pub fn parse(f: &AlgebraElement, text: &str) -> Result<BasicOpenSection> {
        let loc = make_localization(f.algebra(), f)?;
        let value = loc.algebra().parse_element(text)?;
        Ok(BasicOpenSection { loc, value })
    }

    pub fn base(&self) -> &PresentedAlgebra {
        self.loc.base()
    }

    pub fn denominator(&self) -> &AlgebraElement {
        self.loc.denominator()
    }

    pub fn localization(&self) -> &Localization {
        &self.loc
    }

    pub fn value(&self) -> &AlgebraElement {
        &self.value
    }

    /// `(n, r)` with `self = r / f^n` and `n` minimal.
    pub fn numerator(&self, cap: u32) -> Result<(u32, AlgebraElement)> {
        self.loc.numerator(&self.value, cap)
    }

    /// Displays as `r / f^n`.
    pub fn fraction_string(&self, cap: u32) -> Result<String> {
        let (n, r) = self.numerator(cap)?;
        Ok(match n {
            0 => r.to_string(),
            1 => format!("({r}) / ({})", self.denominator()),
            _ => format!("({r}) / ({})^{n}", self.denominator()),
        })
    }
}

/// The canonical map `A_f → A_g` for `D(g) ≤ D(f)`: base variables go to
/// themselves and `1/f ↦ c·(1/g)^k` where `g^k = c·f` modulo the relations.
pub fn restriction_morphism(from: &Localization, to: &Localization, cap: u32) -> Result<AlgebraMorphism> {
    let a = from.base();
    if !a.same(to.base()) {
        return Err(Error::OwnerMismatch(format!(
            "localizations of {} and {}",
            a,
            to.base()
        )));
    }
    let (f, g) = (from.denominator(), to.denominator());
    if !zarlattice::leq(&d(g), &d(f))? {
        return Err(Error::Precondition(format!("D({g}) is not below D({f})")));
    }
    let mut gk = a.one();
    for k in 0..=cap {
        let m = a.ideal_member(&gk, std::slice::from_ref(f))?;
        if let Some(c) = m.cofactors {
            let c = to.to_local(&c[0])?;
            let mut images: Vec<AlgebraElement> = (0..a.arity()).map(|i| to.algebra().var(i)).collect();
            images.push(c.mul(&to.inverse().pow(k)));
            return AlgebraMorphism::new_unchecked(from.algebra(), to.algebra(), images);
        }
        gk = gk.mul(g);
    }
    Err(Error::CapExceeded {
        cap,
        context: format!("finding g^k in <{f}> for g = {g}"),
    })
}

/// `s|_{D(g)}`; requires `D(g) ≤ D(f)`.
pub fn restrict(s: &BasicOpenSection, g: &AlgebraElement, cap: u32) -> Result<BasicOpenSection> {
    let to = make_localization(s.base(), g)?;
    let phi = restriction_morphism(&s.loc, &to, cap)?;
    Ok(BasicOpenSection {
        value: phi.apply(&s.value)?,
        loc: to,
    })
}

/// Equality of sections over the same basic open, by normal form in `A_f`.
pub fn section_equal(s: &BasicOpenSection, t: &BasicOpenSection) -> Result<bool> {
    if !s.loc.algebra().same(t.loc.algebra()) || s.denominator() != t.denominator() {
        return Err(Error::OwnerMismatch(format!(
            "sections over D({}) and D({})",
            s.denominator(),
            t.denominator()
        )));
    }
    Ok(s.value == t.value)
}

/// Pieces `f_1..f_n` with a certificate `Σ c_i f_i = 1` in `A`.
#[derive(Debug, Clone)]
pub struct CoverData {
    base: PresentedAlgebra,
    pieces: Vec<AlgebraElement>,
    certificate: Vec<AlgebraElement>,
}

impl CoverData {
    pub fn new(base: &PresentedAlgebra, pieces: Vec<AlgebraElement>) -> Result<CoverData> {
        let m = base.ideal_member(&base.one(), &pieces)?;
        match m.cofactors {
            Some(certificate) => Ok(CoverData {
                base: base.clone(),
                pieces,
                certificate,
            }),
            None => Err(Error::NotACover(format!(
                "[{}] in {base}",
                pieces.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn parse(base: &PresentedAlgebra, pieces: &[&str]) -> Result<CoverData> {
        let p = pieces
            .iter()
            .map(|t| base.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        CoverData::new(base, p)
    }

    pub fn base(&self) -> &PresentedAlgebra {
        &self.base
    }

    pub fn pieces(&self) -> &[AlgebraElement] {
        &self.pieces
    }

    pub fn certificate(&self) -> &[AlgebraElement] {
        &self.certificate
    }

    /// Re-evaluates `Σ c_i f_i` and compares with 1.
    pub fn verify(&self) -> bool {
        self.pieces
            .iter()
            .zip(&self.certificate)
            .fold(self.base.zero(), |acc, (f, c)| acc.add(&f.mul(c)))
            .is_one()
    }
}

/// One section per cover piece.
#[derive(Debug, Clone)]
pub struct SectionFamily {
    cover: CoverData,
    sections: Vec<BasicOpenSection>,
}

impl SectionFamily {
    pub fn new(cover: CoverData, sections: Vec<BasicOpenSection>) -> Result<SectionFamily> {
        if sections.len() != cover.pieces.len() {
            return Err(Error::ArityMismatch {
                expected: cover.pieces.len(),
                found: sections.len(),
            });
        }
        for (s, f) in sections.iter().zip(&cover.pieces) {
            if s.denominator() != f || !s.base().same(&cover.base) {
                return Err(Error::OwnerMismatch(format!(
                    "section {s:?} does not sit over piece {f}"
                )));
            }
        }
        Ok(SectionFamily { cover, sections })
    }

    /// The restrictions of a global element to every piece.
    pub fn split(cover: &CoverData, a: &AlgebraElement) -> Result<SectionFamily> {
        let sections = cover
            .pieces
            .iter()
            .map(|f| {
                let loc = make_localization(&cover.base, f)?;
                let value = loc.to_local(a)?;
                Ok(BasicOpenSection { loc, value })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SectionFamily {
            cover: cover.clone(),
            sections,
        })
    }

    pub fn cover(&self) -> &CoverData {
        &self.cover
    }

    pub fn sections(&self) -> &[BasicOpenSection] {
        &self.sections
    }
}

/// A pair of pieces whose sections disagree on their overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incompatibility {
    pub i: usize,
    pub j: usize,
    pub left: String,
    pub right: String,
}

impl From<Incompatibility> for Error {
    fn from(w: Incompatibility) -> Error {
        Error::Incompatible {
            i: w.i,
            j: w.j,
            left: w.left,
            right: w.right,
        }
    }
}

/// The first pair `i < j` with `s_i ≠ s_j` on `D(f_i f_j)`, if any.
pub fn first_incompatibility(fam: &SectionFamily, cap: u32) -> Result<Option<Incompatibility>> {
    let p = &fam.cover.pieces;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let fij = p[i].mul(&p[j]);
            let si = restrict(&fam.sections[i], &fij, cap)?;
            let sj = restrict(&fam.sections[j], &fij, cap)?;
            if !section_equal(&si, &sj)? {
                return Ok(Some(Incompatibility {
                    i,
                    j,
                    left: si.value.to_string(),
                    right: sj.value.to_string(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_compatible(fam: &SectionFamily, cap: u32) -> Result<bool> {
    Ok(first_incompatibility(fam, cap)?.is_none())
}

/// The unique `a ∈ A` restricting to every section of a compatible family.
///
/// With `s_i = a_i / f_i^N` and `m` such that
/// `a_i f_i^m f_j^(N+m) = a_j f_j^m f_i^(N+m)` in `A` for all pairs, a
/// certificate `Σ e_i f_i^(N+m) = 1` gives `a = Σ e_i a_i f_i^m`.
pub fn glue(fam: &SectionFamily, cap: u32) -> Result<AlgebraElement> {
    if let Some(w) = first_incompatibility(fam, cap)? {
        return Err(w.into());
    }
    let a = &fam.cover.base;
    let f = &fam.cover.pieces;
    let cleared = fam
        .sections
        .iter()
        .map(|s| s.numerator(cap))
        .collect::<Result<Vec<_>>>()?;
    let n = cleared.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let nums: Vec<AlgebraElement> = cleared
        .iter()
        .zip(f)
        .map(|((k, r), fi)| r.mul(&fi.pow(n - k)))
        .collect();
    let agree = |m: u32| {
        (0..f.len()).all(|i| {
            (i + 1..f.len()).all(|j| {
                nums[i].mul(&f[i].pow(m)).mul(&f[j].pow(n + m))
                    == nums[j].mul(&f[j].pow(m)).mul(&f[i].pow(n + m))
            })
        })
    };
    let m = (0..=cap).find(|&m| agree(m)).ok_or_else(|| Error::CapExceeded {
        cap,
        context: "clearing denominators while gluing".into(),
    })?;
    let powers: Vec<AlgebraElement> = f.iter().map(|fi| fi.pow(n + m)).collect();
    let cert = a
        .ideal_member(&a.one(), &powers)?
        .cofactors
        .ok_or_else(|| Error::Defect("powers of a cover do not generate the unit ideal".into()))?;
    let glued = cert
        .iter()
        .zip(&nums)
        .zip(f)
        .fold(a.zero(), |acc, ((e, b), fi)| acc.add(&e.mul(b).mul(&fi.pow(m))));
    for (s, fi) in fam.sections.iter().zip(f) {
        let loc = s.localization();
        if loc.to_local(&glued)? != s.value {
            return Err(Error::Defect(format!(
                "glued element {glued} does not restrict to {} on D({fi})",
                s.value
            )));
        }
    }
    Ok(glued)
}

/// `𝒟_{D(f)}(r / f^n) = D(f·r)`.
pub fn invertibility_support_basic(s: &BasicOpenSection, cap: u32) -> Result<ZarElement> {
    let (_, r) = s.numerator(cap)?;
    Ok(d(&s.denominator().mul(&r)))
}

/// `s` is a unit of `A_f`, decided as `D(f) ≤ D(f·r)`.
pub fn is_invertible(s: &BasicOpenSection, cap: u32) -> Result<bool> {
    let sup = invertibility_support_basic(s, cap)?;
    zarlattice::leq(&d(s.denominator()), &sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_CAP as CAP;

    fn alg(t: &str) -> PresentedAlgebra {
        PresentedAlgebra::parse(t).unwrap()
    }

    fn el(a: &PresentedAlgebra, t: &str) -> AlgebraElement {
        a.parse_element(t).unwrap()
    }

    #[test]
    fn restrict_examples() {
        let a = alg("QQ[x]");
        let x = el(&a, "x");
        let s = BasicOpenSection::global(&x).unwrap();
        let r = restrict(&s, &x, CAP).unwrap();
        assert_eq!(r.value(), &r.localization().to_local(&x).unwrap());

        let inv = BasicOpenSection::parse(&x, "1/x").unwrap();
        let x2 = el(&a, "x^2");
        let r = restrict(&inv, &x2, CAP).unwrap();
        let expect = BasicOpenSection::fraction(&x2, &x, 1).unwrap();
        assert!(section_equal(&r, &expect).unwrap());

        let y = el(&a, "x-1");
        assert!(matches!(restrict(&inv, &y, CAP), Err(Error::Precondition(_))));
    }

    #[test]
    fn section_equal_examples() {
        let a = alg("QQ[x,y]");
        let x = el(&a, "x");
        let s = BasicOpenSection::fraction(&x, &x, 0).unwrap();
        assert!(section_equal(&s, &s.clone()).unwrap());
        let t = BasicOpenSection::fraction(&x, &el(&a, "y"), 0).unwrap();
        assert!(!section_equal(&s, &t).unwrap());

        let n = alg("QQ[x]/(x^2)");
        let xn = el(&n, "x");
        let zero = BasicOpenSection::fraction(&xn, &n.zero(), 0).unwrap();
        let one_x = BasicOpenSection::fraction(&xn, &xn, 0).unwrap();
        assert!(section_equal(&zero, &one_x).unwrap());
    }

    #[test]
    fn compatibility_examples() {
        let a = alg("QQ[x]");
        let cover = CoverData::parse(&a, &["x", "1-x"]).unwrap();
        assert!(cover.verify());
        let fam = SectionFamily::split(&cover, &el(&a, "x^3")).unwrap();
        assert!(is_compatible(&fam, CAP).unwrap());

        let bad = SectionFamily::new(
            cover.clone(),
            vec![
                BasicOpenSection::parse(&el(&a, "x"), "1/x").unwrap(),
                BasicOpenSection::fraction(&el(&a, "1-x"), &a.zero(), 0).unwrap(),
            ],
        )
        .unwrap();
        let w = first_incompatibility(&bad, CAP).unwrap().unwrap();
        assert_eq!((w.i, w.j), (0, 1));
        assert!(matches!(glue(&bad, CAP), Err(Error::Incompatible { .. })));

        let single = CoverData::parse(&a, &["1"]).unwrap();
        let fam = SectionFamily::split(&single, &el(&a, "x")).unwrap();
        assert!(is_compatible(&fam, CAP).unwrap());
    }

    #[test]
    fn glue_examples() {
        let a = alg("QQ[x]");
        let cover = CoverData::parse(&a, &["x", "1-x"]).unwrap();
        for t in ["x", "x^2+1"] {
            let fam = SectionFamily::split(&cover, &el(&a, t)).unwrap();
            assert_eq!(glue(&fam, CAP).unwrap(), el(&a, t));
        }
        let b = alg("QQ[x,y]");
        assert!(matches!(
            CoverData::parse(&b, &["x", "y"]),
            Err(Error::NotACover(_))
        ));
    }

    #[test]
    fn glue_genuine_fractions() {
        // x is a zero divisor here, so clearing needs the extra exponent
        let a = alg("QQ[x,y]/(x*y - x)");
        let cover = CoverData::parse(&a, &["x", "1-x", "y"]).unwrap();
        let g = el(&a, "x^2 + 3*y");
        let fam = SectionFamily::split(&cover, &g).unwrap();
        assert_eq!(glue(&fam, CAP).unwrap(), g);
    }

    #[test]
    fn invertibility_examples() {
        let a = alg("QQ[x]");
        let x = el(&a, "x");
        let glob = BasicOpenSection::global(&el(&a, "x^2-1")).unwrap();
        assert!(zarlattice::eq(
            &invertibility_support_basic(&glob, CAP).unwrap(),
            &d(&el(&a, "x^2-1"))
        )
        .unwrap());
        let s = BasicOpenSection::fraction(&x, &el(&a, "x-1"), 0).unwrap();
        let sup = invertibility_support_basic(&s, CAP).unwrap();
        assert!(zarlattice::eq(&sup, &zarlattice::meet(&d(&x), &d(&el(&a, "x-1"))).unwrap()).unwrap());

        assert!(is_invertible(&BasicOpenSection::parse(&x, "1/x").unwrap(), CAP).unwrap());
        assert!(!is_invertible(&BasicOpenSection::global(&x).unwrap(), CAP).unwrap());
        assert!(is_invertible(&BasicOpenSection::fraction(&x, &x, 0).unwrap(), CAP).unwrap());
    }
}
