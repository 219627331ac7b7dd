use std::fmt;

use super::{LatticeScheme, PieceView, SchemeCompactOpen};
use crate::algebra::{make_localization, AlgebraElement, AlgebraMorphism};
use crate::error::{Error, Result};
use crate::sheaf::{self, invertibility_support_basic, restrict, BasicOpenSection, CoverData, SectionFamily};
use crate::zarlattice::d;
use crate::DEFAULT_CAP;

/// A section over a basic open of one chart.
#[derive(Clone, Debug)]
pub struct Part {
    pub chart: usize,
    pub section: BasicOpenSection,
}

/// A section of `O_X` over the compact open generated by its parts.
/// Compatibility is a separate check; equality is semantic.
#[derive(Clone)]
pub struct GlobalSection {
    scheme: LatticeScheme,
    parts: Vec<Part>,
}

impl fmt::Debug for GlobalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GlobalSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                format!(
                    "chart {}: {}",
                    p.chart,
                    p.section
                        .fraction_string(DEFAULT_CAP)
                        .unwrap_or_else(|_| p.section.value().to_string())
                )
            })
            .collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

impl LatticeScheme {
    /// Carries a section on chart `j` (over `D(h)`) to chart `i` through
    /// piece `p`; the result lives over `D(f · num(φ(h)))`.
    pub(crate) fn transport_section(&self, p: &PieceView, t: &BasicOpenSection) -> Result<BasicOpenSection> {
        let h = t.denominator();
        let hg = h.mul(p.there.denominator());
        let t1 = restrict(t, &hg, DEFAULT_CAP)?;
        let num = self.carried_numerator(p, h)?;
        let target = make_localization(p.here.base(), &p.here.denominator().mul(&num))?;
        let base = self.chart_map_into(p, &target)?;
        let lift = t1.localization().lift_morphism(&base)?;
        BasicOpenSection::new(&target, lift.apply(t1.value())?)
    }

    /// Pairs of restrictions of two parts onto a common basic refinement,
    /// expressed on the first part's chart.
    fn common_refinement(&self, a: &Part, b: &Part) -> Result<Vec<(usize, BasicOpenSection, BasicOpenSection)>> {
        let (g, h) = (a.section.denominator(), b.section.denominator());
        let mut out = Vec::new();
        if a.chart == b.chart {
            let gh = g.mul(h);
            if !is_empty_open(&gh)? {
                out.push((
                    a.chart,
                    restrict(&a.section, &gh, DEFAULT_CAP)?,
                    restrict(&b.section, &gh, DEFAULT_CAP)?,
                ));
            }
            return Ok(out);
        }
        for p in self.pieces(a.chart, b.chart) {
            let moved = self.transport_section(&p, &b.section)?;
            let region = g.mul(moved.denominator());
            if is_empty_open(&region)? {
                continue;
            }
            out.push((
                a.chart,
                restrict(&a.section, &region, DEFAULT_CAP)?,
                restrict(&moved, &region, DEFAULT_CAP)?,
            ));
        }
        Ok(out)
    }
}

fn is_empty_open(h: &AlgebraElement) -> Result<bool> {
    Ok(make_localization(h.algebra(), h)?.algebra().is_trivial())
}

/// Two parts that disagree somewhere on their overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionConflict {
    pub first: usize,
    pub second: usize,
    pub left: String,
    pub right: String,
}

impl GlobalSection {
    pub fn new(scheme: &LatticeScheme, parts: Vec<Part>) -> Result<GlobalSection> {
        for p in &parts {
            if p.chart >= scheme.charts().len() || !p.section.base().same(scheme.chart(p.chart)) {
                return Err(Error::OwnerMismatch(format!(
                    "part {:?} does not live on chart {}",
                    p.section, p.chart
                )));
            }
        }
        Ok(GlobalSection {
            scheme: scheme.clone(),
            parts,
        })
    }

    /// One element per chart, each over the whole chart.
    pub fn from_chart_values(scheme: &LatticeScheme, values: Vec<AlgebraElement>) -> Result<GlobalSection> {
        if values.len() != scheme.charts().len() {
            return Err(Error::ArityMismatch {
                expected: scheme.charts().len(),
                found: values.len(),
            });
        }
        let parts = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                Ok(Part {
                    chart: i,
                    section: BasicOpenSection::global(v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GlobalSection::new(scheme, parts)
    }

    /// Parses one value per chart, e.g. `["t", "1/s"]` (division by units allowed).
    pub fn parse_chart_values(scheme: &LatticeScheme, values: &[&str]) -> Result<GlobalSection> {
        let v = values
            .iter()
            .zip(scheme.charts())
            .map(|(t, a)| a.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        GlobalSection::from_chart_values(scheme, v)
    }

    /// A single section on one chart.
    pub fn on_chart(scheme: &LatticeScheme, chart: usize, section: BasicOpenSection) -> Result<GlobalSection> {
        GlobalSection::new(scheme, vec![Part { chart, section }])
    }

    pub fn scheme(&self) -> &LatticeScheme {
        &self.scheme
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    /// The compact open this section lives over.
    pub fn open(&self) -> Result<SchemeCompactOpen> {
        let mut acc = self.scheme.bottom();
        for p in &self.parts {
            let w = self.scheme.from_chart(p.chart, &d(p.section.denominator()))?;
            acc = acc.join(&w)?;
        }
        Ok(acc)
    }

    pub fn first_conflict(&self) -> Result<Option<SectionConflict>> {
        for a in 0..self.parts.len() {
            for b in a + 1..self.parts.len() {
                for (_, s, t) in self.scheme.common_refinement(&self.parts[a], &self.parts[b])? {
                    if !sheaf::section_equal(&s, &t)? {
                        return Ok(Some(SectionConflict {
                            first: a,
                            second: b,
                            left: s.value().to_string(),
                            right: t.value().to_string(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_compatible(&self) -> Result<bool> {
        Ok(self.first_conflict()?.is_none())
    }

    /// Same open and agreement on every overlap of parts.
    pub fn equals(&self, other: &GlobalSection) -> Result<bool> {
        if self.scheme != other.scheme {
            return Err(Error::OwnerMismatch("sections of different schemes".into()));
        }
        if !self.open()?.eq(&other.open()?)? {
            return Ok(false);
        }
        for a in &self.parts {
            for b in &other.parts {
                for (_, s, t) in self.scheme.common_refinement(a, b)? {
                    if s.value() != t.value() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `s|_w`.
    pub fn restrict_to(&self, w: &SchemeCompactOpen) -> Result<GlobalSection> {
        let mut parts = Vec::new();
        for p in &self.parts {
            for c in w.components()[p.chart].generators() {
                let g = p.section.denominator().mul(c);
                if is_empty_open(&g)? {
                    continue;
                }
                parts.push(Part {
                    chart: p.chart,
                    section: restrict(&p.section, &g, DEFAULT_CAP)?,
                });
            }
        }
        GlobalSection::new(&self.scheme, parts)
    }

    fn same_shape(&self, other: &GlobalSection) -> bool {
        self.parts.len() == other.parts.len()
            && self.parts.iter().zip(&other.parts).all(|(a, b)| {
                a.chart == b.chart && a.section.localization().algebra().same(b.section.localization().algebra())
            })
    }

    fn combine(
        &self,
        other: &GlobalSection,
        op: fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement,
    ) -> Result<GlobalSection> {
        if self.scheme != other.scheme {
            return Err(Error::OwnerMismatch("sections of different schemes".into()));
        }
        let mut parts = Vec::new();
        if self.same_shape(other) {
            for (a, b) in self.parts.iter().zip(&other.parts) {
                let v = op(a.section.value(), b.section.value());
                parts.push(Part {
                    chart: a.chart,
                    section: BasicOpenSection::new(a.section.localization(), v)?,
                });
            }
        } else {
            for a in &self.parts {
                for b in &other.parts {
                    for (chart, s, t) in self.scheme.common_refinement(a, b)? {
                        let v = op(s.value(), t.value());
                        parts.push(Part {
                            chart,
                            section: BasicOpenSection::new(s.localization(), v)?,
                        });
                    }
                }
            }
        }
        GlobalSection::new(&self.scheme, parts)
    }

    pub fn add(&self, other: &GlobalSection) -> Result<GlobalSection> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn mul(&self, other: &GlobalSection) -> Result<GlobalSection> {
        self.combine(other, |a, b| a.mul(b))
    }

    pub fn neg(&self) -> GlobalSection {
        GlobalSection {
            scheme: self.scheme.clone(),
            parts: self
                .parts
                .iter()
                .map(|p| Part {
                    chart: p.chart,
                    section: BasicOpenSection::new(p.section.localization(), p.section.value().neg())
                        .expect("same owner"),
                })
                .collect(),
        }
    }

    /// For a single-chart scheme over the whole chart: the element of `A`
    /// obtained by gluing the parts.
    pub fn to_algebra_element(&self) -> Result<AlgebraElement> {
        if self.scheme.charts().len() != 1 {
            return Err(Error::Unsupported(
                "reading a section back as an algebra element needs a single chart".into(),
            ));
        }
        let a = self.scheme.chart(0);
        let pieces: Vec<AlgebraElement> = self.parts.iter().map(|p| p.section.denominator().clone()).collect();
        let cover = CoverData::new(a, pieces)?;
        let fam = SectionFamily::new(cover, self.parts.iter().map(|p| p.section.clone()).collect())?;
        sheaf::glue(&fam, DEFAULT_CAP)
    }
}

/// `O_X(u)` as a computable ring.
#[derive(Clone, Debug)]
pub struct SectionRing {
    open: SchemeCompactOpen,
}

impl SectionRing {
    pub fn sections_over(u: &SchemeCompactOpen) -> SectionRing {
        SectionRing { open: u.clone() }
    }

    /// `Γ(X)`.
    pub fn global(x: &LatticeScheme) -> SectionRing {
        SectionRing { open: x.top() }
    }

    pub fn open(&self) -> &SchemeCompactOpen {
        &self.open
    }

    fn constant(&self, c: i64) -> Result<GlobalSection> {
        let x = self.open.scheme();
        let mut parts = Vec::new();
        for (i, w) in self.open.components().iter().enumerate() {
            for g in w.generators() {
                let loc = make_localization(x.chart(i), g)?;
                parts.push(Part {
                    chart: i,
                    section: BasicOpenSection::new(&loc, loc.algebra().from_i64(c))?,
                });
            }
        }
        GlobalSection::new(x, parts)
    }

    pub fn zero(&self) -> Result<GlobalSection> {
        self.constant(0)
    }

    pub fn one(&self) -> Result<GlobalSection> {
        self.constant(1)
    }

    /// `None` if `s` is a section over this open; otherwise the reason.
    pub fn reject(&self, s: &GlobalSection) -> Result<Option<String>> {
        if !s.open()?.eq(&self.open)? {
            return Ok(Some(format!(
                "section lives over {} rather than {}",
                s.open()?,
                self.open
            )));
        }
        Ok(s.first_conflict()?.map(|c| {
            format!(
                "parts {} and {} disagree: {} vs {}",
                c.first, c.second, c.left, c.right
            )
        }))
    }

    pub fn contains(&self, s: &GlobalSection) -> Result<bool> {
        Ok(self.reject(s)?.is_none())
    }

    pub fn equal(&self, s: &GlobalSection, t: &GlobalSection) -> Result<bool> {
        s.equals(t)
    }
}

/// `𝒟_u(s)`: per part, `D(g·r)` for `s = r / g^n`, spread to all charts and joined.
pub fn invertibility_support_scheme(s: &GlobalSection) -> Result<SchemeCompactOpen> {
    let x = s.scheme();
    let mut acc = x.bottom();
    for p in s.parts() {
        let w = invertibility_support_basic(&p.section, DEFAULT_CAP)?;
        acc = acc.join(&x.from_chart(p.chart, &w)?)?;
    }
    Ok(acc)
}

/// The unit `η : X → Spec Γ(X)`, given by its two components.
#[derive(Clone, Debug)]
pub struct EtaData {
    scheme: LatticeScheme,
}

pub fn unit_eta(x: &LatticeScheme) -> EtaData {
    EtaData { scheme: x.clone() }
}

impl EtaData {
    /// `η*(D(s_1, ..., s_n)) = ⋁ 𝒟_1(s_i)` for global sections `s_i`.
    pub fn eta_star(&self, gens: &[GlobalSection]) -> Result<SchemeCompactOpen> {
        let mut acc = self.scheme.bottom();
        for s in gens {
            acc = acc.join(&invertibility_support_scheme(s)?)?;
        }
        Ok(acc)
    }

    /// `η♯(s)`: the restriction family of a global section.
    pub fn eta_sharp(&self, s: &GlobalSection) -> Result<GlobalSection> {
        s.restrict_to(&self.scheme.top())
    }
}

/// Checks `O_X(𝒟_u(s)) ≅ O_X(u)_s` piecewise: for each part `r/g^n` of `s`
/// the canonical maps `(A_g)_s ⇄ A_{g r}` are mutually inverse, and every
/// sample `t / s^k` is carried to `t|·(s|)^{-k}` on `D(g r)`.
pub fn qcqs_lemma_check(s: &GlobalSection, samples: &[(GlobalSection, u32)]) -> Result<bool> {
    for p in s.parts() {
        let sec = &p.section;
        let g_loc = sec.localization();
        let (_, r) = sec.numerator(DEFAULT_CAP)?;
        let gr = sec.denominator().mul(&r);
        let l1 = make_localization(g_loc.algebra(), sec.value())?;
        let l2 = make_localization(sec.base(), &gr)?;
        let into_l1 = g_loc.canonical().then(&l1.canonical())?;
        let l2_to_l1 = l2.lift_morphism(&into_l1)?;
        let g_to_l2 = sheaf::restriction_morphism(g_loc, &l2, DEFAULT_CAP)?;
        let l1_to_l2 = l1.lift_morphism(&g_to_l2)?;
        if l1_to_l2.then(&l2_to_l1)? != AlgebraMorphism::identity(l1.algebra())
            || l2_to_l1.then(&l1_to_l2)? != AlgebraMorphism::identity(l2.algebra())
        {
            return Ok(false);
        }
        let s_on = restrict(sec, &gr, DEFAULT_CAP)?;
        let s_inv = l2
            .algebra()
            .unit_inverse(s_on.value())
            .ok_or_else(|| Error::Defect(format!("{} is not invertible on D({gr})", sec.value())))?;
        for (t, k) in samples {
            for tp in t.parts().iter().filter(|tp| tp.chart == p.chart) {
                let common = tp.section.denominator().mul(&gr);
                if is_empty_open(&common)? {
                    continue;
                }
                if tp.section.denominator() != sec.denominator() {
                    continue;
                }
                let frac = l1.canonical().apply(tp.section.value())?.mul(&l1.inverse().pow(*k));
                let mapped = l1_to_l2.apply(&frac)?;
                let expect = restrict(&tp.section, &gr, DEFAULT_CAP)?.value().mul(&s_inv.pow(*k));
                if mapped != expect {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `Γ(Spec A) → A`.
pub fn counit(s: &GlobalSection) -> Result<AlgebraElement> {
    s.to_algebra_element()
}

/// `A → Γ(Spec A)` for the affine scheme `x` on `A`.
pub fn counit_inverse(x: &LatticeScheme, a: &AlgebraElement) -> Result<GlobalSection> {
    GlobalSection::from_chart_values(x, vec![a.clone()])
}
