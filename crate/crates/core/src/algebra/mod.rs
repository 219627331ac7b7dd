//! Finitely presented algebras `k[x_1..x_n]/<p_1..p_m>` over `QQ` and `GF(p)`.
//!
//! Every algebra caches the reduced Gröbner basis of its relation ideal at
//! construction, so element equality is decided by comparing normal forms.

pub mod groebner;
pub mod parse;
pub mod poly;
pub mod scalar;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub use poly::{Monomial, MonomialOrder, OrderKind, PolyRing, Polynomial};
pub use scalar::{Field, Scalar};

use crate::error::{Error, Result};
use parse::Expr;

/// Upper bound on the size of algebras handed out by [`PresentedAlgebra::enumerate_elements`].
pub const MAX_ENUMERATION: usize = 1 << 16;

struct AlgebraData {
    ring: Arc<PolyRing>,
    relations: Vec<Polynomial>,
    groebner: Vec<Polynomial>,
    cofactors: OnceLock<Vec<Vec<Polynomial>>>,
    localizations: Mutex<HashMap<Polynomial, PresentedAlgebra>>,
    base_changes: Mutex<HashMap<Field, PresentedAlgebra>>,
}

/// A finitely presented algebra. Cloning is cheap (shared).
#[derive(Clone)]
pub struct PresentedAlgebra(Arc<AlgebraData>);

impl PartialEq for PresentedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ring == other.0.ring && self.0.groebner == other.0.groebner)
    }
}

impl Eq for PresentedAlgebra {}

impl fmt::Debug for PresentedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PresentedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field())?;
        if !self.vars().is_empty() {
            write!(f, "[{}]", self.vars().join(","))?;
        }
        if !self.relations().is_empty() {
            let rels: Vec<String> = self.relations().iter().map(|r| r.to_string()).collect();
            write!(f, "/({})", rels.join(", "))?;
        }
        Ok(())
    }
}

impl PresentedAlgebra {
    /// Builds the algebra and its Gröbner basis. Relations must live in `ring`
    /// (or a ring of the same arity and field).
    pub fn from_ring(ring: Arc<PolyRing>, relations: Vec<Polynomial>) -> Result<PresentedAlgebra> {
        for r in &relations {
            if r.ring().arity() != ring.arity() {
                return Err(Error::ArityMismatch {
                    expected: ring.arity(),
                    found: r.ring().arity(),
                });
            }
            if r.ring().field != ring.field {
                return Err(Error::FieldMismatch {
                    left: r.ring().field.to_string(),
                    right: ring.field.to_string(),
                });
            }
        }
        let relations: Vec<Polynomial> = relations
            .iter()
            .map(|r| r.reorder(&ring))
            .filter(|r| !r.is_zero())
            .collect();
        let gb = groebner::compute(&relations, &ring, false);
        Ok(PresentedAlgebra(Arc::new(AlgebraData {
            ring,
            relations,
            groebner: gb.basis,
            cofactors: OnceLock::new(),
            localizations: Mutex::new(HashMap::new()),
            base_changes: Mutex::new(HashMap::new()),
        })))
    }

    /// The polynomial ring `field[vars]` under grevlex.
    pub fn free(field: Field, vars: &[&str]) -> PresentedAlgebra {
        let ring = PolyRing::new(
            field,
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::grevlex(vars.len()),
        );
        PresentedAlgebra::from_ring(ring, Vec::new()).unwrap()
    }

    /// Builds an algebra from a field, variable names and relation texts.
    pub fn new(field: Field, vars: &[String], relations: &[String], order: OrderKind) -> Result<PresentedAlgebra> {
        let order = match order {
            OrderKind::Grevlex => MonomialOrder::grevlex(vars.len()),
            OrderKind::Lex => MonomialOrder::lex(vars.len()),
        };
        let ring = PolyRing::new(field, vars.to_vec(), order);
        let free = PresentedAlgebra::from_ring(ring.clone(), Vec::new())?;
        let rels = relations
            .iter()
            .map(|r| free.parse_element(r).map(|e| e.rep))
            .collect::<Result<Vec<_>>>()?;
        PresentedAlgebra::from_ring(ring, rels)
    }

    /// Parses ring text such as `GF(5)[x,y]/(x^2+y^2-1)`.
    pub fn parse(text: &str) -> Result<PresentedAlgebra> {
        Self::parse_with_order(text, OrderKind::Grevlex)
    }

    pub fn parse_with_order(text: &str, order: OrderKind) -> Result<PresentedAlgebra> {
        let spec = parse::parse_ring(text)?;
        let free = PresentedAlgebra::new(spec.field, &spec.vars, &[], order)?;
        for (r, &at) in spec.relations.iter().zip(&spec.offsets) {
            if let Err(Error::Parse { line: 1, column, message }) = free.parse_element(r) {
                return Err(Error::Parse {
                    line: 1,
                    column: column + at,
                    message,
                });
            }
        }
        PresentedAlgebra::new(spec.field, &spec.vars, &spec.relations, order)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.0.ring
    }

    pub fn field(&self) -> Field {
        self.0.ring.field
    }

    pub fn vars(&self) -> &[String] {
        &self.0.ring.vars
    }

    pub fn arity(&self) -> usize {
        self.0.ring.arity()
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.0.relations
    }

    pub fn groebner(&self) -> &[Polynomial] {
        &self.0.groebner
    }

    /// `cofactors()[k][i]`: coefficient of relation `i` in Gröbner element `k`.
    pub fn groebner_cofactors(&self) -> &[Vec<Polynomial>] {
        self.0.cofactors.get_or_init(|| {
            let gb = groebner::compute(&self.0.relations, &self.0.ring, true);
            debug_assert_eq!(gb.basis, self.0.groebner);
            gb.cofactors.unwrap()
        })
    }

    /// The zero ring (`1 = 0`).
    pub fn is_trivial(&self) -> bool {
        self.0.groebner.len() == 1 && self.0.groebner[0].is_constant()
    }

    pub fn same(&self, other: &PresentedAlgebra) -> bool {
        self == other
    }

    fn check_owner(&self, e: &AlgebraElement) -> Result<()> {
        if e.alg.same(self) {
            Ok(())
        } else {
            Err(Error::OwnerMismatch(format!("{} is not an element of {}", e, self)))
        }
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<AlgebraElement> {
        if f.ring().arity() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: f.ring().arity(),
            });
        }
        if f.ring().field != self.field() {
            return Err(Error::FieldMismatch {
                left: f.ring().field.to_string(),
                right: self.field().to_string(),
            });
        }
        Ok(self.reduce(f.reorder(self.ring())))
    }

    fn reduce(&self, f: Polynomial) -> AlgebraElement {
        let rep = if self.0.groebner.is_empty() {
            f
        } else {
            groebner::normal_form(&f, &self.0.groebner)
        };
        AlgebraElement {
            alg: self.clone(),
            rep,
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            rep: Polynomial::zero(self.ring()),
        }
    }

    pub fn one(&self) -> AlgebraElement {
        self.reduce(Polynomial::one(self.ring()))
    }

    pub fn scalar(&self, c: Scalar) -> AlgebraElement {
        self.reduce(Polynomial::constant(self.ring(), c))
    }

    pub fn from_i64(&self, n: i64) -> AlgebraElement {
        self.scalar(self.field().from_i64(n))
    }

    pub fn var(&self, i: usize) -> AlgebraElement {
        self.reduce(Polynomial::var(self.ring(), i))
    }

    pub fn var_named(&self, name: &str) -> Result<AlgebraElement> {
        self.ring()
            .var_index(name)
            .map(|i| self.var(i))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn element(&self, f: Polynomial) -> Result<AlgebraElement> {
        self.normal_form(&f)
    }

    /// Parses and evaluates an expression in this algebra.
    pub fn parse_element(&self, text: &str) -> Result<AlgebraElement> {
        let e = parse::parse_expr(text)?;
        self.eval_expr(&e, text)
    }

    pub(crate) fn eval_expr(&self, e: &Expr, text: &str) -> Result<AlgebraElement> {
        Ok(match e {
            Expr::Int(n) => self.scalar(self.field().from_bigint(n)),
            Expr::Var { name, offset } => match self.ring().var_index(name) {
                Some(i) => self.var(i),
                None => {
                    return Err(Error::parse_at(
                        text,
                        *offset,
                        format!("unknown variable `{name}` in {self}"),
                    ))
                }
            },
            Expr::Neg(a) => self.eval_expr(a, text)?.neg(),
            Expr::Add(a, b) => self.eval_expr(a, text)?.add(&self.eval_expr(b, text)?),
            Expr::Sub(a, b) => self.eval_expr(a, text)?.sub(&self.eval_expr(b, text)?),
            Expr::Mul(a, b) => self.eval_expr(a, text)?.mul(&self.eval_expr(b, text)?),
            Expr::Pow(a, k) => self.eval_expr(a, text)?.pow(*k),
            Expr::Div(a, b, offset) => {
                let num = self.eval_expr(a, text)?;
                let den = self.eval_expr(b, text)?;
                let inv = self.unit_inverse(&den).ok_or_else(|| {
                    Error::parse_at(text, *offset, format!("`{den}` is not a unit in {self}"))
                })?;
                num.mul(&inv)
            }
        })
    }

    /// The inverse of `u`, if it is a unit.
    pub fn unit_inverse(&self, u: &AlgebraElement) -> Option<AlgebraElement> {
        if u.rep.is_constant() && !u.rep.is_zero() {
            let c = u.rep.leading_coefficient().unwrap().inv().unwrap();
            return Some(self.scalar(c));
        }
        if self.is_trivial() {
            return Some(self.zero());
        }
        let mut gens: Vec<Polynomial> = self.groebner().to_vec();
        gens.push(u.rep.clone());
        let gb = groebner::compute(&gens, self.ring(), true);
        if !gb.is_unit() {
            return None;
        }
        let cof = &gb.cofactors.unwrap()[0];
        Some(self.reduce(cof[gens.len() - 1].clone()))
    }

    pub fn is_unit(&self, u: &AlgebraElement) -> bool {
        self.unit_inverse(u).is_some()
    }

    /// Decides `f ∈ ⟨gens⟩ + relations`; on success the cofactors `c_i` satisfy
    /// `f = Σ c_i gens_i` in this algebra.
    pub fn ideal_member(&self, f: &AlgebraElement, gens: &[AlgebraElement]) -> Result<Membership> {
        self.check_owner(f)?;
        for g in gens {
            self.check_owner(g)?;
        }
        let mut all: Vec<Polynomial> = gens.iter().map(|g| g.rep.clone()).collect();
        all.extend(self.groebner().iter().cloned());
        let m = ideal_member(&f.rep, &all)?;
        Ok(Membership {
            member: m.member,
            cofactors: m.cofactors.map(|c| {
                c.into_iter()
                    .take(gens.len())
                    .map(|p| self.reduce(p))
                    .collect()
            }),
        })
    }

    /// Decides `f ∈ √(⟨gens⟩ + relations)`.
    pub fn radical_member(&self, f: &AlgebraElement, gens: &[AlgebraElement]) -> Result<bool> {
        self.check_owner(f)?;
        for g in gens {
            self.check_owner(g)?;
        }
        Ok(RadicalTester::new(self, gens).contains(f))
    }

    /// The same presentation over another field (`QQ` reduces to `GF(p)`).
    pub fn base_change(&self, field: Field) -> Result<PresentedAlgebra> {
        if field == self.field() {
            return Ok(self.clone());
        }
        if let Some(a) = self.0.base_changes.lock().unwrap().get(&field) {
            return Ok(a.clone());
        }
        let ring = PolyRing::new(field, self.vars().to_vec(), self.ring().order.clone());
        let ident: Vec<usize> = (0..self.arity()).collect();
        let rels = self
            .relations()
            .iter()
            .map(|r| r.map_into(&ring, &ident))
            .collect::<Result<Vec<_>>>()?;
        let a = PresentedAlgebra::from_ring(ring, rels)?;
        self.0
            .base_changes
            .lock()
            .unwrap()
            .insert(field, a.clone());
        Ok(a)
    }

    /// Monomials not divisible by any leading monomial of the Gröbner basis,
    /// if there are finitely many.
    pub fn staircase(&self) -> Option<Vec<Monomial>> {
        let n = self.arity();
        if self.is_trivial() {
            return Some(Vec::new());
        }
        let lms: Vec<&Monomial> = self
            .groebner()
            .iter()
            .map(|g| g.leading_monomial().unwrap())
            .collect();
        let mut bounds = vec![0u32; n];
        for (i, b) in bounds.iter_mut().enumerate() {
            *b = lms
                .iter()
                .filter(|m| m.0.iter().enumerate().all(|(j, &e)| j == i || e == 0) && m.0[i] > 0)
                .map(|m| m.0[i])
                .min()?;
        }
        let mut out = Vec::new();
        let mut e = vec![0u32; n];
        loop {
            let m = Monomial(e.clone());
            if !lms.iter().any(|l| l.divides(&m)) {
                out.push(m);
            }
            let mut k = 0;
            loop {
                if k == n {
                    out.sort_by(|a, b| self.ring().order.cmp(a, b));
                    return Some(out);
                }
                e[k] += 1;
                if e[k] < bounds[k] {
                    break;
                }
                e[k] = 0;
                k += 1;
            }
        }
    }

    /// Every element of a finite algebra over a prime field, in a fixed order.
    pub fn enumerate_elements(&self) -> Result<Vec<AlgebraElement>> {
        let scalars = self.field().elements().ok_or_else(|| {
            Error::NotEnumerable(format!("{self} has characteristic 0"))
        })?;
        let stairs = self
            .staircase()
            .ok_or_else(|| Error::NotEnumerable(format!("{self} is not finite-dimensional")))?;
        let q = scalars.len();
        let total = (0..stairs.len()).try_fold(1usize, |acc, _| acc.checked_mul(q));
        let total = match total {
            Some(t) if t <= MAX_ENUMERATION => t,
            _ => {
                return Err(Error::NotEnumerable(format!(
                    "{self} has more than {MAX_ENUMERATION} elements"
                )))
            }
        };
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut k = idx;
            let mut terms = Vec::new();
            for m in &stairs {
                let d = k % q;
                k /= q;
                if d != 0 {
                    terms.push((m.clone(), scalars[d].clone()));
                }
            }
            out.push(AlgebraElement {
                alg: self.clone(),
                rep: Polynomial::from_terms(self.ring(), terms),
            });
        }
        Ok(out)
    }

    pub fn is_enumerable(&self) -> bool {
        self.field().characteristic() > 0 && self.staircase().is_some()
    }

    /// True if the algebra has no nonzero nilpotents (finite algebras only).
    pub fn is_reduced_finite(&self) -> Result<bool> {
        Ok(self
            .enumerate_elements()?
            .iter()
            .all(|x| x.is_zero() || !x.mul(x).is_zero()))
    }

    /// Idempotents `e` with `e^2 = e`, in enumeration order (finite algebras).
    pub fn idempotents(&self) -> Result<Vec<AlgebraElement>> {
        Ok(self
            .enumerate_elements()?
            .into_iter()
            .filter(|x| x.mul(x) == *x)
            .collect())
    }

    /// Minimal nonzero idempotents: the connected factors `B e_i` of a finite algebra.
    pub fn primitive_idempotents(&self) -> Result<Vec<AlgebraElement>> {
        let ids = self.idempotents()?;
        let nonzero: Vec<AlgebraElement> = ids.into_iter().filter(|e| !e.is_zero()).collect();
        Ok(nonzero
            .iter()
            .filter(|e| !nonzero.iter().any(|f| f != *e && f.mul(e) == *f))
            .cloned()
            .collect())
    }

    /// `A / <extra>` on the same variables.
    pub fn quotient(&self, extra: &[AlgebraElement]) -> Result<PresentedAlgebra> {
        for e in extra {
            self.check_owner(e)?;
        }
        let mut rels = self.relations().to_vec();
        rels.extend(extra.iter().map(|e| e.rep.clone()));
        PresentedAlgebra::from_ring(self.ring().clone(), rels)
    }

    /// Reads a polynomial written over the same variable names into this
    /// algebra's ring (used to move elements between presentations that share
    /// variables, e.g. `B` and `B / <1 - e>`).
    pub fn transfer(&self, e: &AlgebraElement) -> Result<AlgebraElement> {
        if e.alg.arity() != self.arity() || e.alg.vars() != self.vars() {
            return Err(Error::OwnerMismatch(format!(
                "cannot transfer {} from {} to {}",
                e, e.alg, self
            )));
        }
        self.normal_form(&e.rep.reorder(self.ring()))
    }
}

/// Outcome of an ideal membership test.
#[derive(Debug, Clone)]
pub struct Membership {
    pub member: bool,
    pub cofactors: Option<Vec<AlgebraElement>>,
}

/// Polynomial-level membership result.
#[derive(Debug, Clone)]
pub struct PolyMembership {
    pub member: bool,
    pub cofactors: Option<Vec<Polynomial>>,
}

fn check_arity(f: &Polynomial, gens: &[Polynomial]) -> Result<()> {
    for g in gens {
        if g.ring().arity() != f.ring().arity() {
            return Err(Error::ArityMismatch {
                expected: f.ring().arity(),
                found: g.ring().arity(),
            });
        }
    }
    Ok(())
}

/// Decides `f ∈ ⟨gens⟩` in the polynomial ring of `f`; on success returns
/// cofactors with `f = Σ c_i gens_i`.
pub fn ideal_member(f: &Polynomial, gens: &[Polynomial]) -> Result<PolyMembership> {
    check_arity(f, gens)?;
    let ring = f.ring();
    if f.is_zero() {
        return Ok(PolyMembership {
            member: true,
            cofactors: Some(vec![Polynomial::zero(ring); gens.len()]),
        });
    }
    let gb = groebner::compute(gens, ring, true);
    let (rem, quotients) = groebner::divide(f, &gb.basis);
    if !rem.is_zero() {
        return Ok(PolyMembership {
            member: false,
            cofactors: None,
        });
    }
    let cofs = gb.cofactors.unwrap();
    let mut out = vec![Polynomial::zero(ring); gens.len()];
    for (q, row) in quotients.iter().zip(&cofs) {
        if q.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(row) {
            *o = o.add(&q.mul(c));
        }
    }
    Ok(PolyMembership {
        member: true,
        cofactors: Some(out),
    })
}

/// Decides `f ∈ √⟨gens⟩` by the Rabinowitsch trick.
pub fn radical_member(f: &Polynomial, gens: &[Polynomial]) -> Result<bool> {
    check_arity(f, gens)?;
    let alg = PresentedAlgebra::from_ring(f.ring().clone(), Vec::new())?;
    let gens: Vec<AlgebraElement> = gens
        .iter()
        .map(|g| alg.normal_form(g))
        .collect::<Result<_>>()?;
    Ok(RadicalTester::new(&alg, &gens).contains(&alg.normal_form(f)?))
}

/// Radical membership against a fixed ideal `⟨gens⟩ + relations`, sharing
/// one Gröbner basis across queries.
pub struct RadicalTester {
    basis: groebner::GroebnerBasis,
    ext: Arc<PolyRing>,
}

impl RadicalTester {
    pub fn new(alg: &PresentedAlgebra, gens: &[AlgebraElement]) -> RadicalTester {
        let mut all: Vec<Polynomial> = alg.groebner().to_vec();
        all.extend(gens.iter().map(|g| g.rep.clone()));
        let basis = groebner::compute(&all, alg.ring(), false);
        let ring = alg.ring();
        let mut vars = ring.vars.clone();
        vars.push(ring.fresh_name("rab"));
        let n = vars.len();
        let ext = PolyRing::new(ring.field, vars, MonomialOrder::grevlex(n));
        RadicalTester { basis, ext }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.basis.is_unit()
    }

    pub fn contains(&self, f: &AlgebraElement) -> bool {
        if self.basis.is_unit() || f.rep.is_zero() {
            return true;
        }
        if groebner::normal_form(&f.rep, &self.basis.basis).is_zero() {
            return true;
        }
        let n = self.ext.arity() - 1;
        let embed: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = self
            .basis
            .basis
            .iter()
            .map(|g| g.map_into(&self.ext, &embed).unwrap())
            .collect();
        let fy = f
            .rep
            .map_into(&self.ext, &embed)
            .unwrap()
            .mul(&Polynomial::var(&self.ext, n));
        gens.push(Polynomial::one(&self.ext).sub(&fy));
        groebner::compute(&gens, &self.ext, false).is_unit()
    }
}

/// An element of a presented algebra, stored as its normal form.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: PresentedAlgebra,
    rep: Polynomial,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep && self.alg.same(&other.alg)
    }
}

impl Eq for AlgebraElement {}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &PresentedAlgebra {
        &self.alg
    }

    pub fn rep(&self) -> &Polynomial {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep == Polynomial::one(self.alg.ring())
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        debug_assert!(self.alg.same(&o.alg));
        AlgebraElement {
            alg: self.alg.clone(),
            rep: self.rep.add(&o.rep),
        }
    }

    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        debug_assert!(self.alg.same(&o.alg));
        AlgebraElement {
            alg: self.alg.clone(),
            rep: self.rep.sub(&o.rep),
        }
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.alg.clone(),
            rep: self.rep.neg(),
        }
    }

    pub fn mul(&self, o: &AlgebraElement) -> AlgebraElement {
        debug_assert!(self.alg.same(&o.alg));
        self.alg.reduce(self.rep.mul(&o.rep))
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        AlgebraElement {
            alg: self.alg.clone(),
            rep: self.rep.scale(c),
        }
    }

    pub fn pow(&self, e: u32) -> AlgebraElement {
        let mut result = self.alg.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The nonzero constant this element equals, if any.
    /// Reads this element in `target`, a presentation on the same variables
    /// over another field (e.g. a base change).
    pub fn base_change_into(&self, target: &PresentedAlgebra) -> Result<AlgebraElement> {
        if target.arity() != self.alg.arity() {
            return Err(Error::ArityMismatch {
                expected: target.arity(),
                found: self.alg.arity(),
            });
        }
        let ident: Vec<usize> = (0..target.arity()).collect();
        target.normal_form(&self.rep.map_into(target.ring(), &ident)?)
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.rep.is_zero() {
            return Some(self.alg.field().zero());
        }
        self.rep
            .is_constant()
            .then(|| self.rep.leading_coefficient().unwrap().clone())
    }
}

/// An algebra morphism, given by the images of the source variables.
#[derive(Clone)]
pub struct AlgebraMorphism {
    source: PresentedAlgebra,
    target: PresentedAlgebra,
    images: Vec<AlgebraElement>,
}

impl fmt::Debug for AlgebraMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .source
            .vars()
            .iter()
            .zip(&self.images)
            .map(|(v, i)| format!("{v} -> {i}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl PartialEq for AlgebraMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source.same(&other.source) && self.target.same(&other.target) && self.images == other.images
    }
}

impl Eq for AlgebraMorphism {}

impl AlgebraMorphism {
    /// Checked constructor: every relation of the source must map to zero.
    pub fn new(
        source: &PresentedAlgebra,
        target: &PresentedAlgebra,
        images: Vec<AlgebraElement>,
    ) -> Result<AlgebraMorphism> {
        let m = Self::new_unchecked(source, target, images)?;
        m.check()?;
        Ok(m)
    }

    /// Builds the morphism data without checking relations.
    pub fn new_unchecked(
        source: &PresentedAlgebra,
        target: &PresentedAlgebra,
        images: Vec<AlgebraElement>,
    ) -> Result<AlgebraMorphism> {
        if images.len() != source.arity() {
            return Err(Error::ArityMismatch {
                expected: source.arity(),
                found: images.len(),
            });
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch {
                left: source.field().to_string(),
                right: target.field().to_string(),
            });
        }
        for i in &images {
            target.check_owner(i)?;
        }
        Ok(AlgebraMorphism {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Parses image texts (one per source variable) in the target.
    pub fn parse(
        source: &PresentedAlgebra,
        target: &PresentedAlgebra,
        images: &[&str],
    ) -> Result<AlgebraMorphism> {
        let imgs = images
            .iter()
            .map(|t| target.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        AlgebraMorphism::new(source, target, imgs)
    }

    pub fn identity(a: &PresentedAlgebra) -> AlgebraMorphism {
        AlgebraMorphism {
            source: a.clone(),
            target: a.clone(),
            images: (0..a.arity()).map(|i| a.var(i)).collect(),
        }
    }

    pub fn source(&self) -> &PresentedAlgebra {
        &self.source
    }

    pub fn target(&self) -> &PresentedAlgebra {
        &self.target
    }

    pub fn images(&self) -> &[AlgebraElement] {
        &self.images
    }

    /// Validity: every relation maps to zero. Returns the first violation.
    pub fn check(&self) -> Result<()> {
        for r in self.source.relations() {
            let img = self.apply_poly(r);
            if !img.is_zero() {
                return Err(Error::InvalidMorphism {
                    relation: r.to_string(),
                    image: img.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    /// Substitutes the images into a polynomial over the source variables.
    pub fn apply_poly(&self, f: &Polynomial) -> AlgebraElement {
        let n = self.source.arity();
        let mut powers: Vec<Vec<AlgebraElement>> = vec![vec![self.target.one()]; n];
        let mut acc = self.target.zero();
        for (m, c) in f.terms() {
            let mut t = self.target.scalar(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&self.images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn apply(&self, e: &AlgebraElement) -> Result<AlgebraElement> {
        self.source.check_owner(e)?;
        Ok(self.apply_poly(&e.rep))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        if !self.target.same(&next.source) {
            return Err(Error::OwnerMismatch(format!(
                "cannot compose: target {} is not source {}",
                self.target, next.source
            )));
        }
        Ok(AlgebraMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self.images.iter().map(|i| next.apply_poly(&i.rep)).collect(),
        })
    }

    /// Images agree as normal forms.
    pub fn equals(&self, other: &AlgebraMorphism) -> bool {
        self == other
    }

    /// The same morphism between base-changed algebras.
    pub fn base_change(&self, field: Field) -> Result<AlgebraMorphism> {
        let s = self.source.base_change(field)?;
        let t = self.target.base_change(field)?;
        let ident: Vec<usize> = (0..t.arity()).collect();
        let images = self
            .images
            .iter()
            .map(|i| t.normal_form(&i.rep.map_into(t.ring(), &ident)?))
            .collect::<Result<Vec<_>>>()?;
        AlgebraMorphism::new_unchecked(&s, &t, images)
    }
}

/// `check_morphism`: all relations map to zero.
pub fn check_morphism(phi: &AlgebraMorphism) -> bool {
    phi.is_valid()
}

/// `compose(φ, ψ) = ψ ∘ φ`.
pub fn compose(phi: &AlgebraMorphism, psi: &AlgebraMorphism) -> Result<AlgebraMorphism> {
    phi.then(psi)
}

pub fn morphism_equal(phi: &AlgebraMorphism, psi: &AlgebraMorphism) -> bool {
    phi.equals(psi)
}

/// `A_f = A[y]/(relations, f·y - 1)`, with `y` eliminated first in the order so
/// that elements coming from `A` have `y`-free normal forms.
#[derive(Clone)]
pub struct Localization {
    base: PresentedAlgebra,
    denom: AlgebraElement,
    algebra: PresentedAlgebra,
}

impl fmt::Debug for Localization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})_({})", self.base, self.denom)
    }
}

impl Localization {
    pub fn base(&self) -> &PresentedAlgebra {
        &self.base
    }

    pub fn denominator(&self) -> &AlgebraElement {
        &self.denom
    }

    pub fn algebra(&self) -> &PresentedAlgebra {
        &self.algebra
    }

    /// Index of the adjoined inverse variable in `algebra()`.
    pub fn inverse_var(&self) -> usize {
        self.base.arity()
    }

    pub fn inverse(&self) -> AlgebraElement {
        self.algebra.var(self.inverse_var())
    }

    /// Embeds a base polynomial (same variables, `y` absent).
    pub fn embed_poly(&self, f: &Polynomial) -> AlgebraElement {
        let ident: Vec<usize> = (0..self.base.arity()).collect();
        let p = f.map_into(self.algebra.ring(), &ident).expect("same field");
        self.algebra.reduce(p)
    }

    /// The canonical morphism `A -> A_f`, `r ↦ r/1`.
    pub fn canonical(&self) -> AlgebraMorphism {
        AlgebraMorphism {
            source: self.base.clone(),
            target: self.algebra.clone(),
            images: (0..self.base.arity()).map(|i| self.algebra.var(i)).collect(),
        }
    }

    pub fn to_local(&self, r: &AlgebraElement) -> Result<AlgebraElement> {
        self.base.check_owner(r)?;
        Ok(self.embed_poly(&r.rep))
    }

    /// `r / f^n`.
    pub fn fraction(&self, r: &AlgebraElement, n: u32) -> Result<AlgebraElement> {
        Ok(self.to_local(r)?.mul(&self.inverse().pow(n)))
    }

    /// Smallest `k ≤ cap` with `f^k · s` free of the inverse variable, and that
    /// numerator as an element of the base: `s = r / f^k`.
    pub fn numerator(&self, s: &AlgebraElement, cap: u32) -> Result<(u32, AlgebraElement)> {
        self.algebra.check_owner(s)?;
        let y = self.inverse_var();
        let f = self.embed_poly(&self.denom.rep);
        let mut cur = s.clone();
        for k in 0..=cap {
            if cur.rep.is_free_of(y) {
                let ring = self.base.ring();
                let terms = cur
                    .rep
                    .terms()
                    .iter()
                    .map(|(m, c)| (Monomial(m.0[..y].to_vec()), c.clone()))
                    .collect();
                let r = self.base.reduce(Polynomial::from_terms(ring, terms));
                return Ok((k, r));
            }
            cur = cur.mul(&f);
        }
        Err(Error::CapExceeded {
            cap,
            context: format!("extracting a numerator of {s} over {}", self.denom),
        })
    }

    /// The unique morphism `A_f -> target` extending `images` of the base
    /// variables; fails if the image of `f` is not a unit.
    pub fn lift(&self, target: &PresentedAlgebra, images: Vec<AlgebraElement>) -> Result<AlgebraMorphism> {
        let base_map = AlgebraMorphism::new_unchecked(&self.base, target, images)?;
        self.lift_morphism(&base_map)
    }

    /// Extends `φ : A -> C` to `A_f -> C` when `φ(f)` is a unit.
    pub fn lift_morphism(&self, phi: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        if !phi.source.same(&self.base) {
            return Err(Error::OwnerMismatch(format!(
                "morphism source {} is not {}",
                phi.source, self.base
            )));
        }
        let target = phi.target.clone();
        let fimg = phi.apply_poly(&self.denom.rep);
        let inv = target.unit_inverse(&fimg).ok_or_else(|| {
            Error::NotAUnit(format!("{fimg} (image of {}) in {target}", self.denom))
        })?;
        let mut images = phi.images.clone();
        images.push(inv);
        Ok(AlgebraMorphism {
            source: self.algebra.clone(),
            target,
            images,
        })
    }
}

/// The localization `A_f` as a finitely presented algebra, with its canonical map.
pub fn make_localization(a: &PresentedAlgebra, f: &AlgebraElement) -> Result<Localization> {
    a.check_owner(f)?;
    if let Some(al) = a.0.localizations.lock().unwrap().get(&f.rep) {
        return Ok(Localization {
            base: a.clone(),
            denom: f.clone(),
            algebra: al.clone(),
        });
    }
    let ring = a.ring();
    let mut vars = ring.vars.clone();
    vars.push(ring.fresh_name("inv"));
    let order = ring.order.eliminating_new_variable();
    let ext = PolyRing::new(ring.field, vars, order);
    let ident: Vec<usize> = (0..a.arity()).collect();
    let mut rels: Vec<Polynomial> = a
        .relations()
        .iter()
        .map(|r| r.map_into(&ext, &ident))
        .collect::<Result<_>>()?;
    let y = Polynomial::var(&ext, a.arity());
    rels.push(f.rep.map_into(&ext, &ident)?.mul(&y).sub(&Polynomial::one(&ext)));
    let algebra = PresentedAlgebra::from_ring(ext, rels)?;
    a.0.localizations
        .lock()
        .unwrap()
        .insert(f.rep.clone(), algebra.clone());
    Ok(Localization {
        base: a.clone(),
        denom: f.clone(),
        algebra,
    })
}

/// A tensor product with its two coprojections.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub algebra: PresentedAlgebra,
    pub left: AlgebraMorphism,
    pub right: AlgebraMorphism,
}

/// `A ⊗_k B`: disjoint union of variables (clashing names on the right get a
/// `_2` suffix) and the union of relations.
pub fn make_tensor(a: &PresentedAlgebra, b: &PresentedAlgebra) -> Result<Tensor> {
    tensor_with(a, b, |_| Ok(Vec::new()))
}

/// The pushout `A ⊗_R B` of `φ : R -> A` and `ψ : R -> B`.
pub fn make_pushout(phi: &AlgebraMorphism, psi: &AlgebraMorphism) -> Result<Tensor> {
    if !phi.source.same(&psi.source) {
        return Err(Error::OwnerMismatch("pushout legs must share a source".into()));
    }
    tensor_with(&phi.target, &psi.target, |(l, r)| {
        phi.images
            .iter()
            .zip(&psi.images)
            .map(|(x, y)| {
                let lx = l.apply_poly(&x.rep);
                let ry = r.apply_poly(&y.rep);
                Ok(lx.sub(&ry).rep)
            })
            .collect()
    })
}

fn tensor_with<F>(a: &PresentedAlgebra, b: &PresentedAlgebra, extra: F) -> Result<Tensor>
where
    F: Fn((&AlgebraMorphism, &AlgebraMorphism)) -> Result<Vec<Polynomial>>,
{
    if a.field() != b.field() {
        return Err(Error::FieldMismatch {
            left: a.field().to_string(),
            right: b.field().to_string(),
        });
    }
    let mut vars = a.vars().to_vec();
    for v in b.vars() {
        let mut name = v.clone();
        while vars.contains(&name) {
            name.push_str("_2");
        }
        vars.push(name);
    }
    let order = a.ring().order.product(&b.ring().order);
    let ring = PolyRing::new(a.field(), vars, order);
    let na = a.arity();
    let left_map: Vec<usize> = (0..na).collect();
    let right_map: Vec<usize> = (na..na + b.arity()).collect();
    let mut rels = Vec::new();
    for r in a.relations() {
        rels.push(r.map_into(&ring, &left_map)?);
    }
    for r in b.relations() {
        rels.push(r.map_into(&ring, &right_map)?);
    }
    // provisional free algebra to build the coprojections used by `extra`
    let free = PresentedAlgebra::from_ring(ring.clone(), rels.clone())?;
    let l0 = AlgebraMorphism::new_unchecked(a, &free, (0..na).map(|i| free.var(i)).collect())?;
    let r0 = AlgebraMorphism::new_unchecked(
        b,
        &free,
        (0..b.arity()).map(|i| free.var(na + i)).collect(),
    )?;
    rels.extend(extra((&l0, &r0))?);
    let algebra = PresentedAlgebra::from_ring(ring, rels)?;
    let left = AlgebraMorphism::new(a, &algebra, (0..na).map(|i| algebra.var(i)).collect())?;
    let right = AlgebraMorphism::new(
        b,
        &algebra,
        (0..b.arity()).map(|i| algebra.var(na + i)).collect(),
    )?;
    Ok(Tensor {
        algebra,
        left,
        right,
    })
}

/// All morphisms `A -> B` for a finite algebra `B`, by exhaustive search over
/// assignments of the variables of `A` (base-changing `A` from `QQ` to the
/// prime field of `B` when needed).
pub fn enumerate_homs(a: &PresentedAlgebra, b: &PresentedAlgebra) -> Result<Vec<AlgebraMorphism>> {
    let a = match (a.field(), b.field()) {
        (x, y) if x == y => a.clone(),
        (Field::Rationals, Field::Prime(_)) => a.base_change(b.field())?,
        (x, y) => {
            return Err(Error::FieldMismatch {
                left: x.to_string(),
                right: y.to_string(),
            })
        }
    };
    let elems = b.enumerate_elements()?;
    let n = a.arity();
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(elems.len()));
    let total = match total {
        Some(t) if t <= 1 << 22 => t,
        _ => {
            return Err(Error::NotEnumerable(format!(
                "too many assignments from {a} into {b}"
            )))
        }
    };
    let mut out = Vec::new();
    for idx in 0..total {
        let mut k = idx;
        let mut images = vec![b.zero(); n];
        for slot in images.iter_mut().rev() {
            *slot = elems[k % elems.len()].clone();
            k /= elems.len();
        }
        let m = AlgebraMorphism {
            source: a.clone(),
            target: b.clone(),
            images,
        };
        if m.is_valid() {
            out.push(m);
        }
    }
    Ok(out)
}
