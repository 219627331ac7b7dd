//! Sparse multivariate polynomials over a [`Field`].

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Grevlex,
    Lex,
}

/// A block (product) order. Blocks are compared from the first to the last;
/// inside a block the variables are compared by `kind` in the listed
/// precedence. One block covering all variables gives plain grevlex or lex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub blocks: Vec<Vec<usize>>,
}

impl MonomialOrder {
    pub fn grevlex(n: usize) -> MonomialOrder {
        MonomialOrder {
            kind: OrderKind::Grevlex,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn lex(n: usize) -> MonomialOrder {
        MonomialOrder {
            kind: OrderKind::Lex,
            blocks: vec![(0..n).collect()],
        }
    }

    /// Single block with an explicit variable precedence (highest first).
    pub fn with_precedence(kind: OrderKind, precedence: Vec<usize>) -> MonomialOrder {
        MonomialOrder {
            kind,
            blocks: vec![precedence],
        }
    }

    pub fn arity(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// The order on one more variable (index `arity()`), which is eliminated:
    /// any monomial containing it is larger than every monomial free of it.
    pub fn eliminating_new_variable(&self) -> MonomialOrder {
        let mut blocks = vec![vec![self.arity()]];
        blocks.extend(self.blocks.iter().cloned());
        MonomialOrder {
            kind: self.kind,
            blocks,
        }
    }

    /// Concatenates two orders (`other`'s variables shifted by our arity),
    /// block by block.
    pub fn product(&self, other: &MonomialOrder) -> MonomialOrder {
        let shift = self.arity();
        let mut blocks = self.blocks.clone();
        blocks.extend(
            other
                .blocks
                .iter()
                .map(|b| b.iter().map(|v| v + shift).collect()),
        );
        MonomialOrder {
            kind: self.kind,
            blocks,
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for block in &self.blocks {
            let o = match self.kind {
                OrderKind::Lex => block
                    .iter()
                    .map(|&v| a.0[v].cmp(&b.0[v]))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal),
                OrderKind::Grevlex => {
                    let da: u32 = block.iter().map(|&v| a.0[v]).sum();
                    let db: u32 = block.iter().map(|&v| b.0[v]).sum();
                    da.cmp(&db).then_with(|| {
                        block
                            .iter()
                            .rev()
                            .map(|&v| b.0[v].cmp(&a.0[v]))
                            .find(|o| o.is_ne())
                            .unwrap_or(Ordering::Equal)
                    })
                }
            };
            if o.is_ne() {
                return o;
            }
        }
        Ordering::Equal
    }
}

/// The ambient ring `k[x_1..x_n]` with a fixed monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    pub field: Field,
    pub vars: Vec<String>,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: Field, vars: Vec<String>, order: MonomialOrder) -> Arc<PolyRing> {
        assert_eq!(vars.len(), order.arity(), "order arity must match variables");
        Arc::new(PolyRing { field, vars, order })
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// A variable name not used yet, of the form `<stem><k>`.
    pub fn fresh_name(&self, stem: &str) -> String {
        (0..)
            .map(|k| format!("{stem}{k}"))
            .find(|n| self.var_index(n).is_none())
            .unwrap()
    }
}

/// A polynomial with terms sorted in decreasing monomial order and no zero
/// coefficients.
#[derive(Debug, Clone)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<(Monomial, Scalar)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state)
    }
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Scalar) -> Polynomial {
        Polynomial::term(ring, Monomial::one(ring.arity()), c)
    }

    pub fn one(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial::constant(ring, ring.field.one())
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Polynomial {
        Polynomial::term(ring, Monomial::var(ring.arity(), i), ring.field.one())
    }

    pub fn term(ring: &Arc<PolyRing>, m: Monomial, c: Scalar) -> Polynomial {
        let terms = if c.is_zero() { vec![] } else { vec![(m, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds a polynomial from arbitrary terms (summing duplicates).
    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, Scalar)>) -> Polynomial {
        let mut terms = terms;
        terms.sort_by(|a, b| ring.order.cmp(&b.0, &a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// True if no term involves variable `i`.
    pub fn is_free_of(&self, i: usize) -> bool {
        self.terms.iter().all(|(m, _)| m.0[i] == 0)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.combine(other, None)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.combine(other, Some(()))
    }

    fn combine(&self, other: &Polynomial, negate: Option<()>) -> Polynomial {
        let order = &self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let sign = |c: &Scalar| if negate.is_some() { c.neg() } else { c.clone() };
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sign(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1.add(&sign(&b[j].1));
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    /// `c * m * self`; monomial multiplication preserves the term order.
    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (a.mul(m), b.mul(c)))
                .collect(),
        }
    }

    /// `self - c * m * g` in one merge pass.
    pub fn sub_mul_term(&self, m: &Monomial, c: &Scalar, g: &Polynomial) -> Polynomial {
        self.sub(&g.mul_term(m, c))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(&self.ring);
        if self.len() <= other.len() {
            for (m, c) in &self.terms {
                acc = acc.add(&other.mul_term(m, c));
            }
        } else {
            for (m, c) in &other.terms {
                acc = acc.add(&self.mul_term(m, c));
            }
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ring);
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

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_coefficient() {
            Some(c) if !c.is_one() => self.scale(&c.inv().unwrap()),
            _ => self.clone(),
        }
    }

    /// Re-expresses the polynomial in another ring, sending variable `i` to
    /// variable `var_map[i]`, converting coefficients into the target field.
    pub fn map_into(
        &self,
        target: &Arc<PolyRing>,
        var_map: &[usize],
    ) -> crate::error::Result<Polynomial> {
        let n = target.arity();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, &x) in m.0.iter().enumerate() {
                e[var_map[i]] += x;
            }
            terms.push((Monomial(e), target.field.convert(c)?));
        }
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Same arity and field, different ring object (e.g. another order).
    pub fn reorder(&self, target: &Arc<PolyRing>) -> Polynomial {
        if Arc::ptr_eq(&self.ring, target) || *self.ring == **target {
            return Polynomial {
                ring: target.clone(),
                terms: self.terms.clone(),
            };
        }
        let ident: Vec<usize> = (0..self.ring.arity()).collect();
        self.map_into(target, &ident).expect("same field")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> Arc<PolyRing> {
        PolyRing::new(
            Field::Rationals,
            vec!["x".into(), "y".into()],
            MonomialOrder::grevlex(2),
        )
    }

    #[test]
    fn grevlex_and_lex() {
        let g = MonomialOrder::grevlex(3);
        // x*z^2 < x^2*y? degree 3 both; last variable z: exponents 2 vs 0, so x*z^2 smaller
        assert_eq!(
            g.cmp(&Monomial(vec![1, 0, 2]), &Monomial(vec![2, 1, 0])),
            Ordering::Less
        );
        let l = MonomialOrder::lex(2);
        assert_eq!(
            l.cmp(&Monomial(vec![1, 0]), &Monomial(vec![0, 5])),
            Ordering::Greater
        );
    }

    #[test]
    fn elimination_block_dominates() {
        let o = MonomialOrder::grevlex(2).eliminating_new_variable();
        assert_eq!(
            o.cmp(&Monomial(vec![0, 0, 1]), &Monomial(vec![9, 9, 0])),
            Ordering::Greater
        );
    }

    #[test]
    fn arithmetic_and_display() {
        let r = ring2();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let one = Polynomial::one(&r);
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p.to_string(), "x^2 - y^2");
        assert!(p.sub(&x.pow(2)).add(&y.pow(2)).is_zero());
        assert_eq!(x.add(&one).pow(2).to_string(), "x^2 + 2*x + 1");
        let half = Polynomial::constant(&r, Scalar::Rat(num_rational::BigRational::new(1.into(), 2.into())));
        assert_eq!(x.sub(&half).to_string(), "x - 1/2");
    }
}
