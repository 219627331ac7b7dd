//! Buchberger's algorithm with the Gebauer–Möller criteria and optional
//! cofactor tracking.
//!
//! When tracking is on, every basis element `g_k` comes with cofactors
//! `c_{k,i}` such that `g_k = sum_i c_{k,i} * gens_i` holds exactly. These
//! cofactors are the unit-ideal certificates consumed by sheaf gluing.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, MonomialOrder, PolyRing, Polynomial};
use super::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    /// Reduced, monic, sorted by decreasing leading monomial.
    pub basis: Vec<Polynomial>,
    /// `cofactors[k][i]` multiplies input generator `i` in the expression of `basis[k]`.
    pub cofactors: Option<Vec<Vec<Polynomial>>>,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }
}

struct Elem {
    poly: Polynomial,
    cof: Vec<Polynomial>,
    lm: Monomial,
    active: bool,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Buchberger<'a> {
    ring: &'a Arc<PolyRing>,
    track: bool,
    ngens: usize,
    elems: Vec<Elem>,
    pairs: Vec<Pair>,
}

impl<'a> Buchberger<'a> {
    fn zero_cof(&self) -> Vec<Polynomial> {
        if self.track {
            vec![Polynomial::zero(self.ring); self.ngens]
        } else {
            Vec::new()
        }
    }

    /// Full reduction of `p` by the active elements, carrying cofactors along.
    /// Over `QQ` the result is only determined up to a nonzero scalar, which
    /// is applied to the cofactors as well.
    /// With `full` unset only the leading term is reduced.
    fn reduce(&self, p: Polynomial, cof: Vec<Polynomial>, full: bool) -> (Polynomial, Vec<Polynomial>) {
        let mut p = p;
        let mut cof = cof;
        let mut rem: Vec<(Monomial, Scalar)> = Vec::new();
        let mut steps = 0usize;
        loop {
            let (lm, lc) = match p.terms().first() {
                Some((m, c)) => (m.clone(), c.clone()),
                None => break,
            };
            let reducer = self
                .elems
                .iter()
                .find(|e| e.active && e.lm.divides(&lm));
            match reducer {
                Some(e) => {
                    let q = lm.div(&e.lm);
                    let (a, b) = cross_multipliers(&lc, e.poly.leading_coefficient().unwrap());
                    if !a.is_one() {
                        p = p.scale(&a);
                        for (_, c) in rem.iter_mut() {
                            *c = c.mul(&a);
                        }
                        for ci in cof.iter_mut() {
                            *ci = ci.scale(&a);
                        }
                    }
                    p = p.sub_mul_term(&q, &b, &e.poly);
                    if self.track {
                        for (ci, ei) in cof.iter_mut().zip(&e.cof) {
                            *ci = ci.sub_mul_term(&q, &b, ei);
                        }
                    }
                }
                None if !full => {
                    rem.extend(p.terms().iter().cloned());
                    break;
                }
                None => {
                    let lead = Polynomial::term(self.ring, lm.clone(), lc.clone());
                    p = p.sub(&lead);
                    rem.push((lm, lc));
                }
            }
            steps += 1;
            if steps % 8 == 0 {
                if let Some(c) = content(&p).filter(|c| !c.is_one()) {
                    let inv = c.inv().unwrap();
                    p = p.scale(&inv);
                    for (_, r) in rem.iter_mut() {
                        *r = r.mul(&inv);
                    }
                    for ci in cof.iter_mut() {
                        *ci = ci.scale(&inv);
                    }
                }
            }
        }
        (Polynomial::from_terms(self.ring, rem), cof)
    }

    /// Monic over `GF(p)`, primitive with integer coefficients over `QQ`.
    fn normalize(p: Polynomial, cof: Vec<Polynomial>) -> (Polynomial, Vec<Polynomial>) {
        let c = content(&p).unwrap_or_else(|| p.leading_coefficient().unwrap().clone());
        Self::divide_by(p, cof, &c)
    }

    fn monic(p: Polynomial, cof: Vec<Polynomial>) -> (Polynomial, Vec<Polynomial>) {
        let c = p.leading_coefficient().unwrap().clone();
        Self::divide_by(p, cof, &c)
    }

    fn divide_by(p: Polynomial, cof: Vec<Polynomial>, c: &Scalar) -> (Polynomial, Vec<Polynomial>) {
        let inv = c.inv().unwrap();
        let cof = cof.iter().map(|x| x.scale(&inv)).collect();
        (p.scale(&inv), cof)
    }

    /// Gebauer–Möller update with the new element `h`.
    fn update(&mut self, h: Polynomial, cof: Vec<Polynomial>) {
        let t = self.elems.len();
        let lm_h = h.leading_monomial().unwrap().clone();

        let mut c: Vec<(usize, Monomial)> = self
            .elems
            .iter()
            .enumerate()
            .filter(|(_, e)| e.active)
            .map(|(k, e)| (k, e.lm.lcm(&lm_h)))
            .collect();
        let mut d: Vec<(usize, Monomial)> = Vec::new();
        while !c.is_empty() {
            let (g1, l1) = c.remove(0);
            let coprime = self.elems[g1].lm.coprime(&lm_h);
            let dominated = c.iter().chain(d.iter()).any(|(_, l2)| l2.divides(&l1));
            if coprime || !dominated {
                d.push((g1, l1));
            }
        }
        let e: Vec<Pair> = d
            .into_iter()
            .filter(|(g, _)| !self.elems[*g].lm.coprime(&lm_h))
            .map(|(g, lcm)| Pair { i: g, j: t, lcm })
            .collect();

        let elems = &self.elems;
        self.pairs.retain(|p| {
            let drop = lm_h.divides(&p.lcm)
                && elems[p.i].lm.lcm(&lm_h) != p.lcm
                && elems[p.j].lm.lcm(&lm_h) != p.lcm;
            !drop
        });
        self.pairs.extend(e);

        for el in self.elems.iter_mut() {
            if el.active && lm_h.divides(&el.lm) {
                el.active = false;
            }
        }
        self.elems.push(Elem {
            poly: h,
            cof,
            lm: lm_h,
            active: true,
        });
    }

    fn unit_result(&self, p: &Polynomial, cof: Vec<Polynomial>) -> GroebnerBasis {
        let (one, cof) = Self::monic(p.clone(), cof);
        GroebnerBasis {
            basis: vec![one],
            cofactors: self.track.then(|| vec![cof]),
        }
    }

    fn spoly(&self, pair: &Pair) -> (Polynomial, Vec<Polynomial>) {
        let (a, b) = (&self.elems[pair.i], &self.elems[pair.j]);
        let (ma, mb) = cross_multipliers(a.poly.leading_coefficient().unwrap(), b.poly.leading_coefficient().unwrap());
        let qa = pair.lcm.div(&a.lm);
        let qb = pair.lcm.div(&b.lm);
        let s = a.poly.mul_term(&qa, &ma).sub(&b.poly.mul_term(&qb, &mb));
        let cof = if self.track {
            a.cof
                .iter()
                .zip(&b.cof)
                .map(|(ca, cb)| ca.mul_term(&qa, &ma).sub(&cb.mul_term(&qb, &mb)))
                .collect()
        } else {
            Vec::new()
        };
        (s, cof)
    }

    fn run(mut self, gens: &[Polynomial]) -> GroebnerBasis {
        let order = &self.ring.order;
        let gens: Vec<Polynomial> = gens.iter().map(|g| g.reorder(self.ring)).collect();
        let mut idx: Vec<usize> = (0..gens.len()).filter(|&k| !gens[k].is_zero()).collect();
        idx.sort_by(|&a, &b| order.cmp(gens[a].leading_monomial().unwrap(), gens[b].leading_monomial().unwrap()));
        for k in idx {
            let g = &gens[k];
            let mut cof = self.zero_cof();
            if self.track {
                cof[k] = Polynomial::one(self.ring);
            }
            if g.is_constant() {
                return self.unit_result(g, cof);
            }
            let (r, rc) = Self::normalize(g.clone(), cof);
            self.update(r, rc);
        }

        while !self.pairs.is_empty() {
            let order = &self.ring.order;
            let best = (0..self.pairs.len())
                .min_by(|&a, &b| {
                    let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
                    order
                        .cmp(&pa.lcm, &pb.lcm)
                        .then((pa.j, pa.i).cmp(&(pb.j, pb.i)))
                })
                .unwrap();
            let pair = self.pairs.swap_remove(best);
            let (s, sc) = self.spoly(&pair);
            let (r, rc) = self.reduce(s, sc, false);
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                return self.unit_result(&r, rc);
            }
            let (r, rc) = Self::normalize(r, rc);
            self.update(r, rc);
        }

        self.finish()
    }

    fn finish(mut self) -> GroebnerBasis {
        let elems = &self.elems;
        let active: Vec<usize> = (0..elems.len())
            .filter(|&k| {
                elems[k].active
                    && !elems
                        .iter()
                        .enumerate()
                        .any(|(o, e)| o != k && e.active && e.lm.divides(&elems[k].lm))
            })
            .collect();
        let mut reduced: Vec<(Polynomial, Vec<Polynomial>)> = Vec::with_capacity(active.len());
        for &k in &active {
            for &o in &active {
                self.elems[o].active = o != k;
            }
            let p = self.elems[k].poly.clone();
            let c = self.elems[k].cof.clone();
            let (r, rc) = self.reduce(p, c, true);
            reduced.push(Self::monic(r, rc));
        }
        let order = &self.ring.order;
        reduced.sort_by(|a, b| {
            order.cmp(
                b.0.leading_monomial().unwrap(),
                a.0.leading_monomial().unwrap(),
            )
        });
        let track = self.track;
        let (basis, cofs): (Vec<_>, Vec<_>) = reduced.into_iter().unzip();
        GroebnerBasis {
            basis,
            cofactors: track.then_some(cofs),
        }
    }
}

/// `c` with `p / c` primitive over the integers and positive leading
/// coefficient; `None` over `GF(p)` or for `p = 0`.
fn content(p: &Polynomial) -> Option<Scalar> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        match c {
            Scalar::Rat(r) => {
                num = num.gcd(r.numer());
                den = den.lcm(r.denom());
            }
            Scalar::Mod { .. } => return None,
        }
    }
    if num.is_zero() {
        return None;
    }
    let mut c = BigRational::new(num, den);
    if matches!(p.leading_coefficient(), Some(Scalar::Rat(l)) if l.is_negative()) {
        c = -c;
    }
    Some(Scalar::Rat(c))
}

/// `(a, b)` with `a·x = b·y` and no common integer factor when `x`, `y`
/// are integers; `(1, x / y)` over `GF(p)`.
fn cross_multipliers(x: &Scalar, y: &Scalar) -> (Scalar, Scalar) {
    match (x, y) {
        (Scalar::Rat(rx), Scalar::Rat(ry)) if rx.is_integer() && ry.is_integer() => {
            let (nx, ny) = (rx.to_integer(), ry.to_integer());
            let g = nx.gcd(&ny);
            (
                Scalar::Rat(BigRational::from_integer(&ny / &g)),
                Scalar::Rat(BigRational::from_integer(&nx / &g)),
            )
        }
        (Scalar::Rat(_), Scalar::Rat(_)) => (y.clone(), x.clone()),
        _ => (x.field().one(), x.div(y).unwrap()),
    }
}

/// Reduced Gröbner basis of `gens` inside `ring` (generators are re-sorted
/// into the ring's order if necessary).
pub fn compute(gens: &[Polynomial], ring: &Arc<PolyRing>, track: bool) -> GroebnerBasis {
    let b = Buchberger {
        ring,
        track,
        ngens: gens.len(),
        elems: Vec::new(),
        pairs: Vec::new(),
    };
    b.run(gens)
}

/// Reduced Gröbner basis of `gens` under `order`, with cofactors expressing
/// each basis element in the generators.
pub fn groebner_basis(
    gens: &[Polynomial],
    order: &MonomialOrder,
) -> crate::error::Result<(Vec<Polynomial>, Vec<Vec<Polynomial>>)> {
    let Some(first) = gens.first() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let base = first.ring();
    for g in gens {
        if g.ring().arity() != base.arity() {
            return Err(crate::error::Error::ArityMismatch {
                expected: base.arity(),
                found: g.ring().arity(),
            });
        }
    }
    if order.arity() != base.arity() {
        return Err(crate::error::Error::ArityMismatch {
            expected: base.arity(),
            found: order.arity(),
        });
    }
    let ring = PolyRing::new(base.field, base.vars.clone(), order.clone());
    let gb = compute(gens, &ring, true);
    Ok((gb.basis, gb.cofactors.unwrap()))
}

/// Remainder of `f` on division by `basis` (a Gröbner basis, monic).
pub fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    divide(f, basis).0
}

/// Multivariate division: `f = sum quotients[k] * basis[k] + remainder`.
pub fn divide(f: &Polynomial, basis: &[Polynomial]) -> (Polynomial, Vec<Polynomial>) {
    let ring = match basis.first() {
        Some(b) => b.ring().clone(),
        None => return (f.clone(), Vec::new()),
    };
    let mut p = f.reorder(&ring);
    let mut quotients = vec![Polynomial::zero(&ring); basis.len()];
    let mut rem = Vec::new();
    let lms: Vec<&Monomial> = basis.iter().map(|b| b.leading_monomial().unwrap()).collect();
    loop {
        let (lm, lc) = match p.terms().first() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => break,
        };
        match lms.iter().position(|g| g.divides(&lm)) {
            Some(k) => {
                let q = lm.div(lms[k]);
                let c = lc.div(basis[k].leading_coefficient().unwrap()).unwrap();
                p = p.sub_mul_term(&q, &c, &basis[k]);
                quotients[k] = quotients[k].add(&Polynomial::term(&ring, q, c));
            }
            None => {
                p = p.sub(&Polynomial::term(&ring, lm.clone(), lc.clone()));
                rem.push((lm, lc));
            }
        }
    }
    (Polynomial::from_terms(&ring, rem), quotients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::OrderKind;
    use crate::algebra::scalar::Field;

    fn ring(vars: &[&str], order: MonomialOrder) -> Arc<PolyRing> {
        PolyRing::new(
            Field::Rationals,
            vars.iter().map(|s| s.to_string()).collect(),
            order,
        )
    }

    fn check_cofactors(gens: &[Polynomial], gb: &GroebnerBasis) {
        let cofs = gb.cofactors.as_ref().unwrap();
        for (b, row) in gb.basis.iter().zip(cofs) {
            let mut acc = Polynomial::zero(b.ring());
            for (c, g) in row.iter().zip(gens) {
                acc = acc.add(&c.mul(&g.reorder(b.ring())));
            }
            assert_eq!(&acc, b, "cofactor identity");
        }
    }

    #[test]
    fn unit_combination() {
        let r = ring(&["x"], MonomialOrder::grevlex(1));
        let x = Polynomial::var(&r, 0);
        let gens = vec![x.clone(), Polynomial::one(&r).sub(&x)];
        let gb = compute(&gens, &r, true);
        assert!(gb.is_unit());
        check_cofactors(&gens, &gb);
    }

    #[test]
    fn single_reduced_generator() {
        let r = ring(&["x"], MonomialOrder::grevlex(1));
        let x = Polynomial::var(&r, 0);
        let f = x.pow(2).sub(&Polynomial::one(&r));
        let gb = compute(std::slice::from_ref(&f), &r, true);
        assert_eq!(gb.basis, vec![f.clone()]);
        check_cofactors(&[f], &gb);
    }

    #[test]
    fn lex_example_contains_x_minus_y() {
        // [xy - 1, y^2 - 1] under lex x > y
        let r = ring(
            &["x", "y"],
            MonomialOrder::with_precedence(OrderKind::Lex, vec![0, 1]),
        );
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let one = Polynomial::one(&r);
        let gens = vec![x.mul(&y).sub(&one), y.pow(2).sub(&one)];
        let gb = compute(&gens, &r, true);
        assert!(gb.basis.contains(&x.sub(&y)), "{:?}", gb.basis);
        check_cofactors(&gens, &gb);
    }

    #[test]
    fn deterministic() {
        let r = ring(&["x", "y", "z"], MonomialOrder::grevlex(3));
        let v = |i| Polynomial::var(&r, i);
        let one = Polynomial::one(&r);
        let gens = vec![
            v(0).pow(2).add(&v(1).mul(&v(2))).sub(&one),
            v(0).mul(&v(1)).sub(&v(2).pow(2)),
            v(1).pow(3).sub(&v(0)),
        ];
        let a = compute(&gens, &r, true);
        let b = compute(&gens, &r, true);
        assert_eq!(a.basis, b.basis);
        check_cofactors(&gens, &a);
        // reducedness: no term of any element divisible by another leading monomial
        for (k, g) in a.basis.iter().enumerate() {
            for (l, h) in a.basis.iter().enumerate() {
                if k != l {
                    let lm = h.leading_monomial().unwrap();
                    assert!(g.terms().iter().all(|(m, _)| !lm.divides(m)));
                }
            }
        }
    }
}
