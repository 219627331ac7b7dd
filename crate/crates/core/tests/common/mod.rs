#![allow(dead_code)]

use qcqs::zarlattice::{support_d, ZarElement};
use qcqs::{AlgebraElement, PresentedAlgebra};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alg(text: &str) -> PresentedAlgebra {
    PresentedAlgebra::parse(text).unwrap()
}

/// Monomials in the named variables of total degree at most `deg`.
fn monomials(vars: &[&str], deg: u32) -> Vec<String> {
    let mut out = vec![(String::from("1"), 0u32)];
    for v in vars {
        let mut next = Vec::new();
        for (m, d) in &out {
            for e in 0..=deg - d {
                let term = match (m.as_str(), e) {
                    (_, 0) => m.clone(),
                    ("1", 1) => v.to_string(),
                    ("1", _) => format!("{v}^{e}"),
                    (_, 1) => format!("{m}*{v}"),
                    _ => format!("{m}*{v}^{e}"),
                };
                next.push((term, d + e));
            }
        }
        out = next;
    }
    out.into_iter().map(|(m, _)| m).collect()
}

/// A polynomial with 1 to `max_terms` terms of degree at most `deg`, small integer coefficients.
pub fn poly_text(rng: &mut ChaCha8Rng, vars: &[&str], deg: u32, max_terms: usize) -> String {
    let mons = monomials(vars, deg);
    let k = rng.gen_range(1..=max_terms.min(mons.len()));
    let chosen: Vec<_> = mons.choose_multiple(rng, k).collect();
    chosen
        .into_iter()
        .map(|m| {
            let mut c: i64 = rng.gen_range(1..=3);
            if rng.gen_bool(0.5) {
                c = -c;
            }
            format!("({c})*{m}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn poly(rng: &mut ChaCha8Rng, a: &PresentedAlgebra, deg: u32, max_terms: usize) -> AlgebraElement {
    let vars: Vec<&str> = a.vars().iter().map(String::as_str).collect();
    a.parse_element(&poly_text(rng, &vars, deg, max_terms)).unwrap()
}

pub fn nonzero_poly(rng: &mut ChaCha8Rng, a: &PresentedAlgebra, deg: u32, max_terms: usize) -> AlgebraElement {
    loop {
        let p = poly(rng, a, deg, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// `D(g_1, ..., g_k)` with `1 ≤ k ≤ max_gens`.
pub fn open(rng: &mut ChaCha8Rng, a: &PresentedAlgebra, deg: u32, max_gens: usize) -> ZarElement {
    let k = rng.gen_range(1..=max_gens);
    let gens: Vec<_> = (0..k).map(|_| poly(rng, a, deg, 3)).collect();
    support_d(a, &gens).unwrap()
}

/// Number of tuples in `F_p^n` satisfying `pred`.
pub fn count_tuples(p: u64, n: usize, pred: impl Fn(&[u64]) -> bool) -> usize {
    let mut count = 0;
    let mut t = vec![0u64; n];
    loop {
        if pred(&t) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            t[i] += 1;
            if t[i] < p {
                break;
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// Lines through the origin of `F_q^2`.
pub fn projective_line_count(q: u64) -> usize {
    let mut lines = std::collections::BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            if (a, b) != (0, 0) {
                let line: std::collections::BTreeSet<_> = (1..q).map(|u| (u * a % q, u * b % q)).collect();
                lines.insert(line);
            }
        }
    }
    lines.len()
}
