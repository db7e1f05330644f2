#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use resolvkit::{Jet, Multiindex};

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Random jet in `n` variables with up to `terms` monomials of degree ≤ `deg`.
pub fn jet(n: usize, t: u32, deg: u32, terms: usize) -> impl Strategy<Value = Jet> {
    prop::collection::vec((prop::collection::vec(0..=deg, n), -5i64..=5), 0..=terms).prop_map(move |ts| {
        Jet::from_terms(
            n,
            t,
            ts.into_iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= deg)
                .map(|(e, c)| (Multiindex(e), q(c))),
        )
    })
}

/// Random jet vanishing at the origin.
pub fn jet0(n: usize, t: u32, deg: u32, terms: usize) -> impl Strategy<Value = Jet> {
    jet(n, t, deg, terms).prop_map(|j| {
        let c = j.constant_term();
        &j - &Jet::constant(j.nvars(), j.truncation(), c)
    })
}

/// Multiplies out the terms of `f(g)` by hand: an oracle for composition
/// that does not share code with the series module.
pub fn naive_compose(f: &Jet, g: &[Jet], t: u32) -> Jet {
    let n = g[0].nvars();
    let mut acc = Jet::zero(n, t);
    for (e, c) in f.terms() {
        let mut term = Jet::constant(n, t, c.clone());
        for (k, &p) in e.0.iter().enumerate() {
            for _ in 0..p {
                term = naive_mul(&term, &g[k], t);
            }
        }
        acc = naive_add(&acc, &term, t);
    }
    acc
}

pub fn naive_mul(a: &Jet, b: &Jet, t: u32) -> Jet {
    let mut out: Vec<(Multiindex, BigRational)> = Vec::new();
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            out.push((ea.add(eb), ca * cb));
        }
    }
    sum_terms(a.nvars(), t, out)
}

pub fn naive_add(a: &Jet, b: &Jet, t: u32) -> Jet {
    let out = a.terms().chain(b.terms()).map(|(e, c)| (e.clone(), c.clone())).collect();
    sum_terms(a.nvars(), t, out)
}

fn sum_terms(n: usize, t: u32, terms: Vec<(Multiindex, BigRational)>) -> Jet {
    let mut m = std::collections::BTreeMap::<Vec<u32>, BigRational>::new();
    for (e, c) in terms {
        if e.degree() <= t {
            *m.entry(e.0).or_insert_with(|| q(0)) += c;
        }
    }
    Jet::from_terms(n, t, m.into_iter().map(|(e, c)| (Multiindex(e), c)))
}

/// Coordinate `i` of `n`, embedded as a jet.
pub fn var(n: usize, t: u32, i: usize) -> Jet {
    Jet::variable(n, t, i)
}

/// `x_n^d + Σ_{q ≤ d−2} a_q(x̃)·x_n^q` where every `a_q` has order at least
/// `d − q` along `{x_j = 0, j ∈ I}`; `picks[q]` chooses the `I`-monomials.
pub fn prepared_model(n: usize, t: u32, d: u32, center: &[usize], picks: &[(Vec<usize>, Jet)]) -> Jet {
    let last = n - 1;
    let mut g = var(n, t, last).pow(d);
    for (q, (idx, r)) in picks.iter().enumerate().take(d.saturating_sub(1) as usize) {
        let q = q as u32;
        let mut a = r.insert_variable(last).truncate_to(t);
        let need = (d - q) as usize;
        for k in 0..need {
            a = &a * &var(n, t, center[idx[k % idx.len()] % center.len()]);
        }
        g = &g + &(&a * &var(n, t, last).pow(q));
    }
    g
}
