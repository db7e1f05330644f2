//! Multivariate Faà di Bruno coefficients and the majorant series `H`.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::series::{Jet, Multiindex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FdbError {
    #[error("γ must be nonzero")]
    ZeroGamma,
    #[error("multipliers do not sum to α")]
    MultinomialMismatch,
    #[error("g component {0} has a nonzero constant term")]
    NonzeroConstant(usize),
    #[error("λ must be positive")]
    NonPositiveLambda,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// One way of writing `γ = Σ |k_i| δ_i` with distinct `δ_i ≠ 0` and
/// `k_i ∈ ℕ^p \ {0}`. Pairs are sorted by `δ` in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decomposition {
    pub gamma: Multiindex,
    pub pairs: Vec<(Multiindex, Multiindex)>,
}

impl Decomposition {
    /// `α = Σ k_i`.
    pub fn alpha(&self, p: usize) -> Multiindex {
        self.pairs.iter().fold(Multiindex::zero(p), |acc, (_, k)| acc.add(k))
    }
}

/// Coefficients of one series, keyed by exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoefficientTable {
    pub nvars: usize,
    pub entries: BTreeMap<Multiindex, BigRational>,
}

impl CoefficientTable {
    pub fn from_jet(j: &Jet) -> Self {
        CoefficientTable { nvars: j.nvars(), entries: j.terms().map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    pub fn get(&self, e: &Multiindex) -> BigRational {
        self.entries.get(e).cloned().unwrap_or_else(BigRational::zero)
    }
}

fn grlex_cmp(a: &Multiindex, b: &Multiindex) -> std::cmp::Ordering {
    a.grlex_key().cmp(&b.grlex_key())
}

/// All `δ` with `0 < δ ≤ γ` componentwise, graded-lex sorted.
fn candidates(gamma: &Multiindex) -> Vec<Multiindex> {
    let mut out = vec![Vec::new()];
    for &g in &gamma.0 {
        out = out.into_iter().flat_map(|prefix: Vec<u32>| (0..=g).map(move |e| [prefix.clone(), vec![e]].concat())).collect();
    }
    let mut out: Vec<Multiindex> = out.into_iter().map(Multiindex).filter(|d| !d.is_zero()).collect();
    out.sort_by(grlex_cmp);
    out
}

/// All `k ∈ ℕ^p` with `|k| = m`, lexicographically descending.
pub fn compositions(m: u32, p: usize) -> Vec<Multiindex> {
    if p == 0 {
        return if m == 0 { vec![Multiindex(vec![])] } else { vec![] };
    }
    if p == 1 {
        return vec![Multiindex(vec![m])];
    }
    let mut out = Vec::new();
    for first in (0..=m).rev() {
        for rest in compositions(m - first, p - 1) {
            let mut v = vec![first];
            v.extend(rest.0);
            out.push(Multiindex(v));
        }
    }
    out
}

type Shapes = Rc<Vec<Vec<(usize, u32)>>>;

/// Multiset shapes `{(δ, |k|)}`: sequences of (candidate index, multiplicity),
/// memoized on (remaining γ, first admissible candidate).
struct ShapeEnumerator {
    cands: Vec<Multiindex>,
    memo: HashMap<(Multiindex, usize), Shapes>,
}

impl ShapeEnumerator {
    fn shapes(&mut self, rem: &Multiindex, start: usize) -> Shapes {
        if rem.is_zero() {
            return Rc::new(vec![vec![]]);
        }
        if let Some(s) = self.memo.get(&(rem.clone(), start)) {
            return s.clone();
        }
        let mut out = Vec::new();
        for idx in start..self.cands.len() {
            let delta = self.cands[idx].clone();
            if !delta.le(rem) {
                continue;
            }
            let mut left = rem.clone();
            let mut m = 0;
            while let Some(next) = left.checked_sub(&delta) {
                m += 1;
                left = next;
                for tail in self.shapes(&left, idx + 1).iter() {
                    let mut s = vec![(idx, m)];
                    s.extend_from_slice(tail);
                    out.push(s);
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((rem.clone(), start), out.clone());
        out
    }
}

/// Complete duplicate-free list of decompositions of `γ` with multipliers in
/// `ℕ^p \ {0}`.
pub fn enumerate_decompositions(gamma: &Multiindex, p: usize) -> Result<Vec<Decomposition>, FdbError> {
    if gamma.is_zero() {
        return Err(FdbError::ZeroGamma);
    }
    let mut en = ShapeEnumerator { cands: candidates(gamma), memo: HashMap::new() };
    let shapes = en.shapes(gamma, 0);
    let mut out = Vec::new();
    for shape in shapes.iter() {
        let mut partial: Vec<Vec<(Multiindex, Multiindex)>> = vec![vec![]];
        for &(idx, m) in shape {
            let ks = compositions(m, p);
            let delta = &en.cands[idx];
            partial = partial
                .into_iter()
                .flat_map(|pre| {
                    ks.iter().map(move |k| {
                        let mut v = pre.clone();
                        v.push((delta.clone(), k.clone()));
                        v
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|pairs| Decomposition { gamma: gamma.clone(), pairs }));
    }
    Ok(out)
}

/// Shape-only view used by callers that only need `|k_i|`.
pub(crate) fn enumerate_shapes(gamma: &Multiindex) -> Vec<Vec<(Multiindex, u32)>> {
    let mut en = ShapeEnumerator { cands: candidates(gamma), memo: HashMap::new() };
    let shapes = en.shapes(gamma, 0);
    shapes.iter().map(|s| s.iter().map(|&(i, m)| (en.cands[i].clone(), m)).collect()).collect()
}

/// `α! / (k_1! ⋯ k_ℓ!)`.
pub fn multinomial_coefficient(alpha: &Multiindex, ks: &[Multiindex]) -> Result<BigInt, FdbError> {
    let sum = ks.iter().fold(Multiindex::zero(alpha.len()), |acc, k| {
        if k.len() == alpha.len() {
            acc.add(k)
        } else {
            acc
        }
    });
    if ks.iter().any(|k| k.len() != alpha.len()) || &sum != alpha {
        return Err(FdbError::MultinomialMismatch);
    }
    let denom = ks.iter().fold(BigInt::one(), |acc, k| acc * k.factorial());
    Ok(alpha.factorial() / denom)
}

/// `h_γ` for `h = f ∘ g`, summed over decompositions of `γ`.
pub fn compose_coefficient(f: &CoefficientTable, g: &[CoefficientTable], gamma: &Multiindex) -> Result<BigRational, FdbError> {
    let p = g.len();
    if f.nvars != p {
        return Err(FdbError::Shape(format!("f has {} variables but g has {} components", f.nvars, p)));
    }
    let n = gamma.len();
    for (j, gj) in g.iter().enumerate() {
        if gj.nvars != n {
            return Err(FdbError::Shape(format!("g component {} has {} variables, γ has {}", j + 1, gj.nvars, n)));
        }
        if !gj.get(&Multiindex::zero(n)).is_zero() {
            return Err(FdbError::NonzeroConstant(j + 1));
        }
    }
    if gamma.is_zero() {
        return Ok(f.get(&Multiindex::zero(p)));
    }
    let mut acc = BigRational::zero();
    for d in enumerate_decompositions(gamma, p)? {
        let alpha = d.alpha(p);
        let fa = f.get(&alpha);
        if fa.is_zero() {
            continue;
        }
        let mut term = fa;
        for (delta, k) in &d.pairs {
            for (j, &kj) in k.0.iter().enumerate() {
                if kj > 0 {
                    term *= num_traits::pow(g[j].get(delta), kj as usize);
                }
            }
            if term.is_zero() {
                break;
            }
        }
        if term.is_zero() {
            continue;
        }
        let ks: Vec<Multiindex> = d.pairs.iter().map(|(_, k)| k.clone()).collect();
        acc += term * BigRational::from_integer(multinomial_coefficient(&alpha, &ks)?);
    }
    Ok(acc)
}

/// `H_γ = Σ α!/(k_1!⋯k_ℓ!) λ^{|α|}` over decompositions of `γ` into `p`
/// multipliers; `H_0 = 1`.
pub fn majorant_h(lambda: &BigRational, p: usize, gamma: &Multiindex) -> Result<BigRational, FdbError> {
    if !lambda.is_positive() {
        return Err(FdbError::NonPositiveLambda);
    }
    if gamma.is_zero() {
        return Ok(BigRational::one());
    }
    // λ^{|α|} depends only on the shape, so multinomials are summed per shape.
    let mut acc = BigRational::zero();
    for shape in enumerate_shapes(gamma) {
        let mut counts = BigInt::zero();
        expand_shape_multinomials(&shape, p, &mut counts);
        let total: u32 = shape.iter().map(|(_, m)| m).sum();
        acc += BigRational::from_integer(counts) * num_traits::pow(lambda.clone(), total as usize);
    }
    Ok(acc)
}

fn expand_shape_multinomials(shape: &[(Multiindex, u32)], p: usize, out: &mut BigInt) {
    let per_pair: Vec<Vec<Multiindex>> = shape.iter().map(|(_, m)| compositions(*m, p)).collect();
    let mut stack: Vec<Multiindex> = Vec::with_capacity(shape.len());
    fn walk(i: usize, per_pair: &[Vec<Multiindex>], stack: &mut Vec<Multiindex>, p: usize, out: &mut BigInt) {
        if i == per_pair.len() {
            let alpha = stack.iter().fold(Multiindex::zero(p), |a, k| a.add(k));
            *out += multinomial_coefficient(&alpha, stack).expect("consistent");
            return;
        }
        for k in &per_pair[i] {
            stack.push(k.clone());
            walk(i + 1, per_pair, stack, p, out);
            stack.pop();
        }
    }
    walk(0, &per_pair, &mut stack, p, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> Multiindex {
        Multiindex(v.to_vec())
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_decompositions(&mi(&[1]), 1).unwrap().len(), 1);
        let two = enumerate_decompositions(&mi(&[2]), 1).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().any(|d| d.pairs == vec![(mi(&[2]), mi(&[1]))]));
        assert!(two.iter().any(|d| d.pairs == vec![(mi(&[1]), mi(&[2]))]));
        // partitions of 3 and 4
        assert_eq!(enumerate_decompositions(&mi(&[3]), 1).unwrap().len(), 3);
        assert_eq!(enumerate_decompositions(&mi(&[4]), 1).unwrap().len(), 5);
        assert_eq!(enumerate_decompositions(&mi(&[0]), 1), Err(FdbError::ZeroGamma));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial_coefficient(&mi(&[2]), &[mi(&[1]), mi(&[1])]).unwrap(), BigInt::from(2));
        assert_eq!(multinomial_coefficient(&mi(&[1, 1]), &[mi(&[1, 0]), mi(&[0, 1])]).unwrap(), BigInt::from(1));
        assert_eq!(multinomial_coefficient(&mi(&[3, 2]), &[mi(&[3, 2])]).unwrap(), BigInt::from(1));
        assert_eq!(multinomial_coefficient(&mi(&[2]), &[mi(&[1])]), Err(FdbError::MultinomialMismatch));
    }

    #[test]
    fn compose_examples() {
        let f = CoefficientTable::from_jet(&Jet::from_int_terms(1, 8, &[(&[2], 1)]));
        let g = CoefficientTable::from_jet(&Jet::from_int_terms(1, 8, &[(&[1], 1), (&[2], 1)]));
        assert_eq!(compose_coefficient(&f, &[g.clone()], &mi(&[3])).unwrap(), r(2));
        let id = CoefficientTable::from_jet(&Jet::variable(1, 8, 0));
        assert_eq!(compose_coefficient(&id, &[g.clone()], &mi(&[2])).unwrap(), r(1));
        let f2 = CoefficientTable::from_jet(&Jet::from_int_terms(2, 8, &[(&[1, 1], 1)]));
        let gx = CoefficientTable::from_jet(&Jet::variable(1, 8, 0));
        let gx2 = CoefficientTable::from_jet(&Jet::from_int_terms(1, 8, &[(&[2], 1)]));
        assert_eq!(compose_coefficient(&f2, &[gx, gx2], &mi(&[3])).unwrap(), r(1));
        let bad = CoefficientTable::from_jet(&Jet::one(1, 4));
        assert_eq!(compose_coefficient(&f, &[bad], &mi(&[1])), Err(FdbError::NonzeroConstant(1)));
    }

    #[test]
    fn majorant_small() {
        assert_eq!(majorant_h(&r(1), 1, &mi(&[0])).unwrap(), r(1));
        assert_eq!(majorant_h(&r(1), 1, &mi(&[1])).unwrap(), r(1));
        // F∘G = 1/(1 - u/(1-u)) = (1-u)/(1-2u): coefficient 2^{k-1}
        assert_eq!(majorant_h(&r(1), 1, &mi(&[2])).unwrap(), r(2));
        assert_eq!(majorant_h(&r(1), 1, &mi(&[5])).unwrap(), r(16));
        assert_eq!(majorant_h(&r(0), 1, &mi(&[1])), Err(FdbError::NonPositiveLambda));
    }
}
