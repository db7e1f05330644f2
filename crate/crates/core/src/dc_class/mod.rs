//! Denjoy–Carleman weight sequences.
//!
//! Terms of a Gevrey sequence `(k!)^s` are irrational in general, so values
//! are never materialised. Every test is phrased as a comparison of products
//! `c · Π m_k^{e_k}` and decided by raising both sides to the denominator of
//! `s`.

mod majorant;

pub use majorant::{
    composition_constants, extract_rab, extract_remark_ab, inverse_bound_1var, inverse_majorant, CompositionConstants, InverseMajorant,
    Rab, ScaledTerm,
};

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::series::factorial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DcError {
    #[error("depth {requested} exceeds the {available} available terms")]
    DepthExceeded { requested: u32, available: u32 },
    #[error("Σ i·k_i = {got}, expected {expected}")]
    ChildressConstraint { got: u64, expected: u64 },
    #[error("sequence is not log-convex at k = {0}")]
    NotLogConvex(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Constant,
    /// `m_k = (k!)^s`, `s > 0`.
    Gevrey(BigRational),
    Custom(Vec<BigRational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthSequence {
    pub family: Family,
    /// Represents `m^{+shift}_k = m_{k + shift}`.
    pub shift: u32,
}

impl GrowthSequence {
    pub fn constant() -> Self {
        GrowthSequence { family: Family::Constant, shift: 0 }
    }

    pub fn gevrey(s: BigRational) -> Result<Self, DcError> {
        if !s.is_positive() {
            return Err(DcError::Invalid("Gevrey exponent must be positive".into()));
        }
        Ok(GrowthSequence { family: Family::Gevrey(s), shift: 0 })
    }

    pub fn factorial() -> Self {
        GrowthSequence { family: Family::Gevrey(BigRational::one()), shift: 0 }
    }

    pub fn custom(prefix: Vec<BigRational>) -> Result<Self, DcError> {
        if prefix.is_empty() {
            return Err(DcError::Invalid("custom prefix must be nonempty".into()));
        }
        if prefix.iter().any(|m| !m.is_positive()) {
            return Err(DcError::Invalid("custom terms must be positive".into()));
        }
        Ok(GrowthSequence { family: Family::Custom(prefix), shift: 0 })
    }

    pub fn shifted(&self, j: u32) -> Self {
        GrowthSequence { family: self.family.clone(), shift: self.shift + j }
    }

    /// Number of accessible terms; `None` for closed-form families.
    pub fn available(&self) -> Option<u32> {
        match &self.family {
            Family::Custom(p) => Some((p.len() as u32).saturating_sub(self.shift)),
            _ => None,
        }
    }

    fn require(&self, k: u32) -> Result<(), DcError> {
        match self.available() {
            Some(av) if k >= av => Err(DcError::DepthExceeded { requested: k, available: av }),
            _ => Ok(()),
        }
    }

    /// `m_k` when it is rational.
    pub fn term(&self, k: u32) -> Result<Option<BigRational>, DcError> {
        self.require(k)?;
        let idx = k + self.shift;
        Ok(match &self.family {
            Family::Constant => Some(BigRational::one()),
            Family::Custom(p) => Some(p[idx as usize].clone()),
            Family::Gevrey(s) => {
                if s.is_integer() {
                    let e = s.to_integer().to_u32().expect("small exponent");
                    Some(BigRational::from_integer(num_traits::pow(factorial(idx), e as usize)))
                } else {
                    None
                }
            }
        })
    }

    /// `m_1`, which is rational for every family.
    pub fn m1(&self) -> Result<BigRational, DcError> {
        match self.term(1)? {
            Some(v) => Ok(v),
            None if self.shift == 0 => Ok(BigRational::one()),
            None => Err(DcError::Invalid("m_1 of a shifted fractional Gevrey sequence is irrational".into())),
        }
    }

    /// Compares `ls · Π m_k^e` (over `lhs`) with `rs · Π m_k^e` (over `rhs`).
    /// Scales must be nonnegative.
    pub fn compare(&self, ls: &BigRational, lhs: &[(u32, u32)], rs: &BigRational, rhs: &[(u32, u32)]) -> Result<Ordering, DcError> {
        assert!(!ls.is_negative() && !rs.is_negative(), "scales must be nonnegative");
        for &(k, _) in lhs.iter().chain(rhs) {
            self.require(k)?;
        }
        if ls.is_zero() || rs.is_zero() {
            return Ok(ls.cmp(rs));
        }
        Ok(match &self.family {
            Family::Constant => ls.cmp(rs),
            Family::Custom(p) => {
                let side = |s: &BigRational, prod: &[(u32, u32)]| {
                    prod.iter().fold(s.clone(), |acc, &(k, e)| acc * num_traits::pow(p[(k + self.shift) as usize].clone(), e as usize))
                };
                side(ls, lhs).cmp(&side(rs, rhs))
            }
            Family::Gevrey(s) => {
                // (c Π (k!)^{s e})^q = c^q Π (k!)^{p e}
                let q = s.denom().to_usize().expect("small denominator");
                let pnum = s.numer().to_usize().expect("small numerator");
                let side = |c: &BigRational, prod: &[(u32, u32)]| {
                    let f = prod.iter().fold(BigInt::one(), |acc, &(k, e)| acc * num_traits::pow(factorial(k + self.shift), pnum * e as usize));
                    num_traits::pow(c.clone(), q) * BigRational::from_integer(f)
                };
                side(ls, lhs).cmp(&side(rs, rhs))
            }
        })
    }

    /// `x ≤ c · m_k`.
    pub fn rational_le_scaled_term(&self, x: &BigRational, c: &BigRational, k: u32) -> Result<bool, DcError> {
        Ok(self.compare(x, &[], c, &[(k, 1)])? != Ordering::Greater)
    }
}

impl fmt::Display for GrowthSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Constant => write!(f, "constant")?,
            Family::Gevrey(s) => write!(f, "gevrey:{s}")?,
            Family::Custom(p) => write!(f, "custom:{}", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))?,
        }
        if self.shift > 0 {
            write!(f, " (shift {})", self.shift)?;
        }
        Ok(())
    }
}

fn one() -> BigRational {
    BigRational::one()
}

/// Outcome of a log-convexity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogConvexity {
    pub holds: bool,
    /// First `k` with `m_{k+1}/m_k < m_k/m_{k-1}`.
    pub witness: Option<u32>,
}

/// `m_{k+1}/m_k` nondecreasing for `k < depth`.
pub fn is_log_convex(m: &GrowthSequence, depth: u32) -> Result<LogConvexity, DcError> {
    if depth < 2 {
        return Err(DcError::Invalid("depth must be at least 2".into()));
    }
    m.require(depth)?;
    for k in 1..depth {
        // m_k^2 ≤ m_{k-1} m_{k+1}
        if m.compare(&one(), &[(k, 2)], &one(), &[(k - 1, 1), (k + 1, 1)])? == Ordering::Greater {
            return Ok(LogConvexity { holds: false, witness: Some(k) });
        }
    }
    Ok(LogConvexity { holds: true, witness: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsequenceReport {
    /// First `(j, k)` violating `m_j m_k ≤ m_0 m_{j+k}`.
    pub product_failure: Option<(u32, u32)>,
    /// First `k` violating `(m_k/m_0)^{1/k} ≤ (m_{k+1}/m_0)^{1/(k+1)}`.
    pub root_failure: Option<u32>,
    pub equalities: usize,
    pub comparisons: usize,
}

impl ConsequenceReport {
    pub fn holds(&self) -> bool {
        self.product_failure.is_none() && self.root_failure.is_none()
    }
}

/// The two standard consequences of log-convexity, checked exactly.
pub fn log_convexity_consequences(m: &GrowthSequence, depth: u32) -> Result<ConsequenceReport, DcError> {
    let lc = is_log_convex(m, depth)?;
    if !lc.holds {
        return Err(DcError::NotLogConvex(lc.witness.unwrap_or(0)));
    }
    let mut rep = ConsequenceReport { product_failure: None, root_failure: None, equalities: 0, comparisons: 0 };
    for j in 0..=depth {
        for k in 0..=depth - j {
            let ord = m.compare(&one(), &[(j, 1), (k, 1)], &one(), &[(0, 1), (j + k, 1)])?;
            rep.comparisons += 1;
            match ord {
                Ordering::Greater if rep.product_failure.is_none() => rep.product_failure = Some((j, k)),
                Ordering::Equal => rep.equalities += 1,
                _ => {}
            }
        }
    }
    for k in 1..depth {
        // m_k^{k+1} m_0^k ≤ m_{k+1}^k m_0^{k+1}
        let ord = m.compare(&one(), &[(k, k + 1), (0, k)], &one(), &[(k + 1, k), (0, k + 1)])?;
        rep.comparisons += 1;
        match ord {
            Ordering::Greater if rep.root_failure.is_none() => rep.root_failure = Some(k),
            Ordering::Equal => rep.equalities += 1,
            _ => {}
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SequenceVerdict {
    Quasianalytic,
    NotQuasianalytic,
    /// `Σ_{k<depth} m_k/((k+1) m_{k+1})` over the available prefix.
    InconclusiveAtDepth { depth: u32, partial_sum: String },
}

/// Divergence of `Σ m_k/((k+1) m_{k+1})`.
pub fn quasianalytic_test(m: &GrowthSequence) -> Result<SequenceVerdict, DcError> {
    match &m.family {
        // Σ 1/(k+1) diverges
        Family::Constant => Ok(SequenceVerdict::Quasianalytic),
        // summand ≍ (k+1)^{-(1+s)}, convergent
        Family::Gevrey(_) => Ok(SequenceVerdict::NotQuasianalytic),
        Family::Custom(_) => {
            let av = m.available().unwrap_or(0);
            if av < 2 {
                return Ok(SequenceVerdict::InconclusiveAtDepth { depth: av.saturating_sub(1), partial_sum: "0".into() });
            }
            let sum = partial_quasianalytic_sum(m, av - 1)?;
            Ok(SequenceVerdict::InconclusiveAtDepth { depth: av - 1, partial_sum: sum.to_string() })
        }
    }
}

/// `Σ_{k=0}^{terms-1} m_k/((k+1) m_{k+1})` for sequences with rational terms.
pub fn partial_quasianalytic_sum(m: &GrowthSequence, terms: u32) -> Result<BigRational, DcError> {
    let mut acc = BigRational::zero();
    for k in 0..terms {
        let (Some(a), Some(b)) = (m.term(k)?, m.term(k + 1)?) else {
            return Err(DcError::Invalid("partial sums need rational terms".into()));
        };
        acc += a / (b * BigRational::from_integer((k + 1).into()));
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DerivationVerdict {
    Closed(bool),
    /// Largest `(m_{k+1}/m_k)^{1/k}` over the prefix, kept as the pair
    /// (ratio, root index).
    Inconclusive { argmax: u32, ratio: String },
}

/// Boundedness of `(m_{k+1}/m_k)^{1/k}`.
pub fn derivation_closure_test(m: &GrowthSequence) -> Result<DerivationVerdict, DcError> {
    match &m.family {
        Family::Constant | Family::Gevrey(_) => Ok(DerivationVerdict::Closed(true)),
        Family::Custom(_) => {
            let av = m.available().unwrap_or(0);
            let mut best: Option<(u32, BigRational)> = None;
            for k in 1..av.saturating_sub(1) {
                let r = m.term(k + 1)?.expect("rational") / m.term(k)?.expect("rational");
                best = match best {
                    None => Some((k, r)),
                    // r^{1/k} > b^{1/j}  ⇔  r^j > b^k
                    Some((j, b)) => {
                        if num_traits::pow(r.clone(), j as usize) > num_traits::pow(b.clone(), k as usize) {
                            Some((k, r))
                        } else {
                            Some((j, b))
                        }
                    }
                };
            }
            let (argmax, ratio) = best.unwrap_or((0, BigRational::one()));
            Ok(DerivationVerdict::Inconclusive { argmax, ratio: ratio.to_string() })
        }
    }
}

/// `m_k m_1^{k_1} ⋯ m_n^{k_n} ≤ m_1^k m_n` with `k = Σ k_i`, given
/// `ks[i-1] = k_i` and `Σ i k_i = n`.
pub fn check_childress(m: &GrowthSequence, ks: &[u32]) -> Result<bool, DcError> {
    let n = ks.len() as u64;
    let got: u64 = ks.iter().enumerate().map(|(i, &k)| (i as u64 + 1) * u64::from(k)).sum();
    if got != n || n == 0 {
        return Err(DcError::ChildressConstraint { got, expected: n });
    }
    let k: u32 = ks.iter().sum();
    let mut lhs = vec![(k, 1)];
    lhs.extend(ks.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i as u32 + 1, e)));
    let rhs = [(1, k), (n as u32, 1)];
    Ok(m.compare(&one(), &lhs, &one(), &rhs)? != Ordering::Greater)
}

/// All `(k_1..k_n)` with `Σ i k_i = n`.
pub fn childress_partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(part: u32, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, n: u32) {
        if part > n {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=rem / part {
            cur.push(k);
            rec(part + 1, rem - k * part, cur, out, n);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, &mut Vec::new(), &mut out, n);
    out
}

/// `m_{|α|} Π m_{|δ_i|}^{|k_i|} ≤ m_1^{|α|} m_{|γ|}` for `α = Σ k_i`,
/// `γ = Σ |k_i| δ_i`.
pub fn check_corollary_45(m: &GrowthSequence, ks: &[crate::Multiindex], deltas: &[crate::Multiindex]) -> Result<bool, DcError> {
    if ks.len() != deltas.len() || ks.is_empty() {
        return Err(DcError::Invalid("need equally many nonempty k_i and δ_i".into()));
    }
    if ks.iter().chain(deltas).any(|v| v.is_zero()) {
        return Err(DcError::Invalid("k_i and δ_i must be nonzero".into()));
    }
    let alpha: u32 = ks.iter().map(|k| k.degree()).sum();
    let gamma: u32 = ks.iter().zip(deltas).map(|(k, d)| k.degree() * d.degree()).sum();
    let mut lhs = vec![(alpha, 1)];
    lhs.extend(ks.iter().zip(deltas).map(|(k, d)| (d.degree(), k.degree())));
    let rhs = [(1, alpha), (gamma, 1)];
    Ok(m.compare(&one(), &lhs, &one(), &rhs)? != Ordering::Greater)
}

/// Parses `constant`, `gevrey:<s>` or `custom:<comma-list>`.
pub fn parse_family(spec: &str) -> Result<GrowthSequence, DcError> {
    let spec = spec.trim();
    if spec == "constant" {
        return Ok(GrowthSequence::constant());
    }
    if let Some(s) = spec.strip_prefix("gevrey:") {
        return GrowthSequence::gevrey(parse_rational(s)?);
    }
    if let Some(list) = spec.strip_prefix("custom:") {
        let prefix = list.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
        return GrowthSequence::custom(prefix);
    }
    Err(DcError::Invalid(format!("unknown family {spec:?}; expected constant, gevrey:<s> or custom:<list>")))
}

pub fn parse_rational(s: &str) -> Result<BigRational, DcError> {
    let s = s.trim();
    let bad = || DcError::Invalid(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<BigInt>().map_err(|_| bad())?, b.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `binom(1/2, n)`.
pub fn binom_half(n: u32) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    let mut acc = BigRational::one();
    for i in 0..n {
        acc = acc * (&half - BigRational::from_integer(i.into())) / BigRational::from_integer((i + 1).into());
    }
    acc
}
