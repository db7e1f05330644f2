//! Local models, prepared coordinates, coefficient data and the combinatorics
//! of the monomial case.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ResolveError, Result};
use crate::blowup::{Center, ExceptionalLedger, MarkedFunction};
use crate::linalg::Matrix;
use crate::series::{self, monomial_unit_decompose, Jet, Multiindex, OrderResult, PolyMap};

/// Which hypersurface plays the role of `X` in the current phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "id")]
pub enum Driver {
    Strict,
    Exceptional(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModel {
    pub g: Jet,
    pub exceptionals: ExceptionalLedger,
    /// Ledger ids counted by `s`.
    pub old: BTreeSet<usize>,
    pub driver: Driver,
    pub d: u32,
    pub s: u32,
    pub prepared: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InvariantPair {
    pub d: u32,
    pub s: u32,
}

impl LocalModel {
    /// Model with every ledger entry counted as old and `g` as driver.
    pub fn new(g: Jet, exceptionals: ExceptionalLedger) -> Result<Self> {
        let old = exceptionals.entries.iter().map(|e| e.id).collect();
        LocalModel::with_driver(g, exceptionals, old, Driver::Strict)
    }

    pub fn with_driver(g: Jet, exceptionals: ExceptionalLedger, mut old: BTreeSet<usize>, driver: Driver) -> Result<Self> {
        if let Driver::Exceptional(id) = driver {
            old.remove(&id);
            if !exceptionals.entries.iter().any(|e| e.id == id) {
                return Err(ResolveError::Invariant(format!("driver E{id} is not in the ledger")));
            }
        }
        let mut m = LocalModel { g, exceptionals, old, driver, d: 0, s: 0, prepared: false };
        m.refresh()?;
        Ok(m)
    }

    /// Recomputes `d`, `s` and the prepared flag from the jets.
    pub fn refresh(&mut self) -> Result<()> {
        self.d = order_of(self.driver_jet())?;
        self.s = self.old_through_origin().count() as u32;
        self.prepared = self.check_prepared();
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.g.nvars()
    }

    pub fn pair(&self) -> InvariantPair {
        InvariantPair { d: self.d, s: self.s }
    }

    pub fn driver_jet(&self) -> &Jet {
        match self.driver {
            Driver::Strict => &self.g,
            Driver::Exceptional(id) => {
                &self.exceptionals.entries.iter().find(|e| e.id == id).expect("driver in ledger").jet
            }
        }
    }

    /// Old ledger entries vanishing at the origin, as `(id, jet)`.
    pub fn old_through_origin(&self) -> impl Iterator<Item = (usize, &Jet)> {
        self.exceptionals
            .entries
            .iter()
            .filter(|e| self.old.contains(&e.id) && !e.jet.is_unit())
            .map(|e| (e.id, &e.jet))
    }

    fn check_prepared(&self) -> bool {
        let n = self.nvars();
        let d = self.d;
        if d == 0 {
            return false;
        }
        let h = self.driver_jet();
        let last = n - 1;
        let Ok(top) = h.partial_derivative_n(last, d) else { return false };
        if !top.is_unit() {
            return false;
        }
        let Ok(z) = h.partial_derivative_n(last, d - 1) else { return false };
        z.terms().all(|(e, _)| e[last] >= 1) && !z.is_zero()
    }

    /// Applies `x = ψ(x')` to every jet of the model.
    pub fn substitute(&self, psi: &PolyMap) -> Result<LocalModel> {
        let mut m = LocalModel {
            g: series::substitute(&self.g, psi)?,
            exceptionals: self.exceptionals.substitute(psi)?,
            old: self.old.clone(),
            driver: self.driver,
            d: 0,
            s: 0,
            prepared: false,
        };
        m.refresh()?;
        Ok(m)
    }
}

pub(crate) fn order_of(j: &Jet) -> Result<u32> {
    match j.order() {
        OrderResult::Finite(k) => Ok(k),
        OrderResult::AboveTruncation => {
            Err(ResolveError::Truncation(format!("order is not certified below degree {}", j.truncation())))
        }
    }
}

/// Kind of a coordinate change `x = ψ(x')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Linear,
    Shear,
    Rectify,
}

#[derive(Clone, Debug)]
pub struct Prepared {
    pub model: LocalModel,
    pub changes: Vec<(ChangeKind, PolyMap)>,
}

/// Candidate `x_n`-directions: `e_n, e_{n-1}, …, e_1`, then integer vectors
/// of max-norm 1, 2, … up to `max_norm` in lexicographic order, one of each
/// `±v` pair.
pub(crate) fn direction_candidates(n: usize, max_norm: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = (0..n).rev().map(|k| (0..n).map(|j| i64::from(j == k)).collect()).collect();
    for norm in 1..=max_norm {
        let mut v = vec![-norm; n];
        loop {
            let leading_positive = v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
            if leading_positive && v.iter().map(|x| x.abs()).max() == Some(norm) && !out.contains(&v) {
                out.push(v.clone());
            }
            let Some(k) = (0..n).rev().find(|&k| v[k] < norm) else { break };
            v[k] += 1;
            for x in v.iter_mut().skip(k + 1) {
                *x = -norm;
            }
        }
    }
    out
}

/// First candidate direction along which the degree-`d` form of `h` and the
/// linear parts of `transverse` are all nonzero.
pub(crate) fn find_direction(h: &Jet, d: u32, transverse: &[&Jet]) -> Result<Vec<BigRational>> {
    let n = h.nvars();
    let form = h.homogeneous_part(d);
    let grads: Vec<Vec<BigRational>> = transverse.iter().map(|j| j.gradient_at_origin()).collect();
    let bound = i64::from(d) + transverse.len() as i64 + 2;
    for v in direction_candidates(n, bound) {
        let v: Vec<BigRational> = v.into_iter().map(|x| BigRational::from_integer(x.into())).collect();
        if form.evaluate(&v).is_zero() {
            continue;
        }
        if grads.iter().all(|g| !g.iter().zip(&v).fold(BigRational::zero(), |a, (x, y)| a + x * y).is_zero()) {
            return Ok(v);
        }
    }
    Err(ResolveError::Invariant("no admissible x_n-direction found".into()))
}

/// `x = A x'` with last column `v`, completed by standard basis vectors.
pub(crate) fn direction_matrix(v: &[BigRational]) -> Matrix {
    let n = v.len();
    let k = v.iter().rposition(|x| !x.is_zero()).expect("nonzero direction");
    let mut cols: Vec<Vec<BigRational>> = (0..n)
        .filter(|&j| j != k)
        .map(|j| (0..n).map(|r| if r == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    cols.push(v.to_vec());
    (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
}

/// Makes the pure `d`-th `x_n`-derivative of the driver a unit and
/// `∂^{d-1}/∂x_n^{d-1}` of it a unit multiple of `x_n`, keeping every old
/// exceptional through the origin transverse to the `x_n`-axis.
pub fn prepare_local_model(model: &LocalModel) -> Result<Prepared> {
    let n = model.nvars();
    let d = model.d;
    let h = model.driver_jet();
    if h.is_zero() {
        return Err(ResolveError::ZeroInput);
    }
    if d == 0 {
        return Err(ResolveError::Invariant("cannot prepare a model of order 0".into()));
    }
    if d >= h.truncation() {
        return Err(ResolveError::Truncation(format!("order {d} is not below the truncation {}", h.truncation())));
    }
    let transverse: Vec<&Jet> = model.old_through_origin().map(|(_, j)| j).collect();
    let v = find_direction(h, d, &transverse)?;
    let mut changes = Vec::new();
    let mut m = model.clone();
    let is_en = v.iter().enumerate().all(|(j, x)| if j == n - 1 { x.is_one() } else { x.is_zero() });
    if !is_en {
        let psi = series::linear_map(&direction_matrix(&v), h.truncation());
        m = m.substitute(&psi)?;
        changes.push((ChangeKind::Linear, psi));
    }
    let z = m.driver_jet().partial_derivative_n(n - 1, d - 1)?;
    let phi = series::implicit_solve(&z, n - 1)?;
    if !phi.is_zero() {
        let t = m.driver_jet().truncation();
        let mut comps: Vec<Jet> = (0..n).map(|j| Jet::variable(n, t, j)).collect();
        comps[n - 1] = &comps[n - 1] + &phi.insert_variable(n - 1);
        let psi = PolyMap::new(comps)?;
        m = m.substitute(&psi)?;
        changes.push((ChangeKind::Shear, psi));
    }
    if !m.prepared {
        return Err(ResolveError::Invariant("preparation did not produce z = unit · x_n".into()));
    }
    Ok(Prepared { model: m, changes })
}

/// Label of a coefficient datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "index")]
pub enum DatumLabel {
    C(u32),
    B(usize),
}

impl std::fmt::Display for DatumLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DatumLabel::C(q) => write!(f, "c{q}"),
            DatumLabel::B(id) => write!(f, "b(E{id})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Datum {
    pub label: DatumLabel,
    pub f: MarkedFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientData {
    /// All `c_q`, `q = 0, …, d−2`, zero ones included.
    pub c: Vec<Datum>,
    pub b: Vec<Datum>,
}

impl CoefficientData {
    pub fn nonzero(&self) -> Vec<&Datum> {
        self.c.iter().chain(&self.b).filter(|x| !x.f.jet.is_zero()).collect()
    }

    /// Zero-test assumptions implied by vanishing data.
    pub fn assumptions(&self) -> Vec<String> {
        self.c
            .iter()
            .chain(&self.b)
            .filter(|x| x.f.jet.is_zero())
            .map(|x| format!("{} treated as 0, certified to degree {}", x.label, x.f.jet.truncation()))
            .collect()
    }
}

/// `c_q = ∂^q h/∂x_n^q |_{x_n=0}` with mark `d−q`, and `b_p = λ_p|_{x_n=0}`
/// with mark 1 for old exceptionals through the origin.
pub fn coefficient_data(model: &LocalModel) -> Result<CoefficientData> {
    let n = model.nvars();
    let last = n - 1;
    let h = model.driver_jet();
    if n == 1 {
        return Ok(CoefficientData { c: vec![], b: vec![] });
    }
    let mut c = Vec::new();
    for q in 0..model.d.saturating_sub(1) {
        let jet = h.partial_derivative_n(last, q)?.restrict_to_hyperplane(last)?;
        c.push(Datum { label: DatumLabel::C(q), f: MarkedFunction { jet, mark: model.d - q } });
    }
    let mut b = Vec::new();
    for (id, lambda) in model.old_through_origin() {
        let jet = lambda.restrict_to_hyperplane(last)?;
        b.push(Datum { label: DatumLabel::B(id), f: MarkedFunction { jet, mark: 1 } });
    }
    Ok(CoefficientData { c, b })
}

/// Generators of the locus where the pair `(d, s)` is attained: each datum
/// must vanish to at least its mark.
pub fn pair_locus_description(model: &LocalModel) -> Result<Vec<MarkedFunction>> {
    Ok(coefficient_data(model)?.nonzero().into_iter().map(|x| x.f.clone()).collect())
}

/// True iff every `c_q` vanishes up to truncation.
pub fn geometric_smoothness(model: &LocalModel) -> Result<bool> {
    Ok(coefficient_data(model)?.c.iter().all(|x| x.f.jet.is_zero()))
}

/// Exponents `Ω_j` scaled by `d!`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaScaled {
    pub entries: Vec<u128>,
    pub scale: u128,
}

pub(crate) fn factorial_u128(d: u32) -> Result<u128> {
    (1..=u128::from(d)).try_fold(1u128, |a, k| a.checked_mul(k)).ok_or_else(|| ResolveError::Truncation(format!("{d}! overflows")))
}

impl OmegaScaled {
    pub fn from_exponent(e: &Multiindex, mark: u32, d: u32) -> Result<Self> {
        let scale = factorial_u128(d)?;
        let m = u128::from(mark);
        if mark == 0 || scale % m != 0 {
            return Err(ResolveError::Invariant(format!("mark {mark} does not divide {d}!")));
        }
        let per = scale / m;
        Ok(OmegaScaled { entries: e.0.iter().map(|&x| u128::from(x) * per).collect(), scale })
    }

    pub fn sum(&self) -> u128 {
        self.entries.iter().sum()
    }

    pub fn le(&self, other: &OmegaScaled) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }

    /// Entry `i` replaced by `Σ_{j∈I} entries − scale`.
    pub fn after_blowup(&self, set: &[usize], i: usize) -> Result<OmegaScaled> {
        let s: u128 = set.iter().map(|&j| self.entries[j]).sum();
        let v = s.checked_sub(self.scale).ok_or_else(|| ResolveError::Invariant("center outside the locus".into()))?;
        let mut out = self.clone();
        out.entries[i] = v;
        Ok(out)
    }

    /// Exact rationals `Ω_j`.
    pub fn rationals(&self) -> Vec<BigRational> {
        self.entries
            .iter()
            .map(|&e| BigRational::new(BigInt::from(e), BigInt::from(self.scale)))
            .collect()
    }
}

impl std::fmt::Display for OmegaScaled {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.rationals().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Minimal index sets `I ⊂ {1, …, n−1}` with `Σ_I ≥ scale` and
/// `Σ_I − scale < entry_i` for all `i ∈ I`, in (size, lex) order, each
/// returned as the center `I ∪ {n}` in `n = entries + 1` variables.
pub fn monomial_centers(omega: &OmegaScaled) -> Result<Vec<Center>> {
    let m = omega.entries.len();
    if m > 20 {
        return Err(ResolveError::Input("too many variables for center enumeration".into()));
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << m) {
        let set: Vec<usize> = (0..m).filter(|&j| mask >> j & 1 == 1).collect();
        let sum: u128 = set.iter().map(|&j| omega.entries[j]).sum();
        if sum >= omega.scale && set.iter().all(|&i| sum - omega.scale < omega.entries[i]) {
            sets.push(set);
        }
    }
    if sets.is_empty() {
        return Err(ResolveError::Invariant(format!("|Ω| < 1 for Ω = {omega}")));
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.into_iter()
        .map(|mut s| {
            s.push(m);
            Center::new(s, m + 1).map_err(ResolveError::from)
        })
        .collect()
}

/// Monomial form of one datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialDatum {
    pub label: DatumLabel,
    pub exponent: Multiindex,
    pub omega: OmegaScaled,
}

/// Monomial exponents of all nonzero data, or `None` if one is not
/// monomial × unit.
pub fn monomial_data(data: &[&Datum], d: u32) -> Result<Option<Vec<MonomialDatum>>> {
    let mut out = Vec::new();
    for x in data {
        let Some((e, _)) = monomial_unit_decompose(&x.f.jet) else { return Ok(None) };
        out.push(MonomialDatum { label: x.label, omega: OmegaScaled::from_exponent(&e, x.f.mark, d)?, exponent: e });
    }
    Ok(Some(out))
}

/// Pairs (by position) of scaled exponents that are not comparable.
pub fn incomparable_pairs(data: &[MonomialDatum]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            if !data[i].omega.le(&data[j].omega) && !data[j].omega.le(&data[i].omega) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Least element under the componentwise order.
pub fn least_omega(data: &[MonomialDatum]) -> Result<OmegaScaled> {
    data.iter()
        .find(|a| data.iter().all(|b| a.omega.le(&b.omega)))
        .map(|a| a.omega.clone())
        .ok_or_else(|| {
            let listing: Vec<String> = data.iter().map(|x| format!("{}: {}", x.label, x.omega)).collect();
            ResolveError::Invariant(format!("exponents are not totally ordered: {}", listing.join("; ")))
        })
}

/// `P_i − P_j` with `P = datum^{L/mark}`, `L = lcm` of the two marks.
pub(crate) fn power_difference(a: &MarkedFunction, b: &MarkedFunction) -> Jet {
    let l = a.mark.lcm(&b.mark);
    &a.jet.pow(l / a.mark) - &b.jet.pow(l / b.mark)
}
