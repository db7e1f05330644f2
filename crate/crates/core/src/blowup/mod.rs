//! Blow-ups with coordinate-subspace centers, transforms and normal-crossings
//! bookkeeping.
//!
//! Indices are 0-based internally. In chart `i` of the blow-up with center
//! `{x_j = 0, j ∈ I}` the chart formulas are `x_i = y_i`, `x_j = y_i y_j` for
//! `j ∈ I \ {i}` and `x_j = y_j` otherwise.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::series::{self, factor_coordinate_power, Jet, Multiindex, OrderResult, PolyMap, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlowupError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("invalid center: {0}")]
    Center(String),
    #[error("expected exponent {expected}, but only y{var}^{found} factors")]
    Exponent { expected: u32, found: u32, var: usize },
    #[error("e = {e} exceeds the order {order} along the center")]
    OrderTooSmall { e: u32, order: String },
    #[error("sample {0} does not lie on the center")]
    SampleOffCenter(usize),
}

pub type Result<T> = std::result::Result<T, BlowupError>;

/// `{x_i = 0, i ∈ indices}`, indices sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Center {
    indices: Vec<usize>,
}

impl Center {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(BlowupError::Center("empty index set".into()));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= n) {
            return Err(BlowupError::Center(format!("index {} out of range for {n} variables", i + 1)));
        }
        Ok(Center { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn codim(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMap {
    pub center: Center,
    pub chart_index: usize,
    pub n: usize,
}

impl ChartMap {
    pub fn new(center: Center, chart_index: usize, n: usize) -> Result<Self> {
        if !center.contains(chart_index) {
            return Err(BlowupError::Center(format!("chart index {} not in center", chart_index + 1)));
        }
        if center.indices().iter().any(|&i| i >= n) {
            return Err(BlowupError::Center("center index out of range".into()));
        }
        Ok(ChartMap { center, chart_index, n })
    }

    /// All charts of the blow-up with this center.
    pub fn charts(center: &Center, n: usize) -> Vec<ChartMap> {
        center.indices().iter().map(|&i| ChartMap { center: center.clone(), chart_index: i, n }).collect()
    }

    /// Image of an exponent vector under the chart substitution.
    pub fn map_exponent(&self, e: &Multiindex) -> Multiindex {
        let mut out = e.clone();
        let extra: u32 = self.center.indices().iter().filter(|&&j| j != self.chart_index).map(|&j| e[j]).sum();
        out.0[self.chart_index] += extra;
        out
    }

    /// The chart formulas as jets in the chart coordinates.
    pub fn as_map(&self, truncation: u32) -> PolyMap {
        let n = self.n;
        let comps = (0..n)
            .map(|j| {
                let mut e = Multiindex::unit(n, j);
                if j != self.chart_index && self.center.contains(j) {
                    e.0[self.chart_index] += 1;
                }
                Jet::monomial(n, truncation, e, BigRational::one())
            })
            .collect();
        PolyMap::new(comps).expect("nonempty")
    }

    /// Human-readable chart formulas, e.g. `x2 = y1*y2`.
    pub fn formulas(&self) -> Vec<String> {
        let i = self.chart_index;
        (0..self.n)
            .map(|j| {
                if j != i && self.center.contains(j) {
                    format!("x{} = y{}*y{}", j + 1, i + 1, j + 1)
                } else {
                    format!("x{} = y{}", j + 1, j + 1)
                }
            })
            .collect()
    }
}

/// `f ∘ σ` in chart coordinates. The substitution never lowers degrees, so
/// the truncation is kept.
pub fn blowup_pullback(f: &Jet, chart: &ChartMap) -> Jet {
    assert_eq!(f.nvars(), chart.n, "pullback dimension");
    Jet::from_terms(f.nvars(), f.truncation(), f.terms().map(|(e, c)| (chart.map_exponent(e), c.clone())))
}

/// `min Σ_{i∈I} α_i` over stored terms.
pub fn order_along_center(f: &Jet, c: &Center) -> OrderResult {
    match f.terms().map(|(e, _)| c.indices().iter().map(|&i| e[i]).sum::<u32>()).min() {
        Some(k) => OrderResult::Finite(k),
        None => OrderResult::AboveTruncation,
    }
}

/// `y_i^{-d} f ∘ σ`, requiring `d` to be the order along the center.
pub fn weak_transform(f: &Jet, chart: &ChartMap, d: u32) -> Result<Jet> {
    let order = order_along_center(f, &chart.center);
    if order != OrderResult::Finite(d) {
        let found = order.finite().unwrap_or(u32::MAX);
        return Err(BlowupError::Exponent { expected: d, found, var: chart.chart_index + 1 });
    }
    let (e, h) = factor_coordinate_power(&blowup_pullback(f, chart), chart.chart_index)?;
    if e != d {
        return Err(BlowupError::Exponent { expected: d, found: e, var: chart.chart_index + 1 });
    }
    Ok(h)
}

/// Largest power of `y_i` dividing `g ∘ σ`, and the quotient.
pub fn strict_transform_hypersurface(g: &Jet, chart: &ChartMap) -> Result<(u32, Jet)> {
    if g.is_zero() {
        return Err(SeriesError::ZeroJet.into());
    }
    Ok(factor_coordinate_power(&blowup_pullback(g, chart), chart.chart_index)?)
}

/// `D^α g` for all `|α| < d`, in graded-lex order of `α`.
pub fn equimultiple_generators(g: &Jet, d: u32) -> Result<Vec<Jet>> {
    if d == 0 {
        return Err(BlowupError::Center("d must be at least 1".into()));
    }
    if d > g.truncation() {
        return Err(SeriesError::TruncationExhausted(format!("d = {d} exceeds truncation {}", g.truncation())).into());
    }
    let n = g.nvars();
    let mut out = Vec::new();
    for k in 0..d {
        for alpha in crate::faa_di_bruno::compositions(k, n) {
            out.push(g.derivative(&alpha)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub center_order: OrderResult,
    pub pointwise: Vec<OrderResult>,
    /// `center_order ≤ μ_x` at every sample.
    pub lower_bound_holds: bool,
    /// Equality at some sample.
    pub attained: bool,
}

/// Compares the order along `C` with pointwise orders at samples on `C`.
/// The jet is treated as an exact polynomial when re-centering.
pub fn center_order_consistency(g: &Jet, c: &Center, samples: &[Vec<BigRational>]) -> Result<ConsistencyReport> {
    let center_order = order_along_center(g, c);
    let mut pointwise = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        if s.len() != g.nvars() || c.indices().iter().any(|&i| !s[i].is_zero()) {
            return Err(BlowupError::SampleOffCenter(k));
        }
        pointwise.push(g.translate(s)?.order());
    }
    let key = |o: &OrderResult| o.finite().unwrap_or(u32::MAX);
    let lower_bound_holds = pointwise.iter().all(|o| key(&center_order) <= key(o));
    let attained = pointwise.iter().any(|o| key(o) == key(&center_order));
    Ok(ConsistencyReport { center_order, pointwise, lower_bound_holds, attained })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma71Report {
    /// `(j, identity number, holds)` for every `j`.
    pub checks: Vec<(usize, u8, bool)>,
}

impl Lemma71Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.2)
    }
}

fn eq_at_min(a: &Jet, b: &Jet) -> bool {
    let t = a.truncation().min(b.truncation());
    a.truncate_to(t) == b.truncate_to(t)
}

fn div_power(f: &Jet, i: usize, e: u32) -> Result<Jet> {
    let mut beta = Multiindex::zero(f.nvars());
    beta.0[i] = e;
    if f.terms().any(|(a, _)| a[i] < e) {
        return Err(SeriesError::NotDivisible { var: i + 1, witness: format!("power {e}") }.into());
    }
    Ok(series::factor::divide_monomial(f, &beta))
}

/// Verifies the three derivative transformation identities under blow-up in
/// chart `i`, for every coordinate `j`.
pub fn lemma71_check(f: &Jet, c: &Center, i: usize, e: u32) -> Result<Lemma71Report> {
    let n = f.nvars();
    if e == 0 {
        return Err(BlowupError::OrderTooSmall { e, order: "e must be at least 1".into() });
    }
    let order = order_along_center(f, c);
    if order.finite().is_some_and(|k| k < e) {
        return Err(BlowupError::OrderTooSmall { e, order: format!("{order:?}") });
    }
    let chart = ChartMap::new(c.clone(), i, n)?;
    let base = div_power(&blowup_pullback(f, &chart), i, e)?;
    let yi = Jet::variable(n, base.truncation(), i);
    let mut checks = Vec::new();
    for j in 0..n {
        let lhs = div_power(&blowup_pullback(&f.partial_derivative(j)?, &chart), i, e - 1)?;
        let dj = base.partial_derivative(j)?;
        let (kind, rhs) = if !c.contains(j) {
            (1, &yi * &dj)
        } else if j != i {
            (2, dj)
        } else {
            let mut rhs = &base.scale(&BigRational::from_integer(e.into())) + &(&yi * &dj);
            for &k in c.indices().iter().filter(|&&k| k != i) {
                let yk = Jet::variable(n, base.truncation(), k);
                rhs = &rhs - &(&yk * &base.partial_derivative(k)?);
            }
            (3, rhs)
        };
        checks.push((j, kind, eq_at_min(&lhs, &rhs)));
    }
    Ok(Lemma71Report { checks })
}

/// Determinant of the Jacobian of `σ_1 ∘ ⋯ ∘ σ_k`.
pub fn jacobian_determinant(charts: &[ChartMap], truncation: u32) -> Result<Jet> {
    let n = charts.first().map(|c| c.n).ok_or_else(|| BlowupError::Center("empty chart sequence".into()))?;
    let mut phi = PolyMap::identity(n, truncation);
    for ch in charts {
        phi = PolyMap::new(phi.components().iter().map(|c| blowup_pullback(c, ch)).collect())?;
    }
    Ok(phi.jacobian_determinant()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcOrigin {
    OldStrictTransform,
    NewFromBlowup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalEntry {
    pub id: usize,
    pub jet: Jet,
    pub origin: ExcOrigin,
}

/// Exceptional hypersurfaces in the current chart. `next_id` is per path.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExceptionalLedger {
    pub entries: Vec<ExceptionalEntry>,
    pub next_id: usize,
}

impl ExceptionalLedger {
    pub fn new() -> Self {
        ExceptionalLedger::default()
    }

    /// Entries vanishing at the origin.
    pub fn through_origin(&self) -> impl Iterator<Item = &ExceptionalEntry> {
        self.entries.iter().filter(|e| !e.jet.is_unit())
    }

    /// Transform under a blow-up chart: strict transforms of old entries plus
    /// the new exceptional `y_i`.
    pub fn blowup(&self, chart: &ChartMap, truncation: u32) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.entries.len() + 1);
        for e in &self.entries {
            let (_, h) = strict_transform_hypersurface(&e.jet, chart)?;
            entries.push(ExceptionalEntry { id: e.id, jet: h, origin: ExcOrigin::OldStrictTransform });
        }
        entries.push(ExceptionalEntry {
            id: self.next_id,
            jet: Jet::variable(chart.n, truncation, chart.chart_index),
            origin: ExcOrigin::NewFromBlowup,
        });
        Ok(ExceptionalLedger { entries, next_id: self.next_id + 1 })
    }

    /// Re-expresses every entry under `x = ψ(x')`.
    pub fn substitute(&self, psi: &PolyMap) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok(ExceptionalEntry { id: e.id, jet: series::substitute(&e.jet, psi)?, origin: e.origin }))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExceptionalLedger { entries, next_id: self.next_id })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NcReport {
    pub holds: bool,
    /// Coordinate (0-based) assigned to each hypersurface through the origin.
    pub assigned: Vec<usize>,
    pub reason: Option<String>,
}

/// Normal-crossings certificate at the origin for smooth hypersurfaces: each
/// one through the origin must have order 1 and their linear parts must be
/// independent, which is exactly the condition for a coordinate system in
/// which all are simultaneously of the form `x_j · unit`. The assigned
/// coordinates are the pivot columns of the gradient matrix.
pub fn normal_crossings_jets(jets: &[&Jet]) -> NcReport {
    let through: Vec<&Jet> = jets.iter().copied().filter(|j| !j.is_unit()).collect();
    for j in &through {
        if j.order() != OrderResult::Finite(1) {
            return NcReport { holds: false, assigned: vec![], reason: Some(format!("hypersurface {j} is not smooth at 0")) };
        }
    }
    let m: linalg::Matrix = through.iter().map(|j| j.gradient_at_origin()).collect();
    if m.is_empty() {
        return NcReport { holds: true, assigned: vec![], reason: None };
    }
    let pivots = linalg::pivot_columns(&m);
    if pivots.len() < through.len() {
        return NcReport { holds: false, assigned: pivots, reason: Some("linear parts are dependent".into()) };
    }
    // assignment j ↦ coordinate: pivots of the echelon form of gradients in
    // the given order hold one distinct coordinate per hypersurface.
    NcReport { holds: true, assigned: pivots, reason: None }
}

/// Ledger entries plus an optional extra hypersurface.
pub fn normal_crossings_check(ledger: &ExceptionalLedger, extra: Option<&Jet>) -> NcReport {
    let mut jets: Vec<&Jet> = ledger.entries.iter().map(|e| &e.jet).collect();
    if let Some(x) = extra {
        jets.push(x);
    }
    normal_crossings_jets(&jets)
}

/// Coordinates in which the given smooth, transverse hypersurfaces through
/// the origin are coordinate hyperplanes: `w = R(x)` with `R` built from the
/// hypersurfaces and completed by standard coordinates. Returns `x = ψ(w)`
/// and, for each input, the coordinate index it becomes (`None` for units).
pub fn rectifying_map(jets: &[&Jet], n: usize, truncation: u32) -> Result<(PolyMap, Vec<Option<usize>>)> {
    let through: Vec<(usize, &Jet)> = jets.iter().copied().enumerate().filter(|(_, j)| !j.is_unit()).collect();
    let grads: linalg::Matrix = through.iter().map(|(_, j)| j.gradient_at_origin()).collect();
    let mut rows: Vec<Jet> = through.iter().map(|(_, j)| j.truncate_to(truncation)).collect();
    let mut lin = grads.clone();
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut trial = lin.clone();
        trial.push((0..n).map(|c| if c == k { BigRational::one() } else { BigRational::zero() }).collect());
        if linalg::rank(&trial) == trial.len() {
            lin = trial;
            rows.push(Jet::variable(n, truncation, k));
        }
    }
    let forward = PolyMap::new(rows)?;
    let psi = series::invert_map(&forward)?;
    let mut assigned = vec![None; jets.len()];
    for (slot, (idx, _)) in through.iter().enumerate() {
        assigned[*idx] = Some(slot);
    }
    Ok((psi, assigned))
}

/// A function paired with its assigned multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedFunction {
    pub jet: Jet,
    pub mark: u32,
}
