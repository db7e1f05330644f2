//! Truncated multivariate power series (jets) with exact rational coefficients.
//!
//! A [`Jet`] of truncation `T` stores the Taylor coefficients of a germ at the
//! origin for every multiindex of total degree `<= T`. Coefficients of higher
//! degree are unknown. Operations that lose degree information (derivatives,
//! division by a coordinate) lower the recorded truncation instead of padding.
//!
//! Invariants:
//! - every stored multiindex has length `nvars` and total degree `<= truncation`
//! - no stored coefficient is zero

mod compose;
pub(crate) mod factor;
mod json;
mod ops;

pub use compose::{implicit_solve, invert_map, linear_change, linear_map, substitute, substitute_with_base};
pub use factor::{divide_by_coordinate, factor_coordinate_power, monomial_unit_decompose};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default truncation degree for jets built from user input.
pub const DEFAULT_TRUNCATION: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("not divisible by x{var}: witness monomial {witness}")]
    NotDivisible { var: usize, witness: String },
    #[error("operation undefined on the zero jet")]
    ZeroJet,
    #[error("singular matrix")]
    Singular,
    #[error("implicit solve precondition failed: {0}")]
    ImplicitPrecondition(String),
    #[error("truncation exhausted: {0}")]
    TruncationExhausted(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Exponent vector `α ∈ ℕ^n`. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiindex(pub Vec<u32>);

impl Multiindex {
    pub fn zero(n: usize) -> Self {
        Multiindex(vec![0; n])
    }

    /// The unit vector `(j)`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        Multiindex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Multiindex) -> Multiindex {
        Multiindex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Multiindex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Multiindex) -> Option<Multiindex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multiindex)
    }

    /// `α! = α_1! ⋯ α_n!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e))
    }

    /// Graded-lexicographic comparison key.
    pub fn grlex_key(&self) -> (u32, &[u32]) {
        (self.degree(), &self.0)
    }
}

impl std::ops::Index<usize> for Multiindex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for Multiindex {
    fn from(v: Vec<u32>) -> Self {
        Multiindex(v)
    }
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Result of an order computation on a jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderResult {
    Finite(u32),
    /// Every coefficient up to the truncation vanishes.
    AboveTruncation,
}

impl OrderResult {
    pub fn finite(self) -> Option<u32> {
        match self {
            OrderResult::Finite(k) => Some(k),
            OrderResult::AboveTruncation => None,
        }
    }
}

/// A truncated power series in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    nvars: usize,
    truncation: u32,
    coeffs: BTreeMap<Multiindex, BigRational>,
}

impl Jet {
    pub fn zero(nvars: usize, truncation: u32) -> Self {
        Jet { nvars, truncation, coeffs: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, truncation: u32, c: BigRational) -> Self {
        let mut j = Jet::zero(nvars, truncation);
        j.set(Multiindex::zero(nvars), c);
        j
    }

    pub fn one(nvars: usize, truncation: u32) -> Self {
        Jet::constant(nvars, truncation, BigRational::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn variable(nvars: usize, truncation: u32, i: usize) -> Self {
        Jet::monomial(nvars, truncation, Multiindex::unit(nvars, i), BigRational::one())
    }

    pub fn monomial(nvars: usize, truncation: u32, exp: Multiindex, c: BigRational) -> Self {
        assert_eq!(exp.len(), nvars, "multiindex length");
        let mut j = Jet::zero(nvars, truncation);
        j.set(exp, c);
        j
    }

    /// Builds a jet from terms, summing duplicates and dropping anything above
    /// the truncation.
    pub fn from_terms<I>(nvars: usize, truncation: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Multiindex, BigRational)>,
    {
        let mut j = Jet::zero(nvars, truncation);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "multiindex length");
            j.add_term(e, c);
        }
        j
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(nvars: usize, truncation: u32, terms: &[(&[u32], i64)]) -> Self {
        Jet::from_terms(
            nvars,
            truncation,
            terms.iter().map(|(e, c)| (Multiindex(e.to_vec()), BigRational::from_integer((*c).into()))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero up to the truncation.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multiindex, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, e: &Multiindex) -> BigRational {
        self.coeffs.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Multiindex::zero(self.nvars))
    }

    /// True when the value at the origin is nonzero.
    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Largest total degree among stored terms.
    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(Multiindex::degree).max()
    }

    pub(crate) fn set(&mut self, e: Multiindex, c: BigRational) {
        if e.degree() > self.truncation {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    pub(crate) fn add_term(&mut self, e: Multiindex, c: BigRational) {
        if c.is_zero() || e.degree() > self.truncation {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Order at the origin: lowest total degree of a nonzero coefficient.
    pub fn order(&self) -> OrderResult {
        match self.coeffs.keys().map(Multiindex::degree).min() {
            Some(k) => OrderResult::Finite(k),
            None => OrderResult::AboveTruncation,
        }
    }

    /// Homogeneous part of degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Jet {
        Jet {
            nvars: self.nvars,
            truncation: self.truncation,
            coeffs: self.coeffs.iter().filter(|(e, _)| e.degree() == k).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Drops every term of degree above `t` and records the lower truncation.
    pub fn truncate_to(&self, t: u32) -> Jet {
        let t = t.min(self.truncation);
        Jet {
            nvars: self.nvars,
            truncation: t,
            coeffs: self.coeffs.iter().filter(|(e, _)| e.degree() <= t).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Same terms with a different recorded truncation. Only for jets whose
    /// stored terms are known to be exact (polynomials).
    pub(crate) fn with_truncation(mut self, t: u32) -> Jet {
        self.truncation = t;
        self.coeffs.retain(|e, _| e.degree() <= t);
        self
    }

    /// Restriction to the hyperplane `{x_i = 0}`, as a jet in the remaining
    /// `nvars - 1` variables.
    pub fn restrict_to_hyperplane(&self, i: usize) -> Result<Jet> {
        self.check_index(i)?;
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(e, _)| e[i] == 0)
            .map(|(e, c)| {
                let mut v = e.0.clone();
                v.remove(i);
                (Multiindex(v), c.clone())
            })
            .collect();
        Ok(Jet { nvars: self.nvars - 1, truncation: self.truncation, coeffs })
    }

    /// Embeds into `nvars + 1` variables by inserting a new variable at
    /// position `i` that the jet does not depend on.
    pub fn insert_variable(&self, i: usize) -> Jet {
        assert!(i <= self.nvars);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| {
                let mut v = e.0.clone();
                v.insert(i, 0);
                (Multiindex(v), c.clone())
            })
            .collect();
        Jet { nvars: self.nvars + 1, truncation: self.truncation, coeffs }
    }

    /// Formal partial derivative in `x_i`; truncation drops by one.
    pub fn partial_derivative(&self, i: usize) -> Result<Jet> {
        self.check_index(i)?;
        if self.truncation == 0 {
            return Err(SeriesError::TruncationExhausted("derivative of a degree-0 jet".into()));
        }
        let mut out = Jet::zero(self.nvars, self.truncation - 1);
        for (e, c) in &self.coeffs {
            if e[i] > 0 {
                let mut v = e.0.clone();
                v[i] -= 1;
                out.add_term(Multiindex(v), c * BigRational::from_integer(e[i].into()));
            }
        }
        Ok(out)
    }

    /// Iterated partial derivative `∂^k/∂x_i^k`.
    pub fn partial_derivative_n(&self, i: usize, k: u32) -> Result<Jet> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.partial_derivative(i)?;
        }
        Ok(out)
    }

    /// `D^α f`.
    pub fn derivative(&self, alpha: &Multiindex) -> Result<Jet> {
        let mut out = self.clone();
        for (i, &k) in alpha.0.iter().enumerate() {
            out = out.partial_derivative_n(i, k)?;
        }
        Ok(out)
    }

    /// Gradient at the origin (coefficients of the linear part).
    pub fn gradient_at_origin(&self) -> Vec<BigRational> {
        (0..self.nvars).map(|i| self.coeff(&Multiindex::unit(self.nvars, i))).collect()
    }

    /// Multiplies by the monomial `x^β`. The product is known through degree
    /// `T + |β|`, so the truncation rises accordingly.
    pub fn shift(&self, beta: &Multiindex) -> Jet {
        let t = self.truncation + beta.degree();
        Jet {
            nvars: self.nvars,
            truncation: t,
            coeffs: self.coeffs.iter().map(|(e, c)| (e.add(beta), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.nvars, self.truncation);
        }
        Jet {
            nvars: self.nvars,
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Translation `f(x + a)`, treating the stored terms as an exact
    /// polynomial. Correct for polynomial input; for a genuinely truncated
    /// series the low-degree output depends on unknown high-degree terms.
    pub fn translate(&self, point: &[BigRational]) -> Result<Jet> {
        if point.len() != self.nvars {
            return Err(SeriesError::Shape(format!(
                "translation point has {} coordinates, jet has {} variables",
                point.len(),
                self.nvars
            )));
        }
        if point.iter().all(Zero::is_zero) {
            return Ok(self.clone());
        }
        let t = self.truncation;
        let shifted: Vec<Jet> = (0..self.nvars)
            .map(|i| {
                let mut v = Jet::variable(self.nvars, t, i);
                v.add_term(Multiindex::zero(self.nvars), point[i].clone());
                v
            })
            .collect();
        let map = PolyMap::new(shifted)?;
        compose::compose_polynomial(self, &map)
    }

    /// Evaluation of the stored polynomial at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    term *= num_traits::pow(point[i].clone(), k as usize);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn pow(&self, k: u32) -> Jet {
        let mut result = Jet::one(self.nvars, self.truncation);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.nvars {
            Err(SeriesError::IndexOutOfRange { index: i, nvars: self.nvars })
        } else {
            Ok(())
        }
    }

    /// Renders the stored polynomial with the given variable names.
    pub fn to_poly_string(&self, names: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Multiindex, &BigRational)> = self.coeffs.iter().collect();
        terms.sort_by(|a, b| a.0.grlex_key().cmp(&b.0.grlex_key()));
        let mut out = String::new();
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { names[i].clone() } else { format!("{}^{}", names[i], p) })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    if abs.is_integer() {
                        out.push_str(&format!("{}*", abs));
                    } else {
                        out.push_str(&format!("({})*", abs));
                    }
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }

    pub fn default_names(nvars: usize, prefix: &str) -> Vec<String> {
        (1..=nvars).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly_string(&Jet::default_names(self.nvars, "x")))
    }
}

/// A tuple of jets sharing variable count and truncation, read as a map
/// `x ↦ (φ_1(x), …, φ_p(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<Jet>,
}

impl PolyMap {
    /// Components must be nonempty and agree on `nvars`. Truncations are
    /// harmonised to the minimum.
    pub fn new(components: Vec<Jet>) -> Result<Self> {
        let first = components.first().ok_or_else(|| SeriesError::Shape("empty map".into()))?;
        let n = first.nvars();
        if components.iter().any(|c| c.nvars() != n) {
            return Err(SeriesError::Shape("map components disagree on variable count".into()));
        }
        let t = components.iter().map(Jet::truncation).min().unwrap_or(0);
        let components = components.into_iter().map(|c| if c.truncation() > t { c.truncate_to(t) } else { c }).collect();
        Ok(PolyMap { components })
    }

    pub fn identity(n: usize, truncation: u32) -> Self {
        PolyMap { components: (0..n).map(|i| Jet::variable(n, truncation, i)).collect() }
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Jet> {
        self.components
    }

    /// Number of components (target dimension).
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Source dimension.
    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn truncation(&self) -> u32 {
        self.components[0].truncation()
    }

    pub fn value_at_origin(&self) -> Vec<BigRational> {
        self.components.iter().map(Jet::constant_term).collect()
    }

    /// `self ∘ inner`: each component of `self` composed with `inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        let comps = self.components.iter().map(|c| substitute(c, inner)).collect::<Result<Vec<_>>>()?;
        PolyMap::new(comps)
    }

    /// Linear part at the origin: `J[i][j] = ∂φ_i/∂x_j(0)`.
    pub fn linear_part(&self) -> Vec<Vec<BigRational>> {
        self.components.iter().map(Jet::gradient_at_origin).collect()
    }

    /// Jacobian matrix of jets, truncation `T - 1`.
    pub fn jacobian(&self) -> Result<Vec<Vec<Jet>>> {
        self.components
            .iter()
            .map(|c| (0..c.nvars()).map(|j| c.partial_derivative(j)).collect::<Result<Vec<_>>>())
            .collect()
    }

    /// Determinant of the Jacobian matrix as a jet (square maps only).
    pub fn jacobian_determinant(&self) -> Result<Jet> {
        if self.len() != self.nvars() {
            return Err(SeriesError::Shape("jacobian determinant of a non-square map".into()));
        }
        let jac = self.jacobian()?;
        Ok(jet_determinant(&jac))
    }

    pub fn is_identity(&self) -> bool {
        self.len() == self.nvars()
            && self.components.iter().enumerate().all(|(i, c)| c.len() == 1 && c.coeff(&Multiindex::unit(c.nvars(), i)).is_one())
    }
}

/// Determinant of a square matrix of jets by cofactor expansion.
pub fn jet_determinant(m: &[Vec<Jet>]) -> Jet {
    let n = m.len();
    match n {
        0 => panic!("empty matrix"),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc: Option<Jet> = None;
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Jet>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| v.clone()).collect()).collect();
                let term = &m[0][col] * &jet_determinant(&minor);
                acc = Some(match acc {
                    None if col % 2 == 0 => term,
                    None => -&term,
                    Some(a) if col % 2 == 0 => &a + &term,
                    Some(a) => &a - &term,
                });
            }
            acc.unwrap_or_else(|| {
                let t = m.iter().flatten().map(Jet::truncation).min().unwrap_or(0);
                Jet::zero(m[0][0].nvars(), t)
            })
        }
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
