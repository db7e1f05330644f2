//! Explicit constants for composition and inversion in a class `C_m`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{binom_half, DcError, GrowthSequence};
use crate::linalg;
use crate::series::{substitute, Jet, Multiindex, PolyMap};

/// Denominator of the rational grid searched for `ρ'` and `b`.
pub const GRID: i64 = 1 << 10;

fn grid(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(GRID))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionConstants {
    /// Smallest `C` with `H_γ ≤ C D^{|γ|}` for `1 ≤ |γ| ≤ certified_depth`.
    #[serde(serialize_with = "ser_rat")]
    pub c: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub d: BigRational,
    pub certified_depth: u32,
    /// `H(1/D, …, 1/D)`, a bound valid for every `γ` by the Cauchy estimate.
    #[serde(serialize_with = "ser_rat_opt")]
    pub global_c: Option<BigRational>,
}

fn ser_rat<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_rat_opt<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Coefficients of `H = F ∘ G` with `G_j = Π 1/(1-u_i) - 1`,
/// `F = Π 1/(1 - λ z_j)`, through total degree `depth`.
pub fn majorant_series(lambda: &BigRational, n: usize, p: usize, depth: u32) -> Jet {
    let geo = |nv: usize, scale: &BigRational| -> Jet {
        let mut acc = Jet::one(nv, depth);
        for i in 0..nv {
            let mut f = Jet::zero(nv, depth);
            for k in 0..=depth {
                let mut e = Multiindex::zero(nv);
                e.0[i] = k;
                f.add_term(e, num_traits::pow(scale.clone(), k as usize));
            }
            acc = &acc * &f;
        }
        acc
    };
    let mut g = geo(n, &BigRational::one());
    g.add_term(Multiindex::zero(n), -BigRational::one());
    let f = geo(p, lambda);
    let map = PolyMap::new(vec![g; p]).expect("nonempty");
    substitute(&f, &map).expect("shapes agree")
}

/// `(C, D)` with `H_γ ≤ C D^{|γ|}` for `λ = b c m_1`.
pub fn composition_constants(b: &BigRational, c: &BigRational, m1: &BigRational, n: usize, p: usize, depth: u32) -> Result<CompositionConstants, DcError> {
    if !(b.is_positive() && c.is_positive() && m1.is_positive()) || n == 0 || p == 0 {
        return Err(DcError::Invalid("inputs must be positive".into()));
    }
    let lambda = b * c * m1;
    if n == 1 && p == 1 {
        return Ok(CompositionConstants {
            c: lambda.clone(),
            d: BigRational::one() + &lambda,
            certified_depth: u32::MAX,
            global_c: None,
        });
    }
    // H converges on the diagonal while λ((1-t)^{-n} - 1) < 1, i.e.
    // (1-t)^n > λ/(1+λ). Take the largest grid point below that radius.
    let threshold = &lambda / (BigRational::one() + &lambda);
    let mut k = GRID - 1;
    while k > 1 && num_traits::pow(BigRational::one() - grid(k), n) <= threshold {
        k -= 1;
    }
    let rho = grid(k);
    let d = BigRational::one() / &rho;
    let h = majorant_series(&lambda, n, p, depth);
    let mut cmax = BigRational::zero();
    for (e, v) in h.terms() {
        if e.is_zero() {
            continue;
        }
        let scaled = v * num_traits::pow(rho.clone(), e.degree() as usize);
        if scaled > cmax {
            cmax = scaled;
        }
    }
    let inner = &lambda * (BigRational::one() / num_traits::pow(BigRational::one() - &rho, n) - BigRational::one());
    let global_c = if inner < BigRational::one() {
        Some(BigRational::one() / num_traits::pow(BigRational::one() - inner, p))
    } else {
        None
    };
    Ok(CompositionConstants { c: cmax, d, certified_depth: depth, global_c })
}

/// Solution of the majorant system for the inverse map.
#[derive(Clone, Debug)]
pub struct InverseMajorant {
    pub components: Vec<Jet>,
}

impl InverseMajorant {
    pub fn coeff(&self, i: usize, gamma: &Multiindex) -> BigRational {
        self.components[i].coeff(gamma)
    }
}

/// Solves `G_i = (r/m_1)(y_1 + ⋯ + y_n) + Φ(G)` with
/// `Φ(x) = Σ_{|α|≥2} n r a (m_1 b)^{|α|} x^α`, through degree `depth`.
pub fn inverse_majorant(n: usize, r: &BigRational, a: &BigRational, b: &BigRational, m: &GrowthSequence, depth: u32) -> Result<InverseMajorant, DcError> {
    if n == 0 || !(r.is_positive() && a.is_positive() && b.is_positive()) {
        return Err(DcError::Invalid("n, r, a, b must be positive".into()));
    }
    let m1 = m.m1()?;
    let lin_coeff = r / &m1;
    let linear = Jet::from_terms(n, depth, (0..n).map(|j| (Multiindex::unit(n, j), lin_coeff.clone())));
    let nra = BigRational::from_integer(n.into()) * r * a;
    let mb = &m1 * b;
    let mut phi = Jet::zero(n, depth);
    for k in 2..=depth {
        let c = &nra * num_traits::pow(mb.clone(), k as usize);
        for e in crate::faa_di_bruno::compositions(k, n) {
            phi.add_term(e, c.clone());
        }
    }
    let mut g = vec![linear.clone(); n];
    for _ in 1..depth {
        let map = PolyMap::new(g.clone()).expect("nonempty");
        let next = &linear + &substitute(&phi, &map).expect("shapes agree");
        g = vec![next; n];
    }
    if g.windows(2).any(|w| w[0] != w[1]) {
        return Err(DcError::Invalid("majorant components differ".into()));
    }
    if g.iter().any(|c| c.terms().any(|(_, v)| v.is_negative())) {
        return Err(DcError::Invalid("majorant has a negative coefficient".into()));
    }
    Ok(InverseMajorant { components: g })
}

/// Constants `(r, a, b)` read off a concrete map at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rab {
    pub r: BigRational,
    pub a: BigRational,
    pub b: BigRational,
}

/// Smallest grid value `k/GRID` (k ≥ 1) satisfying a monotone predicate.
fn smallest_grid<F: Fn(&BigRational) -> Result<bool, DcError>>(ok: F) -> Result<BigRational, DcError> {
    let mut hi = 1i64;
    while !ok(&grid(hi))? {
        hi *= 2;
        if hi > GRID << 40 {
            return Err(DcError::Invalid("no grid value satisfies the bound".into()));
        }
    }
    let mut lo = 0i64;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(&grid(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(grid(hi))
}

/// `r` bounds the inverse Jacobian at 0; `a`, `b` bound the Taylor
/// coefficients as `|f_{i,α}| ≤ a b^{|α|} m_{|α|}`.
pub fn extract_rab(f: &PolyMap, m: &GrowthSequence) -> Result<Rab, DcError> {
    let inv = linalg::inverse(&f.linear_part()).ok_or_else(|| DcError::Invalid("Jacobian at 0 is singular".into()))?;
    let r = inv.iter().flatten().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    let a0 = f.value_at_origin().iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    let a = if a0.is_positive() { a0 } else { BigRational::one() };
    let coeffs: Vec<(u32, BigRational)> =
        f.components().iter().flat_map(|c| c.terms().filter(|(e, _)| !e.is_zero()).map(|(e, v)| (e.degree(), v.abs()))).collect();
    let b = smallest_grid(|b| {
        for (deg, v) in &coeffs {
            let scale = &a * num_traits::pow(b.clone(), *deg as usize);
            if !m.rational_le_scaled_term(v, &scale, *deg)? {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(Rab { r, a, b })
}

/// `factor · m_k`, kept unevaluated because `m_k` may be irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledTerm {
    pub factor: BigRational,
    pub k: u32,
}

impl ScaledTerm {
    pub fn dominates(&self, x: &BigRational, m: &GrowthSequence) -> Result<bool, DcError> {
        m.rational_le_scaled_term(&x.abs(), &self.factor, self.k)
    }
}

/// `B_n = |binom(1/2, n)| 2^n a^n c^{n-1} m_n` with `c = 2 b m_1`, for
/// `n = 1..=depth`.
pub fn inverse_bound_1var(a: &BigRational, b: &BigRational, m: &GrowthSequence, depth: u32) -> Result<Vec<ScaledTerm>, DcError> {
    let c = BigRational::from_integer(2.into()) * b * m.m1()?;
    Ok((1..=depth)
        .map(|n| ScaledTerm {
            factor: binom_half(n).abs()
                * num_traits::pow(BigRational::from_integer(2.into()), n as usize)
                * num_traits::pow(a.clone(), n as usize)
                * num_traits::pow(c.clone(), n as usize - 1),
            k: n,
        })
        .collect())
}

/// `(a, b)` for a one-variable `f`: `a = 1/(m_1 |f_1|)` and `b` the smallest
/// grid value with `|f_{n+1}| ≤ b^n m_{n+1} / ((n+1) a m_1^2)` for all stored
/// `n ≥ 1`.
pub fn extract_remark_ab(f: &Jet, m: &GrowthSequence) -> Result<(BigRational, BigRational), DcError> {
    if f.nvars() != 1 {
        return Err(DcError::Invalid("one-variable series expected".into()));
    }
    let m1 = m.m1()?;
    let f1 = f.coeff(&Multiindex(vec![1])).abs();
    if f1.is_zero() {
        return Err(DcError::Invalid("f'(0) = 0".into()));
    }
    let a = BigRational::one() / (&m1 * &f1);
    let higher: Vec<(u32, BigRational)> = f.terms().filter(|(e, _)| e[0] >= 2).map(|(e, v)| (e[0], v.abs())).collect();
    let denom_base = &a * &m1 * &m1;
    let b = smallest_grid(|b| {
        for (deg, v) in &higher {
            let n = deg - 1;
            let scale = num_traits::pow(b.clone(), n as usize) / (&denom_base * BigRational::from_integer((*deg).into()));
            if !m.rational_le_scaled_term(v, &scale, *deg)? {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok((a, b))
}
