use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Jet, Multiindex, PolyMap, Result, SeriesError};
use crate::linalg;

/// `out += c · j`, truncating to `out`'s truncation.
pub(crate) fn add_scaled(out: &mut Jet, j: &Jet, c: &BigRational) {
    if c.is_zero() {
        return;
    }
    for (e, v) in j.terms() {
        out.add_term(e.clone(), v * c);
    }
}

/// Exact composition of the stored polynomial `f` with `comps`, truncated at
/// `t`. Groups terms of `f` by leading exponents and reuses cached powers of
/// each component, so each variable costs one pass of products.
fn compose_raw(f: &Jet, comps: &[Jet], n_out: usize, t: u32) -> Jet {
    let p = f.nvars();
    let mut max_exp = vec![0u32; p];
    for (e, _) in f.terms() {
        for i in 0..p {
            max_exp[i] = max_exp[i].max(e[i]);
        }
    }
    let pows: Vec<Vec<Jet>> = (0..p)
        .map(|i| {
            let base = comps[i].truncate_to(t);
            let mut v = vec![Jet::one(n_out, t)];
            for k in 1..=max_exp[i] {
                let next = &v[k as usize - 1] * &base;
                v.push(next);
            }
            v
        })
        .collect();
    let terms: Vec<(&Multiindex, &BigRational)> = f.terms().collect();
    if p == 0 {
        return Jet::constant(n_out, t, f.constant_term());
    }
    eval_group(&terms, 0, &pows, n_out, t)
}

fn eval_group(terms: &[(&Multiindex, &BigRational)], var: usize, pows: &[Vec<Jet>], n_out: usize, t: u32) -> Jet {
    let mut out = Jet::zero(n_out, t);
    let last = var + 1 == pows.len();
    let mut start = 0;
    while start < terms.len() {
        let k = terms[start].0[var];
        let mut end = start + 1;
        while end < terms.len() && terms[end].0[var] == k {
            end += 1;
        }
        let pk = &pows[var][k as usize];
        if last {
            add_scaled(&mut out, pk, terms[start].1);
        } else if !pk.is_zero() {
            let inner = eval_group(&terms[start..end], var + 1, pows, n_out, t);
            if k == 0 {
                out = &out + &inner;
            } else {
                out = &out + &(pk * &inner);
            }
        }
        start = end;
    }
    out
}

/// Composition treating `f` as an exact polynomial; components may have
/// nonzero constant terms.
pub(crate) fn compose_polynomial(f: &Jet, g: &PolyMap) -> Result<Jet> {
    if f.nvars() != g.len() {
        return Err(SeriesError::Shape(format!("f has {} variables but the map has {} components", f.nvars(), g.len())));
    }
    let t = f.truncation().min(g.truncation());
    Ok(compose_raw(f, g.components(), g.nvars(), t))
}

/// `f ∘ g` where `g(0)` may be nonzero: `f` is first re-centered at `g(0)`.
pub fn substitute(f: &Jet, g: &PolyMap) -> Result<Jet> {
    let base = g.value_at_origin();
    substitute_with_base(f, g, &base)
}

/// As [`substitute`], with the base point given explicitly; it must equal
/// `g(0)`.
pub fn substitute_with_base(f: &Jet, g: &PolyMap, base: &[BigRational]) -> Result<Jet> {
    if f.nvars() != g.len() {
        return Err(SeriesError::Shape(format!("f has {} variables but the map has {} components", f.nvars(), g.len())));
    }
    if base != g.value_at_origin().as_slice() {
        return Err(SeriesError::Shape("base point differs from g(0)".into()));
    }
    if base.iter().all(Zero::is_zero) {
        let t = f.truncation().min(g.truncation());
        return Ok(compose_raw(f, g.components(), g.nvars(), t));
    }
    let recentered = f.translate(base)?;
    let centered: Vec<Jet> = g
        .components()
        .iter()
        .zip(base)
        .map(|(c, b)| {
            let mut c = c.clone();
            c.add_term(Multiindex::zero(g.nvars()), -b.clone());
            c
        })
        .collect();
    let t = f.truncation().min(g.truncation());
    Ok(compose_raw(&recentered, &centered, g.nvars(), t))
}

/// `f(A·x)`.
pub fn linear_change(f: &Jet, a: &linalg::Matrix) -> Result<Jet> {
    let n = f.nvars();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(SeriesError::Shape(format!("matrix is not {n}×{n}")));
    }
    if linalg::determinant(a).is_zero() {
        return Err(SeriesError::Singular);
    }
    Ok(compose_raw(f, &linear_map(a, f.truncation()).into_components(), n, f.truncation()))
}

/// The map `x ↦ A·x` as jets.
pub fn linear_map(a: &linalg::Matrix, t: u32) -> PolyMap {
    let n = a[0].len();
    let comps = a
        .iter()
        .map(|row| Jet::from_terms(n, t, row.iter().enumerate().map(|(j, c)| (Multiindex::unit(n, j), c.clone()))))
        .collect();
    PolyMap::new(comps).expect("nonempty")
}

/// Solves `z(x̃, φ(x̃)) = 0` for `x_i = φ(x̃)`, where `x̃` are the other
/// variables. One degree is fixed per iteration.
pub fn implicit_solve(z: &Jet, i: usize) -> Result<Jet> {
    let n = z.nvars();
    if i >= n {
        return Err(SeriesError::IndexOutOfRange { index: i, nvars: n });
    }
    if !z.constant_term().is_zero() {
        return Err(SeriesError::ImplicitPrecondition("z(0) ≠ 0".into()));
    }
    let pivot = z.coeff(&Multiindex::unit(n, i));
    if pivot.is_zero() {
        return Err(SeriesError::ImplicitPrecondition(format!("∂z/∂x{}(0) = 0", i + 1)));
    }
    let inv = BigRational::one() / &pivot;
    let t = z.truncation();
    let m = n - 1;
    let mut phi = Jet::zero(m, 0);
    for k in 1..=t {
        phi = phi.with_truncation(k);
        let comps: Vec<Jet> = (0..n)
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => Jet::variable(m, k, j),
                std::cmp::Ordering::Equal => phi.clone(),
                std::cmp::Ordering::Greater => Jet::variable(m, k, j - 1),
            })
            .collect();
        let residual = compose_raw(&z.truncate_to(k), &comps, m, k);
        let correction = residual.homogeneous_part(k);
        if correction.is_zero() {
            continue;
        }
        add_scaled(&mut phi, &correction, &-inv.clone());
    }
    Ok(phi.with_truncation(t))
}

/// Inverse of a map germ with `g(0) = 0` and invertible linear part.
pub fn invert_map(g: &PolyMap) -> Result<PolyMap> {
    let n = g.nvars();
    if g.len() != n {
        return Err(SeriesError::Shape("invert_map needs a square map".into()));
    }
    if g.value_at_origin().iter().any(|c| !c.is_zero()) {
        return Err(SeriesError::Shape("invert_map needs g(0) = 0".into()));
    }
    let ainv = linalg::inverse(&g.linear_part()).ok_or(SeriesError::Singular)?;
    let t = g.truncation();
    let mut h: Vec<Jet> = linear_map(&ainv, 1).into_components();
    for k in 2..=t {
        h = h.into_iter().map(|c| c.with_truncation(k)).collect();
        let residual: Vec<Jet> = g.components().iter().map(|c| compose_raw(&c.truncate_to(k), &h, n, k).homogeneous_part(k)).collect();
        if residual.iter().all(Jet::is_zero) {
            continue;
        }
        for (r, hr) in h.iter_mut().enumerate() {
            for (s, res) in residual.iter().enumerate() {
                add_scaled(hr, res, &-ainv[r][s].clone());
            }
        }
    }
    let h = h.into_iter().map(|c| c.with_truncation(t)).collect();
    PolyMap::new(h)
}

impl Jet {
    /// `1/f` for a unit `f`.
    pub fn reciprocal(&self) -> Result<Jet> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::ZeroJet);
        }
        // 1/f = (1/c0) · Σ (-w)^k with w = f/c0 - 1, order(w) ≥ 1
        let inv0 = BigRational::one() / &c0;
        let mut w = self.scale(&inv0);
        w.add_term(Multiindex::zero(self.nvars()), -BigRational::one());
        let w = -&w;
        let mut acc = Jet::one(self.nvars(), self.truncation());
        let mut term = Jet::one(self.nvars(), self.truncation());
        for _ in 0..self.truncation() {
            term = &term * &w;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&inv0))
    }
}
