use super::{Jet, Multiindex, Result, SeriesError};

/// `f / x_i` when `f` vanishes on `{x_i = 0}`; truncation drops by one.
pub fn divide_by_coordinate(f: &Jet, i: usize) -> Result<Jet> {
    f.check_index(i)?;
    if let Some((e, _)) = f.terms().find(|(e, _)| e[i] == 0) {
        return Err(SeriesError::NotDivisible { var: i + 1, witness: monomial_string(e) });
    }
    let mut beta = Multiindex::zero(f.nvars());
    beta.0[i] = 1;
    Ok(divide_monomial(f, &beta))
}

/// Largest power `e` of `x_i` dividing every stored term, and `f / x_i^e`.
pub fn factor_coordinate_power(f: &Jet, i: usize) -> Result<(u32, Jet)> {
    f.check_index(i)?;
    if f.is_zero() {
        return Err(SeriesError::ZeroJet);
    }
    let e = f.terms().map(|(a, _)| a[i]).min().unwrap_or(0);
    let mut beta = Multiindex::zero(f.nvars());
    beta.0[i] = e;
    Ok((e, divide_monomial(f, &beta)))
}

/// `f = x^α · u` with `u(0) ≠ 0`, where `α` is the componentwise minimum of
/// the stored exponents. `None` if `u(0) = 0` or `f` is zero.
pub fn monomial_unit_decompose(f: &Jet) -> Option<(Multiindex, Jet)> {
    let alpha = min_exponent(f)?;
    let u = divide_monomial(f, &alpha);
    if u.is_unit() {
        Some((alpha, u))
    } else {
        None
    }
}

/// Componentwise minimum of stored exponents.
pub fn min_exponent(f: &Jet) -> Option<Multiindex> {
    let mut it = f.terms().map(|(e, _)| e);
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, e| Multiindex(acc.0.iter().zip(&e.0).map(|(a, b)| *a.min(b)).collect())))
}

/// `f / x^β` on stored terms, truncation `T - |β|`. Caller guarantees
/// divisibility.
pub(crate) fn divide_monomial(f: &Jet, beta: &Multiindex) -> Jet {
    let t = f.truncation().saturating_sub(beta.degree());
    Jet::from_terms(
        f.nvars(),
        t,
        f.terms().map(|(e, c)| (e.checked_sub(beta).expect("divisible by monomial"), c.clone())),
    )
}

fn monomial_string(e: &Multiindex) -> String {
    let parts: Vec<String> = e
        .0
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0)
        .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}
