//! Sparse super-commutative polynomial arithmetic shared by function
//! algebras and multivector fields. Generators are identified by index and
//! carry only a parity; the canonical monomial order is generator order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::galg::Monomial;

pub(crate) type Terms = BTreeMap<Monomial, BigRational>;

pub(crate) fn add_term(terms: &mut Terms, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

pub(crate) fn add_assign(acc: &mut Terms, other: &Terms) {
    for (m, c) in other {
        add_term(acc, m.clone(), c.clone());
    }
}

pub(crate) fn add_scaled(acc: &mut Terms, other: &Terms, s: &BigRational) {
    if s.is_zero() {
        return;
    }
    for (m, c) in other {
        add_term(acc, m.clone(), c * s);
    }
}

pub(crate) fn scaled(a: &Terms, s: &BigRational) -> Terms {
    if s.is_zero() {
        return Terms::new();
    }
    a.iter().map(|(m, c)| (m.clone(), c * s)).collect()
}

pub(crate) fn negated(a: &Terms) -> Terms {
    a.iter().map(|(m, c)| (m.clone(), -c)).collect()
}

/// Product of two monomials in canonical order. Returns `None` when an odd
/// generator would be squared, otherwise the product and whether the
/// reordering contributes a minus sign.
pub(crate) fn mono_mul(a: &Monomial, b: &Monomial, odd: &[bool]) -> Option<(Monomial, bool)> {
    let ea = a.exponents();
    let eb = b.exponents();
    let n = odd.len();
    let mut out = Vec::with_capacity(n);
    let mut minus = false;
    // number of odd generators of `a` with index > j, accumulated right to left
    let mut odd_after = 0u32;
    let mut crossing = vec![0u32; n];
    for j in (0..n).rev() {
        crossing[j] = odd_after;
        if odd[j] && ea[j] > 0 {
            odd_after += 1;
        }
    }
    for j in 0..n {
        let e = ea[j] + eb[j];
        if odd[j] && e > 1 {
            return None;
        }
        if odd[j] && eb[j] > 0 && crossing[j] % 2 == 1 {
            minus = !minus;
        }
        out.push(e);
    }
    Some((Monomial::from_exponents(out), minus))
}

pub(crate) fn mul(a: &Terms, b: &Terms, odd: &[bool]) -> Terms {
    let mut out = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some((m, minus)) = mono_mul(ma, mb, odd) {
                let c = ca * cb;
                add_term(&mut out, m, if minus { -c } else { c });
            }
        }
    }
    out
}

/// Left derivative of a single monomial with respect to generator `g`.
pub(crate) fn mono_partial_left(m: &Monomial, g: usize, odd: &[bool]) -> Option<(Monomial, i64)> {
    let e = m.exponents();
    if e[g] == 0 {
        return None;
    }
    let mut sign = 1i64;
    if odd[g] {
        let before: u32 = (0..g).filter(|&i| odd[i]).map(|i| e[i]).sum();
        if before % 2 == 1 {
            sign = -1;
        }
    }
    let mut out = e.to_vec();
    out[g] -= 1;
    Some((Monomial::from_exponents(out), sign * e[g] as i64))
}

/// Right derivative of a single monomial with respect to generator `g`.
pub(crate) fn mono_partial_right(m: &Monomial, g: usize, odd: &[bool]) -> Option<(Monomial, i64)> {
    let e = m.exponents();
    if e[g] == 0 {
        return None;
    }
    let mut sign = 1i64;
    if odd[g] {
        let after: u32 = (g + 1..e.len()).filter(|&i| odd[i]).map(|i| e[i]).sum();
        if after % 2 == 1 {
            sign = -1;
        }
    }
    let mut out = e.to_vec();
    out[g] -= 1;
    Some((Monomial::from_exponents(out), sign * e[g] as i64))
}

pub(crate) fn partial_left(a: &Terms, g: usize, odd: &[bool]) -> Terms {
    let mut out = Terms::new();
    for (m, c) in a {
        if let Some((dm, k)) = mono_partial_left(m, g, odd) {
            add_term(&mut out, dm, c * BigRational::from_integer(k.into()));
        }
    }
    out
}

pub(crate) fn partial_right(a: &Terms, g: usize, odd: &[bool]) -> Terms {
    let mut out = Terms::new();
    for (m, c) in a {
        if let Some((dm, k)) = mono_partial_right(m, g, odd) {
            add_term(&mut out, dm, c * BigRational::from_integer(k.into()));
        }
    }
    out
}

pub(crate) fn one(n: usize) -> Terms {
    let mut t = Terms::new();
    t.insert(Monomial::one(n), BigRational::one());
    t
}

pub(crate) fn generator(n: usize, g: usize) -> Terms {
    let mut t = Terms::new();
    t.insert(Monomial::generator(n, g), BigRational::one());
    t
}

/// Substitutes generators by polynomials. Each monomial is rebuilt as the
/// ordered product of its (possibly substituted) factors, which is correct
/// as long as every substitute has the parity of the generator it replaces.
pub(crate) fn substitute(a: &Terms, subs: &[Option<Terms>], odd: &[bool]) -> Terms {
    let n = odd.len();
    let mut out = Terms::new();
    for (m, c) in a {
        let mut acc = one(n);
        for (g, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                let factor = match &subs[g] {
                    Some(s) => s.clone(),
                    None => generator(n, g),
                };
                acc = mul(&acc, &factor, odd);
                if acc.is_empty() {
                    break;
                }
            }
        }
        add_scaled(&mut out, &acc, c);
    }
    out
}
