//! Exact graded-commutative polynomial algebra over a chart.
//!
//! A [`Chart`] lists generators in a fixed order; base coordinates have
//! degree 0 and fiber coordinates positive degree. Odd generators square to
//! zero and anticommute. Derivatives are left derivatives:
//! `∂(ab) = (∂a)b + (-1)^{|∂||a|} a(∂b)` with `|∂| = -|gen|`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gcore::{is_odd, Degree};
use crate::poly::{self, Terms};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    Base,
    Fiber,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: Degree,
    pub kind: GenKind,
}

/// Named graded coordinate system. Cheap to share behind an [`Arc`].
#[derive(Clone, Debug)]
pub struct Chart {
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
    fn_odd: Vec<bool>,
    mvf_odd: Vec<bool>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl Eq for Chart {}

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Chart>> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if !valid_identifier(&g.name) {
                return Err(Error::InvalidChart(format!("bad generator name `{}`", g.name)));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::InvalidChart(format!("duplicate generator `{}`", g.name)));
            }
            match g.kind {
                GenKind::Base if g.degree != 0 => {
                    return Err(Error::InvalidChart(format!(
                        "base coordinate `{}` must have degree 0",
                        g.name
                    )))
                }
                GenKind::Fiber if g.degree < 1 => {
                    return Err(Error::InvalidChart(format!(
                        "fiber coordinate `{}` must have degree >= 1",
                        g.name
                    )))
                }
                _ => {}
            }
        }
        let fn_odd: Vec<bool> = gens.iter().map(|g| is_odd(g.degree)).collect();
        let mut mvf_odd = fn_odd.clone();
        mvf_odd.extend(gens.iter().map(|g| is_odd(1 - g.degree)));
        Ok(Arc::new(Chart {
            gens,
            index,
            fn_odd,
            mvf_odd,
        }))
    }

    /// Starts a chart from `(name, degree)` pairs; degree 0 means base.
    pub fn from_degrees(spec: &[(&str, Degree)]) -> Result<Arc<Chart>> {
        Chart::new(
            spec.iter()
                .map(|&(name, degree)| Generator {
                    name: name.to_string(),
                    degree,
                    kind: if degree == 0 { GenKind::Base } else { GenKind::Fiber },
                })
                .collect(),
        )
    }

    pub fn empty() -> Arc<Chart> {
        Chart::new(Vec::new()).expect("empty chart is valid")
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn degree(&self, i: usize) -> Degree {
        self.gens[i].degree
    }

    pub(crate) fn fn_odd(&self) -> &[bool] {
        &self.fn_odd
    }

    pub(crate) fn mvf_odd(&self) -> &[bool] {
        &self.mvf_odd
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.gens[i].kind == GenKind::Base).collect()
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Exponent vector in chart order.
///
/// Ordered by total exponent first, then so that earlier generators come
/// first (`x^2 < x*y < y^2`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, g: usize) -> Self {
        let mut e = vec![0; n];
        e[g] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `Σ e_i w_i` for per-generator weights.
    pub fn weighted(&self, weights: impl Fn(usize) -> Degree) -> Degree {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as Degree * weights(i))
            .sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncation order `K` for power-series style computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationOrder(pub u32);

impl TruncationOrder {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

pub(crate) fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn render_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical text of a term list given per-generator factor names.
pub(crate) fn render_terms(terms: &Terms, names: &dyn Fn(usize) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in terms.iter().enumerate() {
        let mut factors = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names(i)),
                _ => factors.push(format!("{}^{}", names(i), e)),
            }
        }
        let negative = c.is_negative();
        let abs = c.abs();
        let body = if factors.is_empty() {
            render_rational(&abs)
        } else if abs.is_one() {
            factors.join("*")
        } else {
            format!("{}*{}", render_rational(&abs), factors.join("*"))
        };
        match (k, negative) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

/// Polynomial in the chart generators with exact rational coefficients.
#[derive(Clone)]
pub struct GPoly {
    chart: Arc<Chart>,
    terms: Terms,
}

impl PartialEq for GPoly {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for GPoly {}

impl GPoly {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        GPoly {
            chart: chart.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, BigRational::one())
    }

    pub fn constant(chart: &Arc<Chart>, c: BigRational) -> Self {
        let mut terms = Terms::new();
        poly::add_term(&mut terms, Monomial::one(chart.len()), c);
        GPoly {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn integer(chart: &Arc<Chart>, c: i64) -> Self {
        Self::constant(chart, rational(c))
    }

    pub fn gen(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        let g = chart.index_of(name)?;
        Ok(Self::gen_index(chart, g))
    }

    pub fn gen_index(chart: &Arc<Chart>, g: usize) -> Self {
        GPoly {
            chart: chart.clone(),
            terms: poly::generator(chart.len(), g),
        }
    }

    /// Builds a polynomial from explicit terms; odd squares are rejected.
    pub fn from_terms(
        chart: &Arc<Chart>,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let mut out = Terms::new();
        for (m, c) in terms {
            if m.exponents().len() != chart.len() {
                return Err(Error::Shape(format!(
                    "monomial of length {} on a chart with {} generators",
                    m.exponents().len(),
                    chart.len()
                )));
            }
            if m.exponents().iter().zip(chart.fn_odd()).any(|(&e, &o)| o && e > 1) {
                continue;
            }
            poly::add_term(&mut out, m, c);
        }
        Ok(GPoly {
            chart: chart.clone(),
            terms: out,
        })
    }

    pub(crate) fn from_raw(chart: &Arc<Chart>, terms: Terms) -> Self {
        GPoly {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub(crate) fn raw(&self) -> &Terms {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one(self.chart.len()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn check(&self, other: &GPoly) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &GPoly) -> Result<GPoly> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        poly::add_assign(&mut terms, &other.terms);
        Ok(GPoly::from_raw(&self.chart, terms))
    }

    pub fn scale(&self, c: &BigRational) -> GPoly {
        GPoly::from_raw(&self.chart, poly::scaled(&self.terms, c))
    }

    pub fn scale_int(&self, c: i64) -> GPoly {
        self.scale(&rational(c))
    }

    /// Degree of a monomial as a function.
    pub fn monomial_degree(&self, m: &Monomial) -> Degree {
        m.weighted(|i| self.chart.degree(i))
    }

    /// Common degree of all terms, if there is one. Zero has none.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        let mut degs = self.terms.keys().map(|m| self.monomial_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Highest total exponent on base generators.
    pub fn base_degree(&self) -> u32 {
        let base = self.chart.base_indices();
        self.terms
            .keys()
            .map(|m| base.iter().map(|&i| m.exponents()[i]).sum())
            .max()
            .unwrap_or(0)
    }

    /// Drops terms whose total base exponent exceeds `k`.
    pub fn truncate_base(&self, k: TruncationOrder) -> GPoly {
        let base = self.chart.base_indices();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| base.iter().map(|&i| m.exponents()[i]).sum::<u32>() <= k.0)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GPoly::from_raw(&self.chart, terms)
    }

    /// `true` when every term involves only the listed generators.
    pub fn uses_only(&self, allowed: &[usize]) -> bool {
        self.terms.keys().all(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || allowed.contains(&i))
        })
    }

    /// `true` when no term involves generator `g`.
    pub fn free_of(&self, g: usize) -> bool {
        self.terms.keys().all(|m| m.exponents()[g] == 0)
    }

    /// Substitutes generators by polynomials of the same degree.
    pub fn substitute(&self, subs: &BTreeMap<String, GPoly>) -> Result<GPoly> {
        let mut table: Vec<Option<Terms>> = vec![None; self.chart.len()];
        for (name, s) in subs {
            let g = self.chart.index_of(name)?;
            self.check(s)?;
            check_substitution_degree(&self.chart, g, s)?;
            table[g] = Some(s.terms.clone());
        }
        Ok(GPoly::from_raw(
            &self.chart,
            poly::substitute(&self.terms, &table, self.chart.fn_odd()),
        ))
    }

    pub fn pow(&self, k: u32) -> GPoly {
        let mut acc = GPoly::one(&self.chart);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

pub(crate) fn check_substitution_degree(chart: &Chart, g: usize, s: &GPoly) -> Result<()> {
    let want = chart.degree(g);
    for m in s.terms.keys() {
        let d = s.monomial_degree(m);
        if d != want {
            return Err(Error::DegreeViolation(format!(
                "substituting `{}` (degree {want}) by a term of degree {d}",
                chart.generator(g).name
            )));
        }
    }
    Ok(())
}

/// Graded-commutative product.
pub fn gp_mul(a: &GPoly, b: &GPoly) -> Result<GPoly> {
    a.check(b)?;
    Ok(GPoly::from_raw(
        &a.chart,
        poly::mul(&a.terms, &b.terms, a.chart.fn_odd()),
    ))
}

/// Left partial derivative with respect to the named generator.
pub fn gp_partial(f: &GPoly, gen: &str) -> Result<GPoly> {
    let g = f.chart.index_of(gen)?;
    Ok(gp_partial_index(f, g))
}

pub fn gp_partial_index(f: &GPoly, g: usize) -> GPoly {
    GPoly::from_raw(&f.chart, poly::partial_left(&f.terms, g, f.chart.fn_odd()))
}

/// Splits a polynomial into homogeneous components keyed by degree.
pub fn gp_degree_parts(f: &GPoly) -> BTreeMap<Degree, GPoly> {
    let mut parts: BTreeMap<Degree, Terms> = BTreeMap::new();
    for (m, c) in &f.terms {
        parts
            .entry(f.monomial_degree(m))
            .or_default()
            .insert(m.clone(), c.clone());
    }
    parts
        .into_iter()
        .map(|(d, t)| (d, GPoly::from_raw(&f.chart, t)))
        .collect()
}

impl fmt::Display for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chart = &self.chart;
        f.write_str(&render_terms(&self.terms, &|i| chart.generator(i).name.clone()))
    }
}

// Operator sugar. These panic on chart mismatch; use the `try_*`/`gp_*`
// functions when the charts are not known to agree.

impl Add for &GPoly {
    type Output = GPoly;
    fn add(self, rhs: &GPoly) -> GPoly {
        self.try_add(rhs).expect("chart mismatch in GPoly addition")
    }
}

impl Sub for &GPoly {
    type Output = GPoly;
    fn sub(self, rhs: &GPoly) -> GPoly {
        self + &(-rhs)
    }
}

impl Neg for &GPoly {
    type Output = GPoly;
    fn neg(self) -> GPoly {
        GPoly::from_raw(&self.chart, poly::negated(&self.terms))
    }
}

impl Mul for &GPoly {
    type Output = GPoly;
    fn mul(self, rhs: &GPoly) -> GPoly {
        gp_mul(self, rhs).expect("chart mismatch in GPoly product")
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(GPoly, Add add, Sub sub, Mul mul);

impl Neg for GPoly {
    type Output = GPoly;
    fn neg(self) -> GPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Chart::from_degrees(&[("x", 0), ("y", 0), ("xi1", 1), ("xi2", 1), ("p", 2)]).unwrap()
    }

    fn g(c: &Arc<Chart>, n: &str) -> GPoly {
        GPoly::gen(c, n).unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let c = chart();
        let xi = g(&c, "xi1");
        assert!((&xi * &xi).is_zero());
        let p = g(&c, "p");
        assert!(!(&p * &p).is_zero());
    }

    #[test]
    fn odd_generators_anticommute() {
        let c = chart();
        let (a, b) = (g(&c, "xi1"), g(&c, "xi2"));
        assert_eq!(&a * &b, -(&b * &a));
        let x = g(&c, "x");
        assert_eq!(&x * &a, &a * &x);
    }

    #[test]
    fn square_expansion() {
        let c = chart();
        let f = &g(&c, "x") + &(&g(&c, "xi1") * &g(&c, "xi2"));
        let sq = &f * &f;
        // distributivity oracle: x^2 + x·ξξ + ξξ·x + (ξξ)^2
        let x = g(&c, "x");
        let xx = &x * &x;
        let xxi = &x * &(&g(&c, "xi1") * &g(&c, "xi2"));
        assert_eq!(sq, &xx + &xxi.scale_int(2));
        assert_eq!(sq.to_string(), "x^2 + 2*x*xi1*xi2");
    }

    #[test]
    fn partial_examples() {
        let c = chart();
        let f = &g(&c, "xi1") * &g(&c, "xi2");
        assert_eq!(gp_partial(&f, "xi1").unwrap(), g(&c, "xi2"));
        assert_eq!(gp_partial(&f, "xi2").unwrap(), -g(&c, "xi1"));
        let x2 = g(&c, "x").pow(2);
        assert_eq!(gp_partial(&x2, "x").unwrap(), g(&c, "x").scale_int(2));
        assert_eq!(
            gp_partial(&x2, "zz"),
            Err(Error::UnknownGenerator("zz".into()))
        );
    }

    #[test]
    fn degree_parts() {
        let c = chart();
        assert!(gp_degree_parts(&GPoly::zero(&c)).is_empty());
        let f = &g(&c, "x") + &g(&c, "xi1");
        let parts = gp_degree_parts(&f);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&0], g(&c, "x"));
        assert_eq!(parts[&1], g(&c, "xi1"));
    }

    #[test]
    fn cubic_is_single_degree() {
        let c = chart();
        let theta = &(&g(&c, "x") * &(&g(&c, "xi1") * &g(&c, "p")))
            - &(&g(&c, "xi1") * &g(&c, "xi2")).scale(&BigRational::new(1.into(), 6.into()));
        // the ξξ term has degree 2 here; the cubic part with p has degree 3
        let parts = gp_degree_parts(&theta);
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = GPoly::one(&chart());
        let b = GPoly::one(&Chart::from_degrees(&[("z", 0)]).unwrap());
        assert_eq!(gp_mul(&a, &b), Err(Error::ChartMismatch));
    }

    #[test]
    fn invalid_charts() {
        assert!(Chart::from_degrees(&[("x", 0), ("x", 1)]).is_err());
        assert!(Chart::new(vec![Generator {
            name: "x".into(),
            degree: 1,
            kind: GenKind::Base
        }])
        .is_err());
        assert!(Chart::new(vec![Generator {
            name: "e".into(),
            degree: 0,
            kind: GenKind::Fiber
        }])
        .is_err());
        assert!(Chart::empty().is_empty());
    }

    #[test]
    fn rendering_is_canonical() {
        let c = chart();
        let f = &(&g(&c, "y") - &g(&c, "x").scale(&BigRational::new(1.into(), 3.into())))
            + &GPoly::integer(&c, -2);
        assert_eq!(f.to_string(), "-2 - 1/3*x + y");
        assert_eq!(GPoly::zero(&c).to_string(), "0");
    }

    #[test]
    fn substitution_checks_degree() {
        let c = chart();
        let f = &g(&c, "y") * &g(&c, "xi1");
        let mut subs = BTreeMap::new();
        subs.insert("y".to_string(), g(&c, "x").pow(2));
        assert_eq!(f.substitute(&subs).unwrap(), &g(&c, "x").pow(2) * &g(&c, "xi1"));
        subs.insert("xi1".to_string(), g(&c, "x"));
        assert!(matches!(f.substitute(&subs), Err(Error::DegreeViolation(_))));
    }
}

impl fmt::Debug for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GPoly({self})")
    }
}
