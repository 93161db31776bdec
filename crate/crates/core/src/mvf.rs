//! Multivector fields on a chart.
//!
//! A multivector field is a polynomial in the chart's function generators
//! `u` together with derivation generators `θ_u = ∂/∂u`. The derivation
//! generator has total degree `1 - |u|`, so it is odd exactly when the
//! wedge parity of `∂/∂u` is odd. Each term carries the bi-grading
//! `(|Z|, l)`: `l` counts derivation factors and `|Z| + l` is the total
//! degree. The shifted degree is `‖Z‖ = |Z| + l - 1`.
//!
//! The Schouten bracket is the odd Poisson bracket pairing `u` with `θ_u`:
//!
//! ```text
//! [Z, W] = Σ_u  (-1)^{‖Z‖(|u|-1)} (∂_{θ_u} Z)(∂_u W)
//!             - (-1)^{‖Z‖ |u|}    (∂_u Z)(∂_{θ_u} W)
//! ```
//!
//! with left derivatives. On generators this gives `[∂/∂u, u] = 1`, and
//! on vector fields it reduces to the graded commutator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::galg::{
    check_substitution_degree, forward_owned, rational, render_terms, same_chart, Chart, GPoly,
    Monomial,
};
use crate::gcore::{is_odd, Degree};
use crate::poly::{self, Terms};

#[derive(Clone)]
pub struct Mvf {
    chart: Arc<Chart>,
    terms: Terms,
}

impl PartialEq for Mvf {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for Mvf {}

/// Bi-grading data of a single term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermGrading {
    pub inherited: Degree,
    pub multiplicity: usize,
}

impl TermGrading {
    pub fn total(self) -> Degree {
        self.inherited + self.multiplicity as Degree
    }

    pub fn shifted(self) -> Degree {
        self.total() - 1
    }
}

pub(crate) fn lift_terms(t: &Terms, n: usize) -> Terms {
    t.iter()
        .map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e.resize(2 * n, 0);
            (Monomial::from_exponents(e), c.clone())
        })
        .collect()
}

impl Mvf {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Mvf {
            chart: chart.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Mvf::from_raw(chart, poly::one(2 * chart.len()))
    }

    pub fn constant(chart: &Arc<Chart>, c: BigRational) -> Self {
        Mvf::from_function(&GPoly::constant(chart, c))
    }

    pub fn from_function(f: &GPoly) -> Self {
        Mvf::from_raw(f.chart(), lift_terms(f.raw(), f.chart().len()))
    }

    /// The coordinate function `name`.
    pub fn function(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        Ok(Mvf::from_function(&GPoly::gen(chart, name)?))
    }

    /// The coordinate vector field `∂/∂name`.
    pub fn deriv(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        let g = chart.index_of(name)?;
        Ok(Mvf::deriv_index(chart, g))
    }

    pub fn deriv_index(chart: &Arc<Chart>, g: usize) -> Self {
        let n = chart.len();
        Mvf::from_raw(chart, poly::generator(2 * n, n + g))
    }

    pub(crate) fn from_raw(chart: &Arc<Chart>, terms: Terms) -> Self {
        Mvf {
            chart: chart.clone(),
            terms,
        }
    }

    /// Builds a field from explicit terms over the doubled generator list.
    pub fn from_terms(
        chart: &Arc<Chart>,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let odd = chart.mvf_odd();
        let mut out = Terms::new();
        for (m, c) in terms {
            if m.exponents().len() != odd.len() {
                return Err(Error::Shape(format!(
                    "multivector monomial of length {} on a chart with {} generators",
                    m.exponents().len(),
                    chart.len()
                )));
            }
            if m.exponents().iter().zip(odd).any(|(&e, &o)| o && e > 1) {
                continue;
            }
            poly::add_term(&mut out, m, c);
        }
        Ok(Mvf::from_raw(chart, out))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Mvf {
        Mvf::from_raw(
            &self.chart,
            self.terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        )
    }

    pub fn grading_of(&self, m: &Monomial) -> TermGrading {
        let n = self.chart.len();
        let e = m.exponents();
        let mut inherited = 0;
        let mut multiplicity = 0usize;
        for i in 0..n {
            let d = self.chart.degree(i);
            inherited += e[i] as Degree * d - e[n + i] as Degree * d;
            multiplicity += e[n + i] as usize;
        }
        TermGrading {
            inherited,
            multiplicity,
        }
    }

    fn homogeneous<T: PartialEq>(&self, f: impl Fn(TermGrading) -> T) -> Option<T> {
        let mut it = self.terms.keys().map(|m| f(self.grading_of(m)));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// `‖Z‖` when all terms agree; `None` for zero or mixed fields.
    pub fn shifted_degree(&self) -> Option<Degree> {
        self.homogeneous(|g| g.shifted())
    }

    pub fn total_degree(&self) -> Option<Degree> {
        self.homogeneous(|g| g.total())
    }

    pub fn inherited_degree(&self) -> Option<Degree> {
        self.homogeneous(|g| g.inherited)
    }

    pub fn multiplicity(&self) -> Option<usize> {
        self.homogeneous(|g| g.multiplicity)
    }

    fn parts_by<K: Ord>(&self, key: impl Fn(TermGrading) -> K) -> BTreeMap<K, Mvf> {
        let mut parts: BTreeMap<K, Terms> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(key(self.grading_of(m)))
                .or_default()
                .insert(m.clone(), c.clone());
        }
        parts
            .into_iter()
            .map(|(k, t)| (k, Mvf::from_raw(&self.chart, t)))
            .collect()
    }

    /// Components keyed by `‖·‖`.
    pub fn shifted_parts(&self) -> BTreeMap<Degree, Mvf> {
        self.parts_by(|g| g.shifted())
    }

    /// Components keyed by multiplicity.
    pub fn multiplicity_parts(&self) -> BTreeMap<usize, Mvf> {
        self.parts_by(|g| g.multiplicity)
    }

    /// Component of the given shifted degree (possibly zero).
    pub fn shifted_part(&self, d: Degree) -> Mvf {
        self.filter(|m| self.grading_of(m).shifted() == d)
    }

    pub fn multiplicity_part(&self, l: usize) -> Mvf {
        self.filter(|m| self.grading_of(m).multiplicity == l)
    }

    /// The field as a function, if it has no derivation factors.
    pub fn to_function(&self) -> Option<GPoly> {
        let n = self.chart.len();
        let mut out = Terms::new();
        for (m, c) in &self.terms {
            let e = m.exponents();
            if e[n..].iter().any(|&x| x > 0) {
                return None;
            }
            out.insert(Monomial::from_exponents(e[..n].to_vec()), c.clone());
        }
        Some(GPoly::from_raw(&self.chart, out))
    }

    fn check(&self, other: &Mvf) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &Mvf) -> Result<Mvf> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        poly::add_assign(&mut terms, &other.terms);
        Ok(Mvf::from_raw(&self.chart, terms))
    }

    pub fn scale(&self, c: &BigRational) -> Mvf {
        Mvf::from_raw(&self.chart, poly::scaled(&self.terms, c))
    }

    pub fn scale_int(&self, c: i64) -> Mvf {
        self.scale(&rational(c))
    }

    /// Left derivative with respect to a function generator.
    pub fn partial(&self, g: usize) -> Mvf {
        Mvf::from_raw(
            &self.chart,
            poly::partial_left(&self.terms, g, self.chart.mvf_odd()),
        )
    }

    /// Left derivative with respect to the derivation generator `θ_g`.
    pub fn partial_theta(&self, g: usize) -> Mvf {
        let n = self.chart.len();
        Mvf::from_raw(
            &self.chart,
            poly::partial_left(&self.terms, n + g, self.chart.mvf_odd()),
        )
    }

    /// Applies a field to a function: `[X, f]` viewed as a function.
    /// Only the multiplicity-one part of `X` contributes.
    pub fn apply(&self, f: &GPoly) -> Result<GPoly> {
        let x = self.multiplicity_part(1);
        let r = sn_bracket(&x, &Mvf::from_function(f))?;
        Ok(r.to_function().expect("a vector field maps functions to functions"))
    }

    pub fn pow(&self, k: u32) -> Mvf {
        let mut acc = Mvf::one(&self.chart);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

/// Graded-commutative product with respect to total degree.
pub fn wedge(y: &Mvf, z: &Mvf) -> Result<Mvf> {
    y.check(z)?;
    Ok(Mvf::from_raw(
        &y.chart,
        poly::mul(&y.terms, &z.terms, y.chart.mvf_odd()),
    ))
}

/// Schouten–Nijenhuis bracket.
pub fn sn_bracket(z: &Mvf, w: &Mvf) -> Result<Mvf> {
    z.check(w)?;
    let chart = &z.chart;
    let n = chart.len();
    let odd = chart.mvf_odd();
    if z.is_zero() || w.is_zero() {
        return Ok(Mvf::zero(chart));
    }
    let dw_fn: Vec<Terms> = (0..n).map(|u| poly::partial_left(&w.terms, u, odd)).collect();
    let dw_theta: Vec<Terms> = (0..n)
        .map(|u| poly::partial_left(&w.terms, n + u, odd))
        .collect();
    let mut out = Terms::new();
    for (mz, cz) in &z.terms {
        let z_odd = is_odd(z.grading_of(mz).shifted());
        for u in 0..n {
            let du = chart.degree(u);
            if !dw_theta[u].is_empty() {
                if let Some((dm, k)) = poly::mono_partial_left(mz, u, odd) {
                    let sign = if z_odd && is_odd(du) { 1 } else { -1 };
                    let left: Terms = [(dm, cz * rational(sign * k))].into_iter().collect();
                    poly::add_assign(&mut out, &poly::mul(&left, &dw_theta[u], odd));
                }
            }
            if !dw_fn[u].is_empty() {
                if let Some((dm, k)) = poly::mono_partial_left(mz, n + u, odd) {
                    let sign = if z_odd && is_odd(du - 1) { -1 } else { 1 };
                    let left: Terms = [(dm, cz * rational(sign * k))].into_iter().collect();
                    poly::add_assign(&mut out, &poly::mul(&left, &dw_fn[u], odd));
                }
            }
        }
    }
    Ok(Mvf::from_raw(chart, out))
}

/// A covector `Σ_v c_v d v` with function coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coframe {
    chart: Arc<Chart>,
    comps: BTreeMap<usize, GPoly>,
}

impl Coframe {
    /// The coordinate differential `d name`.
    pub fn d(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        let g = chart.index_of(name)?;
        Ok(Coframe::d_index(chart, g))
    }

    pub fn d_index(chart: &Arc<Chart>, g: usize) -> Self {
        let mut comps = BTreeMap::new();
        comps.insert(g, GPoly::one(chart));
        Coframe {
            chart: chart.clone(),
            comps,
        }
    }

    /// Adds `coeff · d name`.
    pub fn plus(mut self, coeff: &GPoly, name: &str) -> Result<Self> {
        let g = self.chart.index_of(name)?;
        if !same_chart(coeff.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let entry = self
            .comps
            .entry(g)
            .or_insert_with(|| GPoly::zero(coeff.chart()));
        *entry = &*entry + coeff;
        if entry.is_zero() {
            self.comps.remove(&g);
        }
        Ok(self)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &GPoly)> {
        self.comps.iter().map(|(&g, c)| (g, c))
    }
}

/// Evaluates a homogeneous `l`-vector on `l` covectors. The `i`-th covector
/// is paired with the `i`-th derivation factor, so
/// `(f ∂/∂a ∧ ∂/∂b)(da, db) = f`.
pub fn eval_coframe(z: &Mvf, covs: &[Coframe]) -> Result<GPoly> {
    let chart = &z.chart;
    let n = chart.len();
    let odd = chart.mvf_odd();
    if z.is_zero() {
        return Ok(GPoly::zero(chart));
    }
    match z.multiplicity() {
        Some(l) if l == covs.len() => {}
        found => {
            return Err(Error::MultiplicityMismatch {
                found: found.map_or("mixed".to_string(), |l| l.to_string()),
                given: covs.len(),
            })
        }
    }
    let mut cur = z.terms.clone();
    for cov in covs.iter().rev() {
        if !same_chart(&cov.chart, chart) {
            return Err(Error::ChartMismatch);
        }
        let mut next = Terms::new();
        for (&v, coeff) in &cov.comps {
            let d = poly::partial_right(&cur, n + v, odd);
            if d.is_empty() {
                continue;
            }
            poly::add_assign(&mut next, &poly::mul(&d, &lift_terms(coeff.raw(), n), odd));
        }
        cur = next;
    }
    Ok(Mvf::from_raw(chart, cur)
        .to_function()
        .expect("all derivation factors contracted"))
}

/// Substitutes function generators; derivation factors are left untouched.
pub fn restrict(z: &Mvf, locus: &BTreeMap<String, GPoly>) -> Result<Mvf> {
    let chart = &z.chart;
    let n = chart.len();
    let mut table: Vec<Option<Terms>> = vec![None; 2 * n];
    for (name, s) in locus {
        let g = chart.index_of(name)?;
        if !same_chart(s.chart(), chart) {
            return Err(Error::ChartMismatch);
        }
        check_substitution_degree(chart, g, s)?;
        table[g] = Some(lift_terms(s.raw(), n));
    }
    Ok(Mvf::from_raw(
        chart,
        poly::substitute(&z.terms, &table, chart.mvf_odd()),
    ))
}

pub(crate) fn factor_name(chart: &Chart, i: usize) -> String {
    let n = chart.len();
    if i < n {
        chart.generator(i).name.clone()
    } else {
        format!("d/d{}", chart.generator(i - n).name)
    }
}

impl fmt::Display for Mvf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chart = &self.chart;
        f.write_str(&render_terms(&self.terms, &|i| factor_name(chart, i)))
    }
}

impl Add for &Mvf {
    type Output = Mvf;
    fn add(self, rhs: &Mvf) -> Mvf {
        self.try_add(rhs).expect("chart mismatch in Mvf addition")
    }
}

impl Sub for &Mvf {
    type Output = Mvf;
    fn sub(self, rhs: &Mvf) -> Mvf {
        self + &(-rhs)
    }
}

impl Neg for &Mvf {
    type Output = Mvf;
    fn neg(self) -> Mvf {
        Mvf::from_raw(&self.chart, poly::negated(&self.terms))
    }
}

impl Mul for &Mvf {
    type Output = Mvf;
    fn mul(self, rhs: &Mvf) -> Mvf {
        wedge(self, rhs).expect("chart mismatch in wedge product")
    }
}

forward_owned!(Mvf, Add add, Sub sub, Mul mul);

impl Neg for Mvf {
    type Output = Mvf;
    fn neg(self) -> Mvf {
        -&self
    }
}

/// `[Z, W]`, panicking on chart mismatch.
pub fn br(z: &Mvf, w: &Mvf) -> Mvf {
    sn_bracket(z, w).expect("chart mismatch in Schouten bracket")
}

pub(crate) fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

pub(crate) fn one_over_factorial(k: usize) -> BigRational {
    let mut d = BigRational::one();
    for i in 2..=k {
        d *= rational(i as i64);
    }
    d.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree0() -> Arc<Chart> {
        Chart::from_degrees(&[("q", 0), ("p", 0), ("x", 0)]).unwrap()
    }

    fn f(c: &Arc<Chart>, n: &str) -> Mvf {
        Mvf::function(c, n).unwrap()
    }

    fn d(c: &Arc<Chart>, n: &str) -> Mvf {
        Mvf::deriv(c, n).unwrap()
    }

    #[test]
    fn function_brackets_vanish() {
        let c = degree0();
        assert!(br(&f(&c, "q"), &f(&c, "p").pow(2)).is_zero());
    }

    #[test]
    fn vector_field_acts_on_functions() {
        let c = degree0();
        assert_eq!(br(&d(&c, "x"), &f(&c, "x").pow(2)), f(&c, "x").scale_int(2));
        assert_eq!(br(&f(&c, "x"), &d(&c, "x")), Mvf::one(&c).scale_int(-1));
    }

    #[test]
    fn constant_bivector_is_poisson() {
        let c = degree0();
        let pi = &d(&c, "q") * &d(&c, "p");
        assert!(br(&pi, &pi).is_zero());
        assert_eq!(pi.shifted_degree(), Some(1));
        assert_eq!(pi.multiplicity(), Some(2));
    }

    #[test]
    fn commutator_of_vector_fields() {
        let c = degree0();
        let x = f(&c, "x");
        let y = &x * &d(&c, "x");
        assert_eq!(br(&d(&c, "x"), &y), d(&c, "x"));
        assert_eq!(br(&y, &d(&c, "x")), -d(&c, "x"));
    }

    #[test]
    fn wedge_parities() {
        let c = degree0();
        assert_eq!(&d(&c, "q") * &d(&c, "p"), -(&d(&c, "p") * &d(&c, "q")));
        let fc = Chart::from_degrees(&[("xi", 1)]).unwrap();
        let dxi = Mvf::deriv(&fc, "xi").unwrap();
        assert!(!(&dxi * &dxi).is_zero());
        assert_eq!(dxi.total_degree(), Some(0));
        let x = f(&c, "x");
        assert_eq!(&x * &d(&c, "q"), &d(&c, "q") * &x);
    }

    #[test]
    fn coframe_evaluation() {
        let c = Chart::from_degrees(&[("x", 0), ("y1", 0), ("y2", 0)]).unwrap();
        let dy1 = Coframe::d(&c, "y1").unwrap();
        let dy2 = Coframe::d(&c, "y2").unwrap();
        assert_eq!(
            eval_coframe(&d(&c, "y1"), &[dy1.clone()]).unwrap(),
            GPoly::one(&c)
        );
        assert!(eval_coframe(&d(&c, "y1"), &[dy2.clone()]).unwrap().is_zero());

        let sigma = GPoly::gen(&c, "x").unwrap().pow(2);
        let dsigma = crate::galg::gp_partial(&sigma, "x").unwrap();
        let mu = Coframe::d(&c, "y1").unwrap().plus(&-&dsigma, "x").unwrap();
        assert_eq!(eval_coframe(&d(&c, "x"), &[mu]).unwrap(), -dsigma);

        let fx = f(&c, "x");
        let bi = &fx * &(&d(&c, "y1") * &d(&c, "y2"));
        let x = GPoly::gen(&c, "x").unwrap();
        assert_eq!(eval_coframe(&bi, &[dy1.clone(), dy2.clone()]).unwrap(), x);
        assert_eq!(eval_coframe(&bi, &[dy2, dy1.clone()]).unwrap(), -x);
        assert!(matches!(
            eval_coframe(&bi, &[dy1]),
            Err(Error::MultiplicityMismatch { .. })
        ));
    }

    #[test]
    fn restriction() {
        let c = Chart::from_degrees(&[("x", 0), ("y", 0), ("eta", 1), ("xi", 1)]).unwrap();
        let z = &(&f(&c, "y") * &f(&c, "x")) * &d(&c, "eta");
        let mut locus = BTreeMap::new();
        assert_eq!(restrict(&z, &locus).unwrap(), z);
        locus.insert("y".to_string(), GPoly::zero(&c));
        assert!(restrict(&z, &locus).unwrap().is_zero());

        let z2 = &f(&c, "eta") * &d(&c, "eta");
        let mut graph = BTreeMap::new();
        let phi = GPoly::gen(&c, "x").unwrap() * GPoly::gen(&c, "xi").unwrap();
        graph.insert("eta".to_string(), phi.clone());
        let expected = &Mvf::from_function(&phi) * &d(&c, "eta");
        assert_eq!(restrict(&z2, &graph).unwrap(), expected);

        let mut bad = BTreeMap::new();
        bad.insert("eta".to_string(), GPoly::gen(&c, "x").unwrap());
        assert!(matches!(restrict(&z2, &bad), Err(Error::DegreeViolation(_))));
    }

    #[test]
    fn rendering() {
        let c = degree0();
        let z = &(&f(&c, "q") * &d(&c, "p")).scale_int(2) - &d(&c, "x");
        assert_eq!(z.to_string(), "-d/dx + 2*q*d/dp");
    }
}

impl fmt::Debug for Mvf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mvf({self})")
    }
}
