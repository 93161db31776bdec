//! Blended homological vector fields and submanifolds of coisotropic type.
//!
//! The base is a coordinate vector space split as `(x | y)` with the
//! submanifold `S = {y = 0}`. At the fiber degree `-k0` the coordinates
//! split as `(ξ | η)`, where `ξ` are coordinates on the subbundle `A` and
//! `η` on the complement `B`. All other fiber coordinates are `γ`.
//! A deformation `(σ, φ)` moves `A` to the graph `y = σ(x)`, `η = φ(x) ξ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galg::{gp_partial_index, Chart, GPoly, GenKind, TruncationOrder};
use crate::gcore::Degree;
use crate::linfty::{mc_residual, McResidual};
use crate::mvf::{br, eval_coframe, half, one_over_factorial, restrict, Coframe, Mvf};
use crate::vderive::{combined_maps, DerivedFamily, Pair, VSplit};

/// A field whose `‖·‖`-components sit at `+1` and `-1` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QField {
    q: Mvf,
}

impl QField {
    pub fn new(q: Mvf) -> Result<Self> {
        if let Some(d) = q.shifted_parts().keys().find(|&&d| d != 1 && d != -1) {
            return Err(Error::DegreeViolation(format!(
                "homological fields have components at shifted degrees ±1, found {d}"
            )));
        }
        Ok(QField { q })
    }

    pub fn field(&self) -> &Mvf {
        &self.q
    }

    pub fn positive(&self) -> Mvf {
        self.q.shifted_part(1)
    }

    pub fn negative(&self) -> Mvf {
        self.q.shifted_part(-1)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.q.chart()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologicalReport {
    /// `[Q, Q]`.
    pub square: Mvf,
    /// `[Q₊, Q₊]`.
    pub plus_plus: Mvf,
    /// `2[Q₊, Q₋]`.
    pub mixed: Mvf,
    /// `[Q₋, Q₋]`.
    pub minus_minus: Mvf,
}

impl HomologicalReport {
    pub fn homological(&self) -> bool {
        self.plus_plus.is_zero() && self.mixed.is_zero() && self.minus_minus.is_zero()
    }
}

pub fn is_homological(q: &QField) -> HomologicalReport {
    let (p, m) = (q.positive(), q.negative());
    HomologicalReport {
        square: br(&q.q, &q.q),
        plus_plus: br(&p, &p),
        mixed: br(&p, &m).scale_int(2),
        minus_minus: br(&m, &m),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QDeformReport {
    /// `[Q, Q̃] + ½[Q̃, Q̃]`.
    pub residual: Mvf,
    /// Residual components at `‖·‖ = 2, 0, -2`.
    pub components: [Mvf; 3],
    /// The same three components assembled from the displayed system.
    pub system: [Mvf; 3],
    pub deformed: HomologicalReport,
    /// `½[Q + Q̃, Q + Q̃]`, computed independently.
    pub half_square: Mvf,
}

impl QDeformReport {
    pub fn mc(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn homological(&self) -> bool {
        self.deformed.homological()
    }

    /// Both verdicts agree and the residuals coincide literally.
    pub fn consistent(&self) -> bool {
        self.mc() == self.homological()
            && self.residual == self.half_square
            && self.components == self.system
    }
}

pub fn q_deform_check(q: &QField, qt: &Mvf) -> Result<QDeformReport> {
    if !is_homological(q).homological() {
        return Err(Error::Precondition("Q is not homological".into()));
    }
    let qt = QField::new(qt.clone())?;
    let base = &q.q;
    let dq = &qt.q;
    let residual = &br(base, dq) + &br(dq, dq).scale(&half());
    let components = [
        residual.shifted_part(2),
        residual.shifted_part(0),
        residual.shifted_part(-2),
    ];
    let (qp, qm, tp, tm) = (q.positive(), q.negative(), qt.positive(), qt.negative());
    let system = [
        &br(&qp, &tp) + &br(&tp, &tp).scale(&half()),
        &(&br(&qp, &tm) + &br(&qm, &tp)) + &br(&tp, &tm),
        &br(&qm, &tm) + &br(&tm, &tm).scale(&half()),
    ];
    let sum = QField::new(base + dq)?;
    Ok(QDeformReport {
        residual,
        components,
        system,
        deformed: is_homological(&sum),
        half_square: br(&sum.q, &sum.q).scale(&half()),
    })
}

/// Coordinate split describing `A ⊂ E_{k0}` over `S = {y = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmanifoldSpec {
    chart: Arc<Chart>,
    k0: Degree,
    x: Vec<usize>,
    y: Vec<usize>,
    xi: Vec<usize>,
    eta: Vec<usize>,
    gamma: Vec<usize>,
}

fn indices(chart: &Chart, names: &[&str]) -> Result<Vec<usize>> {
    names.iter().map(|n| chart.index_of(n)).collect()
}

impl SubmanifoldSpec {
    pub fn new(
        chart: &Arc<Chart>,
        k0: Degree,
        x: &[&str],
        y: &[&str],
        xi: &[&str],
        eta: &[&str],
    ) -> Result<Self> {
        if k0 > -1 {
            return Err(Error::InvalidChart(format!(
                "concentration degree must be negative, got {k0}"
            )));
        }
        let x = indices(chart, x)?;
        let y = indices(chart, y)?;
        let xi = indices(chart, xi)?;
        let eta = indices(chart, eta)?;
        let mut seen = vec![false; chart.len()];
        for &i in x.iter().chain(&y).chain(&xi).chain(&eta) {
            if seen[i] {
                return Err(Error::InvalidChart(format!(
                    "`{}` appears twice in the submanifold split",
                    chart.generator(i).name
                )));
            }
            seen[i] = true;
        }
        for &i in x.iter().chain(&y) {
            if chart.generator(i).kind != GenKind::Base {
                return Err(Error::InvalidChart(format!(
                    "`{}` is not a base coordinate",
                    chart.generator(i).name
                )));
            }
        }
        for &i in xi.iter().chain(&eta) {
            if chart.degree(i) != -k0 {
                return Err(Error::InvalidChart(format!(
                    "`{}` does not have degree {}",
                    chart.generator(i).name,
                    -k0
                )));
            }
        }
        let mut gamma = Vec::new();
        for i in 0..chart.len() {
            if seen[i] {
                continue;
            }
            let g = chart.generator(i);
            if g.kind == GenKind::Base {
                return Err(Error::InvalidChart(format!(
                    "base coordinate `{}` is neither tangential nor normal",
                    g.name
                )));
            }
            if g.degree == -k0 {
                return Err(Error::InvalidChart(format!(
                    "fiber coordinate `{}` of degree {} is in neither A nor B",
                    g.name, g.degree
                )));
            }
            gamma.push(i);
        }
        Ok(SubmanifoldSpec {
            chart: chart.clone(),
            k0,
            x,
            y,
            xi,
            eta,
            gamma,
        })
    }

    pub fn chart_ref(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn k0(&self) -> Degree {
        self.k0
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn xi(&self) -> &[usize] {
        &self.xi
    }

    pub fn eta(&self) -> &[usize] {
        &self.eta
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    fn in_footprint(&self, e: &[u32]) -> bool {
        let n = self.chart.len();
        (0..n).all(|i| {
            let fn_ok = e[i] == 0 || self.x.contains(&i) || self.xi.contains(&i);
            let th_ok = e[n + i] == 0 || self.y.contains(&i) || self.eta.contains(&i);
            fn_ok && th_ok
        })
    }

    /// `#y + #η + #∂/∂x + #∂/∂ξ` of a term, the number of brackets with
    /// elements of `𝔞` it can survive.
    fn term_bound(&self, e: &[u32]) -> usize {
        let n = self.chart.len();
        let count = |set: &[usize], off: usize| -> usize { set.iter().map(|&i| e[off + i] as usize).sum() };
        count(&self.y, 0) + count(&self.eta, 0) + count(&self.x, n) + count(&self.xi, n)
    }

    pub fn bound(&self, z: &Mvf) -> usize {
        z.terms()
            .map(|(m, _)| self.term_bound(m.exponents()))
            .max()
            .unwrap_or(0)
    }

    /// The projection onto `𝔞'`: multiplicity-one part of `P`.
    pub fn prime(&self) -> PrimeSplit {
        PrimeSplit { spec: self.clone() }
    }
}

/// Builds `I` on an element given by its coordinate expression.
pub fn build_i(spec: &SubmanifoldSpec, a: &Mvf) -> Result<Mvf> {
    if spec.contains(a) {
        Ok(a.clone())
    } else {
        Err(Error::NotInAbelianPart(a.to_string()))
    }
}

/// `P`: keeps the terms built from `x`, `ξ`, `∂/∂y` and `∂/∂η` only, which
/// is the generator rule `∂/∂x, ∂/∂ξ, ∂/∂γ, η, γ ↦ 0`, `f(x,y) ↦ f(x,0)`.
pub fn build_p(spec: &SubmanifoldSpec, z: &Mvf) -> Mvf {
    z.filter(|m| spec.in_footprint(m.exponents()))
}

impl VSplit for SubmanifoldSpec {
    fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    fn project(&self, z: &Mvf) -> Mvf {
        build_p(self, z)
    }

    fn contains(&self, z: &Mvf) -> bool {
        z.terms().all(|(m, _)| self.in_footprint(m.exponents()))
    }

    fn abelian_generators(&self) -> (Vec<usize>, Vec<usize>) {
        let f = self.x.iter().chain(&self.xi).copied().collect();
        let d = self.y.iter().chain(&self.eta).copied().collect();
        (f, d)
    }

    fn nesting_bound(&self, z: &Mvf) -> Option<usize> {
        Some(self.bound(z))
    }
}

/// The split `(𝔛¹(E), 𝔞', P')` for fields of multiplicity one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSplit {
    spec: SubmanifoldSpec,
}

impl VSplit for PrimeSplit {
    fn chart(&self) -> &Arc<Chart> {
        &self.spec.chart
    }

    fn project(&self, z: &Mvf) -> Mvf {
        build_p(&self.spec, z).multiplicity_part(1)
    }

    fn contains(&self, z: &Mvf) -> bool {
        self.spec.contains(z) && z.multiplicity().map_or(z.is_zero(), |l| l == 1)
    }

    fn abelian_generators(&self) -> (Vec<usize>, Vec<usize>) {
        self.spec.abelian_generators()
    }

    fn abelian_multiplicity(&self) -> Option<usize> {
        Some(1)
    }

    fn ambient_multiplicity(&self) -> Option<usize> {
        Some(1)
    }

    fn nesting_bound(&self, z: &Mvf) -> Option<usize> {
        Some(self.spec.bound(z))
    }
}

/// `(σ, φ) ∈ 𝔞'_0`: `σ^j(x)` for each normal coordinate and `φ^q_p(x)`
/// for each pair `(η^q, ξ^p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationDatum {
    pub sigma: Vec<GPoly>,
    pub phi: Vec<Vec<GPoly>>,
}

impl DeformationDatum {
    pub fn zero(spec: &SubmanifoldSpec) -> Self {
        let z = GPoly::zero(&spec.chart);
        DeformationDatum {
            sigma: vec![z.clone(); spec.y.len()],
            phi: vec![vec![z; spec.xi.len()]; spec.eta.len()],
        }
    }

    /// Checks shapes and that all entries are functions of `x` alone.
    pub fn validate(&self, spec: &SubmanifoldSpec) -> Result<()> {
        if self.sigma.len() != spec.y.len() {
            return Err(Error::Shape(format!(
                "σ has {} components, expected {}",
                self.sigma.len(),
                spec.y.len()
            )));
        }
        if self.phi.len() != spec.eta.len() || self.phi.iter().any(|r| r.len() != spec.xi.len()) {
            return Err(Error::Shape(format!(
                "φ must be a {}×{} matrix",
                spec.eta.len(),
                spec.xi.len()
            )));
        }
        for f in self.sigma.iter().chain(self.phi.iter().flatten()) {
            if !crate::galg::same_chart(f.chart(), &spec.chart) {
                return Err(Error::ChartMismatch);
            }
            if !f.uses_only(&spec.x) {
                return Err(Error::NotInAbelianPart(format!(
                    "deformation entries must depend on tangential coordinates only: {f}"
                )));
            }
        }
        Ok(())
    }

    /// `φ^q = Σ_p φ^q_p ξ^p`.
    pub fn phi_xi(&self, spec: &SubmanifoldSpec, q: usize) -> GPoly {
        let mut acc = GPoly::zero(&spec.chart);
        for (p, &g) in spec.xi.iter().enumerate() {
            acc = &acc + &(&self.phi[q][p] * &GPoly::gen_index(&spec.chart, g));
        }
        acc
    }

    /// `X_a = σ^j ∂/∂y^j + φ^q_p ξ^p ∂/∂η^q`.
    pub fn x_a(&self, spec: &SubmanifoldSpec) -> Mvf {
        let c = &spec.chart;
        let mut acc = Mvf::zero(c);
        for (j, &g) in spec.y.iter().enumerate() {
            acc = &acc + &(&Mvf::from_function(&self.sigma[j]) * &Mvf::deriv_index(c, g));
        }
        for (q, &g) in spec.eta.iter().enumerate() {
            acc = &acc + &(&Mvf::from_function(&self.phi_xi(spec, q)) * &Mvf::deriv_index(c, g));
        }
        acc
    }

    /// Substitution `y ↦ σ`, `η ↦ φξ`, `γ ↦ 0`.
    pub fn locus(&self, spec: &SubmanifoldSpec) -> BTreeMap<String, GPoly> {
        let c = &spec.chart;
        let mut out = BTreeMap::new();
        for (j, &g) in spec.y.iter().enumerate() {
            out.insert(c.generator(g).name.clone(), self.sigma[j].clone());
        }
        for (q, &g) in spec.eta.iter().enumerate() {
            out.insert(c.generator(g).name.clone(), self.phi_xi(spec, q));
        }
        for &g in &spec.gamma {
            out.insert(c.generator(g).name.clone(), GPoly::zero(c));
        }
        out
    }

    /// Conormal frame of the deformed subbundle: the differentials of the
    /// defining functions `y^j - σ^j` and `η^q - φ^q_p ξ^p`, labelled.
    pub fn conormal_frame(&self, spec: &SubmanifoldSpec) -> Vec<(String, Coframe)> {
        let c = &spec.chart;
        let mut out = Vec::new();
        for (j, &g) in spec.y.iter().enumerate() {
            let f = &GPoly::gen_index(c, g) - &self.sigma[j];
            out.push((format!("mu{}", j + 1), differential(&f)));
        }
        for (q, &g) in spec.eta.iter().enumerate() {
            let f = &GPoly::gen_index(c, g) - &self.phi_xi(spec, q);
            out.push((format!("kappa{}", q + 1), differential(&f)));
        }
        out
    }
}

/// `df = Σ_v (∂f/∂v) dv` with left derivatives.
pub fn differential(f: &GPoly) -> Coframe {
    let c = f.chart();
    let mut comps: Option<Coframe> = None;
    for g in 0..c.len() {
        let d = gp_partial_index(f, g);
        if d.is_zero() {
            continue;
        }
        let name = c.generator(g).name.clone();
        comps = Some(match comps {
            None => Coframe::d_index(c, g)
                .plus(&(&d - &GPoly::one(c)), &name)
                .expect("generator of the chart"),
            Some(cf) => cf.plus(&d, &name).expect("generator of the chart"),
        });
    }
    comps.unwrap_or_else(|| {
        // the zero covector: d of a constant
        let cf = Coframe::d_index(c, 0);
        cf.plus(&GPoly::integer(c, -1), &c.generator(0).name.clone())
            .expect("nonempty chart")
    })
}

/// All nondecreasing `l`-tuples from `0..r`.
pub fn nondecreasing_tuples(r: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn rec(start: usize, r: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            rec(i, r, l, cur, out);
            cur.pop();
        }
    }
    rec(0, r, l, &mut cur, &mut out);
    out
}

/// Residuals `Z^{JK}` of a coisotropic-type check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoisoReport {
    /// Every evaluated component, labelled like `Z(mu1,kappa2)`.
    pub values: Vec<(String, GPoly)>,
}

impl CoisoReport {
    pub fn pass(&self) -> bool {
        self.values.iter().all(|(_, v)| v.is_zero())
    }

    pub fn failures(&self) -> Vec<&(String, GPoly)> {
        self.values.iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Evaluates every multiplicity component of `z`, restricted to the graph
/// of `d`, on all tuples of conormal covectors.
pub fn coisotropic_values(z: &Mvf, spec: &SubmanifoldSpec, d: &DeformationDatum) -> Result<CoisoReport> {
    d.validate(spec)?;
    let restricted = restrict(z, &d.locus(spec))?;
    let frame = d.conormal_frame(spec);
    let mut values = Vec::new();
    for (l, part) in restricted.multiplicity_parts() {
        if l == 0 {
            values.push(("Z()".to_string(), part.to_function().expect("functions")));
            continue;
        }
        for tuple in nondecreasing_tuples(frame.len(), l) {
            let covs: Vec<Coframe> = tuple.iter().map(|&i| frame[i].1.clone()).collect();
            let label = tuple
                .iter()
                .map(|&i| frame[i].0.as_str())
                .collect::<Vec<_>>()
                .join(",");
            values.push((format!("Z({label})"), eval_coframe(&part, &covs)?));
        }
    }
    Ok(CoisoReport { values })
}

pub fn coisotropic_check(q: &QField, spec: &SubmanifoldSpec, d: &DeformationDatum) -> Result<CoisoReport> {
    coisotropic_values(&q.q, spec, d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaclaurinResult {
    pub h: Mvf,
    pub order: TruncationOrder,
    /// Number of brackets after which every term vanishes.
    pub bound: usize,
}

impl MaclaurinResult {
    pub fn truncated(&self) -> bool {
        self.order.get() < self.bound
    }
}

/// `H(Z) = Σ_{k ≤ K} (1/k!) (I∘P)[⋯[Z, -X_a], ⋯, -X_a]`.
pub fn maclaurin_h(
    z: &Mvf,
    d: &DeformationDatum,
    spec: &SubmanifoldSpec,
    order: TruncationOrder,
) -> Result<MaclaurinResult> {
    d.validate(spec)?;
    let minus_xa = -d.x_a(spec);
    let bound = spec.bound(z);
    let mut cur = z.clone();
    let mut h = build_p(spec, z);
    for k in 1..=bound.min(order.get()) {
        cur = br(&cur, &minus_xa);
        if cur.is_zero() {
            break;
        }
        h = &h + &build_p(spec, &cur).scale(&one_over_factorial(k));
    }
    Ok(MaclaurinResult { h, order, bound })
}

/// Default truncation order: highest base degree in `Q`, plus the number of
/// normal and complement directions, plus two.
pub fn default_truncation(q: &Mvf, spec: &SubmanifoldSpec) -> TruncationOrder {
    let n = spec.chart.len();
    let base = spec.chart.base_indices();
    let top = q
        .terms()
        .map(|(m, _)| base.iter().map(|&i| m.exponents()[i]).sum::<u32>())
        .max()
        .unwrap_or(0);
    let _ = n;
    TruncationOrder(top + (spec.y.len() + spec.eta.len()) as u32 + 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoisoDeformReport {
    pub mc: McResidual<Mvf>,
    pub coiso: CoisoReport,
    /// The same Maurer–Cartan sum in `𝔞'`, when `Q` has multiplicity one.
    pub prime: Option<McResidual<Mvf>>,
}

impl CoisoDeformReport {
    pub fn mc(&self) -> bool {
        self.mc.is_mc()
    }

    pub fn consistent(&self) -> bool {
        let prime_ok = self.prime.as_ref().map_or(true, |p| p.is_mc() == self.mc.is_mc());
        self.mc.is_mc() == self.coiso.pass() && prime_ok
    }
}

pub fn coiso_deform_check(
    q: &QField,
    spec: &SubmanifoldSpec,
    d: &DeformationDatum,
    order: TruncationOrder,
) -> Result<CoisoDeformReport> {
    d.validate(spec)?;
    let v = -d.x_a(spec);
    let family = DerivedFamily::new(q.q.clone(), spec.clone());
    let mc = mc_residual(&family, &v, order)?;
    let coiso = coisotropic_check(q, spec, d)?;
    let prime = if q.q.multiplicity() == Some(1) || q.q.is_zero() {
        let fam = DerivedFamily::new(q.q.clone(), spec.prime());
        Some(mc_residual(&fam, &v, order)?)
    } else {
        None
    };
    Ok(CoisoDeformReport { mc, coiso, prime })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulDeformReport {
    pub mc: McResidual<Pair>,
    pub homological: HomologicalReport,
    pub coiso: CoisoReport,
}

impl SimulDeformReport {
    pub fn mc(&self) -> bool {
        self.mc.is_mc()
    }

    pub fn direct(&self) -> bool {
        self.homological.homological() && self.coiso.pass()
    }

    pub fn consistent(&self) -> bool {
        self.mc() == self.direct()
    }
}

pub fn simul_deform_check(
    q: &QField,
    qt: &Mvf,
    spec: &SubmanifoldSpec,
    d: &DeformationDatum,
    order: TruncationOrder,
) -> Result<SimulDeformReport> {
    d.validate(spec)?;
    if !q.negative().is_zero() {
        return Err(Error::BlendedDelta);
    }
    if qt.shifted_parts().keys().any(|&k| k != 1) {
        return Err(Error::DegreeViolation(
            "the deformation of Q must have shifted degree 1".into(),
        ));
    }
    let maps = combined_maps(q.q.clone(), spec.clone())?;
    let element = Pair::new(qt.clone(), -d.x_a(spec));
    let mc = mc_residual(&maps, &element, order)?;
    let sum = QField::new(&q.q + qt)?;
    Ok(SimulDeformReport {
        mc,
        homological: is_homological(&sum),
        coiso: coisotropic_check(&sum, spec, d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson() -> (Arc<Chart>, SubmanifoldSpec, Mvf) {
        let c = Chart::from_degrees(&[("x1", 0), ("x2", 0), ("y1", 0), ("y2", 0)]).unwrap();
        let spec = SubmanifoldSpec::new(&c, -1, &["x1", "x2"], &["y1", "y2"], &[], &[]).unwrap();
        let d = |n: &str| Mvf::deriv(&c, n).unwrap();
        let pi = &(&d("x1") * &d("y1")) + &(&d("x2") * &d("y2"));
        (c, spec, pi)
    }

    #[test]
    fn poisson_and_casimir() {
        let (c, _, pi) = poisson();
        assert!(is_homological(&QField::new(pi.clone()).unwrap()).homological());
        let f = Mvf::function(&c, "x1").unwrap();
        let rep = is_homological(&QField::new(&pi + &f).unwrap());
        assert!(!rep.homological());
        assert_eq!(rep.mixed, br(&pi, &f).scale_int(2));
        assert!(QField::new(Mvf::deriv(&c, "x1").unwrap()).is_err());
    }

    #[test]
    fn p_rules() {
        let (c, spec, _) = poisson();
        let dx = Mvf::deriv(&c, "x1").unwrap();
        let dy = Mvf::deriv(&c, "y1").unwrap();
        assert!(build_p(&spec, &dx).is_zero());
        assert_eq!(build_p(&spec, &dy), dy);
        let f = &Mvf::function(&c, "x1").unwrap() + &Mvf::function(&c, "y2").unwrap();
        assert_eq!(
            build_p(&spec, &(&f * &dy)),
            &Mvf::function(&c, "x1").unwrap() * &dy
        );
    }

    #[test]
    fn coordinate_lagrangian_is_coisotropic() {
        let (_, spec, pi) = poisson();
        let q = QField::new(pi).unwrap();
        let d = DeformationDatum::zero(&spec);
        assert!(coisotropic_check(&q, &spec, &d).unwrap().pass());
        let rep = coiso_deform_check(&q, &spec, &d, TruncationOrder(4)).unwrap();
        assert!(rep.mc() && rep.consistent());
        assert!(!rep.mc.truncated);
    }

    #[test]
    fn graph_of_exact_form_stays_lagrangian() {
        let (c, spec, pi) = poisson();
        let q = QField::new(pi).unwrap();
        let x1 = GPoly::gen(&c, "x1").unwrap();
        let x2 = GPoly::gen(&c, "x2").unwrap();
        // σ = dF for F = x1^2 x2: graph of an exact 1-form is Lagrangian
        let mut d = DeformationDatum::zero(&spec);
        d.sigma = vec![(&x1 * &x2).scale_int(2), &x1 * &x1];
        let rep = coiso_deform_check(&q, &spec, &d, TruncationOrder(6)).unwrap();
        assert!(rep.mc() && rep.consistent());
        d.sigma = vec![x2.clone(), GPoly::zero(&c)];
        let rep = coiso_deform_check(&q, &spec, &d, TruncationOrder(6)).unwrap();
        assert!(!rep.mc() && rep.consistent());
        assert_eq!(rep.mc.residual.to_string(), "-d/dy1*d/dy2");
    }

    #[test]
    fn maclaurin_constant_fields() {
        let (c, spec, _) = poisson();
        let x1 = GPoly::gen(&c, "x1").unwrap();
        let mut d = DeformationDatum::zero(&spec);
        d.sigma = vec![&x1 * &x1, GPoly::zero(&c)];
        let dy = Mvf::deriv(&c, "y1").unwrap();
        assert_eq!(maclaurin_h(&dy, &d, &spec, TruncationOrder(3)).unwrap().h, dy);
        let dx = Mvf::deriv(&c, "x1").unwrap();
        let h = maclaurin_h(&dx, &d, &spec, TruncationOrder(3)).unwrap().h;
        assert_eq!(h, &Mvf::from_function(&x1.scale_int(-2)) * &dy);
    }
}
