//! Courant algebroids as degree-2 symplectic Q-manifolds.
//!
//! Chart layout: base coordinates `q1..qn` (degree 0), frame coordinates
//! `xi1..xi{2r}` (degree 1) and momenta `p1..pn` (degree 2). Sections of
//! `E` are degree-1 functions `e_a(q) ξ^a`.
//!
//! The Poisson bracket is the derived bracket `{F, G} = [[π, F], G]`. With
//! this choice `{ξ^a, ξ^b} = g^{ab}` and `{q^i, p_j} = -δ^i_j`, and the
//! Dorfman bracket `{{e1, Θ}, e2}` is the classical one on `TM ⊕ T*M`.
//! The operator `D` is fixed by `⟨Df, e⟩ = ρ(e) f`, which gives
//! `Df = -{Θ, f}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::galg::{gp_partial_index, Chart, GPoly, GenKind, Generator, TruncationOrder};
use crate::linfty::{mc_residual, McResidual};
use crate::mvf::{br, Mvf};
use crate::qgeom::{
    coisotropic_values, is_homological, CoisoReport, DeformationDatum, HomologicalReport, QField,
    SubmanifoldSpec,
};
use crate::random::{random_gpoly, Rng8};
use crate::vderive::DerivedFamily;

pub type Matrix = Vec<Vec<BigRational>>;

/// Chart `(q1..qn, xi1..xi_rank, p1..pn)`.
pub fn courant_chart(n_base: usize, rank: usize) -> Arc<Chart> {
    let mut gens = Vec::with_capacity(2 * n_base + rank);
    let mut push = |name: String, degree, kind| gens.push(Generator { name, degree, kind });
    for i in 1..=n_base {
        push(format!("q{i}"), 0, GenKind::Base);
    }
    for a in 1..=rank {
        push(format!("xi{a}"), 1, GenKind::Fiber);
    }
    for i in 1..=n_base {
        push(format!("p{i}"), 2, GenKind::Fiber);
    }
    Chart::new(gens).expect("generated names are valid")
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| &a[i][l] * &b[l][j]).sum()).collect())
        .collect()
}

fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `(g, f, h)` on the chart of [`courant_chart`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantData {
    chart: Arc<Chart>,
    n_base: usize,
    rank: usize,
    g: Matrix,
    /// `f[a][i] = f_a^i`.
    f: Vec<Vec<GPoly>>,
    /// `h_{abc}` for `a < b < c`.
    h: BTreeMap<[usize; 3], GPoly>,
}

impl CourantData {
    /// Validates the pairing, anchor coefficients and the twisting tensor.
    /// `h` entries may be given with indices in any order, each unordered
    /// triple at most once; antisymmetry supplies the rest.
    pub fn new(
        chart: &Arc<Chart>,
        g: Vec<Vec<GPoly>>,
        f: Vec<Vec<GPoly>>,
        h: Vec<([usize; 3], GPoly)>,
    ) -> Result<Self> {
        let base = chart.base_indices();
        let n_base = base.len();
        let rank = (0..chart.len()).filter(|&i| chart.degree(i) == 1).count();
        if **chart != *courant_chart(n_base, rank) {
            return Err(Error::InvalidChart(
                "Courant data needs the chart (q1..qn, xi1..xir, p1..pn)".into(),
            ));
        }
        if g.len() != rank || g.iter().any(|r| r.len() != rank) {
            return Err(Error::Shape(format!("g must be {rank}×{rank}")));
        }
        let mut gc = Vec::with_capacity(rank);
        for row in &g {
            let mut out = Vec::with_capacity(rank);
            for e in row {
                if e.homogeneous_degree().is_some_and(|d| d != 0) || e.base_degree() > 0 {
                    return Err(Error::NonConstantPairing);
                }
                out.push(e.constant_term());
            }
            gc.push(out);
        }
        for a in 0..rank {
            for b in 0..a {
                if gc[a][b] != gc[b][a] {
                    return Err(Error::Symmetry(format!("g is not symmetric at ({}, {})", a + 1, b + 1)));
                }
            }
        }
        if invert(&gc).is_none() {
            return Err(Error::Precondition("the pairing g is degenerate".into()));
        }
        if f.len() != rank || f.iter().any(|r| r.len() != n_base) {
            return Err(Error::Shape(format!("f must be {rank}×{n_base}")));
        }
        let mut hs: BTreeMap<[usize; 3], GPoly> = BTreeMap::new();
        for (idx, v) in h {
            if idx.iter().any(|&i| i == 0 || i > rank) {
                return Err(Error::Shape(format!("h index out of range: {idx:?}")));
            }
            let (key, sign) = sort3(idx).ok_or_else(|| {
                Error::Symmetry(format!("h has a repeated index {idx:?} but must be antisymmetric"))
            })?;
            let key = [key[0] - 1, key[1] - 1, key[2] - 1];
            if hs.contains_key(&key) {
                return Err(Error::Symmetry(format!("h component {idx:?} given twice")));
            }
            if !v.is_zero() {
                hs.insert(key, v.scale_int(sign));
            }
        }
        for e in f.iter().flatten().chain(hs.values()) {
            if !crate::galg::same_chart(e.chart(), chart) {
                return Err(Error::ChartMismatch);
            }
            if !e.uses_only(&base) {
                return Err(Error::Shape(format!("coefficients must be functions on the base: {e}")));
            }
        }
        Ok(CourantData { chart: chart.clone(), n_base, rank, g: gc, f, h: hs })
    }

    /// Standard `TM ⊕ T*M` on an `n`-dimensional base: `ξ^i ↔ ∂/∂q^i`,
    /// `ξ^{n+i} ↔ dq^i`, antidiagonal pairing, anchor the projection to `TM`.
    pub fn standard(n: usize) -> Self {
        Self::standard_twisted(n, Vec::new())
    }

    /// Standard model twisted by a 3-form `H`, given as `(i, j, k) ↦ H_{ijk}`
    /// with one-based base indices.
    pub fn standard_twisted(n: usize, big_h: Vec<([usize; 3], GPoly)>) -> Self {
        let chart = courant_chart(n, 2 * n);
        let g = standard_pairing(&chart, n);
        let zero = GPoly::zero(&chart);
        let mut f = vec![vec![zero; n]; 2 * n];
        for i in 0..n {
            f[n + i][i] = GPoly::one(&chart);
        }
        let h = big_h
            .into_iter()
            .map(|([i, j, k], v)| ([n + i, n + j, n + k], v))
            .collect();
        CourantData::new(&chart, g, f, h).expect("standard data is valid")
    }

    /// Reads `(f, h)` back from a cubic `Θ = f_a^i ξ^a p_i - (1/6) h_{abc} ξ^a ξ^b ξ^c`.
    pub fn from_theta(chart: &Arc<Chart>, g: Vec<Vec<GPoly>>, theta: &GPoly) -> Result<Self> {
        let base = chart.base_indices();
        let n = base.len();
        let rank = chart.len() - 2 * n;
        let xi = |a: usize| n + a;
        let p = |i: usize| n + rank + i;
        let mut f = vec![vec![GPoly::zero(chart); n]; rank];
        for (a, row) in f.iter_mut().enumerate() {
            for (i, e) in row.iter_mut().enumerate() {
                *e = gp_partial_index(&gp_partial_index(theta, p(i)), xi(a));
            }
        }
        let mut h = Vec::new();
        for a in 0..rank {
            for b in a + 1..rank {
                for c in b + 1..rank {
                    let v = gp_partial_index(
                        &gp_partial_index(&gp_partial_index(theta, xi(a)), xi(b)),
                        xi(c),
                    );
                    if !v.is_zero() {
                        h.push(([a + 1, b + 1, c + 1], -v));
                    }
                }
            }
        }
        let data = CourantData::new(chart, g, f, h)?;
        if data.theta() != *theta {
            return Err(Error::Shape(format!(
                "Θ must have the form f ξ p - (1/6) h ξ ξ ξ, got {theta}"
            )));
        }
        Ok(data)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn n_base(&self) -> usize {
        self.n_base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pairing_matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn anchor_coefficients(&self) -> &[Vec<GPoly>] {
        &self.f
    }

    /// `h_{abc}` with zero-based indices, antisymmetry applied.
    pub fn h(&self, a: usize, b: usize, c: usize) -> GPoly {
        match sort3([a, b, c]) {
            Some((key, s)) => self.h.get(&key).map_or_else(|| GPoly::zero(&self.chart), |v| v.scale_int(s)),
            None => GPoly::zero(&self.chart),
        }
    }

    pub fn q(&self, i: usize) -> GPoly {
        GPoly::gen_index(&self.chart, i)
    }

    pub fn xi(&self, a: usize) -> GPoly {
        GPoly::gen_index(&self.chart, self.n_base + a)
    }

    pub fn p(&self, i: usize) -> GPoly {
        GPoly::gen_index(&self.chart, self.n_base + self.rank + i)
    }

    /// `π = ∂/∂q^i ∂/∂p_i + ½ ∂/∂ξ^a g^{ab} ∂/∂ξ^b`.
    pub fn pi(&self) -> Mvf {
        let c = &self.chart;
        let mut acc = Mvf::zero(c);
        for i in 0..self.n_base {
            let t = &Mvf::deriv_index(c, i) * &Mvf::deriv_index(c, self.n_base + self.rank + i);
            acc = &acc + &t;
        }
        let half = BigRational::new(1.into(), 2.into());
        for a in 0..self.rank {
            for b in 0..self.rank {
                if self.g[a][b].is_zero() {
                    continue;
                }
                let t = &Mvf::deriv_index(c, self.n_base + a) * &Mvf::deriv_index(c, self.n_base + b);
                acc = &acc + &t.scale(&(&self.g[a][b] * &half));
            }
        }
        acc
    }

    /// `Θ = f_a^i ξ^a p_i - (1/6) h_{abc} ξ^a ξ^b ξ^c`.
    pub fn theta(&self) -> GPoly {
        let mut acc = GPoly::zero(&self.chart);
        for a in 0..self.rank {
            for i in 0..self.n_base {
                if !self.f[a][i].is_zero() {
                    acc = &acc + &(&(&self.f[a][i] * &self.xi(a)) * &self.p(i));
                }
            }
        }
        for (&[a, b, c], v) in &self.h {
            acc = &acc - &(&(&(v * &self.xi(a)) * &self.xi(b)) * &self.xi(c));
        }
        acc
    }

    /// `X_Θ = [π, Θ]`.
    pub fn x_theta(&self) -> Mvf {
        br(&self.pi(), &Mvf::from_function(&self.theta()))
    }

    /// `π + X_Θ`.
    pub fn q_field(&self) -> QField {
        QField::new(&self.pi() + &self.x_theta()).expect("components at ±1")
    }

    pub fn poisson(&self, a: &GPoly, b: &GPoly) -> GPoly {
        poisson_bracket(a, b, &self.pi())
    }

    pub fn pairing(&self, e1: &Section, e2: &Section) -> GPoly {
        self.poisson(&e1.0, &e2.0)
    }

    pub fn dorfman(&self, e1: &Section, e2: &Section) -> Section {
        dorfman(e1, e2, &self.theta(), &self.pi())
    }

    pub fn anchor_apply(&self, e: &Section, f: &GPoly) -> GPoly {
        anchor_apply(e, f, &self.theta(), &self.pi())
    }

    /// `Df = -{Θ, f}`.
    pub fn d(&self, f: &GPoly) -> Section {
        Section(-self.poisson(&self.theta(), f))
    }

    /// Expresses the data in the frame `ξ'^a = Σ_b M_{ab} ξ^b` with a
    /// constant invertible `M`.
    pub fn change_frame(&self, m: &[Vec<GPoly>]) -> Result<CourantData> {
        let r = self.rank;
        if m.len() != r || m.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("frame change must be {r}×{r}")));
        }
        let mut mc = Vec::with_capacity(r);
        for row in m {
            let mut out = Vec::with_capacity(r);
            for e in row {
                if e.homogeneous_degree().is_some_and(|d| d != 0) || e.base_degree() > 0 {
                    return Err(Error::NonConstantPairing);
                }
                out.push(e.constant_term());
            }
            mc.push(out);
        }
        let minv = invert(&mc)
            .ok_or_else(|| Error::Precondition("frame change is not invertible".into()))?;
        let c = &self.chart;
        // old ξ^b = Σ_a (M^{-1})_{ba} ξ'^a
        let mut subs = BTreeMap::new();
        for b in 0..r {
            let mut e = GPoly::zero(c);
            for (a, coeff) in minv[b].iter().enumerate() {
                e = &e + &self.xi(a).scale(coeff);
            }
            subs.insert(c.generator(self.n_base + b).name.clone(), e);
        }
        let theta = self.theta().substitute(&subs)?;
        let g = mat_mul(&mat_mul(&mc, &self.g), &transpose(&mc));
        let g = g
            .into_iter()
            .map(|row| row.into_iter().map(|x| GPoly::constant(c, x)).collect())
            .collect();
        CourantData::from_theta(c, g, &theta)
    }
}

/// Antidiagonal identity pairing on `2n` frame coordinates.
pub fn standard_pairing(chart: &Arc<Chart>, n: usize) -> Vec<Vec<GPoly>> {
    let mut g = vec![vec![GPoly::zero(chart); 2 * n]; 2 * n];
    for i in 0..n {
        g[i][n + i] = GPoly::one(chart);
        g[n + i][i] = GPoly::one(chart);
    }
    g
}

/// Sorts three distinct indices, returning the permutation sign.
fn sort3(mut idx: [usize; 3]) -> Option<([usize; 3], i64)> {
    if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
        return None;
    }
    let mut sign = 1;
    for i in 0..3 {
        for j in 0..2 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    Some((idx, sign))
}

/// A degree-1 function linear in `ξ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section(pub GPoly);

impl Section {
    pub fn new(e: GPoly) -> Result<Self> {
        if e.is_zero() || e.homogeneous_degree() == Some(1) {
            Ok(Section(e))
        } else {
            Err(Error::DegreeViolation(format!("sections have degree 1: {e}")))
        }
    }

    /// `Σ_a c_a ξ^a` with the given coefficients.
    pub fn from_components(data: &CourantData, comps: &[GPoly]) -> Self {
        let mut acc = GPoly::zero(data.chart());
        for (a, c) in comps.iter().enumerate() {
            acc = &acc + &(c * &data.xi(a));
        }
        Section(acc)
    }

    /// Coefficient of `ξ^a` (zero-based).
    pub fn component(&self, data: &CourantData, a: usize) -> GPoly {
        gp_partial_index(&self.0, data.n_base + a)
    }

    pub fn function(&self) -> &GPoly {
        &self.0
    }
}

/// `{F, G} = [[π, F], G]`.
pub fn poisson_bracket(f: &GPoly, g: &GPoly, pi: &Mvf) -> GPoly {
    br(&br(pi, &Mvf::from_function(f)), &Mvf::from_function(g))
        .to_function()
        .expect("the bracket of two functions is a function")
}

/// `e1 ∘ e2 = {{e1, Θ}, e2}`.
pub fn dorfman(e1: &Section, e2: &Section, theta: &GPoly, pi: &Mvf) -> Section {
    Section(poisson_bracket(&poisson_bracket(&e1.0, theta, pi), &e2.0, pi))
}

/// `ρ(e) f = {{e, Θ}, f}`.
pub fn anchor_apply(e: &Section, f: &GPoly, theta: &GPoly, pi: &Mvf) -> GPoly {
    poisson_bracket(&poisson_bracket(&e.0, theta, pi), f, pi)
}

/// A random section with base coefficients of degree at most two.
pub fn random_section(rng: &mut Rng8, data: &CourantData) -> Section {
    let base: Vec<usize> = (0..data.n_base).collect();
    let comps: Vec<GPoly> = (0..data.rank)
        .map(|_| {
            if rng.gen_bool(0.3) {
                GPoly::zero(data.chart())
            } else {
                random_gpoly(rng, data.chart(), Some(&base), 2, 2)
            }
        })
        .collect();
    Section::from_components(data, &comps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantReport {
    pub theta_theta: GPoly,
    pub homological: HomologicalReport,
    /// Number of tested instances per axiom.
    pub tested: [usize; 3],
    /// First failing instance of each axiom, with its residual.
    pub axiom_failures: [Option<String>; 3],
    /// Failures of `ρ(e1∘e2) = [ρ(e1), ρ(e2)]` and `ρ∘D = 0`.
    pub remark_failures: Vec<String>,
}

impl CourantReport {
    pub fn theta_closed(&self) -> bool {
        self.theta_theta.is_zero()
    }

    pub fn axioms(&self) -> bool {
        self.axiom_failures.iter().all(Option::is_none)
    }

    pub fn pass(&self) -> bool {
        self.theta_closed() && self.axioms() && self.homological.homological()
    }

    /// The three verdicts agree.
    pub fn consistent(&self) -> bool {
        self.theta_closed() == self.axioms() && self.axioms() == self.homological.homological()
    }
}

/// Courant axioms on the basis sections and `samples` random sections,
/// compared with `{Θ, Θ} = 0` and homologicity of `π + X_Θ`.
pub fn courant_axioms_check(data: &CourantData, samples: usize, rng: &mut Rng8) -> CourantReport {
    let pi = data.pi();
    let theta = data.theta();
    let pb = |a: &GPoly, b: &GPoly| poisson_bracket(a, b, &pi);
    let circ = |a: &Section, b: &Section| dorfman(a, b, &theta, &pi);
    let rho = |e: &Section, f: &GPoly| anchor_apply(e, f, &theta, &pi);

    let mut family: Vec<Section> = (0..data.rank).map(|a| Section(data.xi(a))).collect();
    family.extend((0..samples).map(|_| random_section(rng, data)));
    let triples: Vec<[usize; 3]> = {
        let b = data.rank;
        let mut t = Vec::new();
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    t.push([i, j, k]);
                }
            }
        }
        let m = family.len();
        for s in 0..samples {
            t.push([b + s, b + (s + 1) % samples.max(1), b + (s + 2) % samples.max(1)].map(|x| x.min(m - 1)));
        }
        t
    };

    let mut failures: [Option<String>; 3] = [None, None, None];
    let mut tested = [0usize; 3];
    let mut record = |slot: usize, label: String, residual: &GPoly| {
        tested[slot] += 1;
        if !residual.is_zero() && failures[slot].is_none() {
            failures[slot] = Some(format!("{label}: {residual}"));
        }
    };
    for &[i, j, k] in &triples {
        let (e1, e2, e3) = (&family[i], &family[j], &family[k]);
        let lhs = circ(e1, &circ(e2, e3));
        let rhs = &circ(&circ(e1, e2), e3).0 + &circ(e2, &circ(e1, e3)).0;
        record(0, format!("axiom 1 on sections #{i},#{j},#{k}"), &(&lhs.0 - &rhs));
        let lhs = rho(e1, &pb(&e2.0, &e3.0));
        let rhs = &pb(&circ(e1, e2).0, &e3.0) + &pb(&e2.0, &circ(e1, e3).0);
        record(1, format!("axiom 2 on sections #{i},#{j},#{k}"), &(&lhs - &rhs));
    }
    for i in 0..family.len() {
        for j in 0..family.len() {
            if i >= data.rank && j >= data.rank && (i + j) % 2 == 1 {
                continue;
            }
            let (e1, e2) = (&family[i], &family[j]);
            let lhs = &circ(e1, e2).0 + &circ(e2, e1).0;
            let rhs = data.d(&pb(&e1.0, &e2.0)).0;
            record(2, format!("axiom 3 on sections #{i},#{j}"), &(&lhs - &rhs));
        }
    }

    let mut remark_failures = Vec::new();
    let fs: Vec<GPoly> = (0..data.n_base)
        .map(|i| data.q(i))
        .chain((0..2).map(|_| random_gpoly(rng, data.chart(), Some(&(0..data.n_base).collect::<Vec<_>>()), 2, 3)))
        .collect();
    for i in 0..family.len().min(data.rank + 3) {
        for j in 0..family.len().min(data.rank + 3) {
            let (e1, e2) = (&family[i], &family[j]);
            let e12 = circ(e1, e2);
            for f in &fs {
                let lhs = rho(&e12, f);
                let rhs = &rho(e1, &rho(e2, f)) - &rho(e2, &rho(e1, f));
                if lhs != rhs {
                    remark_failures.push(format!("ρ(e{i}∘e{j})({f}) = {lhs} ≠ {rhs}"));
                }
            }
        }
    }
    for f in &fs {
        for g in &fs {
            let v = rho(&data.d(f), g);
            if !v.is_zero() {
                remark_failures.push(format!("ρ(D({f}))({g}) = {v}"));
            }
        }
    }

    CourantReport {
        theta_theta: pb(&theta, &theta),
        homological: is_homological(&data.q_field()),
        tested,
        axiom_failures: failures,
        remark_failures,
    }
}

/// A frame change bringing `A` to `span(ξ¹..ξⁿ)` and an optional graph
/// `φ: A → B`, whose graph is spanned by `ξ^q - φ^q_p ξ^{n+p}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiracCandidate {
    pub frame: Option<Vec<Vec<GPoly>>>,
    pub phi: Option<Vec<Vec<GPoly>>>,
}

impl CourantData {
    /// Re-expresses the structure in the frame given by `sections`, which
    /// must pair to constants. `f` and `h` are read off from
    /// `g^{ab} f_b^i = ρ(e^a) q^i` and `g^{aa'} g^{bb'} g^{cc'} h_{a'b'c'} =
    /// -⟨e^a ∘ e^b, e^c⟩` (the sign matching `Θ`'s parametrization), so for a non-constant frame this is the structure
    /// in the Darboux chart whose momenta are adapted to the new frame.
    pub fn in_frame(&self, sections: &[Section]) -> Result<CourantData> {
        let r = self.rank;
        if sections.len() != r {
            return Err(Error::Shape(format!("a frame needs {r} sections")));
        }
        let c = &self.chart;
        let mut g = vec![vec![BigRational::zero(); r]; r];
        for a in 0..r {
            for b in 0..r {
                let v = self.pairing(&sections[a], &sections[b]);
                if v.terms().any(|(m, _)| !m.is_one()) {
                    return Err(Error::NonConstantPairing);
                }
                g[a][b] = v.constant_term();
            }
        }
        let gi = invert(&g).ok_or_else(|| Error::Precondition("the sections do not form a frame".into()))?;
        let combine = |row: &[BigRational], vals: &dyn Fn(usize) -> GPoly| -> GPoly {
            let mut acc = GPoly::zero(c);
            for (k, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    acc = &acc + &vals(k).scale(w);
                }
            }
            acc
        };
        let anchors: Vec<Vec<GPoly>> = sections
            .iter()
            .map(|e| (0..self.n_base).map(|i| self.anchor_apply(e, &self.q(i))).collect())
            .collect();
        let f: Vec<Vec<GPoly>> = (0..r)
            .map(|b| (0..self.n_base).map(|i| combine(&gi[b], &|a| anchors[a][i].clone())).collect())
            .collect();
        let circ: Vec<Vec<Section>> = (0..r)
            .map(|a| (0..r).map(|b| self.dorfman(&sections[a], &sections[b])).collect())
            .collect();
        let upper = |a: usize, b: usize, cc: usize| -self.pairing(&circ[a][b], &sections[cc]);
        // lower one index at a time
        let mut t1 = vec![vec![vec![GPoly::zero(c); r]; r]; r];
        for a in 0..r {
            for b in 0..r {
                for cc in 0..r {
                    t1[a][b][cc] = combine(&gi[cc], &|k| upper(a, b, k));
                }
            }
        }
        let mut t2 = t1.clone();
        for a in 0..r {
            for b in 0..r {
                for cc in 0..r {
                    t2[a][b][cc] = combine(&gi[b], &|k| t1[a][k][cc].clone());
                }
            }
        }
        let mut h = Vec::new();
        let lower = |a: usize, b: usize, cc: usize| combine(&gi[a], &|k| t2[k][b][cc].clone());
        for a in 0..r {
            for b in 0..r {
                for cc in 0..r {
                    let v = lower(a, b, cc);
                    let sorted = a < b && b < cc;
                    if sorted {
                        if !v.is_zero() {
                            h.push(([a + 1, b + 1, cc + 1], v.clone()));
                        }
                    } else {
                        let expect = sort3([a, b, cc]).map(|(k, s)| (k, s));
                        let want = match expect {
                            Some(([x, y, z], s)) => lower(x, y, z).scale_int(s),
                            None => GPoly::zero(c),
                        };
                        if v != want {
                            return Err(Error::Symmetry(format!(
                                "⟨e∘e, e⟩ is not totally antisymmetric in this frame at ({}, {}, {})",
                                a + 1,
                                b + 1,
                                cc + 1
                            )));
                        }
                    }
                }
            }
        }
        let gp = g
            .into_iter()
            .map(|row| row.into_iter().map(|x| GPoly::constant(c, x)).collect())
            .collect();
        CourantData::new(c, gp, f, h)
    }
}

/// The submanifold `𝒜[1]` as a split: `η = ξ¹..ξⁿ`, tangential frame
/// coordinates `ξ^{n+1}..ξ^{2n}`, all of `M` tangential, `p` in `γ`.
pub fn dirac_spec(data: &CourantData) -> Result<SubmanifoldSpec> {
    if data.rank % 2 != 0 {
        return Err(Error::Shape("Dirac structures need even rank".into()));
    }
    let c = data.chart();
    let half = data.rank / 2;
    let names = |r: std::ops::Range<usize>| -> Vec<String> { r.map(|i| c.generator(i).name.clone()).collect() };
    let x = names(0..data.n_base);
    let eta = names(data.n_base..data.n_base + half);
    let xi = names(data.n_base + half..data.n_base + data.rank);
    fn r(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    SubmanifoldSpec::new(c, -1, &r(&x), &[], &r(&xi), &r(&eta))
}

fn graph_datum(spec: &SubmanifoldSpec, phi: Option<&Vec<Vec<GPoly>>>) -> Result<DeformationDatum> {
    let d = match phi {
        None => DeformationDatum::zero(spec),
        Some(phi) => DeformationDatum { sigma: Vec::new(), phi: phi.clone() },
    };
    d.validate(spec)?;
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracReport {
    /// Nonzero pairings `⟨ε^a, ε^b⟩` of the spanning sections.
    pub isotropy: Vec<String>,
    /// Conormal annihilation by `X_Θ`, in the frame adapted to the subbundle.
    pub eq_first: Vec<String>,
    /// Dorfman brackets of spanning sections leaving the subbundle.
    pub eq_second: Vec<String>,
    /// Coisotropic-type check of `π + X_Θ` in the adapted frame.
    pub coiso: CoisoReport,
    /// Index forms of the two equations in the adapted frame.
    pub index_forms: Option<(Vec<String>, Vec<String>)>,
    /// Coisotropic-type check of the graph in the original chart, with the
    /// momenta set to zero. This is the check the Maurer–Cartan equation
    /// of the deformation complex encodes.
    pub slice: CoisoReport,
}

impl DiracReport {
    pub fn isotropic(&self) -> bool {
        self.isotropy.is_empty()
    }

    pub fn first(&self) -> bool {
        self.eq_first.is_empty()
    }

    pub fn second(&self) -> bool {
        self.eq_second.is_empty()
    }

    pub fn dirac(&self) -> bool {
        self.isotropic() && self.second()
    }

    pub fn consistent(&self) -> bool {
        let eqs = !self.isotropic() || self.first() == self.second();
        let lemma = (self.isotropic() && self.first()) == self.coiso.pass();
        let index = self
            .index_forms
            .as_ref()
            .map_or(true, |(a, b)| a.is_empty() == self.first() && b.is_empty() == self.second());
        eqs && lemma && index && self.dirac() == self.coiso.pass()
    }
}

/// Applies the candidate's frame change.
pub fn adapted(data: &CourantData, cand: &DiracCandidate) -> Result<CourantData> {
    match &cand.frame {
        Some(m) => data.change_frame(m),
        None => Ok(data.clone()),
    }
}

/// Spanning sections `ε^q = ξ^q - φ^q_p ξ^{n+p}` of the graph.
pub fn graph_sections(data: &CourantData, phi: Option<&Vec<Vec<GPoly>>>) -> Vec<Section> {
    let n = data.rank / 2;
    (0..n)
        .map(|q| {
            let mut e = data.xi(q);
            if let Some(m) = phi {
                for p in 0..n {
                    e = &e - &(&m[q][p] * &data.xi(n + p));
                }
            }
            Section(e)
        })
        .collect()
}

/// Checks the subbundle `A = span(ξ¹..ξⁿ)`, or the graph of `φ` over it,
/// after the frame change, for the Dirac property: isotropy, the two
/// equations and the coisotropic-type condition for `π + X_Θ`.
pub fn dirac_check(data: &CourantData, cand: &DiracCandidate) -> Result<DiracReport> {
    let data = adapted(data, cand)?;
    let spec = dirac_spec(&data)?;
    let datum = graph_datum(&spec, cand.phi.as_ref())?;
    let n = data.rank / 2;
    let eps = graph_sections(&data, cand.phi.as_ref());

    let mut isotropy = Vec::new();
    for a in 0..n {
        for b in a..n {
            let v = data.pairing(&eps[a], &eps[b]);
            if !v.is_zero() {
                isotropy.push(format!("<e{},e{}> = {v}", a + 1, b + 1));
            }
        }
    }

    let mut eq_second = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let e = data.dorfman(&eps[a], &eps[b]);
            let mut rest = e.0.clone();
            for (q, eq) in eps.iter().enumerate() {
                rest = &rest - &(&e.component(&data, q) * &eq.0);
            }
            if !rest.is_zero() {
                eq_second.push(format!("e{}∘e{} leaves A by {rest}", a + 1, b + 1));
            }
        }
    }

    let slice = coisotropic_values(data.q_field().field(), &spec, &datum)?;
    let has_graph = cand.phi.as_ref().is_some_and(|m| m.iter().flatten().any(|e| !e.is_zero()));
    let frame: Vec<Section> = eps.iter().cloned().chain((n..data.rank).map(|a| Section(data.xi(a)))).collect();
    let (eq_first, coiso, index_forms) = match data.in_frame(&frame) {
        Ok(framed) => {
            let zero = DeformationDatum::zero(&spec);
            let first = coisotropic_values(&framed.x_theta(), &spec, &zero)?
                .failures()
                .into_iter()
                .map(|(l, v)| format!("X_Θ{}: {v}", &l[1..]))
                .collect();
            let coiso = coisotropic_values(framed.q_field().field(), &spec, &zero)?;
            (first, coiso, Some(index_forms(&framed)))
        }
        // Without a frame of constant pairing the lemma does not apply; a
        // non-isotropic graph is then read in the original chart.
        Err(Error::NonConstantPairing | Error::Symmetry(_)) if !isotropy.is_empty() || !has_graph => {
            let first = coisotropic_values(&data.x_theta(), &spec, &datum)?
                .failures()
                .into_iter()
                .map(|(l, v)| format!("X_Θ{}: {v}", &l[1..]))
                .collect();
            (first, slice.clone(), None)
        }
        Err(e) => return Err(e),
    };
    Ok(DiracReport { isotropy, eq_first, eq_second, coiso, index_forms, slice })
}

/// `h_{abc} g^{cc'}` for `a, b > n`, `c' ≤ n` and `h_{abc} g^{aa'} g^{bb'}`
/// for `a', b' ≤ n`, `c > n`; lists the nonzero entries of each.
pub fn index_forms(data: &CourantData) -> (Vec<String>, Vec<String>) {
    let r = data.rank;
    let n = r / 2;
    let g = &data.g;
    let mut first = Vec::new();
    for a in n..r {
        for b in a + 1..r {
            for cp in 0..n {
                let mut acc = GPoly::zero(data.chart());
                for (c, row) in g.iter().enumerate() {
                    if !row[cp].is_zero() {
                        acc = &acc + &data.h(a, b, c).scale(&row[cp]);
                    }
                }
                if !acc.is_zero() {
                    first.push(format!("h g [{},{};{}] = {acc}", a + 1, b + 1, cp + 1));
                }
            }
        }
    }
    let mut second = Vec::new();
    for ap in 0..n {
        for bp in ap + 1..n {
            for c in n..r {
                let mut acc = GPoly::zero(data.chart());
                for a in 0..r {
                    for b in 0..r {
                        let s = &g[a][ap] * &g[b][bp];
                        if !s.is_zero() {
                            acc = &acc + &data.h(a, b, c).scale(&s);
                        }
                    }
                }
                if !acc.is_zero() {
                    second.push(format!("h g g [{},{};{}] = {acc}", ap + 1, bp + 1, c + 1));
                }
            }
        }
    }
    (first, second)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiracDeformReport {
    pub mc: McResidual<Mvf>,
    pub dirac: DiracReport,
}

impl DiracDeformReport {
    pub fn mc(&self) -> bool {
        self.mc.is_mc()
    }

    /// No truncation was needed to evaluate the Maurer–Cartan sum.
    pub fn exact(&self) -> bool {
        !self.mc.truncated
    }

    /// The Maurer–Cartan verdict matches the Dirac verdict.
    pub fn agree(&self) -> bool {
        self.mc() == self.dirac.dirac()
    }

    /// Internal consistency: the Maurer–Cartan verdict matches the
    /// fixed-chart coisotropic check, and the Dirac sub-verdicts agree.
    pub fn consistent(&self) -> bool {
        self.mc() == self.dirac.slice.pass() && self.dirac.consistent()
    }
}

/// Maurer–Cartan residual of `-φ` for `π + X_Θ` against the direct Dirac
/// check of the graph of `φ`. The undeformed `A = span(ξ¹..ξⁿ)` must be
/// Dirac. Without an explicit order the full nesting bound is used.
pub fn dirac_deform_check(
    data: &CourantData,
    cand: &DiracCandidate,
    order: Option<TruncationOrder>,
) -> Result<DiracDeformReport> {
    let base = DiracCandidate { frame: cand.frame.clone(), phi: None };
    if !dirac_check(data, &base)?.dirac() {
        return Err(Error::Precondition("the undeformed subbundle is not a Dirac structure".into()));
    }
    let adapted_data = adapted(data, cand)?;
    let spec = dirac_spec(&adapted_data)?;
    let datum = graph_datum(&spec, cand.phi.as_ref())?;
    let q = adapted_data.q_field();
    let order = order.unwrap_or_else(|| TruncationOrder(spec.bound(q.field()) as u32));
    let family = DerivedFamily::new(q.field().clone(), spec.clone());
    let mc = mc_residual(&family, &-datum.x_a(&spec), order)?;
    let dirac = dirac_check(data, cand)?;
    Ok(DiracDeformReport { mc, dirac })
}
