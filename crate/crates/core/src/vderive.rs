//! V-algebras of multivector fields and their higher derived brackets.
//!
//! A split is described by the projection `I∘P` onto the abelian part `𝔞`
//! together with a structural membership test for `𝔞`. Elements of `𝔞`
//! are represented by their images under `I`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;

use crate::error::{Error, Result};
use crate::galg::Chart;
use crate::gcore::{is_odd, Degree};
use crate::linfty::{GradedVector, StructureMaps};
use crate::mvf::{br, Mvf};
use crate::random::{random_homogeneous_mvf, random_mvf, Rng8, Sampler};

/// Splitting `𝔛(E) = 𝔞 ⊕ ker P` of the Schouten algebra.
pub trait VSplit {
    fn chart(&self) -> &Arc<Chart>;

    /// `I(P(z))`.
    fn project(&self, z: &Mvf) -> Mvf;

    /// Whether `z` lies in the image of `I`.
    fn contains(&self, z: &Mvf) -> bool;

    /// Function generators and derivation generators spanning `𝔞`.
    fn abelian_generators(&self) -> (Vec<usize>, Vec<usize>);

    /// Multiplicities allowed in `𝔞`, if restricted.
    fn abelian_multiplicity(&self) -> Option<usize> {
        None
    }

    /// Multiplicity of the ambient algebra, if restricted.
    fn ambient_multiplicity(&self) -> Option<usize> {
        None
    }

    /// `b` such that `P[⋯[z, a_1], ⋯, a_k] = 0` for every `k > b`.
    fn nesting_bound(&self, z: &Mvf) -> Option<usize> {
        let _ = z;
        None
    }
}

/// A witness that one of the V-algebra axioms fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValgebraReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl ValgebraReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sample_abelian<S: VSplit + ?Sized>(split: &S, rng: &mut Rng8) -> Mvf {
    let chart = split.chart();
    let (functions, derivations) = split.abelian_generators();
    let max_mult = split.abelian_multiplicity().unwrap_or(2) as u32;
    let s = Sampler {
        functions,
        derivations,
        max_poly_degree: 2,
        max_multiplicity: max_mult,
        max_terms: 3,
    };
    let z = random_homogeneous_mvf(rng, chart, &s, None);
    match split.abelian_multiplicity() {
        Some(l) => z.multiplicity_part(l),
        None => z,
    }
}

fn sample_ambient<S: VSplit + ?Sized>(split: &S, rng: &mut Rng8) -> Mvf {
    let chart = split.chart();
    let max_mult = split.ambient_multiplicity().unwrap_or(2) as u32;
    let s = Sampler::full(chart, 2, max_mult, 3);
    let z = if rng.gen_bool(0.5) {
        random_homogeneous_mvf(rng, chart, &s, None)
    } else {
        random_mvf(rng, chart, &s)
    };
    match split.ambient_multiplicity() {
        Some(l) => z.multiplicity_part(l),
        None => z,
    }
}

/// Checks `P∘I = id`, abelianity of `𝔞` and `P[x,y] = P[Px,y] + P[x,Py]`
/// on random samples.
pub fn valgebra_check<S: VSplit + ?Sized>(split: &S, samples: usize, rng: &mut Rng8) -> ValgebraReport {
    let mut violations = Vec::new();
    for _ in 0..samples {
        let a = sample_abelian(split, rng);
        let b = sample_abelian(split, rng);
        if !split.contains(&a) || split.project(&a) != a {
            violations.push(Violation {
                check: "projection restricts to identity on the abelian part",
                witness: vec![a.to_string()],
            });
        }
        let ab = br(&a, &b);
        if !ab.is_zero() {
            violations.push(Violation {
                check: "abelian part is abelian",
                witness: vec![a.to_string(), b.to_string(), ab.to_string()],
            });
        }
        let x = sample_ambient(split, rng);
        let y = sample_ambient(split, rng);
        let lhs = split.project(&br(&x, &y));
        let rhs = &split.project(&br(&split.project(&x), &y)) + &split.project(&br(&x, &split.project(&y)));
        if lhs != rhs {
            violations.push(Violation {
                check: "kernel of the projection is a subalgebra",
                witness: vec![x.to_string(), y.to_string(), (&lhs - &rhs).to_string()],
            });
        }
    }
    ValgebraReport {
        samples,
        violations,
    }
}

/// Searches low-degree pairs for a failure of the kernel-subalgebra
/// condition. Returns the first `(x, y)` found.
pub fn kernel_witness<S: VSplit + ?Sized>(split: &S, candidates: &[Mvf]) -> Option<(Mvf, Mvf)> {
    for x in candidates {
        for y in candidates {
            let lhs = split.project(&br(x, y));
            let rhs = &split.project(&br(&split.project(x), y)) + &split.project(&br(x, &split.project(y)));
            if lhs != rhs {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

/// Higher derived brackets of `Δ`: `m_k(a_1..a_k) = P[⋯[[Δ,a_1],a_2]⋯,a_k]`.
/// The positive family uses the `‖·‖ = 1` component of `Δ` and the
/// negative family the rest.
#[derive(Clone, Debug)]
pub struct DerivedFamily<S> {
    pub delta: Mvf,
    pub split: S,
    positive_part: Mvf,
    negative_part: Mvf,
}

impl<S: VSplit> DerivedFamily<S> {
    pub fn new(delta: Mvf, split: S) -> Self {
        let positive_part = delta.shifted_part(1);
        let negative_part = &delta - &positive_part;
        DerivedFamily {
            delta,
            split,
            positive_part,
            negative_part,
        }
    }

    fn nested(&self, start: &Mvf, args: &[Mvf]) -> Result<Mvf> {
        for a in args {
            if !self.split.contains(a) {
                return Err(Error::NotInAbelianPart(a.to_string()));
            }
        }
        let mut cur = start.clone();
        for a in args {
            if cur.is_zero() {
                break;
            }
            cur = br(&cur, a);
        }
        Ok(self.split.project(&cur))
    }
}

/// `m_k` of the full `Δ` (positive plus negative families).
pub fn derived_bracket<S: VSplit>(fam: &DerivedFamily<S>, args: &[Mvf]) -> Result<Mvf> {
    fam.nested(&fam.delta, args)
}

impl<S: VSplit> StructureMaps for DerivedFamily<S> {
    type Elem = Mvf;

    fn zero(&self) -> Mvf {
        Mvf::zero(self.split.chart())
    }

    fn positive(&self, args: &[Mvf]) -> Result<Mvf> {
        self.nested(&self.positive_part, args)
    }

    fn negative(&self, args: &[Mvf]) -> Result<Mvf> {
        self.nested(&self.negative_part, args)
    }

    fn vanishing_bound(&self, _v: &Mvf) -> Option<usize> {
        self.split.nesting_bound(&self.delta)
    }
}

/// Element `(v[1], a)` of `V[1] ⊕ 𝔞`. The degree of `v[1]` is `‖v‖ - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub v: Mvf,
    pub a: Mvf,
}

impl Pair {
    pub fn new(v: Mvf, a: Mvf) -> Self {
        Pair { v, a }
    }

    pub fn from_v(v: Mvf) -> Self {
        let a = Mvf::zero(v.chart());
        Pair { v, a }
    }

    pub fn from_a(a: Mvf) -> Self {
        let v = Mvf::zero(a.chart());
        Pair { v, a }
    }
}

impl GradedVector for Pair {
    fn add(&self, other: &Self) -> Self {
        Pair::new(&self.v + &other.v, &self.a + &other.a)
    }

    fn scale(&self, c: &BigRational) -> Self {
        Pair::new(self.v.scale(c), self.a.scale(c))
    }

    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.a.is_zero()
    }

    fn degree(&self) -> Option<Degree> {
        let dv = if self.v.is_zero() {
            None
        } else {
            Some(self.v.shifted_degree()? - 1)
        };
        let da = if self.a.is_zero() {
            None
        } else {
            Some(self.a.shifted_degree()?)
        };
        match (dv, da) {
            (Some(x), Some(y)) if x == y => Some(x),
            (Some(_), Some(_)) => None,
            (x, y) => x.or(y),
        }
    }

    fn degree_parts(&self) -> BTreeMap<Degree, Self> {
        let chart = self.v.chart().clone();
        let mut out: BTreeMap<Degree, Pair> = BTreeMap::new();
        for (d, v) in self.v.shifted_parts() {
            out.entry(d - 1)
                .or_insert_with(|| Pair::new(Mvf::zero(&chart), Mvf::zero(&chart)))
                .v = v;
        }
        for (d, a) in self.a.shifted_parts() {
            out.entry(d)
                .or_insert_with(|| Pair::new(Mvf::zero(&chart), Mvf::zero(&chart)))
                .a = a;
        }
        out
    }
}

/// The L∞ structure on `V[1] ⊕ 𝔞` built from a positive `Δ`.
#[derive(Clone, Debug)]
pub struct CombinedMaps<S> {
    pub delta: Mvf,
    pub split: S,
}

/// Builds the combined structure; `Δ` must be concentrated in `‖·‖ = 1`.
pub fn combined_maps<S: VSplit>(delta: Mvf, split: S) -> Result<CombinedMaps<S>> {
    if delta.shifted_parts().keys().any(|&d| d != 1) {
        return Err(Error::BlendedDelta);
    }
    Ok(CombinedMaps { delta, split })
}

#[derive(Clone)]
enum Piece {
    V(Mvf, Degree),
    A(Mvf, Degree),
}

impl Piece {
    fn degree(&self) -> Degree {
        match self {
            Piece::V(_, d) | Piece::A(_, d) => *d,
        }
    }
}

fn pieces(p: &Pair) -> Vec<Piece> {
    let mut out = Vec::new();
    for (d, v) in p.v.shifted_parts() {
        out.push(Piece::V(v, d - 1));
    }
    for (d, a) in p.a.shifted_parts() {
        out.push(Piece::A(a, d));
    }
    out
}

impl<S: VSplit> CombinedMaps<S> {
    fn zero_pair(&self) -> Pair {
        let c = self.split.chart();
        Pair::new(Mvf::zero(c), Mvf::zero(c))
    }

    fn nested(&self, start: &Mvf, args: &[&Mvf]) -> Result<Mvf> {
        let mut cur = start.clone();
        for a in args {
            if !self.split.contains(a) {
                return Err(Error::NotInAbelianPart(a.to_string()));
            }
            if cur.is_zero() {
                break;
            }
            cur = br(&cur, a);
        }
        Ok(self.split.project(&cur))
    }

    fn on_pieces(&self, ps: &[&Piece]) -> Result<Pair> {
        let k = ps.len();
        let vpos: Vec<usize> = (0..k).filter(|&i| matches!(ps[i], Piece::V(..))).collect();
        let zero = self.zero_pair();
        match (k, vpos.len()) {
            (0, _) => Ok(Pair::from_a(self.split.project(&self.delta))),
            (1, 1) => {
                let Piece::V(v, _) = ps[0] else { unreachable!() };
                Ok(Pair::new(-br(&self.delta, v), self.split.project(v)))
            }
            (_, 0) => {
                let args: Vec<&Mvf> = ps
                    .iter()
                    .map(|p| match p {
                        Piece::A(a, _) => a,
                        Piece::V(..) => unreachable!(),
                    })
                    .collect();
                Ok(Pair::from_a(self.nested(&self.delta, &args)?))
            }
            (2, 2) => {
                let (Piece::V(v, dv), Piece::V(w, _)) = (ps[0], ps[1]) else { unreachable!() };
                // ‖v‖ = dv + 1
                let value = br(v, w);
                Ok(Pair::from_v(if is_odd(dv + 1) { -value } else { value }))
            }
            (_, 1) => {
                let i = vpos[0];
                let Piece::V(v, dv) = ps[i] else { unreachable!() };
                let passed: Degree = ps[..i].iter().map(|p| p.degree()).sum();
                let mut args = Vec::with_capacity(k - 1);
                for (j, p) in ps.iter().enumerate() {
                    if j != i {
                        let Piece::A(a, _) = p else { unreachable!() };
                        args.push(a);
                    }
                }
                let value = self.nested(v, &args)?;
                let minus = is_odd(*dv) && is_odd(passed);
                Ok(Pair::from_a(if minus { -value } else { value }))
            }
            _ => Ok(zero),
        }
    }
}

impl<S: VSplit> StructureMaps for CombinedMaps<S> {
    type Elem = Pair;

    fn zero(&self) -> Pair {
        self.zero_pair()
    }

    fn positive(&self, args: &[Pair]) -> Result<Pair> {
        let expanded: Vec<Vec<Piece>> = args.iter().map(pieces).collect();
        if expanded.iter().any(|p| p.is_empty()) {
            return Ok(self.zero_pair());
        }
        let mut acc = self.zero_pair();
        let mut idx = vec![0usize; args.len()];
        loop {
            let choice: Vec<&Piece> = idx.iter().zip(&expanded).map(|(&i, p)| &p[i]).collect();
            acc = acc.add(&self.on_pieces(&choice)?);
            let mut p = args.len();
            loop {
                if p == 0 {
                    return Ok(acc);
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < expanded[p].len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    fn vanishing_bound(&self, v: &Pair) -> Option<usize> {
        let a_bound = self.split.nesting_bound(&self.delta)?;
        let v_bound = if v.v.is_zero() {
            0
        } else {
            self.split.nesting_bound(&v.v)? + 1
        };
        Some(a_bound.max(v_bound).max(2))
    }
}

/// Identity projection on an algebra where every element is abelian.
/// Useful as a degenerate split in tests and examples.
#[derive(Clone, Debug)]
pub struct FunctionSplit {
    pub chart: Arc<Chart>,
}

impl VSplit for FunctionSplit {
    fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    fn project(&self, z: &Mvf) -> Mvf {
        z.multiplicity_part(0)
    }

    fn contains(&self, z: &Mvf) -> bool {
        z.multiplicity().map_or(z.is_zero(), |l| l == 0)
    }

    fn abelian_generators(&self) -> (Vec<usize>, Vec<usize>) {
        ((0..self.chart.len()).collect(), Vec::new())
    }

    fn abelian_multiplicity(&self) -> Option<usize> {
        Some(0)
    }

    fn ambient_multiplicity(&self) -> Option<usize> {
        Some(0)
    }
}
