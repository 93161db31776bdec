//! Blended L∞ structures, Jacobiators and Maurer–Cartan sums.
//!
//! Structure maps use the symmetric convention: `m_k` and `n_k` are graded
//! symmetric, of degree `+1` and `-1` respectively. Jacobiators include the
//! curvature terms `m_0`, so a curved family is allowed and flatness is
//! reported separately.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::galg::TruncationOrder;
use crate::gcore::{is_odd, koszul_sign, shift_iso_sign, shuffles, Degree, Permutation, Sign};
use crate::mvf::{br, half, one_over_factorial, Mvf};

/// Element of a graded vector space over the rationals.
pub trait GradedVector: Clone + PartialEq + Debug {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    /// Common degree of a homogeneous nonzero element.
    fn degree(&self) -> Option<Degree>;
    fn degree_parts(&self) -> BTreeMap<Degree, Self>;

    fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn signed(&self, s: Sign) -> Self {
        match s {
            Sign::Plus => self.clone(),
            Sign::Minus => self.neg(),
        }
    }
}

/// Multivector fields graded by `‖·‖`.
impl GradedVector for Mvf {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: &BigRational) -> Self {
        Mvf::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        Mvf::is_zero(self)
    }
    fn degree(&self) -> Option<Degree> {
        self.shifted_degree()
    }
    fn degree_parts(&self) -> BTreeMap<Degree, Self> {
        self.shifted_parts()
    }
}

/// Which family of a blended structure to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Positive,
    Negative,
    Combined,
}

/// Two families `{m_k}` (degree +1) and `{n_k}` (degree −1) of graded
/// symmetric multilinear maps. Arity is the number of arguments.
pub trait StructureMaps {
    type Elem: GradedVector;

    fn zero(&self) -> Self::Elem;

    /// `m_k(args)`.
    fn positive(&self, args: &[Self::Elem]) -> Result<Self::Elem>;

    /// `n_k(args)`; zero for a positive structure.
    fn negative(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        let _ = args;
        Ok(self.zero())
    }

    /// Arities among `arities` at which the family is undefined.
    fn missing_arities(&self, arities: &[usize]) -> Vec<usize> {
        let _ = arities;
        Vec::new()
    }

    /// An arity bound `b` with `(m_k + n_k)(v, …, v) = 0` for all `k > b`,
    /// when one is known.
    fn vanishing_bound(&self, v: &Self::Elem) -> Option<usize> {
        let _ = v;
        None
    }

    fn apply(&self, family: Family, args: &[Self::Elem]) -> Result<Self::Elem> {
        match family {
            Family::Positive => self.positive(args),
            Family::Negative => self.negative(args),
            Family::Combined => Ok(self.positive(args)?.add(&self.negative(args)?)),
        }
    }
}

fn degrees_of<E: GradedVector>(inputs: &[E]) -> Result<Vec<Degree>> {
    inputs
        .iter()
        .map(|v| {
            if v.is_zero() {
                Ok(0)
            } else {
                v.degree().ok_or(Error::Inhomogeneous)
            }
        })
        .collect()
}

fn check_arities<S: StructureMaps + ?Sized>(s: &S, n: usize) -> Result<()> {
    let arities: Vec<usize> = (0..=n + 1).collect();
    let missing = s.missing_arities(&arities);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::ArityGap(missing))
    }
}

/// `Σ_{i+j=n+1} Σ_{τ ∈ Sh(j,n-j)} e(τ) outer_i(inner_j(v_τ(1..j)), v_τ(j+1..n))`.
pub fn shuffle_composite<S: StructureMaps + ?Sized>(
    s: &S,
    outer: Family,
    inner: Family,
    inputs: &[S::Elem],
) -> Result<S::Elem> {
    let n = inputs.len();
    check_arities(s, n)?;
    let degrees = degrees_of(inputs)?;
    let mut acc = s.zero();
    for j in 0..=n {
        for tau in shuffles(j, n)? {
            let arranged = tau.arrange(inputs);
            let sign = koszul_sign(&tau, &degrees)?;
            let first = s.apply(inner, &arranged[..j])?;
            if first.is_zero() {
                continue;
            }
            let mut outer_args = Vec::with_capacity(n + 1 - j);
            outer_args.push(first);
            outer_args.extend_from_slice(&arranged[j..]);
            let value = s.apply(outer, &outer_args)?;
            acc = acc.add(&value.signed(sign));
        }
    }
    Ok(acc)
}

/// Jacobiator `J_n` of the combined family `{m_k + n_k}`.
pub fn jacobiator<S: StructureMaps + ?Sized>(s: &S, inputs: &[S::Elem]) -> Result<S::Elem> {
    shuffle_composite(s, Family::Combined, Family::Combined, inputs)
}

/// Jacobiator of a single family.
pub fn jacobiator_of<S: StructureMaps + ?Sized>(
    s: &S,
    family: Family,
    inputs: &[S::Elem],
) -> Result<S::Elem> {
    shuffle_composite(s, family, family, inputs)
}

/// Mixed sum `Σ e(τ)[m_i(n_j(…), …) + n_i(m_j(…), …)]`.
pub fn blended_compat_residual<S: StructureMaps + ?Sized>(
    s: &S,
    inputs: &[S::Elem],
) -> Result<S::Elem> {
    let a = shuffle_composite(s, Family::Positive, Family::Negative, inputs)?;
    let b = shuffle_composite(s, Family::Negative, Family::Positive, inputs)?;
    Ok(a.add(&b))
}

/// Result of a truncated Maurer–Cartan sum.
#[derive(Clone, Debug, PartialEq)]
pub struct McResidual<E> {
    pub residual: E,
    pub order: TruncationOrder,
    /// Arity bound past which all terms vanish, when known.
    pub bound: Option<usize>,
    /// `true` when terms above the truncation order could be nonzero.
    pub truncated: bool,
}

impl<E: GradedVector> McResidual<E> {
    pub fn is_mc(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `Σ_{k=0}^{K} (1/k!)(m_k + n_k)(v, …, v)` for `v` of degree 0.
pub fn mc_residual<S: StructureMaps + ?Sized>(
    s: &S,
    v: &S::Elem,
    order: TruncationOrder,
) -> Result<McResidual<S::Elem>> {
    if !v.is_zero() && v.degree() != Some(0) {
        return Err(Error::DegreeViolation(
            "Maurer-Cartan elements must have degree 0".into(),
        ));
    }
    let bound = if v.is_zero() { Some(0) } else { s.vanishing_bound(v) };
    let top = match bound {
        Some(b) => b.min(order.get()),
        None => order.get(),
    };
    let mut acc = s.zero();
    for k in 0..=top {
        let args = vec![v.clone(); k];
        let term = s.apply(Family::Combined, &args)?;
        acc = acc.add(&term.scale(&one_over_factorial(k)));
    }
    Ok(McResidual {
        residual: acc,
        order,
        bound,
        truncated: bound.map_or(true, |b| b > order.get()),
    })
}

/// Checks graded symmetry of `m_k` on all adjacent transpositions of the
/// given homogeneous inputs.
pub fn check_symmetry<S: StructureMaps + ?Sized>(
    s: &S,
    family: Family,
    inputs: &[S::Elem],
) -> Result<()> {
    let base = s.apply(family, inputs)?;
    let degrees = degrees_of(inputs)?;
    for i in 0..inputs.len().saturating_sub(1) {
        let tau = Permutation::transposition(inputs.len(), i, i + 1)?;
        let swapped = s.apply(family, &tau.arrange(inputs))?;
        let sign = koszul_sign(&tau, &degrees)?;
        if swapped != base.signed(sign) {
            return Err(Error::Symmetry(format!(
                "arity {} not graded symmetric in positions {} and {}",
                inputs.len(),
                i + 1,
                i + 2
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Antisymmetric families and the shift isomorphism

/// Family `{l_k}` of graded antisymmetric maps, `l_k` of degree `2 - k`.
pub trait AntisymFamily {
    type Elem: GradedVector;
    fn zero(&self) -> Self::Elem;
    fn bracket(&self, args: &[Self::Elem]) -> Result<Self::Elem>;
}

/// An element `v[1]` of the suspension; its degree is `|v| - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shifted<E>(pub E);

impl<E: GradedVector> GradedVector for Shifted<E> {
    fn add(&self, other: &Self) -> Self {
        Shifted(self.0.add(&other.0))
    }
    fn scale(&self, c: &BigRational) -> Self {
        Shifted(self.0.scale(c))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn degree(&self) -> Option<Degree> {
        self.0.degree().map(|d| d - 1)
    }
    fn degree_parts(&self) -> BTreeMap<Degree, Self> {
        self.0
            .degree_parts()
            .into_iter()
            .map(|(d, v)| (d - 1, Shifted(v)))
            .collect()
    }
}

fn unshifted_degrees<E: GradedVector>(args: &[Shifted<E>]) -> Result<Vec<Degree>> {
    args.iter()
        .map(|a| {
            if a.0.is_zero() {
                Ok(0)
            } else {
                a.0.degree().ok_or(Error::Inhomogeneous)
            }
        })
        .collect()
}

/// Symmetric family on `V[1]`:
/// `m_k(v_1[1], …, v_k[1]) = (-1)^{Σ (k-i)|v_i|} l_k(v_1, …, v_k)[1]`.
pub struct ShiftPacked<F>(pub F);

impl<F: AntisymFamily> StructureMaps for ShiftPacked<F> {
    type Elem = Shifted<F::Elem>;

    fn zero(&self) -> Self::Elem {
        Shifted(self.0.zero())
    }

    fn positive(&self, args: &[Self::Elem]) -> Result<Self::Elem> {
        let degrees = unshifted_degrees(args)?;
        let inner: Vec<F::Elem> = args.iter().map(|a| a.0.clone()).collect();
        let value = self.0.bracket(&inner)?;
        Ok(Shifted(value.signed(shift_iso_sign(&degrees))))
    }
}

pub fn shift_pack<F: AntisymFamily>(family: F) -> ShiftPacked<F> {
    ShiftPacked(family)
}

/// Packs and verifies graded symmetry of `m_k` for each arity on the
/// given sample tuples.
pub fn shift_pack_checked<F: AntisymFamily>(
    family: F,
    samples: &[Vec<F::Elem>],
) -> Result<ShiftPacked<F>> {
    let packed = ShiftPacked(family);
    for tuple in samples {
        let args: Vec<Shifted<F::Elem>> = tuple.iter().cloned().map(Shifted).collect();
        check_symmetry(&packed, Family::Positive, &args)?;
    }
    Ok(packed)
}

/// Inverse of [`shift_pack`]: recovers `{l_k}` from a symmetric family on
/// the suspension.
pub struct ShiftUnpacked<S>(pub S);

impl<E: GradedVector, S: StructureMaps<Elem = Shifted<E>>> AntisymFamily for ShiftUnpacked<S> {
    type Elem = E;

    fn zero(&self) -> E {
        self.0.zero().0
    }

    fn bracket(&self, args: &[E]) -> Result<E> {
        let degrees = degrees_of(args)?;
        let shifted: Vec<Shifted<E>> = args.iter().cloned().map(Shifted).collect();
        Ok(self.0.positive(&shifted)?.0.signed(shift_iso_sign(&degrees)))
    }
}

// ---------------------------------------------------------------------------
// (Blended) DGLAs

/// Graded Lie algebra with a differential. For a blended DGLA the
/// differential is `d⁺ + d⁻`, split by degree.
pub trait Dgla {
    type Elem: GradedVector;
    fn zero(&self) -> Self::Elem;
    fn d(&self, v: &Self::Elem) -> Self::Elem;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// A DGLA viewed as the antisymmetric family `l_1 = d`, `l_2 = [·,·]`.
pub struct DglaFamily<D>(pub D);

impl<D: Dgla> AntisymFamily for DglaFamily<D> {
    type Elem = D::Elem;

    fn zero(&self) -> D::Elem {
        self.0.zero()
    }

    fn bracket(&self, args: &[D::Elem]) -> Result<D::Elem> {
        Ok(match args {
            [v] => self.0.d(v),
            [a, b] => self.0.bracket(a, b),
            _ => self.0.zero(),
        })
    }
}

/// `(𝔛(E), [·,·]_SN, [Q, ·]_SN)`.
#[derive(Clone, Debug)]
pub struct SchoutenDgla {
    pub q: Mvf,
}

impl Dgla for SchoutenDgla {
    type Elem = Mvf;

    fn zero(&self) -> Mvf {
        Mvf::zero(self.q.chart())
    }

    fn d(&self, v: &Mvf) -> Mvf {
        br(&self.q, v)
    }

    fn bracket(&self, a: &Mvf, b: &Mvf) -> Mvf {
        br(a, b)
    }
}

/// Maurer–Cartan residual of `v = v₊ + v₋` in a blended DGLA.
#[derive(Clone, Debug, PartialEq)]
pub struct BlendedMc<E> {
    /// `dv + ½[v, v]`.
    pub residual: E,
    /// Degree components of the residual, keyed by degree.
    pub components: BTreeMap<Degree, E>,
    /// The displayed system: `d⁺v₊ + ½[v₊,v₊]` (degree 2),
    /// `d⁺v₋ + d⁻v₊ + [v₊,v₋]` (degree 0), `d⁻v₋ + ½[v₋,v₋]` (degree −2).
    pub system: [E; 3],
}

impl<E: GradedVector> BlendedMc<E> {
    pub fn is_mc(&self) -> bool {
        self.residual.is_zero()
    }
}

fn part<E: GradedVector>(v: &E, d: Degree, zero: &E) -> E {
    v.degree_parts().remove(&d).unwrap_or_else(|| zero.clone())
}

pub fn blended_dgla_mc<D: Dgla>(dgla: &D, v: &D::Elem) -> Result<BlendedMc<D::Elem>> {
    let zero = dgla.zero();
    let parts = v.degree_parts();
    if parts.keys().any(|&d| d != 1 && d != -1) {
        return Err(Error::DegreeViolation(
            "blended Maurer-Cartan elements live in degrees +1 and -1".into(),
        ));
    }
    let vp = parts.get(&1).cloned().unwrap_or_else(|| zero.clone());
    let vm = parts.get(&-1).cloned().unwrap_or_else(|| zero.clone());
    let h = half();
    let residual = dgla.d(v).add(&dgla.bracket(v, v).scale(&h));
    let components = residual.degree_parts();
    let dvp = dgla.d(&vp);
    let dvm = dgla.d(&vm);
    let top = part(&dvp, 2, &zero).add(&dgla.bracket(&vp, &vp).scale(&h));
    let mid = part(&dvm, 0, &zero)
        .add(&part(&dvp, 0, &zero))
        .add(&dgla.bracket(&vp, &vm));
    let bottom = part(&dvm, -2, &zero).add(&dgla.bracket(&vm, &vm).scale(&h));
    Ok(BlendedMc {
        residual,
        components,
        system: [top, mid, bottom],
    })
}

// ---------------------------------------------------------------------------
// Finite tables

/// Vector in a finite graded space with a fixed homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GVec {
    degrees: Arc<[Degree]>,
    coeffs: Vec<BigRational>,
}

impl GVec {
    pub fn zero(degrees: &Arc<[Degree]>) -> Self {
        GVec {
            degrees: degrees.clone(),
            coeffs: vec![BigRational::zero(); degrees.len()],
        }
    }

    pub fn basis(degrees: &Arc<[Degree]>, i: usize) -> Self {
        let mut v = GVec::zero(degrees);
        v.coeffs[i] = BigRational::one();
        v
    }

    pub fn from_coeffs(degrees: &Arc<[Degree]>, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != degrees.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for a space of dimension {}",
                coeffs.len(),
                degrees.len()
            )));
        }
        Ok(GVec {
            degrees: degrees.clone(),
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn basis_degrees(&self) -> &Arc<[Degree]> {
        &self.degrees
    }
}

impl GradedVector for GVec {
    fn add(&self, other: &Self) -> Self {
        GVec {
            degrees: self.degrees.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn scale(&self, c: &BigRational) -> Self {
        GVec {
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn degree(&self) -> Option<Degree> {
        let mut it = self
            .coeffs
            .iter()
            .zip(self.degrees.iter())
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, &d)| d);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    fn degree_parts(&self) -> BTreeMap<Degree, Self> {
        let mut out: BTreeMap<Degree, GVec> = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.degrees[i];
            out.entry(d).or_insert_with(|| GVec::zero(&self.degrees)).coeffs[i] = c.clone();
        }
        out
    }
}

/// Structure maps given by values on sorted basis tuples, extended by
/// graded symmetry and multilinearity. Arities without a table entry up to
/// `max_arity` are gaps unless listed in `zero_arities`.
#[derive(Clone, Debug)]
pub struct TableMaps {
    pub degrees: Arc<[Degree]>,
    pub positive: BTreeMap<usize, BTreeMap<Vec<usize>, GVec>>,
    pub negative: BTreeMap<usize, BTreeMap<Vec<usize>, GVec>>,
    /// Arities at which both families are known to vanish.
    pub zero_arities: Vec<usize>,
    /// Arities above this vanish.
    pub max_arity: usize,
}

impl TableMaps {
    pub fn new(degrees: Vec<Degree>, max_arity: usize) -> Self {
        TableMaps {
            degrees: degrees.into(),
            positive: BTreeMap::new(),
            negative: BTreeMap::new(),
            zero_arities: Vec::new(),
            max_arity,
        }
    }

    fn eval(&self, table: Option<&BTreeMap<Vec<usize>, GVec>>, args: &[GVec]) -> GVec {
        let mut acc = GVec::zero(&self.degrees);
        let Some(table) = table else { return acc };
        let k = args.len();
        let dim = self.degrees.len();
        let mut idx = vec![0usize; k];
        loop {
            let mut coeff = BigRational::one();
            for (a, &i) in args.iter().zip(&idx) {
                coeff *= &a.coeffs[i];
                if coeff.is_zero() {
                    break;
                }
            }
            if !coeff.is_zero() {
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by_key(|&p| idx[p]);
                let sorted: Vec<usize> = order.iter().map(|&p| idx[p]).collect();
                if let Some(value) = table.get(&sorted) {
                    let degs: Vec<Degree> = idx.iter().map(|&i| self.degrees[i]).collect();
                    let perm = Permutation::new(order).expect("sorting permutation");
                    let sign = koszul_sign(&perm, &degs).expect("matching lengths");
                    acc = acc.add(&value.scale(&coeff).signed(sign));
                }
            }
            // advance the multi-index
            let mut p = k;
            loop {
                if p == 0 {
                    return acc;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < dim {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    /// `true` when a sorted tuple can carry a nonzero symmetric value:
    /// odd basis elements may not repeat.
    pub fn admissible(&self, tuple: &[usize]) -> bool {
        tuple
            .windows(2)
            .all(|w| w[0] != w[1] || !is_odd(self.degrees[w[0]]))
    }
}

impl StructureMaps for TableMaps {
    type Elem = GVec;

    fn zero(&self) -> GVec {
        GVec::zero(&self.degrees)
    }

    fn positive(&self, args: &[GVec]) -> Result<GVec> {
        Ok(self.eval(self.positive.get(&args.len()), args))
    }

    fn negative(&self, args: &[GVec]) -> Result<GVec> {
        Ok(self.eval(self.negative.get(&args.len()), args))
    }

    fn missing_arities(&self, arities: &[usize]) -> Vec<usize> {
        arities
            .iter()
            .copied()
            .filter(|&k| {
                k <= self.max_arity
                    && !self.positive.contains_key(&k)
                    && !self.negative.contains_key(&k)
                    && !self.zero_arities.contains(&k)
            })
            .collect()
    }

    fn vanishing_bound(&self, _v: &GVec) -> Option<usize> {
        Some(self.max_arity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galg::{rational, Chart};

    fn zero_table(degrees: Vec<Degree>) -> TableMaps {
        let mut t = TableMaps::new(degrees, 3);
        t.zero_arities = vec![0, 1, 2, 3];
        t
    }

    #[test]
    fn zero_family_has_zero_jacobiators() {
        let t = zero_table(vec![0, 1, -1]);
        let inputs: Vec<GVec> = (0..3).map(|i| GVec::basis(&t.degrees, i)).collect();
        for n in 1..=3 {
            assert!(jacobiator(&t, &inputs[..n]).unwrap().is_zero());
        }
    }

    #[test]
    fn gaps_are_reported() {
        let mut t = TableMaps::new(vec![0, 1], 3);
        t.zero_arities = vec![0, 1];
        let inputs = vec![GVec::basis(&t.degrees, 0), GVec::basis(&t.degrees, 1)];
        assert_eq!(jacobiator(&t, &inputs), Err(Error::ArityGap(vec![2, 3])));
    }

    #[test]
    fn table_extension_is_symmetric() {
        let mut t = TableMaps::new(vec![1, 1, 0], 2);
        t.zero_arities = vec![0, 1];
        let degrees = t.degrees.clone();
        let mut m2 = BTreeMap::new();
        m2.insert(vec![0, 1], GVec::basis(&degrees, 2).scale(&rational(0)).add(&GVec::basis(&degrees, 0)));
        m2.insert(vec![0, 2], GVec::basis(&degrees, 1));
        t.positive.insert(2, m2);
        let e: Vec<GVec> = (0..3).map(|i| GVec::basis(&degrees, i)).collect();
        check_symmetry(&t, Family::Positive, &[e[0].clone(), e[1].clone()]).unwrap();
        check_symmetry(&t, Family::Positive, &[e[0].clone(), e[2].clone()]).unwrap();
        let swapped = t.positive(&[e[1].clone(), e[0].clone()]).unwrap();
        assert_eq!(swapped, e[0].neg());
    }

    #[test]
    fn mc_of_zero_is_zero_when_flat() {
        let t = zero_table(vec![0, 1]);
        let r = mc_residual(&t, &GVec::zero(&t.degrees), TruncationOrder(4)).unwrap();
        assert!(r.is_mc());
        assert!(!r.truncated);
    }

    #[test]
    fn schouten_dgla_mc_is_dv_plus_half_bracket() {
        let c = Chart::from_degrees(&[("q", 0), ("p", 0)]).unwrap();
        let pi = &Mvf::deriv(&c, "q").unwrap() * &Mvf::deriv(&c, "p").unwrap();
        let dgla = SchoutenDgla { q: pi.clone() };
        let x = Mvf::function(&c, "q").unwrap();
        let v = &(&x * &pi) + &x.scale_int(3);
        let mc = blended_dgla_mc(&dgla, &v).unwrap();
        assert_eq!(mc.residual, &br(&pi, &v) + &br(&v, &v).scale(&half()));
        for (k, d) in [2, 0, -2].into_iter().enumerate() {
            let comp = mc.components.get(&d).cloned().unwrap_or_else(|| dgla.zero());
            assert_eq!(comp, mc.system[k]);
        }
    }

    #[test]
    fn shift_signs_at_low_arity() {
        let c = Chart::from_degrees(&[("q", 0), ("p", 0)]).unwrap();
        let pi = &Mvf::deriv(&c, "q").unwrap() * &Mvf::deriv(&c, "p").unwrap();
        let packed = shift_pack(DglaFamily(SchoutenDgla { q: pi.clone() }));
        let v = Mvf::function(&c, "q").unwrap();
        let w = Mvf::deriv(&c, "q").unwrap();
        assert_eq!(packed.positive(&[Shifted(v.clone())]).unwrap().0, br(&pi, &v));
        // ‖v‖ = -1 is odd, so m_2 picks up a minus sign
        assert_eq!(
            packed.positive(&[Shifted(v.clone()), Shifted(w.clone())]).unwrap().0,
            -br(&v, &w)
        );
        let back = ShiftUnpacked(packed);
        assert_eq!(back.bracket(&[v.clone(), w.clone()]).unwrap(), br(&v, &w));
    }
}
