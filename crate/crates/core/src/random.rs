//! Seeded generators for random polynomials and multivector fields.
//!
//! Everything here is deterministic given the seed, so randomized checks
//! and reports are reproducible.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::galg::{Chart, GPoly, Monomial};
use crate::gcore::Degree;
use crate::mvf::Mvf;
use crate::poly::{self, Terms};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational, mostly integers.
pub fn small_rational(rng: &mut Rng8) -> BigRational {
    let mut num: i64 = 0;
    while num == 0 {
        num = rng.gen_range(-3..=3);
    }
    let den: i64 = if rng.gen_bool(0.25) { rng.gen_range(2..=3) } else { 1 };
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Shape of randomly generated monomials.
#[derive(Clone, Debug)]
pub struct Sampler {
    /// Function generators that may appear.
    pub functions: Vec<usize>,
    /// Generators whose derivation `∂/∂u` may appear.
    pub derivations: Vec<usize>,
    pub max_poly_degree: u32,
    pub max_multiplicity: u32,
    pub max_terms: usize,
}

impl Sampler {
    /// All generators, with the given degree bounds.
    pub fn full(chart: &Chart, max_poly_degree: u32, max_multiplicity: u32, max_terms: usize) -> Self {
        Sampler {
            functions: (0..chart.len()).collect(),
            derivations: (0..chart.len()).collect(),
            max_poly_degree,
            max_multiplicity,
            max_terms,
        }
    }
}

fn pick_factors(rng: &mut Rng8, pool: &[usize], count: u32, odd: impl Fn(usize) -> bool, e: &mut [u32], offset: usize) {
    if pool.is_empty() {
        return;
    }
    for _ in 0..count {
        let g = *pool.choose(rng).expect("nonempty pool");
        if odd(g) && e[offset + g] > 0 {
            continue;
        }
        e[offset + g] += 1;
    }
}

/// Random monomial over the doubled generator list of a chart.
pub fn random_mvf_monomial(rng: &mut Rng8, chart: &Chart, s: &Sampler) -> Monomial {
    let n = chart.len();
    let odd = chart.mvf_odd();
    let mut e = vec![0u32; 2 * n];
    let d = rng.gen_range(0..=s.max_poly_degree);
    pick_factors(rng, &s.functions, d, |g| odd[g], &mut e, 0);
    let l = rng.gen_range(0..=s.max_multiplicity);
    pick_factors(rng, &s.derivations, l, |g| odd[n + g], &mut e, n);
    Monomial::from_exponents(e)
}

pub fn random_mvf(rng: &mut Rng8, chart: &Arc<Chart>, s: &Sampler) -> Mvf {
    let count = rng.gen_range(1..=s.max_terms.max(1));
    let mut terms = Terms::new();
    for _ in 0..count {
        let m = random_mvf_monomial(rng, chart, s);
        poly::add_term(&mut terms, m, small_rational(rng));
    }
    Mvf::from_raw(chart, terms)
}

/// Random field all of whose terms have shifted degree `target`, or the
/// degree of the first sampled term when `target` is `None`. May return
/// zero if no monomial of the requested degree is found.
pub fn random_homogeneous_mvf(
    rng: &mut Rng8,
    chart: &Arc<Chart>,
    s: &Sampler,
    target: Option<Degree>,
) -> Mvf {
    let probe = Mvf::zero(chart);
    let mut target = target;
    let count = rng.gen_range(1..=s.max_terms.max(1));
    let mut terms = Terms::new();
    let mut attempts = 0;
    while terms.len() < count && attempts < 60 * count {
        attempts += 1;
        let m = random_mvf_monomial(rng, chart, s);
        let d = probe.grading_of(&m).shifted();
        match target {
            None => target = Some(d),
            Some(t) if t != d => continue,
            _ => {}
        }
        poly::add_term(&mut terms, m, small_rational(rng));
    }
    Mvf::from_raw(chart, terms)
}

/// Random polynomial in the listed generators (all when `gens` is `None`).
pub fn random_gpoly(
    rng: &mut Rng8,
    chart: &Arc<Chart>,
    gens: Option<&[usize]>,
    max_degree: u32,
    max_terms: usize,
) -> GPoly {
    let all: Vec<usize> = (0..chart.len()).collect();
    let pool = gens.unwrap_or(&all);
    let odd = chart.fn_odd();
    let n = chart.len();
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut terms = Terms::new();
    for _ in 0..count {
        let mut e = vec![0u32; n];
        let d = rng.gen_range(0..=max_degree);
        pick_factors(rng, pool, d, |g| odd[g], &mut e, 0);
        poly::add_term(&mut terms, Monomial::from_exponents(e), small_rational(rng));
    }
    GPoly::from_raw(chart, terms)
}

/// Random polynomial all of whose terms have the given degree.
pub fn random_homogeneous_gpoly(
    rng: &mut Rng8,
    chart: &Arc<Chart>,
    gens: Option<&[usize]>,
    degree: Degree,
    max_degree: u32,
    max_terms: usize,
) -> GPoly {
    let mut out = GPoly::zero(chart);
    for _ in 0..8 {
        let f = random_gpoly(rng, chart, gens, max_degree, max_terms * 3);
        let parts = crate::galg::gp_degree_parts(&f);
        if let Some(p) = parts.get(&degree) {
            out = p.clone();
            break;
        }
    }
    out
}
