//! Invariants checked on random input. Proptest drives the seeds, and the
//! crate's sampler builds the objects.

mod common;

use std::sync::Arc;

use gradedq::cli::expr::{parse_gpoly, parse_mvf};
use gradedq::galg::{Chart, TruncationOrder};
use gradedq::mvf::{br, Mvf};
use gradedq::qgeom::{
    build_i, build_p, coisotropic_check, maclaurin_h, q_deform_check, DeformationDatum, QField, SubmanifoldSpec,
};
use gradedq::random::{random_gpoly, random_homogeneous_mvf, random_mvf, rng, small_rational, Rng8, Sampler};
use gradedq::vderive::{kernel_witness, valgebra_check, VSplit};
use proptest::prelude::*;
use rand::Rng;

fn mixed_chart() -> Arc<Chart> {
    Chart::from_degrees(&[("x", 0), ("y", 0), ("a", 1), ("b", 1), ("c", 2)]).unwrap()
}

fn split() -> (Arc<Chart>, SubmanifoldSpec) {
    let chart = Chart::from_degrees(&[("x1", 0), ("x2", 0), ("y1", 0), ("xi1", 1), ("eta1", 1), ("eta2", 1), ("g", 2)])
        .unwrap();
    let spec = SubmanifoldSpec::new(&chart, -1, &["x1", "x2"], &["y1"], &["xi1"], &["eta1", "eta2"]).unwrap();
    (chart, spec)
}

/// A split with no complement coordinates, where `ker P` is a subalgebra.
fn plain_split() -> SubmanifoldSpec {
    let chart = Chart::from_degrees(&[("x1", 0), ("y1", 0), ("y2", 0), ("xi1", 1), ("eta1", 1)]).unwrap();
    SubmanifoldSpec::new(&chart, -1, &["x1"], &["y1", "y2"], &["xi1"], &["eta1"]).unwrap()
}

fn homogeneous(r: &mut Rng8, chart: &Arc<Chart>, degree: Option<i64>) -> Mvf {
    random_homogeneous_mvf(r, chart, &Sampler::full(chart, 2, 2, 3), degree)
}

fn degree(z: &Mvf) -> i64 {
    z.shifted_degree().unwrap_or(0)
}

fn signed(flip: bool, z: Mvf) -> Mvf {
    if flip {
        -z
    } else {
        z
    }
}

fn datum(r: &mut Rng8, spec: &SubmanifoldSpec) -> DeformationDatum {
    let chart = spec.chart().clone();
    let x = spec.x().to_vec();
    let mut p = || random_gpoly(r, &chart, Some(&x), 2, 2);
    DeformationDatum { sigma: vec![p()], phi: vec![vec![p()], vec![p()]] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_graded_antisymmetric(seed in any::<u64>()) {
        let c = mixed_chart();
        let mut r = rng(seed);
        let (z, w) = (homogeneous(&mut r, &c, None), homogeneous(&mut r, &c, None));
        let flip = (degree(&z) * degree(&w)).rem_euclid(2) == 0;
        prop_assert_eq!(br(&z, &w), signed(flip, br(&w, &z)));
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>()) {
        let c = mixed_chart();
        let mut r = rng(seed);
        let (x, y, z) = (homogeneous(&mut r, &c, None), homogeneous(&mut r, &c, None), homogeneous(&mut r, &c, None));
        let flip = (degree(&x) * degree(&y)).rem_euclid(2) == 1;
        let rhs = &br(&br(&x, &y), &z) + &signed(flip, br(&y, &br(&x, &z)));
        prop_assert_eq!(br(&x, &br(&y, &z)), rhs);
    }

    #[test]
    fn bracket_is_a_derivation_of_the_wedge(seed in any::<u64>()) {
        let c = mixed_chart();
        let mut r = rng(seed);
        let (x, y, z) = (homogeneous(&mut r, &c, None), homogeneous(&mut r, &c, None), homogeneous(&mut r, &c, None));
        let flip = (degree(&x) * (degree(&y) + 1)).rem_euclid(2) == 1;
        let rhs = &(&br(&x, &y) * &z) + &signed(flip, &y * &br(&x, &z));
        prop_assert_eq!(br(&x, &(&y * &z)), rhs);
    }

    #[test]
    fn bracket_matches_rule_recursion(seed in any::<u64>()) {
        let c = mixed_chart();
        let mut r = rng(seed);
        let s = Sampler::full(&c, 2, 2, 3);
        let (z, w) = (random_mvf(&mut r, &c, &s), random_mvf(&mut r, &c, &s));
        prop_assert_eq!(br(&z, &w), common::sn_by_rules(&z, &w));
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>()) {
        let c = mixed_chart();
        let mut r = rng(seed);
        let z = random_mvf(&mut r, &c, &Sampler::full(&c, 3, 3, 4));
        prop_assert_eq!(parse_mvf(&c, &z.to_string()).unwrap(), z);
        let f = random_gpoly(&mut r, &c, None, 3, 4);
        prop_assert_eq!(parse_gpoly(&c, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn projection_restricts_to_identity(seed in any::<u64>()) {
        let (c, spec) = split();
        let mut r = rng(seed);
        let (functions, derivations) = spec.abelian_generators();
        let s = Sampler { functions, derivations, max_poly_degree: 2, max_multiplicity: 2, max_terms: 3 };
        let a = random_mvf(&mut r, &c, &s);
        prop_assert_eq!(build_p(&spec, &build_i(&spec, &a).unwrap()), a);
        prop_assert!(valgebra_check(&plain_split(), 4, &mut r).pass());
    }

    #[test]
    fn q_deformation_residual_is_half_square(seed in any::<u64>()) {
        let c = Chart::from_degrees(&[("x", 0), ("c1", 1), ("c2", 1)]).unwrap();
        let mut r = rng(seed);
        let c12 = &Mvf::function(&c, "c1").unwrap() * &Mvf::function(&c, "c2").unwrap();
        // the 2-dim non-abelian Lie algebra over a line, randomly deformed
        let q = (&c12 * &Mvf::deriv(&c, "c2").unwrap()).scale(&small_rational(&mut r));
        let qt = homogeneous(&mut r, &c, Some(1));
        let rep = q_deform_check(&QField::new(q).unwrap(), &qt).unwrap();
        prop_assert!(rep.consistent());
        prop_assert_eq!(rep.mc(), rep.homological());
    }

    #[test]
    fn flat_exactly_when_coisotropic(seed in any::<u64>()) {
        let (c, spec) = split();
        let mut r = rng(seed);
        let mut q = homogeneous(&mut r, &c, Some(1));
        if seed % 2 == 0 {
            q = &q - &build_p(&spec, &q);
        }
        let Ok(field) = QField::new(q.clone()) else { return Ok(()) };
        let rep = coisotropic_check(&field, &spec, &DeformationDatum::zero(&spec)).unwrap();
        prop_assert_eq!(rep.pass(), build_p(&spec, &q).is_zero());
    }

    #[test]
    fn maclaurin_is_multiplicative(seed in any::<u64>()) {
        let (c, spec) = split();
        let mut r = rng(seed);
        let d = datum(&mut r, &spec);
        let z1 = random_mvf(&mut r, &c, &Sampler::full(&c, 2, 2, 3));
        let names = ["x1", "x2", "y1", "xi1", "eta1", "eta2", "g"];
        let z2 = Mvf::deriv(&c, names[r.gen_range(0..names.len())]).unwrap();
        let h = |z: &Mvf| {
            let res = maclaurin_h(z, &d, &spec, TruncationOrder(spec.bound(z) as u32)).unwrap();
            assert!(!res.truncated());
            res.h
        };
        prop_assert_eq!(h(&(&z1 * &z2)), &h(&z1) * &h(&z2));
    }

    #[test]
    fn maclaurin_of_functions_is_restriction(seed in any::<u64>()) {
        let (c, spec) = split();
        let mut r = rng(seed);
        let d = datum(&mut r, &spec);
        let s = Sampler { functions: (0..c.len()).collect(), derivations: vec![], max_poly_degree: 3, max_multiplicity: 0, max_terms: 3 };
        let z = random_mvf(&mut r, &c, &s);
        let h = maclaurin_h(&z, &d, &spec, TruncationOrder(spec.bound(&z) as u32)).unwrap().h;
        let restricted = gradedq::mvf::restrict(&z, &d.locus(&spec)).unwrap();
        prop_assert_eq!(h, restricted);
    }
}

#[test]
fn zero_field_is_flat() {
    let (c, spec) = split();
    let q = QField::new(Mvf::zero(&c)).unwrap();
    assert!(coisotropic_check(&q, &spec, &DeformationDatum::zero(&spec)).unwrap().pass());
}

#[test]
fn complement_coordinates_break_the_kernel_subalgebra() {
    let (c, spec) = split();
    let dg = Mvf::deriv(&c, "g").unwrap();
    let b = &(&Mvf::function(&c, "xi1").unwrap() * &Mvf::function(&c, "g").unwrap()) * &Mvf::deriv(&c, "eta1").unwrap();
    assert!(build_p(&spec, &dg).is_zero() && build_p(&spec, &b).is_zero());
    let bracket = br(&dg, &b);
    assert_eq!(build_p(&spec, &bracket).to_string(), "xi1*d/deta1");
    assert_eq!(kernel_witness(&spec, &[dg, b]).map(|(x, _)| x.to_string()), Some("d/dg".to_string()));
}
