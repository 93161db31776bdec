//! Library results against the independent oracles in `common`.

mod common;

use std::sync::Arc;

use gradedq::courant::CourantData;
use gradedq::galg::{Chart, GPoly};
use gradedq::linfty::{jacobiator_of, shuffle_composite, Family};
use gradedq::mvf::{br, Mvf};
use gradedq::qgeom::SubmanifoldSpec;
use gradedq::random::{random_gpoly, random_homogeneous_mvf, random_mvf, rng, Rng8, Sampler};
use gradedq::vderive::{DerivedFamily, VSplit};
use rand::Rng;

fn mixed_chart() -> Arc<Chart> {
    Chart::from_degrees(&[("x", 0), ("y", 0), ("a", 1), ("b", 1), ("c", 2)]).unwrap()
}

#[test]
fn schouten_bracket_matches_rule_recursion() {
    let chart = mixed_chart();
    let s = Sampler::full(&chart, 2, 2, 3);
    let mut r = rng(11);
    for _ in 0..150 {
        let z = random_mvf(&mut r, &chart, &s);
        let w = random_mvf(&mut r, &chart, &s);
        assert_eq!(br(&z, &w), common::sn_by_rules(&z, &w), "[{z}, {w}]");
    }
}

fn derived_setup() -> (Arc<Chart>, SubmanifoldSpec) {
    let chart = Chart::from_degrees(&[("x", 0), ("y", 0), ("xi", 1), ("eta", 1), ("g", 2)]).unwrap();
    let spec = SubmanifoldSpec::new(&chart, -1, &["x"], &["y"], &["xi"], &["eta"]).unwrap();
    (chart, spec)
}

fn abelian_sample(r: &mut Rng8, spec: &SubmanifoldSpec) -> Mvf {
    let (functions, derivations) = spec.abelian_generators();
    let s = Sampler { functions, derivations, max_poly_degree: 2, max_multiplicity: 2, max_terms: 2 };
    loop {
        let v = random_homogeneous_mvf(r, spec.chart(), &s, None);
        if spec.contains(&v) {
            return v;
        }
    }
}

#[test]
fn jacobiators_match_permutation_sums() {
    let (chart, spec) = derived_setup();
    let s = Sampler::full(&chart, 2, 2, 3);
    let mut r = rng(5);
    for _ in 0..40 {
        let mut delta = random_homogeneous_mvf(&mut r, &chart, &s, Some(1));
        delta = &delta + &random_homogeneous_mvf(&mut r, &chart, &s, Some(-1));
        let fam = DerivedFamily::new(delta, spec.clone());
        let n = r.gen_range(1..=3);
        let inputs: Vec<Mvf> = (0..n).map(|_| abelian_sample(&mut r, &spec)).collect();
        for family in [Family::Positive, Family::Negative] {
            assert_eq!(
                jacobiator_of(&fam, family, &inputs).unwrap(),
                common::composite_brute(&fam, family, family, &inputs)
            );
        }
        assert_eq!(
            shuffle_composite(&fam, Family::Positive, Family::Negative, &inputs).unwrap(),
            common::composite_brute(&fam, Family::Positive, Family::Negative, &inputs)
        );
    }
}

#[test]
fn dorfman_bracket_matches_classical_formula() {
    for n in 1..=3 {
        let data = CourantData::standard(n);
        let chart = data.chart().clone();
        let base: Vec<usize> = (0..n).collect();
        let mut r = rng(n as u64);
        let poly = |r: &mut Rng8| -> Vec<GPoly> {
            (0..n).map(|_| random_gpoly(r, &chart, Some(&base), 2, 2)).collect()
        };
        for _ in 0..20 {
            let (x, alpha, y, beta) = (poly(&mut r), poly(&mut r), poly(&mut r), poly(&mut r));
            let e1 = common::standard_section(&data, &x, &alpha);
            let e2 = common::standard_section(&data, &y, &beta);
            let (v, f) = common::classical_dorfman(n, &x, &alpha, &y, &beta);
            assert_eq!(data.dorfman(&e1, &e2), common::standard_section(&data, &v, &f));
        }
    }
}

#[test]
fn permutation_oracle_counts() {
    assert_eq!(common::permutations(4).len(), 24);
    assert_eq!(common::koszul(&[1, 0], &[true, true]), -1);
    assert_eq!(common::koszul(&[1, 0], &[true, false]), 1);
}
