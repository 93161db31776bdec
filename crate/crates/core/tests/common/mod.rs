//! Independent oracles shared by the integration tests.
//!
//! Each oracle recomputes a library result by a different route: the
//! Schouten bracket by recursion over the Gerstenhaber rules, Jacobiators
//! by summing over all permutations, and the Dorfman bracket of
//! `TM ⊕ T*M` from the classical formula. The golden helpers run the
//! binary on the shipped example jobs.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use gradedq::courant::{CourantData, Section};
use gradedq::galg::{gp_partial_index, Chart, GPoly, Monomial};
use gradedq::linfty::{Family, GradedVector, StructureMaps};
use gradedq::mvf::Mvf;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn ratio(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

fn mono_field(chart: &Arc<Chart>, m: Monomial) -> Mvf {
    Mvf::from_terms(chart, [(m, BigRational::one())]).unwrap()
}

fn shifted(chart: &Arc<Chart>, m: &Monomial) -> i64 {
    Mvf::zero(chart).grading_of(m).shifted()
}

/// First factor of a monomial and the remaining monomial.
fn split_first(m: &Monomial) -> Option<(usize, Monomial)> {
    let e = m.exponents();
    let g = e.iter().position(|&k| k > 0)?;
    let mut rest = e.to_vec();
    rest[g] -= 1;
    Some((g, Monomial::from_exponents(rest)))
}

fn mono_bracket(chart: &Arc<Chart>, mz: &Monomial, mw: &Monomial) -> Mvf {
    let zero = Mvf::zero(chart);
    if mz.is_one() || mw.is_one() {
        return zero;
    }
    let n = chart.len();
    let (gw, rw) = split_first(mw).unwrap();
    if !rw.is_one() {
        // [Z, g r] = [Z, g] r + (-1)^{‖Z‖ |g|} g [Z, r], with g r = s · W
        let g = Monomial::generator(2 * n, gw);
        let gf = mono_field(chart, g.clone());
        let rf = mono_field(chart, rw.clone());
        let s = (&gf * &rf).coefficient(mw);
        assert!(!s.is_zero());
        let zs = shifted(chart, mz);
        let g_total = shifted(chart, &g) + 1;
        let first = &mono_bracket(chart, mz, &g) * &rf;
        let mut second = &gf * &mono_bracket(chart, mz, &rw);
        if (zs * g_total).rem_euclid(2) == 1 {
            second = -second;
        }
        return (&first + &second).scale(&s.recip());
    }
    let (gz, rz) = split_first(mz).unwrap();
    if !rz.is_one() {
        // [Z, W] = -(-1)^{‖Z‖‖W‖} [W, Z]
        let flip = (shifted(chart, mz) * shifted(chart, mw)).rem_euclid(2) == 1;
        let v = mono_bracket(chart, mw, mz);
        return if flip { v } else { -v };
    }
    // generators: [∂/∂u, u] = 1 and [u, ∂/∂u] = -1
    if gz == gw + n {
        Mvf::one(chart)
    } else if gw == gz + n {
        Mvf::one(chart).scale_int(-1)
    } else {
        zero
    }
}

/// Schouten bracket from the generator table, the Leibniz rule in the
/// second slot and graded antisymmetry.
pub fn sn_by_rules(z: &Mvf, w: &Mvf) -> Mvf {
    let chart = z.chart();
    let mut acc = Mvf::zero(chart);
    for (mz, cz) in z.terms() {
        for (mw, cw) in w.terms() {
            acc = &acc + &mono_bracket(chart, mz, mw).scale(&(cz * cw));
        }
    }
    acc
}

/// All permutations of `0..n` as image lists.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Koszul sign of `v_{σ(1)} ⋯ v_{σ(n)}` by counting odd inversions.
pub fn koszul(perm: &[usize], odd: &[bool]) -> i64 {
    let mut s = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && odd[perm[a]] && odd[perm[b]] {
                s = -s;
            }
        }
    }
    s
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// `Σ_j Σ_{σ ∈ S_n} e(σ)/(j!(n-j)!) outer(inner(v_σ(1..j)), v_σ(j+1..n))`.
pub fn composite_brute<S: StructureMaps>(s: &S, outer: Family, inner: Family, inputs: &[S::Elem]) -> S::Elem {
    let n = inputs.len();
    let odd: Vec<bool> = inputs
        .iter()
        .map(|v| v.degree().unwrap_or(0).rem_euclid(2) == 1)
        .collect();
    let mut acc = s.zero();
    for j in 0..=n {
        let weight = BigRational::new(1.into(), (factorial(j) * factorial(n - j)).into());
        for perm in permutations(n) {
            let args: Vec<S::Elem> = perm.iter().map(|&i| inputs[i].clone()).collect();
            let first = s.apply(inner, &args[..j]).unwrap();
            let mut outer_args = vec![first];
            outer_args.extend_from_slice(&args[j..]);
            let v = s.apply(outer, &outer_args).unwrap();
            acc = acc.add(&v.scale(&(&weight * ratio(koszul(&perm, &odd)))));
        }
    }
    acc
}

/// Classical Dorfman bracket `(X + α) ∘ (Y + β) = [X, Y] + L_X β - ι_Y dα`
/// on `TM ⊕ T*M`, with components given in the coordinate frame.
pub fn classical_dorfman(
    n: usize,
    x: &[GPoly],
    alpha: &[GPoly],
    y: &[GPoly],
    beta: &[GPoly],
) -> (Vec<GPoly>, Vec<GPoly>) {
    let chart = x[0].chart().clone();
    let d = |f: &GPoly, j: usize| gp_partial_index(f, j);
    let mut vec_part = vec![GPoly::zero(&chart); n];
    let mut form_part = vec![GPoly::zero(&chart); n];
    for i in 0..n {
        for j in 0..n {
            vec_part[i] = &(&vec_part[i] + &(&x[j] * &d(&y[i], j))) - &(&y[j] * &d(&x[i], j));
            let lie = &(&x[j] * &d(&beta[i], j)) + &(&beta[j] * &d(&x[j], i));
            let contraction = &y[j] * &(&d(&alpha[i], j) - &d(&alpha[j], i));
            form_part[i] = &(&form_part[i] + &lie) - &contraction;
        }
    }
    (vec_part, form_part)
}

/// Section `X + α` of the standard model, `ξ^i ↔ ∂_i` and `ξ^{n+i} ↔ dq^i`.
pub fn standard_section(data: &CourantData, x: &[GPoly], alpha: &[GPoly]) -> Section {
    let comps: Vec<GPoly> = x.iter().chain(alpha).cloned().collect();
    Section::from_components(data, &comps)
}

pub fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("jobs")
}

/// Runs the `gradedq` binary; returns exit code, stdout and stderr.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gradedq")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Runs one example job; returns whether stdout and JSON match the goldens.
pub fn golden_matches(name: &str, code: i32) -> bool {
    let dir = jobs_dir();
    let job = dir.join(format!("{name}.toml"));
    let json = std::env::temp_dir().join(format!("gradedq-{name}-{}.json", std::process::id()));
    let (got, stdout, _) = run_cli(&["--job", job.to_str().unwrap(), "--machine-out", json.to_str().unwrap()]);
    let machine = std::fs::read_to_string(&json).unwrap();
    let _ = std::fs::remove_file(&json);
    let txt_path = dir.join("golden").join(format!("{name}.txt"));
    let json_path = dir.join("golden").join(format!("{name}.json"));
    if std::env::var_os("GRADEDQ_BLESS").is_some() {
        std::fs::write(&txt_path, &stdout).unwrap();
        std::fs::write(&json_path, &machine).unwrap();
    }
    got == code
        && stdout == std::fs::read_to_string(txt_path).unwrap()
        && machine == std::fs::read_to_string(json_path).unwrap()
}

