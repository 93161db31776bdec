//! Builds domain objects from a job file and runs the requested checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::expr::{parse_gpoly, parse_mvf};
use super::job::{CourantSpec, JobFile};
use super::report::{CheckReport, Report};
use crate::courant::{
    courant_axioms_check, courant_chart, dirac_check, dirac_deform_check, standard_pairing, CourantData,
    DiracCandidate,
};
use crate::error::{Error, Result};
use crate::galg::{Chart, GPoly, GenKind, Generator, TruncationOrder};
use crate::linfty::{jacobiator_of, Family, StructureMaps};
use crate::mvf::Mvf;
use crate::qgeom::{
    coiso_deform_check, coisotropic_check, default_truncation, is_homological, q_deform_check,
    simul_deform_check, DeformationDatum, QField, SubmanifoldSpec,
};
use crate::random::rng;
use crate::vderive::DerivedFamily;

/// Command-line overrides of job settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub checks: Option<Vec<String>>,
    pub truncation: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

struct Ctx {
    chart: Option<Arc<Chart>>,
    q: Option<Mvf>,
    qt: Option<Mvf>,
    spec: Option<SubmanifoldSpec>,
    datum: Option<DeformationDatum>,
    truncation: Option<u32>,
    seed: u64,
    samples: usize,
}

fn build_chart(job: &JobFile) -> Result<Option<Arc<Chart>>> {
    let Some(spec) = &job.chart else { return Ok(None) };
    let gens = spec
        .generators
        .iter()
        .map(|g| {
            if g.degree < 0 {
                return Err(Error::InvalidChart(format!("`{}` has negative degree", g.name)));
            }
            let kind = if g.degree == 0 { GenKind::Base } else { GenKind::Fiber };
            Ok(Generator { name: g.name.clone(), degree: g.degree, kind })
        })
        .collect::<Result<Vec<_>>>()?;
    Chart::new(gens).map(Some)
}

fn matrix(chart: &Arc<Chart>, m: &[Vec<String>]) -> Result<Vec<Vec<GPoly>>> {
    m.iter()
        .map(|row| row.iter().map(|e| parse_gpoly(chart, e)).collect())
        .collect()
}

fn names(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Parses every expression of the job before any check runs.
fn prepare(job: &JobFile, o: &Overrides) -> Result<(Ctx, Option<(CourantData, Option<DiracCandidate>)>)> {
    let chart = build_chart(job)?;
    let mut ctx = Ctx {
        chart: chart.clone(),
        q: None,
        qt: None,
        spec: None,
        datum: None,
        truncation: o.truncation.or(job.truncation),
        seed: o.seed.or(job.seed).unwrap_or(0),
        samples: o.samples.or(job.samples).unwrap_or(20),
    };
    if let Some(c) = &chart {
        ctx.q = job.q.as_deref().map(|s| parse_mvf(c, s)).transpose()?;
        ctx.qt = job.qt.as_deref().map(|s| parse_mvf(c, s)).transpose()?;
        if let Some(s) = &job.submanifold {
            let spec = SubmanifoldSpec::new(c, s.k0, &names(&s.x), &names(&s.y), &names(&s.xi), &names(&s.eta))?;
            if let Some(d) = &job.deformation {
                let datum = DeformationDatum {
                    sigma: d.sigma.iter().map(|e| parse_gpoly(c, e)).collect::<Result<_>>()?,
                    phi: matrix(c, &d.phi)?,
                };
                datum.validate(&spec)?;
                ctx.datum = Some(datum);
            }
            ctx.spec = Some(spec);
        }
    }
    let courant = match &job.courant {
        None => None,
        Some(cs) => {
            let data = build_courant(cs)?;
            let cand = match &job.dirac {
                None => None,
                Some(d) => Some(DiracCandidate {
                    frame: d.frame.as_ref().map(|m| matrix(data.chart(), m)).transpose()?,
                    phi: d.phi.as_ref().map(|m| matrix(data.chart(), m)).transpose()?,
                }),
            };
            Some((data, cand))
        }
    };
    Ok((ctx, courant))
}

fn build_courant(cs: &CourantSpec) -> Result<CourantData> {
    let (n, rank) = match cs.standard {
        Some(n) => (n, 2 * n),
        None => match (cs.n_base, cs.rank) {
            (Some(n), Some(r)) => (n, r),
            _ => return Err(Error::Schema("`[courant]` needs `standard` or both `n_base` and `rank`".into())),
        },
    };
    let chart = courant_chart(n, rank);
    let g = match &cs.g {
        Some(g) => matrix(&chart, g)?,
        None if cs.standard.is_some() => standard_pairing(&chart, n),
        None => return Err(Error::Schema("`[courant]` needs a pairing `g`".into())),
    };
    let f = match &cs.f {
        Some(f) => matrix(&chart, f)?,
        None if cs.standard.is_some() => CourantData::standard(n).anchor_coefficients().to_vec(),
        None => vec![vec![GPoly::zero(&chart); n]; rank],
    };
    let h = cs
        .h
        .iter()
        .map(|e| Ok((e.index, parse_gpoly(&chart, &e.value)?)))
        .collect::<Result<Vec<_>>>()?;
    CourantData::new(&chart, g, f, h)
}

fn need<'a, T>(v: &'a Option<T>, what: &str, check: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Schema(format!("check `{check}` needs {what}")))
}

fn check_q(ctx: &Ctx) -> Result<CheckReport> {
    let q = QField::new(need(&ctx.q, "`q`", "q")?.clone())?;
    let mut r = CheckReport::new();
    let h = is_homological(&q);
    r.line("[Q,Q]", &h.square);
    r.line("[Q+,Q+]", &h.plus_plus);
    r.line("2[Q+,Q-]", &h.mixed);
    r.line("[Q-,Q-]", &h.minus_minus);
    r.verdict("homological", h.homological());
    if let (Some(qt), true) = (&ctx.qt, h.homological()) {
        let d = q_deform_check(&q, qt)?;
        r.line("mc residual", &d.residual);
        r.line("mc residual at +2", &d.components[0]);
        r.line("mc residual at 0", &d.components[1]);
        r.line("mc residual at -2", &d.components[2]);
        r.verdict("deformed field homological", d.homological());
        r.invariant("mc residual equals half square of Q+Qt", d.consistent());
    }
    Ok(r)
}

fn check_derived(ctx: &Ctx, job: &JobFile) -> Result<CheckReport> {
    let q = need(&ctx.q, "`q`", "derived")?.clone();
    let spec = need(&ctx.spec, "`[submanifold]`", "derived")?.clone();
    let d = need(&job.derived, "`[derived]`", "derived")?;
    let chart = ctx.chart.as_ref().expect("chart present with q");
    let basis = d.basis.iter().map(|e| parse_mvf(chart, e)).collect::<Result<Vec<_>>>()?;
    let homological = is_homological(&QField::new(q.clone())?).homological();
    let fam = DerivedFamily::new(q, spec);
    let mut r = CheckReport::new();
    for (i, b) in basis.iter().enumerate() {
        r.line(format!("b{}", i + 1), b);
    }
    r.line("arity bound", fam.vanishing_bound(&Mvf::zero(chart)).map_or("none".into(), |b| b.to_string()));
    let mut jac_ok = true;
    for k in 0..=d.max_arity {
        for tuple in crate::qgeom::nondecreasing_tuples(basis.len(), k) {
            let args: Vec<Mvf> = tuple.iter().map(|&i| basis[i].clone()).collect();
            let label = tuple.iter().map(|i| format!("b{}", i + 1)).collect::<Vec<_>>().join(",");
            for (fname, family) in [("m", Family::Positive), ("n", Family::Negative)] {
                let v = fam.apply(family, &args)?;
                if !v.is_zero() {
                    r.line(format!("{fname}_{k}({label})"), &v);
                }
            }
            if homological && (1..=3).contains(&k) {
                for family in [Family::Positive, Family::Negative] {
                    jac_ok &= jacobiator_of(&fam, family, &args)?.is_zero();
                }
            }
        }
    }
    r.line("Q homological", homological);
    if homological {
        r.invariant("Jacobiators up to arity 3 vanish on the basis", jac_ok);
    }
    Ok(r)
}

fn check_coiso(ctx: &Ctx) -> Result<CheckReport> {
    let q = QField::new(need(&ctx.q, "`q`", "coiso")?.clone())?;
    let spec = need(&ctx.spec, "`[submanifold]`", "coiso")?;
    let mut r = CheckReport::new();
    let zero = DeformationDatum::zero(spec);
    let base = coisotropic_check(&q, spec, &zero)?;
    for (k, v) in base.failures() {
        r.line(format!("undeformed {k}"), v);
    }
    r.verdict("undeformed coisotropic", base.pass());
    let order = TruncationOrder(ctx.truncation.unwrap_or_else(|| default_truncation(q.field(), spec).get() as u32));
    r.line("truncation order", order.get());
    if let Some(d) = &ctx.datum {
        let rep = coiso_deform_check(&q, spec, d, order)?;
        r.line("-(sigma,phi)", -d.x_a(spec));
        r.line("mc residual", &rep.mc.residual);
        r.line("nesting bound", rep.mc.bound.map_or("none".into(), |b| b.to_string()));
        r.line("truncation active", rep.mc.truncated);
        for (k, v) in rep.coiso.failures() {
            r.line(format!("graph {k}"), v);
        }
        r.verdict("graph coisotropic", rep.coiso.pass());
        r.verdict("maurer-cartan", rep.mc());
        r.invariant("maurer-cartan iff graph coisotropic", rep.consistent());
        if let Some(qt) = &ctx.qt {
            if q.negative().is_zero() {
                let s = simul_deform_check(&q, qt, spec, d, order)?;
                r.line("simultaneous mc residual", format!("({}, {})", s.mc.residual.v, s.mc.residual.a));
                r.verdict("simultaneous maurer-cartan", s.mc());
                r.invariant("simultaneous mc iff deformed pair is coisotropic", s.consistent());
            }
        }
    }
    Ok(r)
}

fn check_courant(ctx: &Ctx, data: &CourantData, cand: Option<&DiracCandidate>) -> Result<CheckReport> {
    let mut r = CheckReport::new();
    r.line("theta", data.theta());
    r.line("pi", data.pi());
    r.line("X_theta", data.x_theta());
    let rep = courant_axioms_check(data, ctx.samples, &mut rng(ctx.seed));
    r.line("{theta,theta}", &rep.theta_theta);
    for (i, f) in rep.axiom_failures.iter().enumerate() {
        r.line(format!("axiom {} instances", i + 1), rep.tested[i]);
        if let Some(f) = f {
            r.line(format!("axiom {} witness", i + 1), f);
        }
    }
    r.verdict("{theta,theta} = 0", rep.theta_closed());
    r.verdict("axioms", rep.axioms());
    r.verdict("pi + X_theta homological", rep.homological.homological());
    r.invariant("three-way agreement", rep.consistent());
    if rep.pass() {
        r.invariant("remark properties", rep.remark_failures.is_empty());
    }
    if let Some(cand) = cand {
        let base = DiracCandidate { frame: cand.frame.clone(), phi: None };
        let d = dirac_check(data, &base)?;
        for w in d.isotropy.iter().chain(&d.eq_first).chain(&d.eq_second) {
            r.line("dirac witness", w);
        }
        r.verdict("isotropic", d.isotropic());
        r.verdict("conormal annihilated by X_theta", d.first());
        r.verdict("closed under the Dorfman bracket", d.second());
        r.verdict("coisotropic type for pi + X_theta", d.coiso.pass());
        r.invariant("dirac sub-verdicts agree", d.consistent());
        if cand.phi.is_some() && d.dirac() {
            let dd = dirac_deform_check(data, cand, ctx.truncation.map(TruncationOrder))?;
            for w in dd.dirac.isotropy.iter().chain(&dd.dirac.eq_first).chain(&dd.dirac.eq_second) {
                r.line("graph witness", w);
            }
            r.line("mc residual of -phi", &dd.mc.residual);
            r.line("exact", dd.exact());
            r.verdict("graph dirac", dd.dirac.dirac());
            r.verdict("maurer-cartan", dd.mc());
            r.verdict("maurer-cartan matches dirac", dd.agree());
            r.invariant("maurer-cartan matches fixed-chart check", dd.consistent());
        }
    }
    Ok(r)
}

/// Runs a parsed job. Errors are input errors (exit code 2).
pub fn run_job(job: &JobFile, o: &Overrides) -> Result<Report> {
    let checks = o.checks.clone().unwrap_or_else(|| job.default_checks());
    for c in &checks {
        if !super::job::CHECKS.contains(&c.as_str()) {
            return Err(Error::Schema(format!("unknown check `{c}`")));
        }
    }
    let (ctx, courant) = prepare(job, o)?;
    let mut out = BTreeMap::new();
    for c in &checks {
        let rep = match c.as_str() {
            "q" => check_q(&ctx)?,
            "derived" => check_derived(&ctx, job)?,
            "coiso" => check_coiso(&ctx)?,
            "courant" => {
                let (data, cand) = need(&courant, "a `[courant]` block", "courant")?;
                check_courant(&ctx, data, cand.as_ref())?
            }
            _ => unreachable!("validated above"),
        };
        out.insert(c.clone(), rep);
    }
    Ok(Report {
        job: job.name.clone().unwrap_or_else(|| "unnamed".into()),
        seed: ctx.seed,
        samples: ctx.samples,
        checks: out,
    })
}
