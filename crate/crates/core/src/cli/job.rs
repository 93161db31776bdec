//! Job file schema (TOML, `schema = 1`).

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub schema: u32,
    pub name: Option<String>,
    #[serde(default)]
    pub checks: Vec<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub truncation: Option<u32>,
    pub chart: Option<ChartSpec>,
    /// The homological field `Q`.
    pub q: Option<String>,
    /// A deformation `Q̃` of `Q`.
    pub qt: Option<String>,
    pub submanifold: Option<SubmanifoldSpecFile>,
    pub deformation: Option<DeformationSpec>,
    pub derived: Option<DerivedSpec>,
    pub courant: Option<CourantSpec>,
    pub dirac: Option<DiracSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// `0` for base coordinates, positive for fiber coordinates.
    pub degree: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmanifoldSpecFile {
    pub k0: i64,
    #[serde(default)]
    pub x: Vec<String>,
    #[serde(default)]
    pub y: Vec<String>,
    #[serde(default)]
    pub xi: Vec<String>,
    #[serde(default)]
    pub eta: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationSpec {
    #[serde(default)]
    pub sigma: Vec<String>,
    #[serde(default)]
    pub phi: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivedSpec {
    pub basis: Vec<String>,
    #[serde(default = "default_arity")]
    pub max_arity: usize,
}

fn default_arity() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourantSpec {
    /// Dimension of the base for `TM ⊕ T*M`; supplies default `g` and `f`.
    pub standard: Option<usize>,
    pub n_base: Option<usize>,
    pub rank: Option<usize>,
    pub g: Option<Vec<Vec<String>>>,
    pub f: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub h: Vec<HEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HEntry {
    /// One-based frame indices.
    pub index: [usize; 3],
    pub value: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSpec {
    pub frame: Option<Vec<Vec<String>>>,
    pub phi: Option<Vec<Vec<String>>>,
}

pub const CHECKS: [&str; 4] = ["coiso", "courant", "derived", "q"];

impl JobFile {
    pub fn parse(src: &str) -> Result<Self> {
        let job: JobFile = toml::from_str(src).map_err(|e| Error::Schema(e.to_string().trim().to_string()))?;
        if job.schema != 1 {
            return Err(Error::Schema(format!("unsupported schema version {}", job.schema)));
        }
        for c in &job.checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(Error::Schema(format!("unknown check `{c}`")));
            }
        }
        if job.chart.is_none() && (job.q.is_some() || job.submanifold.is_some()) {
            return Err(Error::Schema("`q` and `[submanifold]` need a `[chart]`".into()));
        }
        if job.courant.is_none() && job.dirac.is_some() {
            return Err(Error::Schema("`[dirac]` needs a `[courant]` block".into()));
        }
        Ok(job)
    }

    /// Checks requested by the job, or implied by the blocks it declares.
    pub fn default_checks(&self) -> Vec<String> {
        if !self.checks.is_empty() {
            return self.checks.clone();
        }
        let mut out = Vec::new();
        if self.submanifold.is_some() {
            out.push("coiso".to_string());
        }
        if self.courant.is_some() {
            out.push("courant".to_string());
        }
        if self.derived.is_some() {
            out.push("derived".to_string());
        }
        if self.q.is_some() {
            out.push("q".to_string());
        }
        out
    }
}
