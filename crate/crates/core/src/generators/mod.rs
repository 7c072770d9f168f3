//! Dependent data-generating processes.
//!
//! Four families produce rows with Unif[0,1] marginals in every coordinate:
//! i.i.d. uniform, a linear Gaussian state-space model with a shared AR(1)
//! factor, per-coordinate two-state hidden Markov chains with Gaussian
//! emissions, and a stationary Gaussian process with RBF covariance sampled
//! by circulant embedding. A fifth family, the latent Gaussian AR(1), feeds
//! the entropy experiment and keeps its raw N(0, I_s) marginals.
//!
//! Every coordinate draws from its own stream derived from the row seed, so
//! a row is a pure function of its [`SequenceSpec`].

mod gp;
mod hmm;
mod latent;
mod lss;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

pub use gp::{circulant_embedding, gen_gp_fft, rbf_kernel, CirculantEmbedding, MAX_EMBEDDING_ERROR};
pub use hmm::{gen_hmm, hmm_mixture_cdf, hmm_separation, HMM_MU, HMM_SIGMA};
pub use latent::{embed_ambient, gen_latent_ar1, orthonormal_map, AMBIENT_DIM, SIGNAL_DIM};
pub use lss::{gen_lss, lss_loading, LSS_DAMPING, LSS_SCALE};

use crate::csvfmt::{Cell, Table};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::rng::{self, StreamRng};

/// Burn-in for the state-space and HMM families.
pub const BURN_IN_MIXING: usize = 400;
/// Burn-in for the latent AR(1) process.
pub const BURN_IN_LATENT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    IidUniform,
    Lss,
    Hmm,
    GpFft,
    LatentAr1,
}

impl Family {
    pub const DEPENDENT: [Family; 3] = [Family::Lss, Family::Hmm, Family::GpFft];

    pub fn name(self) -> &'static str {
        match self {
            Family::IidUniform => "iid_uniform",
            Family::Lss => "lss",
            Family::Hmm => "hmm",
            Family::GpFft => "gp_fft",
            Family::LatentAr1 => "latent_ar1",
        }
    }

    pub fn default_burn_in(self) -> usize {
        match self {
            Family::Lss | Family::Hmm => BURN_IN_MIXING,
            Family::LatentAr1 => BURN_IN_LATENT,
            Family::IidUniform | Family::GpFft => 0,
        }
    }

    /// True when output coordinates are Unif[0,1].
    pub fn is_uniform_marginal(self) -> bool {
        !matches!(self, Family::LatentAr1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iid_uniform" | "iid" => Ok(Family::IidUniform),
            "lss" => Ok(Family::Lss),
            "hmm" => Ok(Family::Hmm),
            "gp_fft" | "gp" => Ok(Family::GpFft),
            "latent_ar1" => Ok(Family::LatentAr1),
            other => Err(Error::Parameter(format!(
                "unknown family `{other}` (expected iid_uniform, lss, hmm, gp_fft, latent_ar1)"
            ))),
        }
    }
}

/// Dependence strength: a named level or an explicit tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Weak,
    Medium,
    Strong,
    Value(f64),
}

impl Strength {
    pub const LEVELS: [Strength; 3] = [Strength::Weak, Strength::Medium, Strength::Strong];

    pub fn label(self) -> String {
        match self {
            Strength::Weak => "weak".into(),
            Strength::Medium => "medium".into(),
            Strength::Strong => "strong".into(),
            Strength::Value(v) => crate::csvfmt::fmt_g17(v),
        }
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Strength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weak" => Ok(Strength::Weak),
            "medium" => Ok(Strength::Medium),
            "strong" => Ok(Strength::Strong),
            other => other
                .parse::<f64>()
                .map(Strength::Value)
                .map_err(|_| Error::Parameter(format!("unknown strength `{other}`"))),
        }
    }
}

/// Resolves a strength to the family's tuning parameter.
///
/// | family | parameter | weak | medium | strong |
/// |---|---|---|---|---|
/// | lss | AR coefficient ρ | 0.02 | 0.60 | 0.98 |
/// | hmm | stay probability | 0.70 | 0.99 | 0.9995 |
/// | gp_fft | lengthscale ℓ | 1 | 50 | 200 |
/// | latent_ar1 | AR coefficient ρ | 0.3 | n/a | 0.6 |
pub fn strength_parameter(family: Family, strength: Strength) -> Result<f64> {
    use Strength::*;
    let v = match (family, strength) {
        (_, Value(v)) => v,
        (Family::IidUniform, _) => 0.0,
        (Family::Lss, Weak) => 0.02,
        (Family::Lss, Medium) => 0.60,
        (Family::Lss, Strong) => 0.98,
        (Family::Hmm, Weak) => 0.70,
        (Family::Hmm, Medium) => 0.99,
        (Family::Hmm, Strong) => 0.9995,
        (Family::GpFft, Weak) => 1.0,
        (Family::GpFft, Medium) => 50.0,
        (Family::GpFft, Strong) => 200.0,
        (Family::LatentAr1, Weak) => 0.3,
        (Family::LatentAr1, Strong) => 0.6,
        (Family::LatentAr1, Medium) => {
            return Err(Error::Parameter(
                "latent_ar1 has no medium level; pass an explicit rho".into(),
            ))
        }
    };
    Ok(v)
}

/// Full description of one generated row.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub family: Family,
    pub strength: Strength,
    pub d: usize,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl SequenceSpec {
    /// Spec with the family's default burn-in.
    pub fn new(family: Family, strength: Strength, d: usize, n: usize, seed: u64) -> Self {
        Self {
            family,
            strength,
            d,
            n,
            burn_in: family.default_burn_in(),
            seed,
        }
    }

    pub fn iid(d: usize, n: usize, seed: u64) -> Self {
        Self::new(Family::IidUniform, Strength::Value(0.0), d, n, seed)
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn parameter(&self) -> Result<f64> {
        strength_parameter(self.family, self.strength)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Parameter("dimension d must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Parameter("sample size n must be positive".into()));
        }
        Ok(())
    }

    /// Independent stream for coordinate `j` (or another sub-stream `tag`).
    pub(crate) fn stream(&self, tag: &str, j: usize) -> StreamRng {
        rng::stream(self.seed, tag, j as u64, 0)
    }
}

/// One row `X_{n,1}, …, X_{n,n}` together with the `SequenceSpec` that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedRow {
    pub data: PointSet,
    /// Pre-transform Gaussian values for lss, hmm and gp_fft.
    pub gaussian: Option<PointSet>,
    pub spec: SequenceSpec,
}

impl GeneratedRow {
    /// CSV with header `t,x1..xd`, one row per time index.
    pub fn to_table(&self) -> Table {
        let d = self.data.dim();
        let mut t = Table::new(std::iter::once("t".to_string()).chain((1..=d).map(|j| format!("x{j}"))));
        for (i, p) in self.data.iter().enumerate() {
            let mut row: Vec<Cell> = Vec::with_capacity(d + 1);
            row.push(i.into());
            row.extend(p.iter().map(|&v| Cell::Num(v)));
            t.push(row);
        }
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_table().write(path)
    }
}

/// Dispatches on `spec.family`.
pub fn generate(spec: &SequenceSpec) -> Result<GeneratedRow> {
    match spec.family {
        Family::IidUniform => gen_iid_uniform(spec),
        Family::Lss => gen_lss(spec),
        Family::Hmm => gen_hmm(spec),
        Family::GpFft => gen_gp_fft(spec),
        Family::LatentAr1 => gen_latent_ar1(spec),
    }
}

/// `n` i.i.d. Unif[0,1]^d vectors.
pub fn gen_iid_uniform(spec: &SequenceSpec) -> Result<GeneratedRow> {
    expect_family(spec, Family::IidUniform)?;
    spec.validate()?;
    let columns: Vec<Vec<f64>> = (0..spec.d)
        .map(|j| {
            let mut rng = spec.stream("coordinate", j);
            (0..spec.n).map(|_| rng.random::<f64>()).collect()
        })
        .collect();
    Ok(GeneratedRow {
        data: interleave(&columns)?,
        gaussian: None,
        spec: spec.clone(),
    })
}

pub(crate) fn expect_family(spec: &SequenceSpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::Parameter(format!(
            "expected a {family} spec, got {}",
            spec.family
        )));
    }
    Ok(())
}

pub(crate) fn normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Column vectors to a row-major point set.
pub(crate) fn interleave(columns: &[Vec<f64>]) -> Result<PointSet> {
    let d = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(n * d);
    for t in 0..n {
        for col in columns {
            data.push(col[t]);
        }
    }
    PointSet::new(data, d)
}
