//! Entropy of a latent AR(1) signal observed through a 20-dimensional
//! linear embedding: oracle estimate on the latent sample versus the
//! estimate on the top PCA coordinates.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{CellSeeds, RunConfig, RunOutput};
use crate::config::{ConfigDoc, Profile, Resolved};
use crate::csvfmt::Table;
use crate::error::{Error, Result};
use crate::estimators::{kl_entropy, pca_fit, pca_project, EntropyReport};
use crate::generators::{embed_ambient, generate, Family, SequenceSpec, Strength, BURN_IN_LATENT, SIGNAL_DIM};
use crate::rng;
use crate::special::gaussian_entropy;
use crate::stats::mean_sd;

#[derive(Debug, Clone, PartialEq)]
pub struct Exp2Config {
    pub s_list: Vec<usize>,
    pub rho_list: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    /// `k = max(k_min, ⌈n^k_exponent⌉)`.
    pub k_min: usize,
    pub k_exponent: f64,
    pub burn_in: usize,
    pub pca_q: usize,
    pub seed: u64,
}

impl Exp2Config {
    pub fn defaults(profile: Profile, seed: u64) -> Self {
        Self {
            s_list: vec![1, 3, 5],
            rho_list: vec![0.0, 0.3, 0.6],
            n_grid: vec![512, 1024, 2048, 4096],
            reps: match profile {
                Profile::Desk => 50,
                Profile::Full => 1000,
            },
            k_min: 2,
            k_exponent: 0.1,
            burn_in: BURN_IN_LATENT,
            pca_q: SIGNAL_DIM,
            seed,
        }
    }

    pub fn k_for(&self, n: usize) -> usize {
        self.k_min.max((n as f64).powf(self.k_exponent).ceil() as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.s_list.is_empty() || self.rho_list.is_empty() || self.n_grid.is_empty() {
            return Err(Error::config("exp2", "s_list, rho_list and n_grid must be nonempty"));
        }
        if !(1..=SIGNAL_DIM).contains(&self.pca_q) {
            return Err(Error::config("exp2.pca_q", format!("must lie in 1..={SIGNAL_DIM}")));
        }
        if let Some(s) = self.s_list.iter().find(|&&s| s == 0 || s > self.pca_q) {
            return Err(Error::config("exp2.s_list", format!("s = {s} outside 1..={}", self.pca_q)));
        }
        if let Some(r) = self.rho_list.iter().find(|r| !(r.abs() < 1.0)) {
            return Err(Error::config("exp2.rho_list", format!("|rho| must be < 1, got {r}")));
        }
        if self.reps == 0 || self.k_min == 0 {
            return Err(Error::config("exp2", "reps and k_min must be positive"));
        }
        for &n in &self.n_grid {
            if self.k_for(n) >= n {
                return Err(Error::config("exp2.n_grid", format!("n = {n} too small for k = {}", self.k_for(n))));
            }
        }
        Ok(())
    }
}

/// Averages over replications for one `(s, ρ, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp2Row {
    pub s: usize,
    pub rho: f64,
    pub n: usize,
    pub k: usize,
    pub reps_ok: usize,
    pub failures: usize,
    pub h_true: f64,
    pub h_oracle_mean: f64,
    pub h_pca_mean: f64,
    pub sd_oracle: f64,
    pub sd_pca: f64,
}

fn one_replication(cfg: &Exp2Config, s: usize, rho: f64, n: usize, k: usize, cell: u64, rep: usize) -> Result<EntropyReport> {
    let spec = SequenceSpec {
        burn_in: cfg.burn_in,
        ..SequenceSpec::new(
            Family::LatentAr1,
            Strength::Value(rho),
            s,
            n,
            rng::derive_seed(cfg.seed, "exp2", cell, rep as u64),
        )
    };
    let latent = generate(&spec)?;
    // One fixed embedding for the whole experiment.
    let ambient = embed_ambient(&latent, s, cfg.seed)?;
    let model = pca_fit(&ambient.data, cfg.pca_q)?;
    let coords = pca_project(&model, &ambient.data, s)?;
    let oracle = kl_entropy(&latent.data, k, s)?;
    let pca = kl_entropy(&coords, k, s)?;
    Ok(EntropyReport::new(oracle, pca, s, rho, n, k))
}

pub fn run_exp2(cfg: &Exp2Config) -> Result<(Vec<Exp2Row>, CellSeeds)> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut seeds = Vec::new();
    for &s in &cfg.s_list {
        for &rho in &cfg.rho_list {
            for &n in &cfg.n_grid {
                let k = cfg.k_for(n);
                let label = format!("exp2/s{s}/rho{}/n{n}", crate::csvfmt::fmt_g17(rho));
                let cell = rng::cell_id(&label);
                seeds.push((label, rng::derive_seed(cfg.seed, "exp2", cell, 0)));
                let results: Vec<Result<EntropyReport>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|r| one_replication(cfg, s, rho, n, k, cell, r))
                    .collect();
                let mut ok = Vec::new();
                let mut failures = 0;
                for (r, res) in results.into_iter().enumerate() {
                    match res {
                        Ok(rep) => ok.push(rep),
                        Err(e @ Error::Degenerate(_)) => {
                            log::warn!("exp2 s={s} rho={rho} n={n} rep {r} excluded: {e}");
                            failures += 1;
                        }
                        Err(e) => return Err(e),
                    }
                }
                let (h_oracle_mean, sd_oracle) = mean_sd(&ok.iter().map(|r| r.h_hat_oracle).collect::<Vec<_>>());
                let (h_pca_mean, sd_pca) = mean_sd(&ok.iter().map(|r| r.h_hat_pca).collect::<Vec<_>>());
                rows.push(Exp2Row {
                    s,
                    rho,
                    n,
                    k,
                    reps_ok: ok.len(),
                    failures,
                    h_true: gaussian_entropy(s),
                    h_oracle_mean,
                    h_pca_mean,
                    sd_oracle,
                    sd_pca,
                });
            }
        }
    }
    Ok((rows, seeds))
}

pub fn exp2_table(rows: &[Exp2Row]) -> Table {
    let mut t = Table::new([
        "s", "rho", "n", "k", "reps", "failures", "h_true", "h_oracle_mean", "h_pca_mean", "sd_oracle", "sd_pca",
    ]);
    for r in rows {
        t.push(vec![
            r.s.into(),
            r.rho.into(),
            r.n.into(),
            r.k.into(),
            r.reps_ok.into(),
            r.failures.into(),
            r.h_true.into(),
            r.h_oracle_mean.into(),
            r.h_pca_mean.into(),
            r.sd_oracle.into(),
            r.sd_pca.into(),
        ]);
    }
    t
}

impl RunConfig for Exp2Config {
    const SECTION: &'static str = "exp2";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let base = Self::defaults(doc.profile()?, doc.seed()?);
        let cfg = Self {
            s_list: doc.list_or(s, "s_list", base.s_list)?,
            rho_list: doc.list_or(s, "rho_list", base.rho_list)?,
            n_grid: doc.list_or(s, "n_grid", base.n_grid)?,
            reps: doc.get_or(s, "reps", base.reps)?,
            k_min: doc.get_or(s, "k_min", base.k_min)?,
            k_exponent: doc.get_or(s, "k_exponent", base.k_exponent)?,
            burn_in: doc.get_or(s, "burn_in", base.burn_in)?,
            pca_q: doc.get_or(s, "pca_q", base.pca_q)?,
            seed: base.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        r.put_list("s_list", &self.s_list)
            .put_list("rho_list", &self.rho_list)
            .put_list("n_grid", &self.n_grid)
            .put("reps", self.reps)
            .put("k_min", self.k_min)
            .put("k_exponent", self.k_exponent)
            .put("burn_in", self.burn_in)
            .put("pca_q", self.pca_q);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let (rows, cell_seeds) = run_exp2(self)?;
        let mut summary = String::from("s rho n h_true oracle pca\n");
        for r in &rows {
            let _ = writeln!(
                summary,
                "{} {} {} {:.6} {:.6} {:.6}",
                r.s, r.rho, r.n, r.h_true, r.h_oracle_mean, r.h_pca_mean
            );
        }
        Ok(RunOutput {
            tables: vec![("exp2_entropy.csv".into(), exp2_table(&rows))],
            failures: rows.iter().map(|r| r.failures).sum(),
            cell_seeds,
            summary,
        })
    }
}
