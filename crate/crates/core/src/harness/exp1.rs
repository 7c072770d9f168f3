//! Moment-rate slopes of k-NN radii across dependence settings.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use super::{RunConfig, RunOutput};
use crate::config::{ConfigDoc, Profile, Resolved};
use crate::csvfmt::{Cell, Table};
use crate::error::{Error, Result};
use crate::estimators::{slope_fit, SlopeFit};
use crate::generators::{generate, Family, SequenceSpec, Strength};
use crate::kdtree::KdTree;
use crate::rng;
use crate::stats::{mean_se, round_half_even, CompensatedSum};

const EVAL_LO: f64 = 0.01;
const EVAL_HI: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct Exp1Config {
    pub d_list: Vec<usize>,
    pub p_over_d: Vec<usize>,
    pub m_list: Vec<usize>,
    pub beta_grid: Vec<f64>,
    pub eval_points: usize,
    pub kn_cap: f64,
    /// Dependent families; the i.i.d. baseline is always added.
    pub families: Vec<Family>,
    pub strengths: Vec<Strength>,
    pub mc_reps: usize,
    pub seed: u64,
}

/// 20 equally spaced exponents on [0.1, 0.9].
pub fn default_beta_grid() -> Vec<f64> {
    (0..20).map(|i| 0.1 + 0.8 * i as f64 / 19.0).collect()
}

impl Exp1Config {
    pub fn defaults(profile: Profile, seed: u64) -> Self {
        let (m_list, eval_points, mc_reps) = match profile {
            Profile::Desk => (vec![1, 2, 4, 8], 200, 50),
            Profile::Full => (vec![1, 2, 4, 8, 16, 32], 1000, 200),
        };
        Self {
            d_list: vec![1, 3, 5],
            p_over_d: (1..=5).collect(),
            m_list,
            beta_grid: default_beta_grid(),
            eval_points,
            kn_cap: 0.01,
            families: Family::DEPENDENT.to_vec(),
            strengths: Strength::LEVELS.to_vec(),
            mc_reps,
            seed,
        }
    }

    /// `n(d, m) = 100 · 2^d · m`.
    pub fn sample_size(d: usize, m: usize) -> usize {
        100 * (1usize << d) * m
    }

    /// Distinct neighbour counts `round(n^β)` capped at `⌊kn_cap · n⌋`.
    pub fn k_values(&self, n: usize) -> Vec<usize> {
        let cap = (self.kn_cap * n as f64).floor() as i64;
        let mut ks: Vec<usize> = Vec::new();
        for &beta in &self.beta_grid {
            let k = round_half_even((n as f64).powf(beta)).min(cap);
            if k < 1 {
                log::warn!("beta = {beta} gives k < 1 at n = {n}; dropped");
                continue;
            }
            ks.push(k as usize);
        }
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// `(family, strength)` cells, i.i.d. first.
    pub fn cells(&self) -> Vec<(Family, Strength)> {
        let mut cells = vec![(Family::IidUniform, Strength::Value(0.0))];
        for &f in &self.families {
            for &s in &self.strengths {
                cells.push((f, s));
            }
        }
        cells
    }

    fn validate(&self) -> Result<()> {
        let nonempty = [
            ("d_list", self.d_list.is_empty()),
            ("p_over_d", self.p_over_d.is_empty()),
            ("m_list", self.m_list.is_empty()),
            ("beta_grid", self.beta_grid.is_empty()),
        ];
        if let Some((key, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return Err(Error::config(format!("exp1.{key}"), "list must not be empty"));
        }
        if self.d_list.iter().any(|&d| d == 0 || d > 20) {
            return Err(Error::config("exp1.d_list", "dimensions must lie in 1..=20"));
        }
        if self.p_over_d.contains(&0) || self.m_list.contains(&0) {
            return Err(Error::config("exp1", "p_over_d and m_list entries must be positive"));
        }
        if self.beta_grid.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
            return Err(Error::config("exp1.beta_grid", "exponents must lie in (0, 1)"));
        }
        if !(self.kn_cap > 0.0 && self.kn_cap <= 1.0) {
            return Err(Error::config("exp1.kn_cap", "cap must lie in (0, 1]"));
        }
        if self.eval_points == 0 || self.mc_reps == 0 {
            return Err(Error::config("exp1", "eval_points and mc_reps must be positive"));
        }
        if let Some(f) = self.families.iter().find(|f| !f.is_uniform_marginal()) {
            return Err(Error::config(
                "exp1.families",
                format!("{f} does not have uniform marginals on the unit cube"),
            ));
        }
        for &f in &self.families {
            for &s in &self.strengths {
                crate::generators::strength_parameter(f, s)
                    .map_err(|e| Error::config("exp1.strengths", e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Pooled moment for one `(family, strength, d, m, k, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp1Cell {
    pub family: Family,
    pub strength: Strength,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub moment: f64,
    /// Standard error across replications of the per-replication means.
    pub se: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp1Slope {
    pub family: Family,
    pub strength: Strength,
    pub d: usize,
    pub p: usize,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Exp1Result {
    pub moments: Vec<Exp1Cell>,
    pub slopes: Vec<Exp1Slope>,
    pub failures: usize,
    pub cell_seeds: Vec<(String, u64)>,
}

impl Exp1Result {
    pub fn slope(&self, family: Family, strength: Strength, d: usize, p: usize) -> Option<&SlopeFit> {
        self.slopes
            .iter()
            .find(|s| s.family == family && s.d == d && s.p == p && (family == Family::IidUniform || s.strength == strength))
            .map(|s| &s.fit)
    }
}

/// Per-replication sums of `R^p`, indexed `[k][p]`.
fn replicate_sums(
    cfg: &Exp1Config,
    spec: &SequenceSpec,
    cell: u64,
    rep: usize,
    ks: &[usize],
    ps: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let d = spec.d;
    let seed = rng::derive_seed(cfg.seed, "exp1", cell, rep as u64);
    let row = generate(&spec.with_seed(seed))?;
    let tree = KdTree::new(&row.data);
    let kmax = *ks.last().expect("nonempty k list");
    let mut eval_rng = rng::stream(cfg.seed, "exp1_eval", cell, rep as u64);
    let mut acc = vec![vec![CompensatedSum::new(); ps.len()]; ks.len()];
    let mut x = vec![0.0; d];
    for _ in 0..cfg.eval_points {
        x.iter_mut().for_each(|v| *v = eval_rng.random_range(EVAL_LO..EVAL_HI));
        let dist = tree.nearest(&x, kmax)?;
        for (ki, &k) in ks.iter().enumerate() {
            let r = dist[k - 1];
            for (pi, &p) in ps.iter().enumerate() {
                acc[ki][pi].add(r.powi(p as i32));
            }
        }
    }
    Ok(acc.into_iter().map(|row| row.iter().map(CompensatedSum::value).collect()).collect())
}

pub fn run_exp1(cfg: &Exp1Config) -> Result<Exp1Result> {
    cfg.validate()?;
    let mut out = Exp1Result::default();
    for (family, strength) in cfg.cells() {
        for &d in &cfg.d_list {
            let ps: Vec<usize> = cfg.p_over_d.iter().map(|r| r * d).collect();
            let mut points: Vec<Vec<(f64, f64)>> = vec![Vec::new(); ps.len()];
            for &m in &cfg.m_list {
                let n = Exp1Config::sample_size(d, m);
                let ks = cfg.k_values(n);
                if ks.is_empty() {
                    continue;
                }
                let label = format!("exp1/{family}/{strength}/d{d}/m{m}");
                let cell = rng::cell_id(&label);
                out.cell_seeds.push((label, rng::derive_seed(cfg.seed, "exp1", cell, 0)));
                let spec = SequenceSpec::new(family, strength, d, n, cfg.seed);
                let reps: Vec<Result<Vec<Vec<f64>>>> = (0..cfg.mc_reps)
                    .into_par_iter()
                    .map(|r| replicate_sums(cfg, &spec, cell, r, &ks, &ps))
                    .collect();
                let mut ok = Vec::with_capacity(reps.len());
                for (r, res) in reps.into_iter().enumerate() {
                    match res {
                        Ok(v) => ok.push(v),
                        Err(e) => {
                            log::warn!("{family}/{strength} d={d} m={m} rep {r} failed: {e}");
                            out.failures += 1;
                        }
                    }
                }
                if ok.is_empty() {
                    return Err(Error::InsufficientData(format!(
                        "every replication failed for {family}/{strength} d={d} m={m}"
                    )));
                }
                let per_point = cfg.eval_points as f64;
                for (ki, &k) in ks.iter().enumerate() {
                    for (pi, &p) in ps.iter().enumerate() {
                        let means: Vec<f64> = ok.iter().map(|v| v[ki][pi] / per_point).collect();
                        let pooled = ok.iter().map(|v| v[ki][pi]).collect::<CompensatedSum>().value()
                            / (per_point * ok.len() as f64);
                        let se = if means.len() > 1 { mean_se(&means).1 } else { f64::NAN };
                        points[pi].push(((k as f64 / n as f64).ln(), pooled.ln()));
                        out.moments.push(Exp1Cell {
                            family,
                            strength,
                            d,
                            m,
                            n,
                            k,
                            p,
                            moment: pooled,
                            se,
                            reps: ok.len(),
                        });
                    }
                }
            }
            for (pi, &p) in ps.iter().enumerate() {
                let (x, y): (Vec<f64>, Vec<f64>) = points[pi].iter().copied().unzip();
                match slope_fit(&x, &y) {
                    Ok(fit) => out.slopes.push(Exp1Slope {
                        family,
                        strength,
                        d,
                        p,
                        fit,
                    }),
                    Err(e) => log::warn!("no slope for {family}/{strength} d={d} p={p}: {e}"),
                }
            }
        }
    }
    Ok(out)
}

impl Exp1Result {
    pub fn slopes_table(&self) -> Table {
        let mut t = Table::new([
            "family", "strength", "d", "p", "expected_slope", "slope", "intercept", "r2", "n_points",
            "slope_minus_iid",
        ]);
        for s in &self.slopes {
            let iid = self.slope(Family::IidUniform, s.strength, s.d, s.p).map(|f| f.slope);
            t.push(vec![
                s.family.name().into(),
                strength_label(s.family, s.strength).into(),
                s.d.into(),
                s.p.into(),
                (s.p as f64 / s.d as f64).into(),
                s.fit.slope.into(),
                s.fit.intercept.into(),
                s.fit.r2.into(),
                s.fit.n_points.into(),
                iid.map_or(Cell::Num(f64::NAN), |v| Cell::Num(s.fit.slope - v)),
            ]);
        }
        t
    }

    pub fn moments_table(&self) -> Table {
        let mut t = Table::new(["family", "strength", "d", "m", "n", "k", "p", "moment", "se", "reps"]);
        for c in &self.moments {
            t.push(vec![
                c.family.name().into(),
                strength_label(c.family, c.strength).into(),
                c.d.into(),
                c.m.into(),
                c.n.into(),
                c.k.into(),
                c.p.into(),
                c.moment.into(),
                c.se.into(),
                c.reps.into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s = String::from("family strength d p slope expected r2\n");
        for sl in &self.slopes {
            let _ = writeln!(
                s,
                "{} {} {} {} {:.4} {:.4} {:.5}",
                sl.family,
                strength_label(sl.family, sl.strength),
                sl.d,
                sl.p,
                sl.fit.slope,
                sl.p as f64 / sl.d as f64,
                sl.fit.r2
            );
        }
        let _ = writeln!(s, "failed replications: {}", self.failures);
        s
    }
}

fn strength_label(family: Family, strength: Strength) -> String {
    if family == Family::IidUniform {
        "none".into()
    } else {
        strength.label()
    }
}

impl RunConfig for Exp1Config {
    const SECTION: &'static str = "exp1";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let base = Self::defaults(doc.profile()?, doc.seed()?);
        let cfg = Self {
            d_list: doc.list_or(s, "d_list", base.d_list)?,
            p_over_d: doc.list_or(s, "p_over_d", base.p_over_d)?,
            m_list: doc.list_or(s, "m_list", base.m_list)?,
            beta_grid: doc.list_or(s, "beta_grid", base.beta_grid)?,
            eval_points: doc.get_or(s, "eval_points", base.eval_points)?,
            kn_cap: doc.get_or(s, "kn_cap", base.kn_cap)?,
            families: doc
                .list_or::<Family>(s, "families", base.families)?
                .into_iter()
                .filter(|f| *f != Family::IidUniform)
                .collect(),
            strengths: doc.list_or(s, "strengths", base.strengths)?,
            mc_reps: doc.get_or(s, "mc_reps", base.mc_reps)?,
            seed: base.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        let families: Vec<&str> = self.families.iter().map(|f| f.name()).collect();
        r.put_list("d_list", &self.d_list)
            .put_list("p_over_d", &self.p_over_d)
            .put_list("m_list", &self.m_list)
            .put_list("beta_grid", &self.beta_grid)
            .put("eval_points", self.eval_points)
            .put("kn_cap", self.kn_cap)
            .put_list("families", &families)
            .put_list("strengths", &self.strengths)
            .put("mc_reps", self.mc_reps);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let res = run_exp1(self)?;
        Ok(RunOutput {
            tables: vec![
                ("exp1_slopes.csv".into(), res.slopes_table()),
                ("exp1_moments.csv".into(), res.moments_table()),
            ],
            summary: res.summary(),
            cell_seeds: res.cell_seeds,
            failures: res.failures,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Exp1Config {
        Exp1Config {
            d_list: vec![1],
            p_over_d: vec![1],
            m_list: vec![1, 2],
            eval_points: 50,
            families: vec![Family::Lss],
            strengths: vec![Strength::Weak],
            mc_reps: 6,
            ..Exp1Config::defaults(Profile::Desk, 1)
        }
    }

    #[test]
    fn k_values_capped_and_deduplicated() {
        let cfg = Exp1Config::defaults(Profile::Desk, 0);
        assert_eq!(cfg.k_values(200), vec![2]);
        let ks = cfg.k_values(1600);
        assert_eq!(*ks.last().unwrap(), 16);
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Exp1Config::sample_size(3, 8), 6400);
        let beta = default_beta_grid();
        assert_eq!(beta.len(), 20);
        assert!((beta[0] - 0.1).abs() < 1e-15 && (beta[19] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn cells_include_iid_baseline() {
        let cells = tiny().cells();
        assert_eq!(cells[0].0, Family::IidUniform);
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn deterministic_and_complete() {
        let a = run_exp1(&tiny()).unwrap();
        let b = run_exp1(&tiny()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.slopes.len(), 2);
        assert_eq!(a.failures, 0);
        assert!(a.moments.iter().all(|c| c.moment > 0.0 && c.reps == 6));
        assert!(a.slope(Family::Lss, Strength::Weak, 1, 1).is_some());
        assert_eq!(a.slopes_table().rows.len(), 2);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = tiny();
        c.families = vec![Family::LatentAr1];
        assert!(run_exp1(&c).unwrap_err().is_configuration());
        let mut c = tiny();
        c.beta_grid = vec![1.5];
        assert!(run_exp1(&c).is_err());
        let doc = ConfigDoc::parse("[exp1]\nd_list = 0\n").unwrap();
        assert!(Exp1Config::from_doc(&doc).is_err());
    }

    #[test]
    fn resolved_round_trips() {
        let doc = ConfigDoc::parse("seed = 3\n[exp1]\nd_list = 1,3\nfamilies = hmm\n").unwrap();
        let cfg = Exp1Config::from_doc(&doc).unwrap();
        let text = format!("seed = 3\n{}", cfg.resolved().render());
        let again = Exp1Config::from_doc(&ConfigDoc::parse(&text).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.d_list, vec![1, 3]);
        assert_eq!(cfg.families, vec![Family::Hmm]);
    }
}
