//! Configs for the generator, radius and theory-check subcommands.

use std::fmt::Write as _;
use std::path::PathBuf;

use super::{RunConfig, RunOutput};
use crate::config::{ConfigDoc, Resolved};
use crate::csvfmt::{Cell, Table};
use crate::error::{Error, Result};
use crate::forecast::read_wide;
use crate::generators::{embed_ambient, generate, Family, SequenceSpec, Strength};
use crate::geometry::{counting_process, nearest_distances, Metric, PointSet};
use crate::rng;
use crate::theory::{
    as_convergence_check, bernstein_check, default_gamma, lower_bound_check, moment_sandwich_check, r_star,
    tail_check, BoundedSequence, IidRademacher, KSchedule, MaRademacher, MassProfile, Regime, TailParams,
};

/// Reads `family`, `strength`, `d` and `burn_in` from a section.
fn source_spec(doc: &ConfigDoc, section: &str, n: usize) -> Result<SequenceSpec> {
    let family: Family = doc.get_or(section, "family", Family::IidUniform)?;
    let strength: Strength = doc.get_or(section, "strength", Strength::Weak)?;
    let d: usize = doc.get_or(section, "d", 1)?;
    let spec = SequenceSpec::new(family, strength, d, n, doc.seed()?);
    let spec = SequenceSpec {
        burn_in: doc.get_or(section, "burn_in", spec.burn_in)?,
        ..spec
    };
    spec.validate()
        .map_err(|e| Error::config(format!("{section}.d"), e.to_string()))?;
    spec.parameter()
        .map_err(|e| Error::config(format!("{section}.strength"), e.to_string()))?;
    Ok(spec)
}

fn put_source(r: &mut Resolved, spec: &SequenceSpec) {
    r.put("family", spec.family.name())
        .put("strength", spec.strength)
        .put("d", spec.d)
        .put("burn_in", spec.burn_in);
}

fn query(doc: &ConfigDoc, section: &str, d: usize, fill: f64) -> Result<Vec<f64>> {
    let x = doc.list_or(section, "x", vec![fill; d])?;
    if x.len() != d {
        return Err(Error::config(
            format!("{section}.x"),
            format!("query has {} coordinates but d = {d}", x.len()),
        ));
    }
    Ok(x)
}

/// Mass profile: exact unit-cube values at `x` unless overridden key by key.
fn mass(doc: &ConfigDoc, section: &str, x: &[f64]) -> Result<MassProfile> {
    let base = MassProfile::uniform_cube(x).ok();
    let get = |key: &str, fallback: Option<f64>| -> Result<f64> {
        match (doc.get::<f64>(section, key)?, fallback) {
            (Some(v), _) => Ok(v),
            (None, Some(v)) => Ok(v),
            (None, None) => Err(Error::config(
                format!("{section}.{key}"),
                "required when the query is outside the open unit cube",
            )),
        }
    };
    let m = MassProfile {
        s: get("s", base.map(|b| b.s))?,
        c_minus: get("c_minus", base.map(|b| b.c_minus))?,
        c_plus: get("c_plus", base.map(|b| b.c_plus))?,
        r0: get("r0", base.map(|b| b.r0))?,
        diameter: get("diameter", base.map(|b| b.diameter))?,
    };
    m.validate()?;
    Ok(m)
}

fn put_mass(r: &mut Resolved, m: &MassProfile) {
    r.put("s", m.s)
        .put("c_minus", m.c_minus)
        .put("c_plus", m.c_plus)
        .put("r0", m.r0)
        .put("diameter", m.diameter);
}

fn one_table(name: &str, table: Table, seed: (String, u64), summary: String) -> RunOutput {
    RunOutput {
        tables: vec![(name.into(), table)],
        cell_seeds: vec![seed],
        failures: 0,
        summary,
    }
}

// ---------------------------------------------------------------- generate

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateConfig {
    pub spec: SequenceSpec,
    /// Map a latent AR(1) row into the 20-dimensional ambient space.
    pub embed: bool,
}

impl RunConfig for GenerateConfig {
    const SECTION: &'static str = "generate";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let spec = source_spec(doc, s, doc.get_or(s, "n", 1000)?)?;
        let embed = doc.get_or(s, "embed", false)?;
        if embed && spec.family != Family::LatentAr1 {
            return Err(Error::config("generate.embed", "embedding applies to latent_ar1 only"));
        }
        Ok(Self { spec, embed })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        put_source(&mut r, &self.spec);
        r.put("n", self.spec.n).put("embed", self.embed);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let mut row = generate(&self.spec)?;
        if self.embed {
            row = embed_ambient(&row, self.spec.d, self.spec.seed)?;
        }
        let label = format!("generate/{}/{}", self.spec.family, self.spec.strength);
        Ok(one_table(
            "sequence.csv",
            row.to_table(),
            (label, self.spec.seed),
            format!("{} rows of dimension {}\n", row.data.len(), row.data.dim()),
        ))
    }
}

// ---------------------------------------------------------------- radii

#[derive(Debug, Clone, PartialEq)]
pub struct RadiiConfig {
    /// Point CSV; when absent the sample is generated from `spec`.
    pub input: Option<PathBuf>,
    pub spec: SequenceSpec,
    pub queries: Vec<Vec<f64>>,
    pub k_list: Vec<usize>,
    pub metric: Metric,
}

fn parse_queries(raw: &str, d: usize) -> Result<Vec<Vec<f64>>> {
    raw.split(';')
        .map(|q| {
            let x = q
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::config("radii.query", format!("bad coordinate in {q:?}: {e}")))?;
            if x.len() != d {
                return Err(Error::config(
                    "radii.query",
                    format!("query {q:?} has {} coordinates, expected {d}", x.len()),
                ));
            }
            Ok(x)
        })
        .collect()
}

impl RadiiConfig {
    fn sample(&self) -> Result<PointSet> {
        match &self.input {
            Some(path) => {
                let wide = read_wide(path)?;
                let n = wide.columns.first().map_or(0, Vec::len);
                let data: Vec<f64> = (0..n).flat_map(|i| wide.columns.iter().map(move |c| c[i])).collect();
                PointSet::new(data, wide.columns.len())
            }
            None => Ok(generate(&self.spec)?.data),
        }
    }
}

impl RunConfig for RadiiConfig {
    const SECTION: &'static str = "radii";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let input: Option<PathBuf> = doc.get(s, "input")?;
        let mut spec = source_spec(doc, s, doc.get_or(s, "n", 1000)?)?;
        if let Some(path) = &input {
            // The file fixes the dimension.
            spec.d = read_wide(path)?.columns.len();
        }
        let queries = match doc.raw(s, "query") {
            Some(raw) => parse_queries(raw, spec.d)?,
            None => vec![vec![0.5; spec.d]],
        };
        let k_list: Vec<usize> = doc.list_or(s, "k_list", vec![1, 2, 4, 8])?;
        if k_list.is_empty() || k_list.contains(&0) {
            return Err(Error::config("radii.k_list", "k values must be positive"));
        }
        Ok(Self {
            input,
            spec,
            queries,
            k_list,
            metric: doc.get_or(s, "metric", Metric::Euclidean)?,
        })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        if let Some(p) = &self.input {
            r.put("input", p.display());
        }
        put_source(&mut r, &self.spec);
        let q: Vec<String> = self
            .queries
            .iter()
            .map(|x| x.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        r.put("n", self.spec.n)
            .put("query", q.join(";"))
            .put_list("k_list", &self.k_list)
            .put("metric", self.metric.name());
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let ps = self.sample()?;
        let kmax = *self.k_list.iter().max().expect("validated nonempty");
        if kmax > ps.len() {
            return Err(Error::config("radii.k_list", format!("k = {kmax} exceeds n = {}", ps.len())));
        }
        let d = ps.dim();
        let mut t = Table::new(
            ["query", "k", "radius", "count"]
                .into_iter()
                .map(String::from)
                .chain((1..=d).map(|j| format!("x{j}"))),
        );
        for (qi, x) in self.queries.iter().enumerate() {
            let dist = nearest_distances(&ps, x, kmax, self.metric)?;
            for &k in &self.k_list {
                let r = dist[k - 1];
                let mut row: Vec<Cell> = vec![
                    qi.into(),
                    k.into(),
                    r.into(),
                    counting_process(&ps, x, r, self.metric)?.into(),
                ];
                row.extend(x.iter().map(|&v| Cell::Num(v)));
                t.push(row);
            }
        }
        let source = self
            .input
            .as_ref()
            .map_or_else(|| format!("radii/{}/{}", self.spec.family, self.spec.strength), |p| format!("radii/{}", p.display()));
        Ok(one_table("radii.csv", t, (source, self.spec.seed), String::new()))
    }
}

// ---------------------------------------------------------------- tailcheck

#[derive(Debug, Clone, PartialEq)]
pub struct TailConfig {
    pub spec: SequenceSpec,
    pub x: Vec<f64>,
    pub n: usize,
    pub k: usize,
    pub j_max: u32,
    pub reps: usize,
    pub mass: MassProfile,
    pub params: TailParams,
}

impl TailConfig {
    pub fn run_report(&self) -> Result<crate::theory::TailCheckReport> {
        tail_check(&self.spec, &self.x, &self.mass, self.n, self.k, self.j_max, self.reps, &self.params)
    }
}

impl RunConfig for TailConfig {
    const SECTION: &'static str = "tailcheck";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let spec = source_spec(doc, s, 1)?;
        let x = query(doc, s, spec.d, 0.5)?;
        let mass = mass(doc, s, &x)?;
        let n = doc.get_or(s, "n", 5000)?;
        let k = doc.get_or(s, "k", 50)?;
        let rs = r_star(n, k, mass.c_minus, mass.s).map_err(|e| Error::config("tailcheck.k", e.to_string()))?;
        // Default: the widest radius grid that stays inside r0.
        let widest = (0..30u32).take_while(|&j| f64::from(1u32 << j) * rs <= mass.r0).last();
        let j_max = match doc.get::<u32>(s, "j_max")? {
            Some(j) => j,
            None => widest.ok_or_else(|| Error::config("tailcheck.k", format!("r_* = {rs} already exceeds r0")))?,
        };
        let gamma = match doc.get::<f64>(s, "gamma")? {
            Some(g) => g,
            None => default_gamma(spec.family, spec.parameter()?),
        };
        let params = TailParams {
            c0: doc.get_or(s, "c0", 0.01)?,
            big_c: doc.get_or(s, "big_c", 1.0)?,
            gamma: Some(gamma),
            regime: Regime {
                k0: doc.get_or(s, "k0", Regime::default().k0)?,
                kappa_cap: doc.get_or(s, "kappa_cap", Regime::default().kappa_cap)?,
            },
        };
        Ok(Self {
            spec,
            x,
            n,
            k,
            j_max,
            reps: doc.get_or(s, "reps", 2000)?,
            mass,
            params,
        })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        put_source(&mut r, &self.spec);
        r.put_list("x", &self.x)
            .put("n", self.n)
            .put("k", self.k)
            .put("j_max", self.j_max)
            .put("reps", self.reps);
        put_mass(&mut r, &self.mass);
        r.put("c0", self.params.c0)
            .put("big_c", self.params.big_c)
            .put("gamma", self.params.gamma.unwrap_or(f64::INFINITY))
            .put("k0", self.params.regime.k0)
            .put("kappa_cap", self.params.regime.kappa_cap);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let rep = self.run_report()?;
        let mut summary = format!("r_* = {}  b_n = {}  duality mismatches = {}\n", rep.r_star, rep.b_n, rep.duality_mismatches);
        for (i, j) in rep.j_grid.iter().enumerate() {
            let _ = writeln!(
                summary,
                "j={j}  survival={:.6}  bound={:.6}",
                rep.empirical_survival[i], rep.bound_values[i]
            );
        }
        let label = format!("tailcheck/{}/{}/n{}", self.spec.family, self.spec.strength, self.n);
        Ok(one_table("tailcheck.csv", rep.to_table(), (label, self.spec.seed), summary))
    }
}

// ---------------------------------------------------------------- momentcheck

#[derive(Debug, Clone, PartialEq)]
pub struct MomentConfig {
    pub spec: SequenceSpec,
    pub x: Vec<f64>,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub p: f64,
    pub reps: usize,
    pub mass: MassProfile,
    pub regime: Regime,
}

impl MomentConfig {
    pub fn grid(&self) -> Vec<(usize, usize)> {
        self.n_list
            .iter()
            .flat_map(|&n| self.k_list.iter().map(move |&k| (n, k)))
            .collect()
    }

    pub fn run_report(&self) -> Result<crate::theory::MomentCheckReport> {
        moment_sandwich_check(&self.spec, &self.x, &self.mass, &self.grid(), self.p, self.reps, &self.regime)
    }
}

impl RunConfig for MomentConfig {
    const SECTION: &'static str = "momentcheck";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let spec = source_spec(doc, s, 1)?;
        let x = query(doc, s, spec.d, 0.5)?;
        Ok(Self {
            mass: mass(doc, s, &x)?,
            x,
            n_list: doc.list_or(s, "n_list", vec![4000])?,
            k_list: doc.list_or(s, "k_list", vec![16, 32, 64, 128])?,
            p: doc.get_or(s, "p", 1.0)?,
            reps: doc.get_or(s, "reps", 500)?,
            regime: Regime {
                // 3 log n would exclude k = 16 at n = 4000.
                k0: doc.get_or(s, "k0", 1.5)?,
                kappa_cap: doc.get_or(s, "kappa_cap", Regime::default().kappa_cap)?,
            },
            spec,
        })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        put_source(&mut r, &self.spec);
        r.put_list("x", &self.x)
            .put_list("n_list", &self.n_list)
            .put_list("k_list", &self.k_list)
            .put("p", self.p)
            .put("reps", self.reps);
        put_mass(&mut r, &self.mass);
        r.put("k0", self.regime.k0).put("kappa_cap", self.regime.kappa_cap);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let rep = self.run_report()?;
        let summary = format!(
            "slope = {:.5} (expected {:.5}, r2 = {:.5}); all above lower bound: {}\n",
            rep.fit.slope,
            rep.expected_slope,
            rep.fit.r2,
            rep.all_above_lower()
        );
        let label = format!("momentcheck/{}/{}", self.spec.family, self.spec.strength);
        Ok(one_table("momentcheck.csv", rep.to_table(), (label, self.spec.seed), summary))
    }
}

// ---------------------------------------------------------------- lowerbound

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundConfig {
    pub spec: SequenceSpec,
    pub x: Vec<f64>,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub reps: usize,
    pub mass: MassProfile,
}

impl LowerBoundConfig {
    pub fn run_report(&self) -> Result<crate::theory::LowerBoundReport> {
        lower_bound_check(&self.spec, &self.x, &self.mass, self.n, self.k, self.p, self.reps)
    }
}

impl RunConfig for LowerBoundConfig {
    const SECTION: &'static str = "lowerbound";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let spec = source_spec(doc, s, 1)?;
        let x = query(doc, s, spec.d, 0.5)?;
        Ok(Self {
            mass: mass(doc, s, &x)?,
            x,
            n: doc.get_or(s, "n", 1000)?,
            k: doc.get_or(s, "k", 10)?,
            p: doc.get_or(s, "p", 1.0)?,
            reps: doc.get_or(s, "reps", 2000)?,
            spec,
        })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        put_source(&mut r, &self.spec);
        r.put_list("x", &self.x)
            .put("n", self.n)
            .put("k", self.k)
            .put("p", self.p)
            .put("reps", self.reps);
        put_mass(&mut r, &self.mass);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let rep = self.run_report()?;
        let summary = format!(
            "mean = {:.6e}  se = {:.3e}  bound = {:.6e}  margin = {:.3e}  pass = {}\n",
            rep.row.empirical_moment, rep.row.se, rep.row.lower_bound, rep.margin, rep.pass
        );
        let label = format!("lowerbound/{}/{}", self.spec.family, self.spec.strength);
        Ok(one_table("lowerbound.csv", rep.to_table(), (label, self.spec.seed), summary))
    }
}

// ---------------------------------------------------------------- bernstein

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinConfig {
    /// `iid_rademacher` or `ma1_rademacher`.
    pub sequence: String,
    pub n: usize,
    pub m: usize,
    pub eps_list: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl BernsteinConfig {
    fn sequence(&self) -> Result<Box<dyn BoundedSequence>> {
        match self.sequence.as_str() {
            "iid_rademacher" => Ok(Box::new(IidRademacher)),
            "ma1_rademacher" => Ok(Box::new(MaRademacher)),
            other => Err(Error::config(
                "bernstein.sequence",
                format!("unknown sequence `{other}` (expected iid_rademacher or ma1_rademacher)"),
            )),
        }
    }

    pub fn run_report(&self) -> Result<crate::theory::BernsteinReport> {
        bernstein_check(self.sequence()?.as_ref(), self.n, self.m, &self.eps_list, self.reps, self.seed)
    }
}

impl RunConfig for BernsteinConfig {
    const SECTION: &'static str = "bernstein";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let cfg = Self {
            sequence: doc.get_or(s, "sequence", "iid_rademacher".to_string())?,
            n: doc.get_or(s, "n", 1000)?,
            m: doc.get_or(s, "m", 1)?,
            eps_list: doc.list_or(s, "eps_list", vec![600.0, 800.0])?,
            reps: doc.get_or(s, "reps", 100_000)?,
            seed: doc.seed()?,
        };
        cfg.sequence()?;
        Ok(cfg)
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        r.put("sequence", &self.sequence)
            .put("n", self.n)
            .put("m", self.m)
            .put_list("eps_list", &self.eps_list)
            .put("reps", self.reps);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let rep = self.run_report()?;
        let mut summary = String::new();
        for row in &rep.rows {
            let _ = writeln!(summary, "eps={}  tail={:.6}  bound={:.6}", row.eps, row.empirical_tail, row.bound);
        }
        let label = format!("bernstein/{}/n{}", self.sequence, self.n);
        let seed = rng::derive_seed(self.seed, "bernstein", rng::cell_id(&label), 0);
        Ok(one_table("bernstein.csv", rep.to_table(), (label, seed), summary))
    }
}

// ---------------------------------------------------------------- asconv

#[derive(Debug, Clone, PartialEq)]
pub struct AsConvConfig {
    pub spec: SequenceSpec,
    pub x: Vec<f64>,
    pub schedule: KSchedule,
    pub n_grid: Vec<usize>,
}

impl AsConvConfig {
    pub fn run_report(&self) -> Result<crate::theory::AsConvergenceReport> {
        as_convergence_check(&self.spec, &self.x, self.schedule, &self.n_grid)
    }
}

impl RunConfig for AsConvConfig {
    const SECTION: &'static str = "asconv";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let spec = source_spec(doc, s, 1)?;
        Ok(Self {
            x: query(doc, s, spec.d, 0.5)?,
            schedule: doc.get_or(s, "schedule", KSchedule::Sqrt)?,
            n_grid: doc.list_or(s, "n_grid", vec![100, 1000, 10_000, 100_000])?,
            spec,
        })
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        put_source(&mut r, &self.spec);
        r.put_list("x", &self.x)
            .put("schedule", self.schedule)
            .put_list("n_grid", &self.n_grid);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let rep = self.run_report()?;
        let summary = format!("final radius = {}\n", rep.last_radius());
        let label = format!("asconv/{}/{}", self.spec.family, self.spec.strength);
        Ok(one_table("asconv.csv", rep.to_table(), (label, self.spec.seed), summary))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_defaults_pick_widest_grid() {
        let cfg = TailConfig::from_doc(&ConfigDoc::default()).unwrap();
        // Unit interval at 0.5: c₋ = 2, r_* = 0.04, 8 r_* = 0.32 ≤ 0.5 < 0.64.
        assert_eq!(cfg.j_max, 3);
        assert_eq!(cfg.mass.c_minus, 2.0);
        assert_eq!(cfg.params.gamma, Some(f64::INFINITY));
        let doc = ConfigDoc::parse("[tailcheck]\nc_minus = 1\nc_plus = 2\n").unwrap();
        assert_eq!(TailConfig::from_doc(&doc).unwrap().j_max, 2);
    }

    #[test]
    fn resolved_configs_reload_identically() {
        let doc = ConfigDoc::parse("seed = 4\n").unwrap();
        macro_rules! round_trip {
            ($t:ty) => {{
                let cfg = <$t>::from_doc(&doc).unwrap();
                let text = super::super::resolved_text(&doc, &cfg.resolved()).unwrap();
                let again = <$t>::from_doc(&ConfigDoc::parse(&text).unwrap()).unwrap();
                assert_eq!(cfg, again, "{}", <$t>::SECTION);
            }};
        }
        round_trip!(GenerateConfig);
        round_trip!(RadiiConfig);
        round_trip!(TailConfig);
        round_trip!(MomentConfig);
        round_trip!(LowerBoundConfig);
        round_trip!(BernsteinConfig);
        round_trip!(AsConvConfig);
    }

    #[test]
    fn query_parsing() {
        assert_eq!(parse_queries("0.5,0.5; 0.1,0.2", 2).unwrap(), vec![vec![0.5, 0.5], vec![0.1, 0.2]]);
        assert!(parse_queries("0.5", 2).is_err());
        assert!(parse_queries("a,b", 2).is_err());
    }

    #[test]
    fn out_of_cube_query_needs_explicit_mass() {
        let doc = ConfigDoc::parse("[lowerbound]\nx = 2\n").unwrap();
        assert!(LowerBoundConfig::from_doc(&doc).unwrap_err().is_configuration());
    }

    #[test]
    fn radii_counts_at_least_k() {
        let doc = ConfigDoc::parse("[radii]\nn = 300\nd = 2\nquery = 0.5,0.5;0.1,0.9\n").unwrap();
        let out = RadiiConfig::from_doc(&doc).unwrap().run().unwrap();
        let t = &out.tables[0].1;
        assert_eq!(t.rows.len(), 8);
        for row in &t.rows {
            match (&row[1], &row[3]) {
                (Cell::Int(k), Cell::Int(c)) => assert!(c >= k),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn embed_only_for_latent() {
        let doc = ConfigDoc::parse("[generate]\nembed = true\n").unwrap();
        assert!(GenerateConfig::from_doc(&doc).is_err());
        let doc = ConfigDoc::parse("[generate]\nembed = true\nfamily = latent_ar1\nd = 3\nn = 10\n").unwrap();
        let out = GenerateConfig::from_doc(&doc).unwrap().run().unwrap();
        assert_eq!(out.tables[0].1.header.len(), 21);
    }
}
