//! Experiment drivers and run directories.
//!
//! Each subcommand has a config type that resolves every default from a
//! [`ConfigDoc`], runs to a set of in-memory tables, and is written by
//! [`write_run`] into a directory holding the CSVs, the resolved config,
//! per-cell seeds and a manifest with checksums. Workers never touch the
//! filesystem; only the final write does.

mod checks;
mod exp1;
mod exp2;

pub use checks::{AsConvConfig, BernsteinConfig, GenerateConfig, LowerBoundConfig, MomentConfig, RadiiConfig, TailConfig};
pub use exp1::{run_exp1, Exp1Cell, Exp1Config, Exp1Result};
pub use exp2::{run_exp2, Exp2Config, Exp2Row};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::config::{ConfigDoc, Profile, Resolved};
use crate::csvfmt::{write_text, Table};
use crate::error::{Error, Result};
use crate::forecast::{ClassifyConfig, ForecastConfig};

pub const VERSION: &str = concat!("nnradii ", env!("CARGO_PKG_VERSION"));

/// Subcommands that produce a run directory.
pub const COMMANDS: [&str; 11] = [
    "generate",
    "radii",
    "exp1",
    "exp2",
    "tailcheck",
    "momentcheck",
    "lowerbound",
    "bernstein",
    "asconv",
    "forecast",
    "classify",
];

/// `(cell label, derived seed)` pairs.
pub type CellSeeds = Vec<(String, u64)>;

/// Tables and bookkeeping produced by one run.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// `(file name, table)` in write order.
    pub tables: Vec<(String, Table)>,
    pub cell_seeds: CellSeeds,
    /// Replications that failed and were excluded.
    pub failures: usize,
    /// Human-readable summary.
    pub summary: String,
}

/// A subcommand's fully resolved configuration.
pub trait RunConfig: Sized {
    const SECTION: &'static str;
    fn from_doc(doc: &ConfigDoc) -> Result<Self>;
    fn resolved(&self) -> Resolved;
    fn run(&self) -> Result<RunOutput>;
}

/// Everything needed to reproduce a run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub profile: Profile,
    /// Resolved config text, loadable with `--config`.
    pub config_text: String,
    /// SHA-256 of `config_text`.
    pub manifest_hash: String,
    pub cell_seeds: Vec<(String, u64)>,
    /// `(file name, SHA-256)` of every CSV.
    pub checksums: Vec<(String, String)>,
    pub failures: usize,
    pub wall_clock_secs: f64,
    pub out_dir: PathBuf,
    pub version: String,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "profile = {}", self.profile.name());
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        let _ = writeln!(s, "manifest_hash = {}", self.manifest_hash);
        let _ = writeln!(s, "failures = {}", self.failures);
        let _ = writeln!(s, "cells = {}", self.cell_seeds.len());
        let _ = writeln!(s, "wall_clock_secs = {:.3}", self.wall_clock_secs);
        s.push_str("\n[artifacts]\n");
        for (f, h) in &self.checksums {
            let _ = writeln!(s, "{f} = {h}");
        }
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Global keys plus the subcommand section, in config syntax.
pub fn resolved_text(doc: &ConfigDoc, section: &Resolved) -> Result<String> {
    let mut global = Resolved::new("");
    global.put("seed", doc.seed()?).put("profile", doc.profile()?.name());
    Ok(format!("{}\n{}", global.render(), section.render()))
}

/// Writes the tables, `config.resolved`, `seeds.csv` and `manifest.txt`.
pub fn write_run(
    out: &Path,
    command: &str,
    doc: &ConfigDoc,
    section: &Resolved,
    output: &RunOutput,
    started: Instant,
) -> Result<RunManifest> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let config_text = resolved_text(doc, section)?;
    write_text(&out.join("config.resolved"), &config_text)?;
    let mut seeds = Table::new(["cell", "seed"]);
    for (label, seed) in &output.cell_seeds {
        seeds.push(vec![label.as_str().into(), (*seed).into()]);
    }
    let mut checksums = Vec::new();
    for (name, table) in output
        .tables
        .iter()
        .map(|(n, t)| (n.as_str(), t))
        .chain(std::iter::once(("seeds.csv", &seeds)))
    {
        let text = table.render();
        write_text(&out.join(name), &text)?;
        checksums.push((name.to_string(), sha256_hex(text.as_bytes())));
    }
    if !output.summary.is_empty() {
        write_text(&out.join("summary.txt"), &output.summary)?;
    }
    let manifest = RunManifest {
        command: command.to_string(),
        seed: doc.seed()?,
        profile: doc.profile()?,
        manifest_hash: sha256_hex(config_text.as_bytes()),
        config_text,
        cell_seeds: output.cell_seeds.clone(),
        checksums,
        failures: output.failures,
        wall_clock_secs: started.elapsed().as_secs_f64(),
        out_dir: out.to_path_buf(),
        version: VERSION.to_string(),
    };
    write_text(&out.join("manifest.txt"), &manifest.render())?;
    Ok(manifest)
}

fn execute<C: RunConfig>(doc: &ConfigDoc, out: &Path) -> Result<(RunManifest, RunOutput)> {
    let started = Instant::now();
    let cfg = C::from_doc(doc)?;
    let section = cfg.resolved();
    let output = cfg.run()?;
    let manifest = write_run(out, C::SECTION, doc, &section, &output, started)?;
    Ok((manifest, output))
}

/// Resolves, runs and writes one subcommand.
pub fn run_matrix(command: &str, doc: &ConfigDoc, out: &Path) -> Result<(RunManifest, RunOutput)> {
    match command {
        "generate" => execute::<GenerateConfig>(doc, out),
        "radii" => execute::<RadiiConfig>(doc, out),
        "exp1" => execute::<Exp1Config>(doc, out),
        "exp2" => execute::<Exp2Config>(doc, out),
        "tailcheck" => execute::<TailConfig>(doc, out),
        "momentcheck" => execute::<MomentConfig>(doc, out),
        "lowerbound" => execute::<LowerBoundConfig>(doc, out),
        "bernstein" => execute::<BernsteinConfig>(doc, out),
        "asconv" => execute::<AsConvConfig>(doc, out),
        "forecast" => execute::<ForecastConfig>(doc, out),
        "classify" => execute::<ClassifyConfig>(doc, out),
        other => Err(Error::config("command", format!("unknown subcommand `{other}`"))),
    }
}
