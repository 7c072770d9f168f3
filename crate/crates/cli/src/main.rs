//! `nnradii` command-line front end.
//!
//! Every subcommand resolves a config from (lowest to highest precedence)
//! built-in defaults, `--config FILE`, `--set section.key=value` and its own
//! flags, runs, and writes a run directory. Exit status is 0 on success, 2 on
//! usage or configuration errors and 1 on any other failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnradii::config::ConfigDoc;
use nnradii::harness::{run_matrix, VERSION};
use nnradii::Error;

/// Output root for runs without `--out`.
const OUT_ROOT_ENV: &str = "NNRADII_OUT_ROOT";
/// Worker threads for Monte Carlo replications and grid searches.
const WORKERS_ENV: &str = "NNRADII_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "nnradii", version = VERSION, about = "Nearest-neighbor radii under dependent sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Config file of `key = value` lines and `[section]` headers.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Desk-scale default grids (the default).
    #[arg(long, conflicts_with = "full")]
    desk: bool,
    /// Full-scale default grids.
    #[arg(long)]
    full: bool,
    /// Run directory [default: $NNRADII_OUT_ROOT/<command>-<timestamp>, root `runs`].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra override, `section.key=value` or `key=value` for global keys.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// Defines a subcommand's flags; each flag overrides the config key of the
/// same name in the subcommand's section.
macro_rules! section_args {
    ($(#[$doc:meta])* $name:ident { $($key:ident),* $(,)? }) => {
        $(#[$doc])*
        #[derive(Args, Debug, Clone, Default)]
        struct $name {
            #[command(flatten)]
            common: Common,
            $(
                #[arg(long, value_name = "VALUE", help = concat!("Config key `", stringify!($key), "` of this subcommand"))]
                $key: Option<String>,
            )*
        }

        impl $name {
            fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
                vec![$((stringify!($key), &self.$key)),*]
            }
        }
    };
}

section_args!(GenerateArgs { family, strength, d, n, burn_in, embed });
section_args!(RadiiArgs { input, family, strength, d, n, burn_in, query, k_list, metric });
section_args!(Exp1Args { d_list, p_over_d, m_list, beta_grid, eval_points, kn_cap, families, strengths, mc_reps });
section_args!(Exp2Args { s_list, rho_list, n_grid, reps, k_min, k_exponent, burn_in, pca_q });
section_args!(TailArgs {
    family, strength, d, burn_in, x, n, k, j_max, reps, s, c_minus, c_plus, r0, diameter, c0, big_c, gamma, k0,
    kappa_cap,
});
section_args!(MomentArgs {
    family, strength, d, burn_in, x, n_list, k_list, p, reps, s, c_minus, c_plus, r0, diameter, k0, kappa_cap,
});
section_args!(LowerBoundArgs { family, strength, d, burn_in, x, n, k, p, reps, s, c_minus, c_plus, r0, diameter });
section_args!(BernsteinArgs { sequence, n, m, eps_list, reps });
section_args!(AsConvArgs { family, strength, d, burn_in, x, schedule, n_grid });
section_args!(ForecastArgs {
    input, lookback, horizon, train_frac, val_frac, k_grid, weightings, metrics, pca_dims, folds,
    min_cv_windows, synthetic_rho, synthetic_len,
});
section_args!(ClassifyArgs {
    input, test_input, test_frac, k_grid, weightings, metrics, pca_dims, folds, synthetic_per_class,
    synthetic_len,
});

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one sequence and write it as CSV.
    Generate(GenerateArgs),
    /// k-NN radii and counts at query points, from a generator or a CSV.
    Radii(RadiiArgs),
    /// Moment-rate slopes of nearest-neighbor radii.
    Exp1(Exp1Args),
    /// Nearest-neighbor entropy estimation on raw and PCA coordinates.
    Exp2(Exp2Args),
    /// Empirical radius tail against the concentration bound.
    Tailcheck(TailArgs),
    /// Radius moments against the lower envelope, with the log-log slope.
    Momentcheck(MomentArgs),
    /// Monte Carlo check of the matching moment lower bound.
    Lowerbound(LowerBoundArgs),
    /// Block Bernstein inequality for bounded sequences.
    Bernstein(BernsteinArgs),
    /// One trajectory of radii along nested prefixes.
    Asconv(AsConvArgs),
    /// Windowed k-NN forecasting against the last-value baseline.
    Forecast(ForecastArgs),
    /// k-NN classification of labelled series.
    Classify(ClassifyArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common, Vec<(&'static str, &Option<String>)>) {
        match self {
            Command::Generate(a) => ("generate", &a.common, a.overrides()),
            Command::Radii(a) => ("radii", &a.common, a.overrides()),
            Command::Exp1(a) => ("exp1", &a.common, a.overrides()),
            Command::Exp2(a) => ("exp2", &a.common, a.overrides()),
            Command::Tailcheck(a) => ("tailcheck", &a.common, a.overrides()),
            Command::Momentcheck(a) => ("momentcheck", &a.common, a.overrides()),
            Command::Lowerbound(a) => ("lowerbound", &a.common, a.overrides()),
            Command::Bernstein(a) => ("bernstein", &a.common, a.overrides()),
            Command::Asconv(a) => ("asconv", &a.common, a.overrides()),
            Command::Forecast(a) => ("forecast", &a.common, a.overrides()),
            Command::Classify(a) => ("classify", &a.common, a.overrides()),
        }
    }
}

fn build_doc(section: &str, common: &Common, flags: &[(&str, &Option<String>)]) -> nnradii::Result<ConfigDoc> {
    let mut doc = match &common.config {
        Some(path) => ConfigDoc::load(path)?,
        None => ConfigDoc::default(),
    };
    for item in &common.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::config("--set", format!("expected KEY=VALUE, got `{item}`")))?;
        let (sec, key) = key.trim().split_once('.').unwrap_or(("", key.trim()));
        doc.set(sec, key, value.trim())?;
    }
    if let Some(seed) = common.seed {
        doc.set("", "seed", seed.to_string())?;
    }
    if common.desk {
        doc.set("", "profile", "desk")?;
    } else if common.full {
        doc.set("", "profile", "full")?;
    }
    for (key, value) in flags {
        if let Some(v) = value {
            doc.set(section, key, v.as_str())?;
        }
    }
    Ok(doc)
}

fn default_out(command: &str) -> PathBuf {
    let root = std::env::var_os(OUT_ROOT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(format!("{command}-{}", chrono::Local::now().format("%Y%m%d-%H%M%S")))
}

fn configure_workers() -> nnradii::Result<()> {
    let Some(raw) = std::env::var_os(WORKERS_ENV) else {
        return Ok(());
    };
    let raw = raw.to_string_lossy();
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config(WORKERS_ENV, format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::config(WORKERS_ENV, e.to_string()))
}

fn run(cli: &Cli) -> nnradii::Result<()> {
    configure_workers()?;
    let (command, common, flags) = cli.command.parts();
    let doc = build_doc(command, common, &flags)?;
    let out = common.out.clone().unwrap_or_else(|| default_out(command));
    let (manifest, output) = run_matrix(command, &doc, &out)?;
    print!("{}", output.summary);
    if manifest.failures > 0 {
        println!("{} replications failed and were excluded", manifest.failures);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration() { 2 } else { 1 })
        }
    }
}
