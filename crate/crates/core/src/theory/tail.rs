use super::{block_length, check_query, default_gamma, par_replicate, r_star, MassProfile, Regime};
use crate::csvfmt::{Cell, Table};
use crate::error::{Error, Result};
use crate::generators::SequenceSpec;
use crate::geometry::{counting_process, knn_radius, Metric};

/// Reporting constants for the tail bound plus the regime and mixing rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailParams {
    pub c0: f64,
    pub big_c: f64,
    /// Mixing rate; `None` uses the family heuristic.
    pub gamma: Option<f64>,
    pub regime: Regime,
}

impl Default for TailParams {
    fn default() -> Self {
        Self {
            c0: 0.01,
            big_c: 1.0,
            gamma: None,
            regime: Regime::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailCheckReport {
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub j_grid: Vec<u32>,
    pub r_star: f64,
    pub empirical_survival: Vec<f64>,
    /// Binomial standard errors of the survival fractions.
    pub survival_se: Vec<f64>,
    pub bound_values: Vec<f64>,
    pub gamma: f64,
    pub b_n: usize,
    /// Replications where `N(x, 2^j r_*) < k` disagreed with `R > 2^j r_*`.
    pub duality_mismatches: usize,
}

impl TailCheckReport {
    /// Survival is nonincreasing in `j`.
    pub fn is_monotone(&self) -> bool {
        self.empirical_survival.windows(2).all(|w| w[1] <= w[0])
    }

    /// Survival strictly decreases at each step that starts from a nonzero value.
    pub fn log_survival_decreasing(&self) -> bool {
        self.empirical_survival
            .windows(2)
            .all(|w| w[0] == 0.0 || w[1] < w[0])
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "n", "k", "reps", "j", "radius", "r_star", "survival", "survival_se", "bound", "gamma", "b_n",
        ]);
        for (i, &j) in self.j_grid.iter().enumerate() {
            t.push(vec![
                self.n.into(),
                self.k.into(),
                self.reps.into(),
                Cell::Int(i64::from(j)),
                (f64::from(1u32 << j) * self.r_star).into(),
                self.r_star.into(),
                self.empirical_survival[i].into(),
                self.survival_se[i].into(),
                self.bound_values[i].into(),
                self.gamma.into(),
                self.b_n.into(),
            ]);
        }
        t
    }
}

/// `4 exp(−c₀ 2^{js} k / log n) + C n^{−7}`.
pub fn tail_bound_value(n: usize, k: usize, j: u32, s: f64, c0: f64, big_c: f64) -> f64 {
    let nf = n as f64;
    4.0 * (-c0 * 2f64.powf(f64::from(j) * s) * k as f64 / nf.ln()).exp() + big_c * nf.powi(-7)
}

/// Empirical `P(R_{n,k}(x) > 2^j r_*)` for `j = 0..=j_max` over `reps`
/// replications of `spec` (whose `n` is overridden).
#[allow(clippy::too_many_arguments)]
pub fn tail_check(
    spec: &SequenceSpec,
    x: &[f64],
    mass: &MassProfile,
    n: usize,
    k: usize,
    j_max: u32,
    reps: usize,
    params: &TailParams,
) -> Result<TailCheckReport> {
    check_query(spec, x)?;
    mass.validate()?;
    params.regime.check(n, k, mass)?;
    let rs = r_star(n, k, mass.c_minus, mass.s)?;
    if j_max >= 31 || f64::from(1u32 << j_max) * rs > mass.r0 {
        return Err(Error::config(
            "j_max",
            format!("2^{j_max} r_* = {} exceeds r0 = {}", f64::from(1u32 << j_max.min(30)) * rs, mass.r0),
        ));
    }
    let gamma = match params.gamma {
        Some(g) if g > 0.0 => g,
        Some(g) => return Err(Error::config("gamma", format!("must be positive, got {g}"))),
        None => default_gamma(spec.family, spec.parameter()?),
    };
    let j_grid: Vec<u32> = (0..=j_max).collect();
    let radii: Vec<f64> = j_grid.iter().map(|&j| f64::from(1u32 << j) * rs).collect();
    let spec_n = spec.with_n(n);
    // Per replication: exceedance flags and the number of duality disagreements.
    let outcomes = par_replicate(&spec_n, "tail", reps, |row| {
        let r = knn_radius(&row.data, x, k, Metric::Euclidean)?;
        let mut flags = Vec::with_capacity(radii.len());
        let mut mismatches = 0usize;
        for &rad in &radii {
            let by_radius = r > rad;
            let by_count = counting_process(&row.data, x, rad, Metric::Euclidean)? < k;
            mismatches += usize::from(by_radius != by_count);
            flags.push(by_radius);
        }
        Ok((flags, mismatches))
    })?;
    let repf = reps as f64;
    let empirical_survival: Vec<f64> = (0..radii.len())
        .map(|j| outcomes.iter().filter(|(f, _)| f[j]).count() as f64 / repf)
        .collect();
    let survival_se = empirical_survival
        .iter()
        .map(|&p| (p * (1.0 - p) / repf).sqrt())
        .collect();
    Ok(TailCheckReport {
        n,
        k,
        reps,
        bound_values: j_grid
            .iter()
            .map(|&j| tail_bound_value(n, k, j, mass.s, params.c0, params.big_c))
            .collect(),
        j_grid,
        r_star: rs,
        empirical_survival,
        survival_se,
        gamma,
        b_n: block_length(n, gamma),
        duality_mismatches: outcomes.iter().map(|o| o.1).sum(),
    })
}
