use std::collections::BTreeMap;

use super::{check_query, par_replicate, MassProfile, Regime};
use crate::csvfmt::Table;
use crate::error::{Error, Result};
use crate::estimators::{slope_fit, SlopeFit};
use crate::generators::SequenceSpec;
use crate::geometry::{nearest_distances, Metric};
use crate::stats::{mean_se, CompensatedSum};

/// `½ (k / (2 c₊ n))^{p/s}`.
pub fn lower_bound_value(n: usize, k: usize, p: f64, s: f64, c_plus: f64) -> f64 {
    0.5 * (k as f64 / (2.0 * c_plus * n as f64)).powf(p / s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub empirical_moment: f64,
    pub se: f64,
    pub lower_bound: f64,
}

impl MomentRow {
    /// `Ê[R^p] − 3·SE − lower bound`.
    pub fn margin(&self) -> f64 {
        self.empirical_moment - 3.0 * self.se - self.lower_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheckReport {
    pub rows: Vec<MomentRow>,
    /// `max Ê[R^p] / (k/n)^{p/s}` over the grid.
    pub upper_envelope_constant: f64,
    /// Fit of `log Ê[R^p]` on `log(k/n)`.
    pub fit: SlopeFit,
    pub expected_slope: f64,
    pub reps: usize,
}

impl MomentCheckReport {
    pub fn all_above_lower(&self) -> bool {
        self.rows.iter().all(|r| r.margin() >= 0.0)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "n", "k", "p", "reps", "moment", "se", "lower_bound", "margin", "slope", "expected_slope", "r2",
            "upper_constant",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.into(),
                r.k.into(),
                r.p.into(),
                self.reps.into(),
                r.empirical_moment.into(),
                r.se.into(),
                r.lower_bound.into(),
                r.margin().into(),
                self.fit.slope.into(),
                self.expected_slope.into(),
                self.fit.r2.into(),
                self.upper_envelope_constant.into(),
            ]);
        }
        t
    }
}

/// Mean and standard error of `R_{n,k}(x)^p` for several `k` sharing `n`.
fn moments_at(spec: &SequenceSpec, x: &[f64], n: usize, ks: &[usize], p: f64, reps: usize, tag: &str) -> Result<Vec<(f64, f64)>> {
    let kmax = *ks.iter().max().expect("nonempty k list");
    let per_rep = par_replicate(&spec.with_n(n), tag, reps, |row| {
        let d = nearest_distances(&row.data, x, kmax, Metric::Euclidean)?;
        Ok(ks.iter().map(|&k| d[k - 1].powf(p)).collect::<Vec<f64>>())
    })?;
    Ok((0..ks.len())
        .map(|i| {
            let v: Vec<f64> = per_rep.iter().map(|r| r[i]).collect();
            let m = v.iter().copied().collect::<CompensatedSum>().value() / v.len() as f64;
            (m, if v.len() > 1 { mean_se(&v).1 } else { f64::NAN })
        })
        .collect())
}

/// Monte Carlo `E[R^p]` over a grid of `(n, k)`, checked against the
/// explicit lower bound and fitted on the log-log scale.
pub fn moment_sandwich_check(
    spec: &SequenceSpec,
    x: &[f64],
    mass: &MassProfile,
    grid: &[(usize, usize)],
    p: f64,
    reps: usize,
    regime: &Regime,
) -> Result<MomentCheckReport> {
    check_query(spec, x)?;
    mass.validate()?;
    if !(p > 0.0) {
        return Err(Error::config("p", format!("moment order must be positive, got {p}")));
    }
    if grid.len() < 2 {
        return Err(Error::config("grid", "need at least two (n, k) points for a slope"));
    }
    for &(n, k) in grid {
        regime.check(n, k, mass)?;
    }
    let mut by_n: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(n, k) in grid {
        by_n.entry(n).or_default().push(k);
    }
    let mut est: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for (n, ks) in &by_n {
        for (k, v) in ks.iter().zip(moments_at(spec, x, *n, ks, p, reps, "moment")?) {
            est.insert((*n, *k), v);
        }
    }
    let rows: Vec<MomentRow> = grid
        .iter()
        .map(|&(n, k)| {
            let (m, se) = est[&(n, k)];
            MomentRow {
                n,
                k,
                p,
                empirical_moment: m,
                se,
                lower_bound: lower_bound_value(n, k, p, mass.s, mass.c_plus),
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (r.k as f64 / r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.empirical_moment.ln()).collect();
    let fit = slope_fit(&xs, &ys)?;
    let upper_envelope_constant = rows
        .iter()
        .map(|r| r.empirical_moment / (r.k as f64 / r.n as f64).powf(p / mass.s))
        .fold(0.0, f64::max);
    Ok(MomentCheckReport {
        rows,
        upper_envelope_constant,
        fit,
        expected_slope: p / mass.s,
        reps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport {
    pub row: MomentRow,
    pub reps: usize,
    pub margin: f64,
    pub pass: bool,
}

impl LowerBoundReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["n", "k", "p", "reps", "moment", "se", "lower_bound", "margin", "pass"]);
        let r = &self.row;
        t.push(vec![
            r.n.into(),
            r.k.into(),
            r.p.into(),
            self.reps.into(),
            r.empirical_moment.into(),
            r.se.into(),
            r.lower_bound.into(),
            self.margin.into(),
            self.pass.into(),
        ]);
        t
    }
}

/// Passes iff `Ê[R^p] − 3·SE ≥ ½ (k/(2c₊n))^{p/s}`. Needs no mixing, so any
/// family is accepted.
pub fn lower_bound_check(
    spec: &SequenceSpec,
    x: &[f64],
    mass: &MassProfile,
    n: usize,
    k: usize,
    p: f64,
    reps: usize,
) -> Result<LowerBoundReport> {
    check_query(spec, x)?;
    mass.validate()?;
    if !(p > 0.0) {
        return Err(Error::config("p", format!("moment order must be positive, got {p}")));
    }
    if k == 0 || k > n {
        return Err(Error::config("k", format!("k = {k} outside 1..={n}")));
    }
    let scale = (k as f64 / (2.0 * mass.c_plus * n as f64)).powf(1.0 / mass.s);
    if scale > mass.r0 {
        return Err(Error::config(
            "k",
            format!("(k/(2 c_plus n))^(1/s) = {scale} exceeds r0 = {}", mass.r0),
        ));
    }
    if reps < 2 {
        return Err(Error::config("reps", "need at least two replications for a standard error"));
    }
    let (m, se) = moments_at(spec, x, n, &[k], p, reps, "lower")?[0];
    let row = MomentRow {
        n,
        k,
        p,
        empirical_moment: m,
        se,
        lower_bound: lower_bound_value(n, k, p, mass.s, mass.c_plus),
    };
    let margin = row.margin();
    Ok(LowerBoundReport {
        row,
        reps,
        margin,
        pass: margin >= 0.0,
    })
}
