//! Monte Carlo checks of the radius tail bound, the moment sandwich and its
//! lower half, almost-sure convergence, and the blocked Bernstein inequality.
//!
//! Every check replicates a generated row under derived seeds, so results
//! depend only on the `SequenceSpec` and are independent of thread scheduling.

mod asconv;
mod bernstein;
mod moments;
mod tail;

pub use asconv::{as_convergence_check, AsConvergenceReport, KSchedule};
pub use bernstein::{
    bernstein_bound, bernstein_check, BernsteinReport, BernsteinRow, BoundedSequence,
    IidRademacher, MaRademacher,
};
pub use moments::{
    lower_bound_check, lower_bound_value, moment_sandwich_check, LowerBoundReport,
    MomentCheckReport, MomentRow,
};
pub use tail::{tail_bound_value, tail_check, TailCheckReport, TailParams};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{generate, Family, GeneratedRow, SequenceSpec};
use crate::rng;

/// Local mass behaviour of the marginal law around a query point:
/// `c₋ r^s ≤ μ(B(x, r)) ≤ c₊ r^s` for `r ≤ r₀`, support diameter `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProfile {
    pub s: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub r0: f64,
    pub diameter: f64,
}

impl MassProfile {
    pub fn new(s: f64, c_minus: f64, c_plus: f64, r0: f64, diameter: f64) -> Result<Self> {
        let m = Self {
            s,
            c_minus,
            c_plus,
            r0,
            diameter,
        };
        m.validate()?;
        Ok(m)
    }

    /// Exact profile of Unif[0,1]^d at an interior point under the
    /// Euclidean metric: `c₋ = c₊ = V_d`, `r₀` the distance to the boundary.
    pub fn uniform_cube(x: &[f64]) -> Result<Self> {
        let d = x.len();
        let r0 = x.iter().map(|&v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
        if d == 0 || !(r0 > 0.0) {
            return Err(Error::config("query", "query must lie in the open unit cube"));
        }
        let v = crate::special::unit_ball_volume(d);
        Self::new(d as f64, v, v, r0, (d as f64).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.s, self.c_minus, self.c_plus, self.r0, self.diameter];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::config("mass", format!("all profile constants must be positive: {self:?}")));
        }
        if self.c_minus > self.c_plus {
            return Err(Error::config(
                "mass",
                format!("c_minus {} exceeds c_plus {}", self.c_minus, self.c_plus),
            ));
        }
        Ok(())
    }
}

/// `r_*(n, k) = (8k / (c₋ n))^{1/s}`.
pub fn r_star(n: usize, k: usize, c_minus: f64, s: f64) -> Result<f64> {
    if n == 0 || k == 0 || !(c_minus > 0.0) || !(s > 0.0) {
        return Err(Error::Range(format!(
            "r_star needs positive arguments, got n={n} k={k} c_minus={c_minus} s={s}"
        )));
    }
    Ok((8.0 * k as f64 / (c_minus * n as f64)).powf(1.0 / s))
}

/// Block length `b_n = ⌈(8/γ) log n⌉`; zero for an infinite rate.
pub fn block_length(n: usize, gamma: f64) -> usize {
    if gamma.is_infinite() {
        0
    } else {
        (8.0 / gamma * (n as f64).ln()).ceil() as usize
    }
}

/// Heuristic geometric mixing rate for a family at its parameter value.
///
/// AR-type dependence decays like `|ρ|^h`, the two-state chain like
/// `|2p−1|^h`; an RBF Gaussian process is treated as `exp(−h/ℓ)`.
pub fn default_gamma(family: Family, parameter: f64) -> f64 {
    let rate = |v: f64| if v == 0.0 { f64::INFINITY } else { -v.abs().ln() };
    match family {
        Family::IidUniform => f64::INFINITY,
        Family::Lss | Family::LatentAr1 => rate(parameter),
        Family::Hmm => rate(2.0 * parameter - 1.0),
        Family::GpFft => 1.0 / parameter,
    }
}

/// Admissible `(n, k)` window: `K₀ log n ≤ k ≤ κ n` with `κ ≤ kappa_cap`
/// and `κ < c₋ r₀^s / 8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub k0: f64,
    pub kappa_cap: f64,
}

impl Default for Regime {
    fn default() -> Self {
        Self {
            k0: 3.0,
            kappa_cap: 0.1,
        }
    }
}

impl Regime {
    pub fn check(&self, n: usize, k: usize, mass: &MassProfile) -> Result<()> {
        let (nf, kf) = (n as f64, k as f64);
        let lo = self.k0 * nf.ln();
        if kf < lo {
            return Err(Error::config(
                "k",
                format!("k = {k} below K0 log n = {lo:.3} at n = {n}"),
            ));
        }
        let ratio = kf / nf;
        let limit = mass.c_minus * mass.r0.powf(mass.s) / 8.0;
        if ratio > self.kappa_cap || ratio >= limit {
            return Err(Error::config(
                "k",
                format!(
                    "k/n = {ratio:.5} outside the regime (cap {}, c_minus r0^s / 8 = {limit:.5})",
                    self.kappa_cap
                ),
            ));
        }
        Ok(())
    }
}

/// Replication `rep` of `spec`, reseeded from (`spec.seed`, `tag`, `spec`).
pub(crate) fn replicate(spec: &SequenceSpec, tag: &str, rep: usize) -> Result<GeneratedRow> {
    let label = format!("{}/{}/d{}/n{}", spec.family, spec.strength, spec.d, spec.n);
    let seed = rng::derive_seed(spec.seed, tag, rng::cell_id(&label), rep as u64);
    generate(&spec.with_seed(seed))
}

/// Runs `f` on `reps` replications in parallel; output is in rep order.
pub(crate) fn par_replicate<T, F>(spec: &SequenceSpec, tag: &str, reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&GeneratedRow) -> Result<T> + Sync,
{
    if reps == 0 {
        return Err(Error::config("reps", "need at least one replication"));
    }
    (0..reps)
        .into_par_iter()
        .map(|r| f(&replicate(spec, tag, r)?))
        .collect()
}

pub(crate) fn check_query(spec: &SequenceSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.d {
        return Err(Error::Shape {
            expected: spec.d,
            got: x.len(),
        });
    }
    Ok(())
}
