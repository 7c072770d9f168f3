use std::fmt;

use super::check_query;
use crate::csvfmt::Table;
use crate::error::{Error, Result};
use crate::generators::{generate, SequenceSpec};
use crate::geometry::{knn_radius, Metric};

/// How `k` grows with `n` along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSchedule {
    Const(usize),
    /// `⌈√n⌉`
    Sqrt,
    /// `⌈n^a⌉` with `0 < a < 1`.
    Power(f64),
}

impl KSchedule {
    pub fn k(&self, n: usize) -> usize {
        let k = match *self {
            KSchedule::Const(k) => k,
            KSchedule::Sqrt => (n as f64).sqrt().ceil() as usize,
            KSchedule::Power(a) => (n as f64).powf(a).ceil() as usize,
        };
        k.clamp(1, n.max(1))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            KSchedule::Const(0) => Err(Error::config("k_schedule", "constant k must be positive")),
            KSchedule::Power(a) if !(a > 0.0 && a < 1.0) => Err(Error::config(
                "k_schedule",
                format!("power must lie in (0, 1) so that k/n -> 0, got {a}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSchedule::Const(k) => write!(f, "const:{k}"),
            KSchedule::Sqrt => f.write_str("sqrt"),
            KSchedule::Power(a) => write!(f, "power:{a}"),
        }
    }
}

impl std::str::FromStr for KSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config("k_schedule", format!("expected const:K, sqrt or power:A, got {s:?}"));
        let s = s.trim();
        if s == "sqrt" {
            return Ok(KSchedule::Sqrt);
        }
        let sched = match s.split_once(':') {
            Some(("const", v)) => KSchedule::Const(v.trim().parse().map_err(|_| bad())?),
            Some(("power", v)) => KSchedule::Power(v.trim().parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        sched.validate()?;
        Ok(sched)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsConvergenceReport {
    pub query: Vec<f64>,
    pub schedule: KSchedule,
    /// `(n, k(n), R_{n,k(n)}(x))` along nested prefixes of one realization.
    pub trajectory: Vec<(usize, usize, f64)>,
}

impl AsConvergenceReport {
    pub fn last_radius(&self) -> f64 {
        self.trajectory.last().map_or(f64::NAN, |t| t.2)
    }

    /// Smallest grid `n` from which every later radius is within `eps` of `limit`.
    pub fn settles_within(&self, limit: f64, eps: f64) -> Option<usize> {
        let mut first = None;
        for &(n, _, r) in &self.trajectory {
            if (r - limit).abs() <= eps {
                first.get_or_insert(n);
            } else {
                first = None;
            }
        }
        first
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["n", "k", "radius", "schedule"]);
        for &(n, k, r) in &self.trajectory {
            t.push(vec![n.into(), k.into(), r.into(), self.schedule.to_string().into()]);
        }
        t
    }
}

/// One long realization of `spec` at `max(n_grid)`, with `R_{n,k(n)}(x)`
/// evaluated on each prefix in `n_grid`.
pub fn as_convergence_check(
    spec: &SequenceSpec,
    x: &[f64],
    schedule: KSchedule,
    n_grid: &[usize],
) -> Result<AsConvergenceReport> {
    check_query(spec, x)?;
    schedule.validate()?;
    let n_max = *n_grid
        .iter()
        .max()
        .ok_or_else(|| Error::config("n_grid", "grid is empty"))?;
    if n_grid.contains(&0) {
        return Err(Error::config("n_grid", "sample sizes must be positive"));
    }
    let row = generate(&spec.with_n(n_max))?;
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let trajectory = grid
        .into_iter()
        .map(|n| {
            let k = schedule.k(n);
            let r = knn_radius(&row.data.prefix(n), x, k, Metric::Euclidean)?;
            Ok((n, k, r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsConvergenceReport {
        query: x.to_vec(),
        schedule,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [usize; 6] = [100, 1000, 5000, 10_000, 50_000, 100_000];

    #[test]
    fn outside_support_converges_to_distance() {
        let spec = SequenceSpec::iid(1, 1, 1);
        let rep = as_convergence_check(&spec, &[2.0], KSchedule::Const(1), &GRID).unwrap();
        assert!((rep.last_radius() - 1.0).abs() <= 1e-3);
        // Nested prefixes: the nearest point can only get closer.
        assert!(rep.trajectory.windows(2).all(|w| w[1].2 <= w[0].2));
    }

    #[test]
    fn inside_support_shrinks() {
        let spec = SequenceSpec::iid(1, 1, 2);
        let rep = as_convergence_check(&spec, &[0.5], KSchedule::Sqrt, &GRID).unwrap();
        assert!(rep.last_radius() <= 0.01);
        assert_eq!(rep.trajectory.last().unwrap().1, 317);
        assert!(rep.settles_within(0.0, 0.1).is_some());
        assert!(rep.settles_within(0.0, 0.01).is_some());
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!("sqrt".parse::<KSchedule>().unwrap(), KSchedule::Sqrt);
        assert_eq!("const:3".parse::<KSchedule>().unwrap(), KSchedule::Const(3));
        assert_eq!("power:0.5".parse::<KSchedule>().unwrap(), KSchedule::Power(0.5));
        assert!("power:1.5".parse::<KSchedule>().is_err());
        assert!("const:0".parse::<KSchedule>().is_err());
        assert!("linear".parse::<KSchedule>().is_err());
        assert_eq!(KSchedule::Power(0.5).k(100), 10);
    }
}
