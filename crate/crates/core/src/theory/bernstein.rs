use rand::Rng;
use rayon::prelude::*;

use crate::csvfmt::Table;
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// A centered sequence with `|Z_i| ≤ S` and exactly known block variance
/// and mixing coefficients.
pub trait BoundedSequence: Sync {
    fn name(&self) -> String;
    /// Almost-sure bound `S(n)`.
    fn bound(&self) -> f64;
    /// `σ²_{n,m} = sup_j E[(Z_{j+1} + … + Z_{(j+m)∧n})²]`.
    fn block_variance(&self, n: usize, m: usize) -> f64;
    /// Upper bound on the strong mixing coefficient `α_m`.
    fn alpha(&self, m: usize) -> f64;
    /// One draw of `Z_1 + … + Z_n`.
    fn sum(&self, n: usize, rng: &mut StreamRng) -> f64;
}

/// Fills `count` independent ±1 signs from random bits.
fn signs(rng: &mut StreamRng, count: usize) -> impl Iterator<Item = f64> {
    let words: Vec<u64> = (0..count.div_ceil(64)).map(|_| rng.random()).collect();
    (0..count).map(move |i| if (words[i / 64] >> (i % 64)) & 1 == 1 { 1.0 } else { -1.0 })
}

/// Independent fair ±1 variables.
#[derive(Debug, Clone, Copy, Default)]
pub struct IidRademacher;

impl BoundedSequence for IidRademacher {
    fn name(&self) -> String {
        "iid_rademacher".into()
    }

    fn bound(&self) -> f64 {
        1.0
    }

    fn block_variance(&self, n: usize, m: usize) -> f64 {
        m.min(n) as f64
    }

    fn alpha(&self, _m: usize) -> f64 {
        0.0
    }

    fn sum(&self, n: usize, rng: &mut StreamRng) -> f64 {
        signs(rng, n).sum()
    }
}

/// One-dependent moving average `Z_i = (e_i + e_{i+1}) / 2` of fair signs.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaRademacher;

impl BoundedSequence for MaRademacher {
    fn name(&self) -> String {
        "ma1_rademacher".into()
    }

    fn bound(&self) -> f64 {
        1.0
    }

    fn block_variance(&self, n: usize, m: usize) -> f64 {
        // A block of L consecutive terms telescopes to
        // (e_first + e_last)/2 + (L−1) interior signs.
        m.min(n) as f64 - 0.5
    }

    fn alpha(&self, m: usize) -> f64 {
        if m >= 2 {
            0.0
        } else {
            0.25
        }
    }

    fn sum(&self, n: usize, rng: &mut StreamRng) -> f64 {
        let e: Vec<f64> = signs(rng, n + 1).collect();
        0.5 * (e[0] + e[n]) + e[1..n].iter().sum::<f64>()
    }
}

/// `4 exp(−ε² / (64 (n/m) σ² + (8/3) ε m S)) + 4 (n/m) α_m`.
pub fn bernstein_bound(n: usize, m: usize, sigma2: f64, s: f64, eps: f64, alpha: f64) -> f64 {
    let ratio = n as f64 / m as f64;
    let denom = 64.0 * ratio * sigma2 + 8.0 / 3.0 * eps * m as f64 * s;
    4.0 * (-eps * eps / denom).exp() + 4.0 * ratio * alpha
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinRow {
    pub eps: f64,
    pub empirical_tail: f64,
    pub se: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinReport {
    pub sequence: String,
    pub n: usize,
    pub m: usize,
    pub reps: usize,
    pub sigma2: f64,
    pub s: f64,
    pub alpha: f64,
    pub rows: Vec<BernsteinRow>,
}

impl BernsteinReport {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.empirical_tail <= r.bound)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "sequence", "n", "m", "reps", "eps", "empirical_tail", "se", "bound", "sigma2", "alpha",
        ]);
        for r in &self.rows {
            t.push(vec![
                self.sequence.clone().into(),
                self.n.into(),
                self.m.into(),
                self.reps.into(),
                r.eps.into(),
                r.empirical_tail.into(),
                r.se.into(),
                r.bound.into(),
                self.sigma2.into(),
                self.alpha.into(),
            ]);
        }
        t
    }
}

/// Empirical `P(|Σ Z_i| > ε)` against the blocked Bernstein bound.
pub fn bernstein_check(
    seq: &dyn BoundedSequence,
    n: usize,
    m: usize,
    eps_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    if n == 0 || m == 0 || m > n {
        return Err(Error::config("m", format!("block length must lie in 1..=n, got m={m}, n={n}")));
    }
    if reps == 0 {
        return Err(Error::config("reps", "need at least one replication"));
    }
    let s = seq.bound();
    let threshold = 4.0 * m as f64 * s;
    if let Some(bad) = eps_grid.iter().find(|&&e| !(e > threshold)) {
        return Err(Error::config(
            "eps",
            format!("epsilon {bad} must exceed 4 m S = {threshold}"),
        ));
    }
    let cell = rng::cell_id(&format!("{}/n{n}", seq.name()));
    let sums: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| seq.sum(n, &mut rng::stream(seed, "bernstein", cell, r as u64)).abs())
        .collect();
    let sigma2 = seq.block_variance(n, m);
    let alpha = seq.alpha(m);
    let repf = reps as f64;
    let rows = eps_grid
        .iter()
        .map(|&eps| {
            let p = sums.iter().filter(|&&v| v > eps).count() as f64 / repf;
            BernsteinRow {
                eps,
                empirical_tail: p,
                se: (p * (1.0 - p) / repf).sqrt(),
                bound: bernstein_bound(n, m, sigma2, s, eps, alpha),
            }
        })
        .collect();
    Ok(BernsteinReport {
        sequence: seq.name(),
        n,
        m,
        reps,
        sigma2,
        s,
        alpha,
        rows,
    })
}
