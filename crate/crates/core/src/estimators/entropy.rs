use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::kdtree::KdTree;
use crate::special::{digamma, gaussian_entropy, ln_unit_ball_volume};
use crate::stats::CompensatedSum;

/// Entropy estimates for one sample against the Gaussian closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub h_hat_oracle: f64,
    pub h_hat_pca: f64,
    pub h_true: f64,
    pub s: usize,
    pub rho: f64,
    pub n: usize,
    pub k: usize,
}

impl EntropyReport {
    pub fn new(h_hat_oracle: f64, h_hat_pca: f64, s: usize, rho: f64, n: usize, k: usize) -> Self {
        Self {
            h_hat_oracle,
            h_hat_pca,
            h_true: gaussian_entropy(s),
            s,
            rho,
            n,
            k,
        }
    }
}

/// Kozachenko–Leonenko differential entropy estimate in nats:
/// `ψ(n) − ψ(k) + log V_s + (s/n) Σ log R_i`, with `R_i` the Euclidean
/// leave-one-out k-NN radius of sample point `i`.
pub fn kl_entropy(ps: &PointSet, k: usize, s: usize) -> Result<f64> {
    if ps.dim() != s {
        return Err(Error::Shape {
            expected: s,
            got: ps.dim(),
        });
    }
    let n = ps.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "entropy estimate needs at least 2 points, got {n}"
        )));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::Range(format!("k = {k} outside 1..={}", n - 1)));
    }
    let tree = KdTree::new(ps);
    let mut log_sum = CompensatedSum::new();
    for (i, x) in ps.iter().enumerate() {
        let r = tree.nearest_excluding(x, i, k)?[k - 1];
        if r <= 0.0 {
            return Err(Error::Degenerate(format!(
                "sample point {i} has {k} duplicates, leave-one-out radius is zero"
            )));
        }
        log_sum.add(r.ln());
    }
    let s_f = s as f64;
    Ok(digamma(n as f64)? - digamma(k as f64)?
        + ln_unit_ball_volume(s)
        + s_f * log_sum.value() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{leave_one_out_radius, Metric};
    use crate::generators::normal;
    use crate::rng;
    use crate::stats;

    fn gaussian(n: usize, s: usize, seed: u64) -> PointSet {
        let mut r = rng::from_seed(seed);
        PointSet::new((0..n * s).map(|_| normal(&mut r)).collect(), s).unwrap()
    }

    #[test]
    fn matches_brute_force_formula() {
        let ps = gaussian(150, 2, 9);
        let k = 4;
        let n = ps.len() as f64;
        let log_sum: f64 = (0..ps.len())
            .map(|i| leave_one_out_radius(&ps, i, k, Metric::Euclidean).unwrap().ln())
            .sum();
        let want = digamma(n).unwrap() - digamma(k as f64).unwrap()
            + std::f64::consts::PI.ln()
            + 2.0 * log_sum / n;
        let got = kl_entropy(&ps, k, 2).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn translation_and_scaling() {
        for s in 1..=3 {
            let ps = gaussian(500, s, 10 + s as u64);
            let base = kl_entropy(&ps, 3, s).unwrap();
            let shifted = PointSet::new(ps.as_flat().iter().map(|v| v + 7.25).collect(), s).unwrap();
            assert!((kl_entropy(&shifted, 3, s).unwrap() - base).abs() < 1e-10);
            for c in [0.125, 3.0, 40.0] {
                let scaled = PointSet::new(ps.as_flat().iter().map(|v| v * c).collect(), s).unwrap();
                let got = kl_entropy(&scaled, 3, s).unwrap();
                assert!((got - base - s as f64 * f64::ln(c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gaussian_truth_small() {
        let est: Vec<f64> = (0..20)
            .map(|r| kl_entropy(&gaussian(4096, 1, 100 + r), 3, 1).unwrap())
            .collect();
        let (m, se) = stats::mean_se(&est);
        assert!((m - gaussian_entropy(1)).abs() < 0.05 + 3.0 * se, "mean {m}");
    }

    #[test]
    fn errors() {
        let dup = PointSet::new(vec![0.0, 0.0, 1.0, 2.0], 1).unwrap();
        assert!(matches!(kl_entropy(&dup, 1, 1), Err(Error::Degenerate(_))));
        assert!(kl_entropy(&dup, 2, 1).is_ok());
        assert!(kl_entropy(&dup, 4, 1).is_err());
        assert!(kl_entropy(&dup, 0, 1).is_err());
        assert!(kl_entropy(&dup, 1, 2).is_err());
    }

    #[test]
    fn report_truth() {
        let r = EntropyReport::new(0.0, 0.0, 3, 0.3, 10, 2);
        assert!((r.h_true - 4.256_815_599_614_018).abs() < 1e-12);
    }
}
