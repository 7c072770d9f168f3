//! Per-coordinate two-state hidden Markov chains with Gaussian emissions.
//!
//! Each coordinate keeps its state with probability `p_stay`, emits
//! `N((2S−1)μ_eff, σ²)` with `μ = 1.75`, `σ = 0.70`, `μ_eff = μ|2p_stay−1|⁶`,
//! and is mapped to [0,1] by the stationary mixture CDF
//! `F_mix(z) = ½Φ((z+μ_eff)/σ) + ½Φ((z−μ_eff)/σ)`. Chains start from their
//! stationary law (uniform over the two states) before the burn-in.

use rand::Rng;

use super::{expect_family, interleave, normal, Family, GeneratedRow, SequenceSpec};
use crate::error::{Error, Result};
use crate::special::normal_cdf;

pub const HMM_MU: f64 = 1.75;
pub const HMM_SIGMA: f64 = 0.70;

/// Effective emission separation `μ_eff`.
pub fn hmm_separation(p_stay: f64) -> f64 {
    HMM_MU * (2.0 * p_stay - 1.0).abs().powi(6)
}

/// Stationary marginal CDF of the emissions.
pub fn hmm_mixture_cdf(z: f64, mu_eff: f64) -> f64 {
    0.5 * normal_cdf((z + mu_eff) / HMM_SIGMA) + 0.5 * normal_cdf((z - mu_eff) / HMM_SIGMA)
}

pub fn gen_hmm(spec: &SequenceSpec) -> Result<GeneratedRow> {
    expect_family(spec, Family::Hmm)?;
    spec.validate()?;
    let p_stay = spec.parameter()?;
    if !(p_stay > 0.0 && p_stay < 1.0) {
        return Err(Error::Parameter(format!(
            "hmm requires 0 < p_stay < 1, got {p_stay}"
        )));
    }
    let mu_eff = hmm_separation(p_stay);
    let gaussian: Vec<Vec<f64>> = (0..spec.d)
        .map(|j| {
            let mut rng = spec.stream("coordinate", j);
            let mut state: bool = rng.random();
            for _ in 0..spec.burn_in {
                state ^= !stays(&mut rng, p_stay);
            }
            (0..spec.n)
                .map(|_| {
                    state ^= !stays(&mut rng, p_stay);
                    let centre = if state { mu_eff } else { -mu_eff };
                    centre + HMM_SIGMA * normal(&mut rng)
                })
                .collect()
        })
        .collect();
    let uniform: Vec<Vec<f64>> = gaussian
        .iter()
        .map(|col| col.iter().map(|&z| hmm_mixture_cdf(z, mu_eff)).collect())
        .collect();
    Ok(GeneratedRow {
        data: interleave(&uniform)?,
        gaussian: Some(interleave(&gaussian)?),
        spec: spec.clone(),
    })
}

fn stays(rng: &mut crate::rng::StreamRng, p_stay: f64) -> bool {
    rng.random::<f64>() < p_stay
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Strength;
    use crate::stats;

    #[test]
    fn separation_values() {
        assert_eq!(hmm_separation(0.5), 0.0);
        let strong = hmm_separation(0.9995);
        assert!((strong - 1.75 * 0.999f64.powi(6)).abs() < 1e-12);
        assert!((strong - 1.7395).abs() < 1e-4);
    }

    #[test]
    fn symmetric_chain_degenerates_to_iid() {
        let spec = SequenceSpec::new(Family::Hmm, Strength::Value(0.5), 1, 50_000, 8);
        let row = gen_hmm(&spec).unwrap();
        let u = row.data.column(0);
        assert!(stats::ks_uniform(&u) <= 0.015);
        assert!(stats::autocorrelation(&u, 1).abs() < 0.02);
        // F_mix collapses to Φ(z/σ).
        assert_eq!(hmm_mixture_cdf(0.35, 0.0), normal_cdf(0.5));
    }

    #[test]
    fn weak_marginal_is_uniform() {
        let spec = SequenceSpec::new(Family::Hmm, Strength::Weak, 1, 100_000, 9);
        let row = gen_hmm(&spec).unwrap();
        let ks = stats::ks_uniform(&row.data.column(0));
        assert!(ks <= 0.02, "ks {ks}");
    }

    #[test]
    fn rejects_degenerate_stay_probability() {
        for p in [0.0, 1.0, 1.2] {
            let spec = SequenceSpec::new(Family::Hmm, Strength::Value(p), 1, 10, 0);
            assert!(matches!(gen_hmm(&spec), Err(Error::Parameter(_))));
        }
    }
}
