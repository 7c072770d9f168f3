//! Linear Gaussian state-space model with a shared AR(1) factor.
//!
//! ```text
//! f_t     = ρ f_{t−1} + √(1−ρ²) η_t
//! z_{t,j} = a f_t + √(1−a²) ε_{t,j},   a = clip(0.9 √|ρ| / d^0.3, 0, 0.999)
//! u_{t,j} = Φ(z_{t,j})
//! ```
//!
//! `f_0` is drawn from its stationary law N(0,1) and the factor runs through
//! the burn-in before the first emitted step.

use super::{expect_family, interleave, normal, Family, GeneratedRow, SequenceSpec};
use crate::error::{Error, Result};
use crate::special::normal_cdf;

/// Loading scale `s`.
pub const LSS_SCALE: f64 = 0.9;
/// Dimension damping exponent `γ`.
pub const LSS_DAMPING: f64 = 0.3;

/// Shared loading `a` for dimension `d`.
pub fn lss_loading(rho: f64, d: usize) -> f64 {
    (LSS_SCALE * rho.abs().sqrt() / (d as f64).powf(LSS_DAMPING)).clamp(0.0, 0.999)
}

pub fn gen_lss(spec: &SequenceSpec) -> Result<GeneratedRow> {
    expect_family(spec, Family::Lss)?;
    spec.validate()?;
    let rho = spec.parameter()?;
    if !(rho.abs() < 1.0) {
        return Err(Error::Parameter(format!("lss requires |rho| < 1, got {rho}")));
    }
    let a = lss_loading(rho, spec.d);
    let idio = (1.0 - a * a).sqrt();
    let innov = (1.0 - rho * rho).sqrt();

    let mut factor_rng = spec.stream("factor", 0);
    let mut f = normal(&mut factor_rng);
    for _ in 0..spec.burn_in {
        f = rho * f + innov * normal(&mut factor_rng);
    }
    let factor: Vec<f64> = (0..spec.n)
        .map(|_| {
            f = rho * f + innov * normal(&mut factor_rng);
            f
        })
        .collect();

    let gaussian: Vec<Vec<f64>> = (0..spec.d)
        .map(|j| {
            let mut rng = spec.stream("coordinate", j);
            factor.iter().map(|&f| a * f + idio * normal(&mut rng)).collect()
        })
        .collect();
    let uniform: Vec<Vec<f64>> = gaussian
        .iter()
        .map(|col| col.iter().map(|&z| normal_cdf(z)).collect())
        .collect();
    Ok(GeneratedRow {
        data: interleave(&uniform)?,
        gaussian: Some(interleave(&gaussian)?),
        spec: spec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Strength;
    use crate::stats;

    #[test]
    fn loading_values() {
        assert_eq!(lss_loading(0.0, 3), 0.0);
        assert!((lss_loading(0.98, 1) - 0.9 * 0.98f64.sqrt()).abs() < 1e-15);
        assert!((lss_loading(0.98, 1) - 0.8910).abs() < 1e-4);
        assert!(lss_loading(0.98, 5) < lss_loading(0.98, 1));
    }

    #[test]
    fn zero_rho_is_iid_uniform() {
        let spec = SequenceSpec::new(Family::Lss, Strength::Value(0.0), 2, 50_000, 4);
        let row = gen_lss(&spec).unwrap();
        for j in 0..2 {
            let col = row.data.column(j);
            assert!(stats::ks_uniform(&col) <= 0.015);
            assert!(stats::autocorrelation(&col, 1).abs() < 0.02);
        }
        let g = row.gaussian.unwrap();
        let corr = cross_correlation(&g.column(0), &g.column(1));
        assert!(corr.abs() < 0.02);
    }

    #[test]
    fn strong_lag_one_autocorrelation() {
        let spec = SequenceSpec::new(Family::Lss, Strength::Strong, 1, 100_000, 5);
        let row = gen_lss(&spec).unwrap();
        let z = row.gaussian.unwrap().column(0);
        let a = lss_loading(0.98, 1);
        let expected = a * a * 0.98;
        assert!((expected - 0.778).abs() < 1e-3);
        let got = stats::autocorrelation(&z, 1);
        assert!((got - expected).abs() < 0.02, "lag-1 {got} vs {expected}");
        assert!(stats::ks_uniform(&row.data.column(0)) <= 0.02);
    }

    #[test]
    fn rejects_unit_root() {
        let spec = SequenceSpec::new(Family::Lss, Strength::Value(1.0), 1, 10, 0);
        assert!(matches!(gen_lss(&spec), Err(Error::Parameter(_))));
    }

    fn cross_correlation(a: &[f64], b: &[f64]) -> f64 {
        let (ma, sa) = stats::mean_sd(a);
        let (mb, sb) = stats::mean_sd(b);
        let c: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        c / ((a.len() - 1) as f64 * sa * sb)
    }
}
