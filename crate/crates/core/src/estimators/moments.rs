use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// Monte Carlo estimate of `E[R^p]`: the mean of `r^p`.
pub fn moment_estimate(radii: &[f64], p: f64) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::Range("moment_estimate needs at least one radius".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Range(format!("moment order must be positive, got {p}")));
    }
    let acc: CompensatedSum = radii.iter().map(|r| r.powf(p)).collect();
    Ok(acc.value() / radii.len() as f64)
}

/// OLS fit of `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Closed-form two-variable least squares with compensated sums.
///
/// `r2 = 1 − SS_res/SS_tot`, clamped to [0, 1]; a constant response gives 1.
pub fn slope_fit(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() {
        return Err(Error::Shape {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs at least 2 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("slope fit inputs must be finite".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().copied().collect::<CompensatedSum>().value() / n;
    let my = y.iter().copied().collect::<CompensatedSum>().value() / n;
    let sxx: CompensatedSum = x.iter().map(|v| (v - mx) * (v - mx)).collect();
    let sxy: CompensatedSum = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let syy: CompensatedSum = y.iter().map(|v| (v - my) * (v - my)).collect();
    let sxx = sxx.value();
    if sxx <= f64::EPSILON * f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::Singular("regressor has zero variance".into()));
    }
    let slope = sxy.value() / sxx;
    let intercept = my - slope * mx;
    let ss_res: CompensatedSum = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .collect();
    let ss_tot = syy.value();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res.value() / ss_tot).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
        n_points: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn moment_examples() {
        assert_eq!(moment_estimate(&[2.0, 2.0, 2.0], 3.0).unwrap(), 8.0);
        assert_eq!(moment_estimate(&[0.0, 1.0], 2.0).unwrap(), 0.5);
        assert!(moment_estimate(&[], 1.0).is_err());
        assert!(moment_estimate(&[1.0], 0.0).is_err());
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.5, -3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = slope_fit(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert_eq!(fit.r2, 1.0);
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn two_points_interpolate() {
        let fit = slope_fit(&[1.0, 3.0], &[5.0, -1.0]).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-14);
        assert!((fit.intercept - 8.0).abs() < 1e-14);
        assert_eq!(fit.r2, 1.0);
    }

    #[test]
    fn degenerate_regressor_is_singular() {
        assert!(matches!(slope_fit(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::Singular(_))));
        assert!(slope_fit(&[1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn scaling_response_shifts_intercept_only(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..30),
            log_c in -3.0f64..3.0,
        ) {
            let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
            prop_assume!(slope_fit(&x, &y).is_ok());
            let base = slope_fit(&x, &y).unwrap();
            let shifted: Vec<f64> = y.iter().map(|v| v + log_c).collect();
            let moved = slope_fit(&x, &shifted).unwrap();
            prop_assert!((moved.slope - base.slope).abs() <= 1e-12 * base.slope.abs().max(1.0));
            prop_assert!((moved.intercept - base.intercept - log_c).abs() <= 1e-12 * (base.intercept.abs() + log_c.abs()).max(1.0));
            prop_assert!((0.0..=1.0).contains(&moved.r2));
        }
    }
}
