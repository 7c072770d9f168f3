use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastMetrics {
    pub mse: f64,
    pub mae: f64,
    /// Symmetric MAPE on the 0–200 scale.
    pub smape: f64,
}

fn check(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::Shape {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InsufficientData("no values to score".into()));
    }
    Ok(())
}

/// `200 · mean |y − ŷ| / (|y| + |ŷ|)`, with `0/0` terms counted as 0.
pub fn smape(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check(pred, truth)?;
    let acc: CompensatedSum = pred
        .iter()
        .zip(truth)
        .map(|(p, y)| {
            let denom = y.abs() + p.abs();
            if denom == 0.0 {
                0.0
            } else {
                (y - p).abs() / denom
            }
        })
        .collect();
    Ok(200.0 * acc.value() / truth.len() as f64)
}

/// Element-wise scores over flattened forecasts.
pub fn forecast_metrics(pred: &[f64], truth: &[f64]) -> Result<ForecastMetrics> {
    check(pred, truth)?;
    let n = truth.len() as f64;
    let se: CompensatedSum = pred.iter().zip(truth).map(|(p, y)| (p - y) * (p - y)).collect();
    let ae: CompensatedSum = pred.iter().zip(truth).map(|(p, y)| (p - y).abs()).collect();
    Ok(ForecastMetrics {
        mse: se.value() / n,
        mae: ae.value() / n,
        smape: smape(pred, truth)?,
    })
}

pub fn accuracy(pred: &[i64], truth: &[i64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Shape {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InsufficientData("no labels to score".into()));
    }
    Ok(pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction() {
        let y = [1.0, -2.0, 0.0, 3.5];
        let m = forecast_metrics(&y, &y).unwrap();
        assert_eq!((m.mse, m.mae, m.smape), (0.0, 0.0, 0.0));
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
    }

    #[test]
    fn doubled_prediction_smape() {
        let y = [1.0, 1.0, 1.0];
        let p = [2.0, 2.0, 2.0];
        assert!((smape(&p, &y).unwrap() - 200.0 / 3.0).abs() < 1e-12);
        let m = forecast_metrics(&p, &y).unwrap();
        assert_eq!((m.mse, m.mae), (1.0, 1.0));
    }

    #[test]
    fn zero_over_zero_and_shape() {
        assert_eq!(smape(&[0.0, 1.0], &[0.0, -1.0]).unwrap(), 100.0);
        assert!(forecast_metrics(&[1.0], &[1.0, 2.0]).is_err());
        assert!(accuracy(&[1], &[]).is_err());
    }

    proptest! {
        #[test]
        fn smape_symmetric_and_bounded(v in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..50)) {
            let a: Vec<f64> = v.iter().map(|p| p.0).collect();
            let b: Vec<f64> = v.iter().map(|p| p.1).collect();
            let ab = smape(&a, &b).unwrap();
            prop_assert_eq!(ab, smape(&b, &a).unwrap());
            prop_assert!((0.0..=200.0).contains(&ab));
        }
    }
}
