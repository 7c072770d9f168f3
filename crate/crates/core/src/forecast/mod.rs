//! Windowed k-NN forecasting and classification.
//!
//! A series is cut into look-back/horizon windows inside chronological
//! train/validation/test segments. Predictions average the targets of the
//! nearest training windows (Raw-kNN), optionally after projecting onto the
//! leading principal components of the training inputs (PCA-kNN).
//! Hyperparameters are chosen by expanding-window cross-validation, or by a
//! validation holdout when training data is scarce.

mod io;
mod knn;
mod metrics;
mod run;
mod tune;
mod windows;

pub use io::{read_labeled, read_long, read_series, read_wide, LabeledSet, WideTable};
pub use knn::{knn_predict, neighbors, KnnModel, Neighbor, Prediction};
pub use metrics::{accuracy, forecast_metrics, smape, ForecastMetrics};
pub use run::{
    classify, forecast, last_value_forecast, synthetic_classes, ClassifyConfig, EvalReport, ForecastConfig,
    MethodScore, SYNTHETIC_CLASS_RHO,
};
pub use tune::{expanding_folds, stratified_folds, tune, TuneResult, TuningPath};
pub use windows::{build_windows, segment_windows, Split, Targets, WindowDataset};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Metric;

/// Regularizer in `1 / (d + ε)` distance weights.
pub const DISTANCE_EPS: f64 = 1e-12;

pub const K_GRID: [usize; 8] = [1, 3, 5, 7, 9, 15, 21, 31];
pub const PCA_GRID: [usize; 5] = [8, 16, 32, 48, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weighting {
    Uniform,
    Distance,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::Distance => "distance",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(Weighting::Uniform),
            "distance" => Ok(Weighting::Distance),
            other => Err(Error::Parameter(format!("unknown weighting `{other}`"))),
        }
    }
}

/// Projection dimension for PCA-kNN; `None` is Raw-kNN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PcaDim(pub Option<usize>);

impl fmt::Display for PcaDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => f.write_str("none"),
            Some(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for PcaDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(PcaDim(None)),
            v => match v.parse::<usize>() {
                Ok(q) if q > 0 => Ok(PcaDim(Some(q))),
                _ => Err(Error::Parameter(format!("pca dimension must be `none` or positive, got `{v}`"))),
            },
        }
    }
}

/// One point of the hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KnnHyper {
    pub k: usize,
    pub weighting: Weighting,
    pub metric: Metric,
    pub pca_dim: Option<usize>,
}

impl KnnHyper {
    pub fn raw(k: usize, weighting: Weighting, metric: Metric) -> Self {
        Self {
            k,
            weighting,
            metric,
            pca_dim: None,
        }
    }
}

impl fmt::Display for KnnHyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} weighting={} metric={} pca={}",
            self.k,
            self.weighting,
            self.metric.name(),
            PcaDim(self.pca_dim)
        )
    }
}

/// Cartesian grid ordered by PCA dimension, metric, weighting, then `k`.
pub fn hyper_grid(ks: &[usize], weightings: &[Weighting], metrics: &[Metric], pca_dims: &[PcaDim]) -> Vec<KnnHyper> {
    let mut grid = Vec::with_capacity(ks.len() * weightings.len() * metrics.len() * pca_dims.len());
    for &PcaDim(pca_dim) in pca_dims {
        for &metric in metrics {
            for &weighting in weightings {
                for &k in ks {
                    grid.push(KnnHyper {
                        k,
                        weighting,
                        metric,
                        pca_dim,
                    });
                }
            }
        }
    }
    grid
}

/// The full published grid.
pub fn default_grid() -> Vec<KnnHyper> {
    hyper_grid(
        &K_GRID,
        &[Weighting::Uniform, Weighting::Distance],
        &[Metric::Manhattan, Metric::Euclidean],
        &default_pca_dims(),
    )
}

pub fn default_pca_dims() -> Vec<PcaDim> {
    std::iter::once(PcaDim(None))
        .chain(PCA_GRID.iter().map(|&q| PcaDim(Some(q))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_order() {
        let g = default_grid();
        assert_eq!(g.len(), 8 * 2 * 2 * 6);
        assert_eq!(g[0], KnnHyper::raw(1, Weighting::Uniform, Metric::Manhattan));
        assert_eq!(g[1].k, 3);
        assert_eq!(g.last().unwrap().pca_dim, Some(64));
    }

    #[test]
    fn parsing() {
        assert_eq!("none".parse::<PcaDim>().unwrap(), PcaDim(None));
        assert_eq!("16".parse::<PcaDim>().unwrap(), PcaDim(Some(16)));
        assert!("0".parse::<PcaDim>().is_err());
        assert_eq!("distance".parse::<Weighting>().unwrap(), Weighting::Distance);
        assert!("inverse".parse::<Weighting>().is_err());
    }
}
