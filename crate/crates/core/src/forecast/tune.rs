//! Hyperparameter selection by cross-validation or validation holdout.
//!
//! Grid points sharing a metric and PCA dimension share one neighbor search
//! per fold (to the largest `k` in the group); the remaining axes only change
//! how neighbors are aggregated. Groups run in parallel and scores are
//! reported in grid order.

use std::fmt;

use rayon::prelude::*;

use super::knn::{average_into, fit_projection, neighbors, vote, Neighbor};
use super::windows::{Targets, WindowDataset};
use super::KnnHyper;
use crate::csvfmt::Table;
use crate::error::{Error, Result};
use crate::estimators::pca_project;
use crate::geometry::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningPath {
    CrossValidation { folds: usize },
    Holdout,
}

impl fmt::Display for TuningPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TuningPath::CrossValidation { folds } => write!(f, "cv{folds}"),
            TuningPath::Holdout => f.write_str("holdout"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub best: KnnHyper,
    pub path: TuningPath,
    /// `mse` for forecasting, `error_rate` (1 − accuracy) for classification.
    pub objective: &'static str,
    /// Mean loss over folds per grid point; `None` if it could not be evaluated.
    pub scores: Vec<(KnnHyper, Option<f64>)>,
}

impl TuneResult {
    pub fn best_loss(&self) -> f64 {
        self.scores
            .iter()
            .find(|(h, _)| *h == self.best)
            .and_then(|s| s.1)
            .unwrap_or(f64::NAN)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["k", "weighting", "metric", "pca_dim", "path", "objective", "loss", "selected"]);
        for (h, loss) in &self.scores {
            t.push(vec![
                h.k.into(),
                h.weighting.name().into(),
                h.metric.name().into(),
                super::PcaDim(h.pca_dim).to_string().into(),
                self.path.to_string().into(),
                self.objective.into(),
                loss.map_or("failed".into(), Into::into),
                (*h == self.best).into(),
            ]);
        }
        t
    }
}

/// Expanding-window folds over training windows ordered by start time.
///
/// The start-time range is cut into `folds + 1` equal blocks; fold `i`
/// validates on block `i` and trains on windows whose horizon ends before the
/// first validation target (`start + horizon ≤ block start`). Folds with an
/// empty side are dropped. Returns `(train, validation)` index sets.
pub fn expanding_folds(train: &WindowDataset, folds: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    if train.is_empty() || folds == 0 {
        return Vec::new();
    }
    let lo = train.origins.iter().map(|o| o.1).min().unwrap_or(0);
    let hi = train.origins.iter().map(|o| o.1).max().unwrap_or(0) + 1;
    let span = hi - lo;
    let edge = |b: usize| lo + b * span / (folds + 1);
    (1..=folds)
        .filter_map(|i| {
            let (v0, v1) = (edge(i), edge(i + 1));
            let fit: Vec<usize> = (0..train.len())
                .filter(|&w| train.origins[w].1 + train.horizon <= v0)
                .collect();
            let val: Vec<usize> = (0..train.len())
                .filter(|&w| (v0..v1).contains(&train.origins[w].1))
                .collect();
            (!fit.is_empty() && !val.is_empty()).then_some((fit, val))
        })
        .collect()
}

/// Validation index sets, dealing each class's indices round-robin over
/// `folds` so every fold sees every class in proportion.
pub fn stratified_folds(labels: &[i64], folds: usize) -> Vec<Vec<usize>> {
    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let folds = folds.max(1);
    let mut out = vec![Vec::new(); folds];
    for c in classes {
        for (j, i) in labels.iter().enumerate().filter(|(_, &l)| l == c).map(|(i, _)| i).enumerate() {
            out[j % folds].push(i);
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    out.retain(|f| !f.is_empty());
    out
}

fn complement(n: usize, val: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    val.iter().for_each(|&i| mask[i] = false);
    (0..n).filter(|&i| mask[i]).collect()
}

fn min_class_count(labels: &[i64]) -> usize {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted
        .chunk_by(|a, b| a == b)
        .map(<[i64]>::len)
        .min()
        .unwrap_or(0)
}

/// Chooses the grid point with the lowest mean validation loss; ties go to
/// the earlier grid point.
///
/// With at least `min_cv_windows` training windows, forecasting uses
/// [`expanding_folds`] and classification uses [`stratified_folds`] (with
/// `min(folds, smallest class)` folds, or leave-one-out when a class has a
/// single member). Otherwise the model is trained on `train` and scored on
/// `val`.
pub fn tune(
    train: &WindowDataset,
    val: &WindowDataset,
    grid: &[KnnHyper],
    folds: usize,
    min_cv_windows: usize,
) -> Result<TuneResult> {
    if grid.is_empty() {
        return Err(Error::config("grid", "hyperparameter grid is empty"));
    }
    let objective = match train.targets {
        Targets::Values { .. } => "mse",
        Targets::Labels(_) => "error_rate",
    };
    if grid.len() == 1 {
        return Ok(TuneResult {
            best: grid[0],
            path: TuningPath::Holdout,
            objective,
            scores: vec![(grid[0], None)],
        });
    }
    let splits: Vec<(Vec<usize>, Vec<usize>)> = if train.len() >= min_cv_windows {
        match &train.targets {
            Targets::Values { .. } => expanding_folds(train, folds),
            Targets::Labels(labels) => {
                let f = folds.min(min_class_count(labels));
                let vals = if f >= 2 {
                    stratified_folds(labels, f)
                } else {
                    (0..labels.len()).map(|i| vec![i]).collect()
                };
                vals.into_iter().map(|v| (complement(labels.len(), &v), v)).collect()
            }
        }
    } else {
        Vec::new()
    };
    let (path, pairs) = if splits.is_empty() {
        if val.is_empty() {
            return Err(Error::InsufficientData(format!(
                "{} training windows and no validation windows to tune on",
                train.len()
            )));
        }
        (TuningPath::Holdout, vec![(train.clone(), val.clone())])
    } else {
        let n = splits.len();
        let pairs = splits.iter().map(|(a, b)| (train.select(a), train.select(b))).collect();
        (TuningPath::CrossValidation { folds: n }, pairs)
    };
    log::info!("tuning {} grid points by {path}", grid.len());

    // Group grid points by (metric, pca_dim), keeping first-appearance order.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, h) in grid.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| grid[g[0]].metric == h.metric && grid[g[0]].pca_dim == h.pca_dim)
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let group_scores: Vec<Vec<(usize, Option<f64>)>> = groups
        .par_iter()
        .map(|members| score_group(grid, members, &pairs))
        .collect();
    let mut scores: Vec<(KnnHyper, Option<f64>)> = grid.iter().map(|h| (*h, None)).collect();
    for (i, s) in group_scores.into_iter().flatten() {
        scores[i].1 = s.filter(|v| v.is_finite());
    }
    let best = scores
        .iter()
        .filter_map(|(h, s)| s.map(|v| (*h, v)))
        .fold(None, |acc: Option<(KnnHyper, f64)>, cur| match acc {
            Some(a) if a.1 <= cur.1 => Some(a),
            _ => Some(cur),
        })
        .ok_or_else(|| Error::config("grid", "every hyperparameter grid point failed to evaluate"))?
        .0;
    Ok(TuneResult {
        best,
        path,
        objective,
        scores,
    })
}

fn score_group(grid: &[KnnHyper], members: &[usize], pairs: &[(WindowDataset, WindowDataset)]) -> Vec<(usize, Option<f64>)> {
    let head = grid[members[0]];
    let kmax = members.iter().map(|&i| grid[i].k).max().unwrap_or(1);
    let mut totals = vec![Some(0.0); members.len()];
    for (fit, val) in pairs {
        let nbs = match fold_neighbors(fit, val, head, kmax) {
            Ok(nbs) => nbs,
            Err(e) => {
                log::warn!("grid group metric={} pca={}: {e}", head.metric.name(), super::PcaDim(head.pca_dim));
                return members.iter().map(|&i| (i, None)).collect();
            }
        };
        for (slot, &i) in totals.iter_mut().zip(members) {
            let h = grid[i];
            let k = h.k.min(fit.len());
            let loss = fold_loss(&nbs, k, h, fit, val);
            if let Some(t) = slot {
                *t += loss;
            }
        }
    }
    members
        .iter()
        .zip(totals)
        .map(|(&i, t)| (i, t.map(|v| v / pairs.len() as f64)))
        .collect()
}

fn fold_neighbors(fit: &WindowDataset, val: &WindowDataset, h: KnnHyper, kmax: usize) -> Result<Vec<Vec<Neighbor>>> {
    if fit.is_empty() {
        return Err(Error::InsufficientData("empty training fold".into()));
    }
    let (a, b): (PointSet, PointSet) = match h.pca_dim {
        Some(q) => {
            let m = fit_projection(&fit.inputs, q)?;
            (pca_project(&m, &fit.inputs, q)?, pca_project(&m, &val.inputs, q)?)
        }
        None => (fit.inputs.clone(), val.inputs.clone()),
    };
    neighbors(&a, &b, kmax, h.metric)
}

fn fold_loss(nbs: &[Vec<Neighbor>], k: usize, h: KnnHyper, fit: &WindowDataset, val: &WindowDataset) -> f64 {
    match (&fit.targets, &val.targets) {
        (Targets::Values { h: width, data }, Targets::Values { data: truth, .. }) => {
            let mut pred = vec![0.0; *width];
            let mut sse = 0.0;
            for (nb, t) in nbs.iter().zip(truth.chunks(*width)) {
                average_into(nb, k, h.weighting, data, &mut pred);
                sse += pred.iter().zip(t).map(|(p, y)| (p - y) * (p - y)).sum::<f64>();
            }
            sse / truth.len() as f64
        }
        (Targets::Labels(labels), Targets::Labels(truth)) => {
            let wrong = nbs
                .iter()
                .zip(truth)
                .filter(|(nb, &y)| vote(nb, k, h.weighting, labels) != y)
                .count();
            wrong as f64 / truth.len() as f64
        }
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::windows::{build_windows, segment_windows, Split};
    use crate::forecast::{default_grid, Weighting};
    use crate::geometry::Metric;
    use crate::rng;
    use rand::Rng;

    fn noisy(len: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::from_seed(seed);
        (0..len).map(|_| r.random::<f64>()).collect()
    }

    fn raw(k: usize) -> KnnHyper {
        KnnHyper::raw(k, Weighting::Uniform, Metric::Euclidean)
    }

    #[test]
    fn single_point_grid_returned_unconditionally() {
        let ds = segment_windows(&[noisy(30, 1)], 0, 30, 4, 1).unwrap();
        let empty = ds.select(&[]);
        let r = tune(&ds, &empty, &[raw(99)], 5, 20).unwrap();
        assert_eq!(r.best, raw(99));
    }

    #[test]
    fn nineteen_windows_take_holdout() {
        let series = noisy(200, 2);
        let train = segment_windows(std::slice::from_ref(&series), 0, 23, 4, 1).unwrap();
        assert_eq!(train.len(), 19);
        let val = segment_windows(std::slice::from_ref(&series), 23, 60, 4, 1).unwrap();
        let r = tune(&train, &val, &[raw(1), raw(3)], 5, 20).unwrap();
        assert_eq!(r.path, TuningPath::Holdout);
        let train = segment_windows(&[series], 0, 24, 4, 1).unwrap();
        assert_eq!(train.len(), 20);
        let r = tune(&train, &val, &[raw(1), raw(3)], 5, 20).unwrap();
        assert!(matches!(r.path, TuningPath::CrossValidation { .. }));
    }

    #[test]
    fn memorizing_point_is_selected() {
        // Validation windows duplicate training windows, so k = 1 is exact.
        let train = segment_windows(&[noisy(60, 3)], 0, 60, 5, 2).unwrap();
        let val = train.select(&[3, 9, 20, 41]);
        let r = tune(&train, &val, &[raw(7), raw(3), raw(1), raw(5)], 5, 1000).unwrap();
        assert_eq!(r.best, raw(1));
        assert_eq!(r.best_loss(), 0.0);
    }

    #[test]
    fn ties_go_to_grid_order() {
        let train = segment_windows(&[vec![1.0; 40]], 0, 40, 3, 1).unwrap();
        let val = train.select(&[0, 1]);
        let r = tune(&train, &val, &[raw(5), raw(1), raw(3)], 5, 1000).unwrap();
        assert_eq!(r.best, raw(5));
    }

    #[test]
    fn failing_points_are_skipped_and_all_failing_is_config_error() {
        let train = segment_windows(&[noisy(60, 4)], 0, 60, 4, 1).unwrap();
        let val = train.select(&[1, 2]);
        let big = KnnHyper {
            pca_dim: Some(16),
            ..raw(1)
        };
        let r = tune(&train, &val, &[big, raw(3)], 5, 1000).unwrap();
        assert_eq!(r.best, raw(3));
        assert_eq!(r.scores[0].1, None);
        let err = tune(&train, &val, &[big, KnnHyper { k: 3, ..big }], 5, 1000).unwrap_err();
        assert!(err.is_configuration(), "{err:?}");
    }

    #[test]
    fn folds_purge_overlapping_targets() {
        let [train, ..] = build_windows(&[noisy(2000, 5)], 16, 4, Split::default()).unwrap();
        let folds = expanding_folds(&train, 5);
        assert_eq!(folds.len(), 5);
        for (fit, val) in &folds {
            let v0 = val.iter().map(|&i| train.origins[i].1).min().unwrap();
            let last_fit = fit.iter().map(|&i| train.origins[i].1).max().unwrap();
            assert!(last_fit + train.horizon <= v0);
            // Training target end precedes the first validation target.
            assert!(last_fit + train.lookback + train.horizon <= v0 + train.lookback);
        }
        assert!(folds.windows(2).all(|w| w[0].0.len() < w[1].0.len()));
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let labels = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let folds = stratified_folds(&labels, 2);
        assert_eq!(folds, vec![vec![0, 2, 4, 6, 8], vec![1, 3, 5, 7, 9]]);
    }

    #[test]
    fn full_grid_runs_on_cv() {
        let [train, val, _] = build_windows(&[noisy(600, 6)], 64, 8, Split::default()).unwrap();
        let r = tune(&train, &val, &default_grid(), 5, 20).unwrap();
        assert_eq!(r.scores.len(), 192);
        assert!(matches!(r.path, TuningPath::CrossValidation { folds: 5 }));
        let t = r.to_table();
        assert_eq!(t.rows.len(), 192);
    }
}
