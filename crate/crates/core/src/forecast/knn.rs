//! Brute-force neighbor search and target aggregation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::windows::{Targets, WindowDataset};
use super::{KnnHyper, Weighting, DISTANCE_EPS};
use crate::error::{Error, Result};
use crate::estimators::{pca_fit, pca_project, PcaModel};
use crate::geometry::{Metric, PointSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub dist: f64,
    pub index: usize,
}

/// The `kmax` nearest training points of every query, ordered by distance
/// and then by training index.
pub fn neighbors(train: &PointSet, queries: &PointSet, kmax: usize, metric: Metric) -> Result<Vec<Vec<Neighbor>>> {
    if train.is_empty() {
        return Err(Error::InsufficientData("no training inputs".into()));
    }
    if queries.dim() != train.dim() {
        return Err(Error::Shape {
            expected: train.dim(),
            got: queries.dim(),
        });
    }
    let kmax = kmax.clamp(1, train.len());
    let order = |a: &Neighbor, b: &Neighbor| a.dist.total_cmp(&b.dist).then(a.index.cmp(&b.index));
    Ok((0..queries.len())
        .into_par_iter()
        .map(|q| {
            let x = queries.point(q);
            let mut all: Vec<Neighbor> = train
                .iter()
                .enumerate()
                .map(|(index, p)| Neighbor {
                    dist: metric.distance(p, x),
                    index,
                })
                .collect();
            if kmax < all.len() {
                all.select_nth_unstable_by(kmax - 1, order);
                all.truncate(kmax);
            }
            all.sort_unstable_by(order);
            all
        })
        .collect())
}

fn weight(weighting: Weighting, dist: f64) -> f64 {
    match weighting {
        Weighting::Uniform => 1.0,
        Weighting::Distance => 1.0 / (dist + DISTANCE_EPS),
    }
}

/// Weighted mean of the first `k` neighbors' horizon vectors, written to `out`.
pub(crate) fn average_into(nb: &[Neighbor], k: usize, weighting: Weighting, targets: &[f64], out: &mut [f64]) {
    let h = out.len();
    let nb = &nb[..k.min(nb.len())];
    if let [only] = nb {
        // A single neighbor is returned verbatim under either weighting.
        out.copy_from_slice(&targets[only.index * h..(only.index + 1) * h]);
        return;
    }
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut total = 0.0;
    for n in nb {
        let w = weight(weighting, n.dist);
        total += w;
        for (o, t) in out.iter_mut().zip(&targets[n.index * h..(n.index + 1) * h]) {
            *o += w * t;
        }
    }
    out.iter_mut().for_each(|v| *v /= total);
}

/// Weighted majority vote over the first `k` neighbors. Ties go to the
/// smaller distance sum, then the lower label.
pub(crate) fn vote(nb: &[Neighbor], k: usize, weighting: Weighting, labels: &[i64]) -> i64 {
    let mut tally: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for n in &nb[..k.min(nb.len())] {
        let e = tally.entry(labels[n.index]).or_insert((0.0, 0.0));
        e.0 += weight(weighting, n.dist);
        e.1 += n.dist;
    }
    let mut best: Option<(i64, f64, f64)> = None;
    for (&label, &(w, dsum)) in &tally {
        let better = match best {
            None => true,
            Some((_, bw, bd)) => w > bw || (w == bw && dsum < bd),
        };
        if better {
            best = Some((label, w, dsum));
        }
    }
    best.map_or(0, |b| b.0)
}

/// Output of a single query.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Values(Vec<f64>),
    Label(i64),
}

/// A fitted Raw-kNN or PCA-kNN predictor.
#[derive(Debug, Clone)]
pub struct KnnModel {
    pub hyper: KnnHyper,
    /// Effective `k` after clamping to the training size.
    pub k: usize,
    pub pca: Option<PcaModel>,
    inputs: PointSet,
    targets: Targets,
}

impl KnnModel {
    /// Stores the training windows, projecting them when `hyper.pca_dim` is
    /// set; the projection is fitted on these inputs only.
    pub fn fit(train: &WindowDataset, hyper: KnnHyper) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InsufficientData("no training windows".into()));
        }
        if hyper.k == 0 {
            return Err(Error::config("k", "k must be positive"));
        }
        let k = if hyper.k > train.len() {
            log::warn!("k = {} exceeds {} training windows; using k = {}", hyper.k, train.len(), train.len());
            train.len()
        } else {
            hyper.k
        };
        let pca = hyper.pca_dim.map(|q| fit_projection(&train.inputs, q)).transpose()?;
        let inputs = match &pca {
            Some(m) => pca_project(m, &train.inputs, m.n_components())?,
            None => train.inputs.clone(),
        };
        Ok(Self {
            hyper,
            k,
            pca,
            inputs,
            targets: train.targets.clone(),
        })
    }

    /// Queries in the space neighbors are searched in.
    pub fn transform(&self, queries: &PointSet) -> Result<PointSet> {
        match &self.pca {
            Some(m) => pca_project(m, queries, m.n_components()),
            None => Ok(queries.clone()),
        }
    }

    pub fn neighbors(&self, queries: &PointSet) -> Result<Vec<Vec<Neighbor>>> {
        neighbors(&self.inputs, &self.transform(queries)?, self.k, self.hyper.metric)
    }

    /// Row-major forecasts, `horizon` values per query.
    pub fn predict(&self, queries: &PointSet) -> Result<Vec<f64>> {
        let Targets::Values { h, data } = &self.targets else {
            return Err(Error::Parameter("model was fitted on labels; use predict_labels".into()));
        };
        let nbs = self.neighbors(queries)?;
        let mut out = vec![0.0; nbs.len() * h];
        for (nb, row) in nbs.iter().zip(out.chunks_mut(*h)) {
            average_into(nb, self.k, self.hyper.weighting, data, row);
        }
        Ok(out)
    }

    pub fn predict_labels(&self, queries: &PointSet) -> Result<Vec<i64>> {
        let Targets::Labels(labels) = &self.targets else {
            return Err(Error::Parameter("model was fitted on forecasts; use predict".into()));
        };
        Ok(self
            .neighbors(queries)?
            .iter()
            .map(|nb| vote(nb, self.k, self.hyper.weighting, labels))
            .collect())
    }
}

pub(crate) fn fit_projection(inputs: &PointSet, q: usize) -> Result<PcaModel> {
    if q > inputs.dim() {
        return Err(Error::config(
            "pca_dims",
            format!("pca dimension {q} exceeds input dimension {}", inputs.dim()),
        ));
    }
    pca_fit(inputs, q)
}

/// Prediction for one query from `train` under `hyper`.
pub fn knn_predict(train: &WindowDataset, query: &[f64], hyper: KnnHyper) -> Result<Prediction> {
    let model = KnnModel::fit(train, hyper)?;
    let q = PointSet::new(query.to_vec(), query.len())?;
    Ok(match train.targets {
        Targets::Values { .. } => Prediction::Values(model.predict(&q)?),
        Targets::Labels(_) => Prediction::Label(model.predict_labels(&q)?[0]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::windows::segment_windows;
    use crate::rng;
    use rand::Rng;

    fn noisy(len: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::from_seed(seed);
        (0..len).map(|_| r.random::<f64>()).collect()
    }

    #[test]
    fn k1_returns_nearest_target_exactly() {
        let ds = segment_windows(&[noisy(200, 1)], 0, 200, 6, 3).unwrap();
        let q = ds.inputs.point(17).to_vec();
        for w in [Weighting::Uniform, Weighting::Distance] {
            let got = knn_predict(&ds, &q, KnnHyper::raw(1, w, Metric::Euclidean)).unwrap();
            assert_eq!(got, Prediction::Values(ds.target(17).to_vec()));
        }
    }

    #[test]
    fn k1_weightings_agree_on_new_queries() {
        let ds = segment_windows(&[noisy(300, 2)], 0, 300, 5, 2).unwrap();
        let queries = PointSet::new(noisy(50, 3), 5).unwrap();
        let a = KnnModel::fit(&ds, KnnHyper::raw(1, Weighting::Uniform, Metric::Manhattan)).unwrap();
        let b = KnnModel::fit(&ds, KnnHyper::raw(1, Weighting::Distance, Metric::Manhattan)).unwrap();
        assert_eq!(a.predict(&queries).unwrap(), b.predict(&queries).unwrap());
    }

    #[test]
    fn duplicate_query_uniform_k3_is_mean_of_three_nearest() {
        let ds = segment_windows(&[noisy(120, 4)], 0, 120, 4, 2).unwrap();
        let q = ds.inputs.point(30).to_vec();
        let nb = neighbors(&ds.inputs, &PointSet::new(q.clone(), 4).unwrap(), 3, Metric::Euclidean).unwrap();
        assert_eq!(nb[0][0], Neighbor { dist: 0.0, index: 30 });
        let want: Vec<f64> = (0..2)
            .map(|j| nb[0].iter().map(|n| ds.target(n.index)[j]).sum::<f64>() / 3.0)
            .collect();
        let got = knn_predict(&ds, &q, KnnHyper::raw(3, Weighting::Uniform, Metric::Euclidean)).unwrap();
        let Prediction::Values(got) = got else { panic!() };
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-15);
        }
    }

    #[test]
    fn neighbors_match_full_sort() {
        let train = PointSet::new(noisy(600, 5), 3).unwrap();
        let queries = PointSet::new(noisy(30, 6), 3).unwrap();
        let nbs = neighbors(&train, &queries, 7, Metric::Manhattan).unwrap();
        for (q, nb) in nbs.iter().enumerate() {
            let mut all: Vec<(f64, usize)> = train
                .iter()
                .enumerate()
                .map(|(i, p)| (Metric::Manhattan.distance(p, queries.point(q)), i))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let got: Vec<(f64, usize)> = nb.iter().map(|n| (n.dist, n.index)).collect();
            assert_eq!(got, all[..7]);
        }
    }

    #[test]
    fn k_is_clamped() {
        let ds = segment_windows(&[noisy(10, 7)], 0, 10, 3, 1).unwrap();
        let m = KnnModel::fit(&ds, KnnHyper::raw(31, Weighting::Uniform, Metric::Euclidean)).unwrap();
        assert_eq!(m.k, ds.len());
        let mean = ds.target_values().iter().sum::<f64>() / ds.len() as f64;
        let got = m.predict(&PointSet::new(vec![0.0; 3], 3).unwrap()).unwrap();
        assert!((got[0] - mean).abs() < 1e-15);
    }

    #[test]
    fn vote_tie_breaks() {
        let labels = [5, 2, 7];
        // Equal weights; label 2 is nearer in total.
        let nb = [
            Neighbor { dist: 0.3, index: 0 },
            Neighbor { dist: 0.1, index: 1 },
        ];
        assert_eq!(vote(&nb, 2, Weighting::Uniform, &labels), 2);
        // Equal weights and distance sums; lower label wins.
        let nb = [
            Neighbor { dist: 0.2, index: 2 },
            Neighbor { dist: 0.2, index: 0 },
        ];
        assert_eq!(vote(&nb, 2, Weighting::Uniform, &labels), 5);
        let nb = [
            Neighbor { dist: 0.1, index: 2 },
            Neighbor { dist: 0.2, index: 0 },
            Neighbor { dist: 0.3, index: 0 },
        ];
        assert_eq!(vote(&nb, 3, Weighting::Uniform, &labels), 5);
        assert_eq!(vote(&nb, 3, Weighting::Distance, &labels), 7);
    }

    #[test]
    fn full_rank_pca_matches_raw() {
        let ds = segment_windows(&[noisy(400, 8)], 0, 400, 8, 2).unwrap();
        let queries = PointSet::new(noisy(80, 9), 8).unwrap();
        for w in [Weighting::Uniform, Weighting::Distance] {
            let raw = KnnModel::fit(&ds, KnnHyper::raw(5, w, Metric::Euclidean)).unwrap();
            let pca = KnnModel::fit(
                &ds,
                KnnHyper {
                    pca_dim: Some(8),
                    ..KnnHyper::raw(5, w, Metric::Euclidean)
                },
            )
            .unwrap();
            let (a, b) = (raw.predict(&queries).unwrap(), pca.predict(&queries).unwrap());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn oversized_pca_is_config_error() {
        let ds = segment_windows(&[noisy(50, 10)], 0, 50, 4, 1).unwrap();
        let h = KnnHyper {
            pca_dim: Some(8),
            ..KnnHyper::raw(1, Weighting::Uniform, Metric::Euclidean)
        };
        assert!(KnnModel::fit(&ds, h).unwrap_err().is_configuration());
    }

    #[test]
    fn classification_predicts_labels() {
        let inputs = PointSet::new(vec![0.0, 0.1, 0.2, 5.0, 5.1, 5.2], 1).unwrap();
        let ds = WindowDataset::labeled(inputs, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let m = KnnModel::fit(&ds, KnnHyper::raw(3, Weighting::Uniform, Metric::Euclidean)).unwrap();
        let q = PointSet::new(vec![0.05, 4.9], 1).unwrap();
        assert_eq!(m.predict_labels(&q).unwrap(), [0, 1]);
        assert!(m.predict(&q).is_err());
    }
}
