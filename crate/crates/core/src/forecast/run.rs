//! End-to-end forecasting and classification runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::SliceRandom;

use super::io::{read_labeled, read_series, LabeledSet};
use super::knn::KnnModel;
use super::metrics::{accuracy, forecast_metrics, ForecastMetrics};
use super::tune::{tune, TuneResult};
use super::windows::{build_windows, Split, WindowDataset};
use super::{default_pca_dims, hyper_grid, KnnHyper, PcaDim, Weighting, K_GRID};
use crate::config::{ConfigDoc, Profile, Resolved};
use crate::csvfmt::{Cell, Table};
use crate::error::{Error, Result};
use crate::estimators::Standardizer;
use crate::generators::{generate, Family, SequenceSpec, Strength};
use crate::geometry::{Metric, PointSet};
use crate::harness::{RunConfig, RunOutput};
use crate::rng;

/// Scores of one method on the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodScore {
    pub method: String,
    /// `standardized` or `original` for forecasts, `labels` for classification.
    pub scale: &'static str,
    pub hyper: Option<KnnHyper>,
    pub metrics: Option<ForecastMetrics>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub task: &'static str,
    pub split: String,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub tuning: TuneResult,
    pub scores: Vec<MethodScore>,
    /// Largest gap between full-rank PCA-kNN and Raw-kNN (euclidean)
    /// forecasts on the test split.
    pub pca_full_rank_gap: Option<f64>,
}

impl EvalReport {
    pub fn score(&self, method: &str, scale: &str) -> Option<&MethodScore> {
        self.scores.iter().find(|s| s.method == method && s.scale == scale)
    }

    pub fn to_table(&self) -> Table {
        let na = || Cell::from("NA");
        let mut t = Table::new(["task", "method", "scale", "hyper", "mse", "mae", "smape", "accuracy", "split"]);
        for s in &self.scores {
            let (mse, mae, smape) = match &s.metrics {
                Some(m) => (m.mse.into(), m.mae.into(), m.smape.into()),
                None => (na(), na(), na()),
            };
            t.push(vec![
                self.task.into(),
                s.method.as_str().into(),
                s.scale.into(),
                s.hyper.map_or_else(na, |h| h.to_string().into()),
                mse,
                mae,
                smape,
                s.accuracy.map_or_else(na, Cell::from),
                self.split.as_str().into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} train / {} validation / {} test ({}), tuned by {} on {}\nselected: {}\n",
            self.task,
            self.n_train,
            self.n_val,
            self.n_test,
            self.split,
            self.tuning.path,
            self.tuning.objective,
            self.tuning.best
        );
        for m in &self.scores {
            match (&m.metrics, m.accuracy) {
                (Some(f), _) => {
                    let _ = writeln!(
                        s,
                        "  {:<12} {:<12} mse {:.6} mae {:.6} smape {:.4}",
                        m.method, m.scale, f.mse, f.mae, f.smape
                    );
                }
                (None, Some(a)) => {
                    let _ = writeln!(s, "  {:<12} accuracy {:.4}", m.method, a);
                }
                _ => {}
            }
        }
        if let Some(g) = self.pca_full_rank_gap {
            let _ = writeln!(s, "  full-rank PCA-kNN vs Raw-kNN max gap {g:.3e}");
        }
        s
    }
}

/// Repeats the last look-back value over the horizon.
pub fn last_value_forecast(ds: &WindowDataset) -> Vec<f64> {
    ds.inputs
        .iter()
        .flat_map(|x| std::iter::repeat_n(x[x.len() - 1], ds.horizon))
        .collect()
}

// ---------------------------------------------------------------- forecast

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastConfig {
    /// Wide or long CSV; a synthetic AR(1) series when absent.
    pub input: Option<PathBuf>,
    pub lookback: usize,
    pub horizon: usize,
    pub split: Split,
    pub ks: Vec<usize>,
    pub weightings: Vec<Weighting>,
    pub metrics: Vec<Metric>,
    pub pca_dims: Vec<PcaDim>,
    pub folds: usize,
    pub min_cv_windows: usize,
    pub synthetic_rho: f64,
    pub synthetic_len: usize,
    pub seed: u64,
}

impl ForecastConfig {
    pub fn defaults(profile: Profile, seed: u64) -> Self {
        let (lookback, synthetic_len) = match profile {
            Profile::Desk => (64, 5000),
            Profile::Full => (512, 20_000),
        };
        Self {
            input: None,
            lookback,
            horizon: 8,
            split: Split::default(),
            ks: K_GRID.to_vec(),
            weightings: vec![Weighting::Uniform, Weighting::Distance],
            metrics: vec![Metric::Manhattan, Metric::Euclidean],
            pca_dims: default_pca_dims(),
            folds: 5,
            min_cv_windows: 20,
            synthetic_rho: 0.9,
            synthetic_len,
            seed,
        }
    }

    pub fn grid(&self) -> Vec<KnnHyper> {
        hyper_grid(&self.ks, &self.weightings, &self.metrics, &self.pca_dims)
    }

    /// Channels to forecast, in original units.
    pub fn channels(&self) -> Result<Vec<Vec<f64>>> {
        match &self.input {
            Some(path) => Ok(read_series(path)?.columns),
            None => {
                let spec = SequenceSpec::new(
                    Family::LatentAr1,
                    Strength::Value(self.synthetic_rho),
                    1,
                    self.synthetic_len,
                    self.seed,
                );
                Ok(vec![generate(&spec)?.data.column(0)])
            }
        }
    }

    fn cell(&self) -> String {
        match &self.input {
            Some(p) => format!("forecast/{}", p.display()),
            None => format!("forecast/latent_ar1/{}/n{}", self.synthetic_rho, self.synthetic_len),
        }
    }
}

fn check_grid_axes(section: &str, ks: &[usize], w: &[Weighting], m: &[Metric], p: &[PcaDim]) -> Result<()> {
    if ks.contains(&0) {
        return Err(Error::config(format!("{section}.k_grid"), "k values must be positive"));
    }
    for (key, empty) in [
        ("k_grid", ks.is_empty()),
        ("weightings", w.is_empty()),
        ("metrics", m.is_empty()),
        ("pca_dims", p.is_empty()),
    ] {
        if empty {
            return Err(Error::config(format!("{section}.{key}"), "list must not be empty"));
        }
    }
    Ok(())
}

impl RunConfig for ForecastConfig {
    const SECTION: &'static str = "forecast";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let base = Self::defaults(doc.profile()?, doc.seed()?);
        let split = Split::new(
            doc.get_or(s, "train_frac", base.split.train)?,
            doc.get_or(s, "val_frac", base.split.val)?,
        )
        .map_err(|e| Error::config("forecast.train_frac", e.to_string()))?;
        let cfg = Self {
            input: doc.get(s, "input")?,
            lookback: doc.get_or(s, "lookback", base.lookback)?,
            horizon: doc.get_or(s, "horizon", base.horizon)?,
            split,
            ks: doc.list_or(s, "k_grid", base.ks)?,
            weightings: doc.list_or(s, "weightings", base.weightings)?,
            metrics: doc.list_or(s, "metrics", base.metrics)?,
            pca_dims: doc.list_or(s, "pca_dims", base.pca_dims)?,
            folds: doc.get_or(s, "folds", base.folds)?,
            min_cv_windows: doc.get_or(s, "min_cv_windows", base.min_cv_windows)?,
            synthetic_rho: doc.get_or(s, "synthetic_rho", base.synthetic_rho)?,
            synthetic_len: doc.get_or(s, "synthetic_len", base.synthetic_len)?,
            seed: base.seed,
        };
        check_grid_axes(s, &cfg.ks, &cfg.weightings, &cfg.metrics, &cfg.pca_dims)?;
        if cfg.lookback == 0 || cfg.horizon == 0 {
            return Err(Error::config("forecast.lookback", "look-back and horizon must be positive"));
        }
        if cfg.folds == 0 {
            return Err(Error::config("forecast.folds", "need at least one fold"));
        }
        if !(cfg.synthetic_rho.abs() < 1.0) {
            return Err(Error::config("forecast.synthetic_rho", "need |rho| < 1"));
        }
        Ok(cfg)
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        if let Some(p) = &self.input {
            r.put("input", p.display());
        }
        r.put("lookback", self.lookback)
            .put("horizon", self.horizon)
            .put("train_frac", self.split.train)
            .put("val_frac", self.split.val)
            .put_list("k_grid", &self.ks)
            .put_list("weightings", &self.weightings)
            .put_list("metrics", &self.metrics.iter().map(|m| m.name()).collect::<Vec<_>>())
            .put_list("pca_dims", &self.pca_dims)
            .put("folds", self.folds)
            .put("min_cv_windows", self.min_cv_windows)
            .put("synthetic_rho", self.synthetic_rho)
            .put("synthetic_len", self.synthetic_len);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let report = forecast(self)?;
        Ok(RunOutput {
            tables: vec![
                ("forecast_report.csv".into(), report.to_table()),
                ("forecast_tuning.csv".into(), report.tuning.to_table()),
            ],
            cell_seeds: vec![(self.cell(), self.seed)],
            failures: 0,
            summary: report.summary(),
        })
    }
}

/// Standardizes each channel with statistics of its training segment only.
pub(crate) fn standardize_channels(channels: &[Vec<f64>], split: Split) -> Result<(Vec<Vec<f64>>, Vec<Standardizer>)> {
    let mut scaled = Vec::with_capacity(channels.len());
    let mut fits = Vec::with_capacity(channels.len());
    for c in channels {
        let (_, end) = split.bounds(c.len())[0];
        let fit = Standardizer::fit(&PointSet::new(c[..end].to_vec(), 1)?)?;
        scaled.push(c.iter().map(|&v| fit.scale(0, v)).collect());
        fits.push(fit);
    }
    Ok((scaled, fits))
}

fn unscale(values: &[f64], ds: &WindowDataset, fits: &[Standardizer]) -> Vec<f64> {
    values
        .chunks(ds.horizon)
        .zip(&ds.origins)
        .flat_map(|(row, &(c, _))| row.iter().map(move |&z| fits[c].unscale(0, z)))
        .collect()
}

/// Tunes on train (+ validation), refits on train + validation and scores
/// Raw-kNN, full-rank PCA-kNN and the last-value baseline on the test split.
pub fn forecast(cfg: &ForecastConfig) -> Result<EvalReport> {
    let channels = cfg.channels()?;
    let (scaled, fits) = standardize_channels(&channels, cfg.split)?;
    let [train, val, test] = build_windows(&scaled, cfg.lookback, cfg.horizon, cfg.split)?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} training and {} test windows; need at least one of each",
            train.len(),
            test.len()
        )));
    }
    let grid = cfg.grid();
    let tuning = tune(&train, &val, &grid, cfg.folds, cfg.min_cv_windows)?;
    let fit_set = train.concat(&val)?;
    let truth = test.target_values().to_vec();
    let truth_orig = unscale(&truth, &test, &fits);

    let mut scores = Vec::new();
    let mut push = |method: &str, hyper: Option<KnnHyper>, pred: &[f64]| -> Result<()> {
        scores.push(MethodScore {
            method: method.into(),
            scale: "standardized",
            hyper,
            metrics: Some(forecast_metrics(pred, &truth)?),
            accuracy: None,
        });
        scores.push(MethodScore {
            method: method.into(),
            scale: "original",
            hyper,
            metrics: Some(forecast_metrics(&unscale(pred, &test, &fits), &truth_orig)?),
            accuracy: None,
        });
        Ok(())
    };

    // Raw-kNN and PCA-kNN are separate methods: each takes the best grid
    // point of its own family from the shared tuning pass.
    let best_of = |raw: bool| {
        tuning
            .scores
            .iter()
            .filter(|(h, s)| h.pca_dim.is_none() == raw && s.is_some())
            .fold(None, |acc: Option<(KnnHyper, f64)>, (h, s)| {
                let v = s.expect("filtered");
                match acc {
                    Some(a) if a.1 <= v => Some(a),
                    _ => Some((*h, v)),
                }
            })
            .map(|b| b.0)
            .or_else(|| (grid.len() == 1 && grid[0].pca_dim.is_none() == raw).then_some(grid[0]))
    };
    let raw_best = best_of(true);
    if let Some(h) = raw_best {
        push("raw_knn", Some(h), &KnnModel::fit(&fit_set, h)?.predict(&test.inputs)?)?;
    }
    if let Some(h) = best_of(false) {
        push("pca_knn", Some(h), &KnnModel::fit(&fit_set, h)?.predict(&test.inputs)?)?;
    }

    // Full-rank PCA-kNN against Raw-kNN, both euclidean with the tuned k and
    // weighting; orthogonal projection keeps every distance.
    let base = KnnHyper {
        metric: Metric::Euclidean,
        pca_dim: None,
        ..raw_best.unwrap_or(tuning.best)
    };
    let full_h = KnnHyper {
        pca_dim: Some(cfg.lookback),
        ..base
    };
    let raw = KnnModel::fit(&fit_set, base)?.predict(&test.inputs)?;
    let full = KnnModel::fit(&fit_set, full_h)?.predict(&test.inputs)?;
    let gap = raw.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    push("raw_knn_l2", Some(base), &raw)?;
    push("pca_knn_full", Some(full_h), &full)?;

    push("last_value", None, &last_value_forecast(&test))?;

    Ok(EvalReport {
        task: "forecast",
        split: format!(
            "chronological {}/{}/{} L={} H={} channels={}",
            cfg.split.train,
            cfg.split.val,
            (cfg.split.test * 1e9).round() / 1e9,
            cfg.lookback,
            cfg.horizon,
            channels.len()
        ),
        n_train: train.len(),
        n_val: val.len(),
        n_test: test.len(),
        tuning,
        scores,
        pca_full_rank_gap: Some(gap),
    })
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    /// Labelled CSV; synthetic AR(1) classes when absent.
    pub input: Option<PathBuf>,
    /// Separate test file; otherwise a stratified holdout of `input`.
    pub test_input: Option<PathBuf>,
    pub test_frac: f64,
    pub ks: Vec<usize>,
    pub weightings: Vec<Weighting>,
    pub metrics: Vec<Metric>,
    pub pca_dims: Vec<PcaDim>,
    pub folds: usize,
    pub synthetic_per_class: usize,
    pub synthetic_len: usize,
    pub seed: u64,
}

/// Autocorrelations of the two synthetic classes.
pub const SYNTHETIC_CLASS_RHO: [f64; 2] = [0.2, 0.8];

/// `per_class` AR(1) series of length `len` per class, classes interleaved.
pub fn synthetic_classes(per_class: usize, len: usize, seed: u64) -> Result<LabeledSet> {
    let mut rows = Vec::with_capacity(2 * per_class * len);
    let mut labels = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        for (label, &rho) in SYNTHETIC_CLASS_RHO.iter().enumerate() {
            let s = rng::derive_seed(seed, "classify_synthetic", label as u64, i as u64);
            let spec = SequenceSpec::new(Family::LatentAr1, Strength::Value(rho), 1, len, s);
            rows.extend(generate(&spec)?.data.into_flat());
            labels.push(label as i64);
        }
    }
    Ok(LabeledSet {
        inputs: PointSet::new(rows, len)?,
        labels,
    })
}

impl ClassifyConfig {
    pub fn defaults(seed: u64) -> Self {
        Self {
            input: None,
            test_input: None,
            test_frac: 0.3,
            ks: K_GRID.to_vec(),
            weightings: vec![Weighting::Uniform, Weighting::Distance],
            metrics: vec![Metric::Manhattan, Metric::Euclidean],
            pca_dims: default_pca_dims(),
            folds: 5,
            synthetic_per_class: 60,
            synthetic_len: 64,
            seed,
        }
    }

    pub fn grid(&self) -> Vec<KnnHyper> {
        hyper_grid(&self.ks, &self.weightings, &self.metrics, &self.pca_dims)
    }

    /// Train and test sets before standardization.
    pub fn datasets(&self) -> Result<(LabeledSet, LabeledSet)> {
        let all = match &self.input {
            Some(p) => read_labeled(p)?,
            None => synthetic_classes(self.synthetic_per_class, self.synthetic_len, self.seed)?,
        };
        if let Some(p) = &self.test_input {
            return Ok((all, read_labeled(p)?));
        }
        // Stratified holdout: a seeded shuffle within each class.
        let mut rng = rng::stream(self.seed, "classify_split", 0, 0);
        let mut classes = all.labels.clone();
        classes.sort_unstable();
        classes.dedup();
        let (mut tr, mut te) = (Vec::new(), Vec::new());
        for c in classes {
            let mut idx: Vec<usize> = (0..all.labels.len()).filter(|&i| all.labels[i] == c).collect();
            idx.shuffle(&mut rng);
            let n_test = if idx.len() < 2 {
                0
            } else {
                ((self.test_frac * idx.len() as f64).ceil() as usize).clamp(1, idx.len() - 1)
            };
            te.extend_from_slice(&idx[..n_test]);
            tr.extend_from_slice(&idx[n_test..]);
        }
        tr.sort_unstable();
        te.sort_unstable();
        let pick = |idx: &[usize]| LabeledSet {
            inputs: all.inputs.select(idx),
            labels: idx.iter().map(|&i| all.labels[i]).collect(),
        };
        Ok((pick(&tr), pick(&te)))
    }

    fn cell(&self) -> String {
        match &self.input {
            Some(p) => format!("classify/{}", p.display()),
            None => format!("classify/synthetic/{}x{}", self.synthetic_per_class, self.synthetic_len),
        }
    }
}

impl RunConfig for ClassifyConfig {
    const SECTION: &'static str = "classify";

    fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let s = Self::SECTION;
        let base = Self::defaults(doc.seed()?);
        let cfg = Self {
            input: doc.get(s, "input")?,
            test_input: doc.get(s, "test_input")?,
            test_frac: doc.get_or(s, "test_frac", base.test_frac)?,
            ks: doc.list_or(s, "k_grid", base.ks)?,
            weightings: doc.list_or(s, "weightings", base.weightings)?,
            metrics: doc.list_or(s, "metrics", base.metrics)?,
            pca_dims: doc.list_or(s, "pca_dims", base.pca_dims)?,
            folds: doc.get_or(s, "folds", base.folds)?,
            synthetic_per_class: doc.get_or(s, "synthetic_per_class", base.synthetic_per_class)?,
            synthetic_len: doc.get_or(s, "synthetic_len", base.synthetic_len)?,
            seed: base.seed,
        };
        check_grid_axes(s, &cfg.ks, &cfg.weightings, &cfg.metrics, &cfg.pca_dims)?;
        if !(cfg.test_frac > 0.0 && cfg.test_frac < 1.0) {
            return Err(Error::config("classify.test_frac", "must lie in (0, 1)"));
        }
        if cfg.folds == 0 {
            return Err(Error::config("classify.folds", "need at least one fold"));
        }
        Ok(cfg)
    }

    fn resolved(&self) -> Resolved {
        let mut r = Resolved::new(Self::SECTION);
        if let Some(p) = &self.input {
            r.put("input", p.display());
        }
        if let Some(p) = &self.test_input {
            r.put("test_input", p.display());
        }
        r.put("test_frac", self.test_frac)
            .put_list("k_grid", &self.ks)
            .put_list("weightings", &self.weightings)
            .put_list("metrics", &self.metrics.iter().map(|m| m.name()).collect::<Vec<_>>())
            .put_list("pca_dims", &self.pca_dims)
            .put("folds", self.folds)
            .put("synthetic_per_class", self.synthetic_per_class)
            .put("synthetic_len", self.synthetic_len);
        r
    }

    fn run(&self) -> Result<RunOutput> {
        let report = classify(self)?;
        Ok(RunOutput {
            tables: vec![
                ("classify_report.csv".into(), report.to_table()),
                ("classify_tuning.csv".into(), report.tuning.to_table()),
            ],
            cell_seeds: vec![(self.cell(), self.seed)],
            failures: 0,
            summary: report.summary(),
        })
    }
}

/// Per-feature standardization from the training rows, stratified CV over
/// the grid, and test accuracy of the refitted model.
pub fn classify(cfg: &ClassifyConfig) -> Result<EvalReport> {
    let (train, test) = cfg.datasets()?;
    if test.labels.is_empty() {
        return Err(Error::InsufficientData("classification test set is empty".into()));
    }
    let scaler = Standardizer::fit(&train.inputs)?;
    let train = WindowDataset::labeled(scaler.apply(&train.inputs)?, train.labels)?;
    let test = WindowDataset::labeled(scaler.apply(&test.inputs)?, test.labels)?;
    // Cross-validation whenever there are two or more training rows.
    let tuning = tune(&train, &train.select(&[]), &cfg.grid(), cfg.folds, 2)?;
    let truth = test.labels().expect("labelled");
    let pred = KnnModel::fit(&train, tuning.best)?.predict_labels(&test.inputs)?;
    let scores = vec![MethodScore {
        method: "knn".into(),
        scale: "labels",
        hyper: Some(tuning.best),
        metrics: None,
        accuracy: Some(accuracy(&pred, truth)?),
    }];
    Ok(EvalReport {
        task: "classify",
        split: match &cfg.test_input {
            Some(_) => "separate test file".into(),
            None => format!("stratified holdout test_frac={}", cfg.test_frac),
        },
        n_train: train.len(),
        n_val: 0,
        n_test: test.len(),
        tuning,
        scores,
        pca_full_rank_gap: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ForecastConfig {
        ForecastConfig {
            synthetic_len: 800,
            lookback: 16,
            horizon: 4,
            pca_dims: vec![PcaDim(None), PcaDim(Some(8))],
            ks: vec![1, 5, 9],
            ..ForecastConfig::defaults(Profile::Desk, seed)
        }
    }

    #[test]
    fn train_statistics_ignore_test_segment() {
        let cfg = small(1);
        let chans = cfg.channels().unwrap();
        let (a, fa) = standardize_channels(&chans, cfg.split).unwrap();
        let mut shifted = chans.clone();
        let start = cfg.split.bounds(shifted[0].len())[2].0;
        shifted[0][start..].iter_mut().for_each(|v| *v = *v * 10.0 + 100.0);
        let (b, fb) = standardize_channels(&shifted, cfg.split).unwrap();
        assert_eq!(fa, fb);
        assert_eq!(a[0][..start], b[0][..start]);
    }

    #[test]
    fn forecast_runs_and_reports_both_scales() {
        let r = forecast(&small(2)).unwrap();
        for m in ["raw_knn", "pca_knn", "raw_knn_l2", "pca_knn_full", "last_value"] {
            for scale in ["standardized", "original"] {
                let s = r.score(m, scale).unwrap().metrics.unwrap();
                assert!(s.mse >= 0.0 && (0.0..=200.0).contains(&s.smape));
            }
        }
        assert!(r.pca_full_rank_gap.unwrap() <= 1e-8);
        assert_eq!(r.to_table().rows.len(), 10);
        // Original-scale baseline matches a direct computation.
        let cfg = small(2);
        let chans = cfg.channels().unwrap();
        let [.., test] = build_windows(&chans, 16, 4, cfg.split).unwrap();
        let direct = forecast_metrics(&last_value_forecast(&test), test.target_values()).unwrap();
        let got = r.score("last_value", "original").unwrap().metrics.unwrap();
        assert!((got.mse - direct.mse).abs() <= 1e-9 * direct.mse);
    }

    #[test]
    fn forecast_is_deterministic() {
        let a = forecast(&small(3)).unwrap();
        let b = forecast(&small(3)).unwrap();
        assert_eq!(a.to_table(), b.to_table());
        assert_eq!(a.tuning.to_table(), b.tuning.to_table());
    }

    #[test]
    fn classify_synthetic_beats_chance() {
        let cfg = ClassifyConfig {
            synthetic_per_class: 40,
            ks: vec![1, 5, 15],
            pca_dims: vec![PcaDim(None), PcaDim(Some(8))],
            ..ClassifyConfig::defaults(4)
        };
        let (train, test) = cfg.datasets().unwrap();
        assert_eq!(train.labels.len() + test.labels.len(), 80);
        assert_eq!(test.labels.iter().filter(|&&l| l == 0).count(), 12);
        let r = classify(&cfg).unwrap();
        let acc = r.scores[0].accuracy.unwrap();
        assert!((0.0..=1.0).contains(&acc));
        assert!(acc > 0.5, "accuracy {acc}");
    }

    #[test]
    fn configs_round_trip() {
        let doc = ConfigDoc::parse("seed = 9\n[forecast]\nk_grid = 1,3\npca_dims = none,8\n").unwrap();
        let cfg = ForecastConfig::from_doc(&doc).unwrap();
        assert_eq!(cfg.grid().len(), 2 * 2 * 2 * 2);
        let text = crate::harness::resolved_text(&doc, &cfg.resolved()).unwrap();
        assert_eq!(ForecastConfig::from_doc(&ConfigDoc::parse(&text).unwrap()).unwrap(), cfg);
        let c = ClassifyConfig::from_doc(&doc).unwrap();
        let text = crate::harness::resolved_text(&doc, &c.resolved()).unwrap();
        assert_eq!(ClassifyConfig::from_doc(&ConfigDoc::parse(&text).unwrap()).unwrap(), c);
        let bad = ConfigDoc::parse("[forecast]\ntrain_frac = 0.95\n").unwrap();
        assert!(ForecastConfig::from_doc(&bad).unwrap_err().is_configuration());
    }
}
