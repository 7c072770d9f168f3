use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Chronological train/validation/test fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for Split {
    fn default() -> Self {
        Self {
            train: 0.6,
            val: 0.1,
            test: 0.3,
        }
    }
}

impl Split {
    pub fn new(train: f64, val: f64) -> Result<Self> {
        let s = Self {
            train,
            val,
            test: 1.0 - train - val,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|p| !(*p >= -1e-12 && *p <= 1.0 + 1e-12)) || !(self.train > 0.0) {
            return Err(Error::config("split", format!("invalid fractions {self:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::config("split", format!("fractions must sum to 1, got {self:?}")));
        }
        Ok(())
    }

    /// Segment boundaries `[0, a)`, `[a, b)`, `[b, len)`.
    pub fn bounds(&self, len: usize) -> [(usize, usize); 3] {
        let a = ((self.train * len as f64).floor() as usize).min(len);
        let b = (((self.train + self.val) * len as f64).floor() as usize).clamp(a, len);
        [(0, a), (a, b), (b, len)]
    }
}

/// Forecast horizons or class labels, one per input.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Row-major `len × h` values.
    Values { h: usize, data: Vec<f64> },
    Labels(Vec<i64>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Values { h, data } => data.len() / h,
            Targets::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, idx: &[usize]) -> Targets {
        match self {
            Targets::Values { h, data } => Targets::Values {
                h: *h,
                data: idx.iter().flat_map(|&i| data[i * h..(i + 1) * h].iter().copied()).collect(),
            },
            Targets::Labels(l) => Targets::Labels(idx.iter().map(|&i| l[i]).collect()),
        }
    }
}

/// Inputs of length `L` with their targets.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDataset {
    pub inputs: PointSet,
    pub targets: Targets,
    pub lookback: usize,
    pub horizon: usize,
    /// `(channel, start)` of each window; for labelled data, `(0, row)`.
    pub origins: Vec<(usize, usize)>,
}

impl WindowDataset {
    pub fn labeled(inputs: PointSet, labels: Vec<i64>) -> Result<Self> {
        if inputs.len() != labels.len() {
            return Err(Error::Shape {
                expected: inputs.len(),
                got: labels.len(),
            });
        }
        Ok(Self {
            lookback: inputs.dim(),
            horizon: 0,
            origins: (0..labels.len()).map(|i| (0, i)).collect(),
            inputs,
            targets: Targets::Labels(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Horizon values of window `i`.
    pub fn target(&self, i: usize) -> &[f64] {
        match &self.targets {
            Targets::Values { h, data } => &data[i * h..(i + 1) * h],
            Targets::Labels(_) => &[],
        }
    }

    pub fn labels(&self) -> Option<&[i64]> {
        match &self.targets {
            Targets::Labels(l) => Some(l),
            Targets::Values { .. } => None,
        }
    }

    /// Flattened horizon values of every window.
    pub fn target_values(&self) -> &[f64] {
        match &self.targets {
            Targets::Values { data, .. } => data,
            Targets::Labels(_) => &[],
        }
    }

    pub fn select(&self, idx: &[usize]) -> WindowDataset {
        WindowDataset {
            inputs: self.inputs.select(idx),
            targets: self.targets.select(idx),
            lookback: self.lookback,
            horizon: self.horizon,
            origins: idx.iter().map(|&i| self.origins[i]).collect(),
        }
    }

    pub fn concat(&self, other: &WindowDataset) -> Result<WindowDataset> {
        if self.inputs.dim() != other.inputs.dim() {
            return Err(Error::Shape {
                expected: self.inputs.dim(),
                got: other.inputs.dim(),
            });
        }
        let mut data = self.inputs.as_flat().to_vec();
        data.extend_from_slice(other.inputs.as_flat());
        let targets = match (&self.targets, &other.targets) {
            (Targets::Values { h, data: a }, Targets::Values { data: b, .. }) => Targets::Values {
                h: *h,
                data: a.iter().chain(b).copied().collect(),
            },
            (Targets::Labels(a), Targets::Labels(b)) => Targets::Labels(a.iter().chain(b).copied().collect()),
            _ => return Err(Error::Parameter("cannot mix forecast and label targets".into())),
        };
        Ok(WindowDataset {
            inputs: PointSet::new(data, self.inputs.dim())?,
            targets,
            lookback: self.lookback,
            horizon: self.horizon,
            origins: self.origins.iter().chain(&other.origins).copied().collect(),
        })
    }
}

/// Stride-1 windows lying entirely inside `[start, end)` of each channel.
pub fn segment_windows(channels: &[Vec<f64>], start: usize, end: usize, lookback: usize, horizon: usize) -> Result<WindowDataset> {
    if lookback == 0 || horizon == 0 {
        return Err(Error::config("lookback", "look-back and horizon must be positive"));
    }
    let span = lookback + horizon;
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut origins = Vec::new();
    for (c, series) in channels.iter().enumerate() {
        let end = end.min(series.len());
        let mut t = start;
        while t + span <= end {
            inputs.extend_from_slice(&series[t..t + lookback]);
            targets.extend_from_slice(&series[t + lookback..t + span]);
            origins.push((c, t));
            t += 1;
        }
    }
    Ok(WindowDataset {
        inputs: PointSet::new(inputs, lookback)?,
        targets: Targets::Values { h: horizon, data: targets },
        lookback,
        horizon,
        origins,
    })
}

/// Train, validation and test windows from a chronological split of every
/// channel. No window crosses a segment boundary.
pub fn build_windows(channels: &[Vec<f64>], lookback: usize, horizon: usize, split: Split) -> Result<[WindowDataset; 3]> {
    split.validate()?;
    let len = channels.iter().map(Vec::len).min().unwrap_or(0);
    if channels.is_empty() || len < lookback + horizon {
        return Err(Error::InsufficientData(format!(
            "series of length {len} is shorter than look-back + horizon = {}",
            lookback + horizon
        )));
    }
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::Shape {
            expected: len,
            got: channels.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    let [a, b, c] = split.bounds(len);
    Ok([
        segment_windows(channels, a.0, a.1, lookback, horizon)?,
        segment_windows(channels, b.0, b.1, lookback, horizon)?,
        segment_windows(channels, c.0, c.1, lookback, horizon)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(len: usize) -> Vec<f64> {
        (0..len).map(|i| i as f64).collect()
    }

    #[test]
    fn exact_length_gives_one_window() {
        let [train, val, test] = build_windows(&[ramp(72)], 64, 8, Split::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!((train.len(), val.len(), test.len()), (1, 0, 0));
        assert_eq!(train.target(0), &ramp(72)[64..]);
        assert!(build_windows(&[ramp(71)], 64, 8, Split::default()).is_err());
    }

    #[test]
    fn boundaries_respected() {
        let series = ramp(1000);
        let [train, val, test] = build_windows(&[series], 64, 8, Split::default()).unwrap();
        let segs = Split::default().bounds(1000);
        assert_eq!(segs, [(0, 600), (600, 700), (700, 1000)]);
        for (ds, (lo, hi)) in [&train, &val, &test].into_iter().zip(segs) {
            for (i, &(_, t)) in ds.origins.iter().enumerate() {
                // Values equal their time index, so content reveals position.
                let first = ds.inputs.point(i)[0] as usize;
                let last = *ds.target(i).last().unwrap() as usize;
                assert_eq!(first, t);
                assert!(first >= lo && last < hi, "window [{first}, {last}] outside [{lo}, {hi})");
            }
        }
        assert_eq!(train.len(), 600 - 72 + 1);
        assert_eq!(val.len(), 100 - 72 + 1);
        assert_eq!(test.len(), 300 - 72 + 1);
    }

    #[test]
    fn channels_are_pooled() {
        let chans = vec![ramp(100), ramp(100).iter().map(|v| -v).collect()];
        let [train, ..] = build_windows(&chans, 10, 2, Split::default()).unwrap();
        assert_eq!(train.len(), 2 * (60 - 12 + 1));
        assert_eq!(train.origins[49], (1, 0));
    }

    #[test]
    fn split_validation() {
        assert!(Split::new(0.0, 0.5).is_err());
        assert!(Split::new(0.8, 0.5).is_err());
        assert_eq!(Split::new(0.6, 0.1).unwrap().bounds(10), [(0, 6), (6, 7), (7, 10)]);
    }

    #[test]
    fn select_and_concat() {
        let [train, val, _] = build_windows(&[ramp(300)], 8, 2, Split::default()).unwrap();
        let both = train.concat(&val).unwrap();
        assert_eq!(both.len(), train.len() + val.len());
        let sub = both.select(&[0, both.len() - 1]);
        assert_eq!(sub.target(1), val.target(val.len() - 1));
    }
}
