use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::stats::CompensatedSum;

/// Per-coordinate centering and scaling learned from one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Sample standard deviations (denominator `n − 1`).
    pub stds: Vec<f64>,
    /// Coordinates with zero spread; these are centered but not scaled.
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(data: &PointSet) -> Result<Self> {
        let (n, d) = (data.len(), data.dim());
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "standardization needs at least 2 rows, got {n}"
            )));
        }
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        for j in 0..d {
            let m = data.iter().map(|x| x[j]).collect::<CompensatedSum>().value() / n as f64;
            let ss: CompensatedSum = data.iter().map(|x| (x[j] - m) * (x[j] - m)).collect();
            means.push(m);
            stds.push((ss.value() / (n - 1) as f64).sqrt());
        }
        let constant: Vec<bool> = stds.iter().map(|&s| !(s > 0.0)).collect();
        for (j, _) in constant.iter().enumerate().filter(|(_, &c)| c) {
            log::warn!("coordinate {j} is constant; passing it through centered");
        }
        Ok(Self { means, stds, constant })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, data: &PointSet) -> Result<PointSet> {
        if data.dim() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                got: data.dim(),
            });
        }
        let mut out = Vec::with_capacity(data.as_flat().len());
        for x in data.iter() {
            out.extend(x.iter().enumerate().map(|(j, v)| self.scale(j, *v)));
        }
        PointSet::new(out, self.dim())
    }

    /// Standardized value of coordinate `j`.
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        let c = v - self.means[j];
        if self.constant[j] {
            c
        } else {
            c / self.stds[j]
        }
    }

    /// Inverse of [`Standardizer::scale`].
    pub fn unscale(&self, j: usize, z: f64) -> f64 {
        if self.constant[j] {
            z + self.means[j]
        } else {
            z * self.stds[j] + self.means[j]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub data: PointSet,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub constant: Vec<bool>,
}

/// Centers every coordinate and scales it to unit sample variance.
pub fn standardize(data: &PointSet) -> Result<Standardized> {
    let fit = Standardizer::fit(data)?;
    let out = fit.apply(data)?;
    Ok(Standardized {
        data: out,
        means: fit.means,
        stds: fit.stds,
        constant: fit.constant,
    })
}
