use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::stats::CompensatedSum;

const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Principal axes of a sample, by decreasing explained variance.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }
}

/// Eigen-decomposition of a symmetric `d × d` row-major matrix by cyclic
/// Jacobi rotations. Returns eigenvalues (descending) and matching unit
/// eigenvectors, each with its largest-magnitude entry positive.
pub fn jacobi_eigen(matrix: &[f64], d: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if matrix.len() != d * d {
        return Err(Error::Shape {
            expected: d * d,
            got: matrix.len(),
        });
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                s += 2.0 * a[i * d + j] * a[i * d + j];
            }
        }
        s.sqrt()
    };
    let mut converged = total == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off(&a) <= JACOBI_TOL * total {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&a) > JACOBI_TOL * total {
        return Err(Error::Singular("Jacobi iteration did not converge".into()));
    }
    let mut order: Vec<usize> = (0..d).collect();
    // Stable sort keeps the original axis order among equal eigenvalues.
    order.sort_by(|&i, &j| a[j * d + j].total_cmp(&a[i * d + i]));
    let values = order.iter().map(|&i| a[i * d + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = (0..d).map(|k| v[k * d + i]).collect();
            let lead = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    Ok((values, vectors))
}

/// Fits the top `q` principal components of the sample covariance
/// (denominator `n − 1`).
pub fn pca_fit(data: &PointSet, q: usize) -> Result<PcaModel> {
    let (n, d) = (data.len(), data.dim());
    if n < 2 {
        return Err(Error::InsufficientData(format!("PCA needs at least 2 rows, got {n}")));
    }
    if q == 0 || q > d {
        return Err(Error::Range(format!("q = {q} outside 1..={d}")));
    }
    let mean: Vec<f64> = (0..d)
        .map(|j| data.iter().map(|x| x[j]).collect::<CompensatedSum>().value() / n as f64)
        .collect();
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for x in data.iter() {
        centered.iter_mut().zip(x.iter().zip(&mean)).for_each(|(c, (v, m))| *c = v - m);
        for i in 0..d {
            let ci = centered[i];
            let row = &mut cov[i * d..(i + 1) * d];
            for j in i..d {
                row[j] += ci * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    let (values, vectors) = jacobi_eigen(&cov, d)?;
    Ok(PcaModel {
        mean,
        components: vectors.into_iter().take(q).collect(),
        eigenvalues: values.into_iter().take(q).map(|v| v.max(0.0)).collect(),
    })
}

/// Coordinates of `data` on the first `top` components.
pub fn pca_project(model: &PcaModel, data: &PointSet, top: usize) -> Result<PointSet> {
    if data.dim() != model.dim() {
        return Err(Error::Shape {
            expected: model.dim(),
            got: data.dim(),
        });
    }
    if top == 0 || top > model.n_components() {
        return Err(Error::Range(format!(
            "top = {top} outside 1..={}",
            model.n_components()
        )));
    }
    let comps = &model.components[..top];
    let mut out = Vec::with_capacity(data.len() * top);
    for x in data.iter() {
        for c in comps {
            out.push(
                x.iter()
                    .zip(&model.mean)
                    .zip(c)
                    .map(|((v, m), w)| (v - m) * w)
                    .sum(),
            );
        }
    }
    PointSet::new(out, top)
}

/// Maps projected coordinates back to the original space.
pub fn pca_reconstruct(model: &PcaModel, coords: &PointSet) -> Result<PointSet> {
    let top = coords.dim();
    if top == 0 || top > model.n_components() {
        return Err(Error::Range(format!(
            "{top} coordinates but model has {} components",
            model.n_components()
        )));
    }
    let mut out = Vec::with_capacity(coords.len() * model.dim());
    for z in coords.iter() {
        let mut x = model.mean.clone();
        for (zi, c) in z.iter().zip(&model.components) {
            x.iter_mut().zip(c).for_each(|(xj, cj)| *xj += zi * cj);
        }
        out.extend_from_slice(&x);
    }
    PointSet::new(out, model.dim())
}
