//! Latent Gaussian AR(1) process and its linear embedding into ℝ^20.

use super::{expect_family, interleave, normal, Family, GeneratedRow, SequenceSpec};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::rng;

/// Width of the signal representation.
pub const SIGNAL_DIM: usize = 5;
/// Observed dimension.
pub const AMBIENT_DIM: usize = 20;

/// `Z_t = ρ Z_{t−1} + √(1−ρ²) ε_t` with independent coordinates.
///
/// `spec.d` is the latent dimension `s` and the strength resolves to `ρ`.
/// `Z_0` is drawn from N(0, I_s) and the chain runs `spec.burn_in` steps
/// before the first emitted value.
pub fn gen_latent_ar1(spec: &SequenceSpec) -> Result<GeneratedRow> {
    expect_family(spec, Family::LatentAr1)?;
    spec.validate()?;
    let rho = spec.parameter()?;
    if !(rho.abs() < 1.0) {
        return Err(Error::Parameter(format!(
            "latent_ar1 requires |rho| < 1, got {rho}"
        )));
    }
    let innov = (1.0 - rho * rho).sqrt();
    let columns: Vec<Vec<f64>> = (0..spec.d)
        .map(|j| {
            let mut rng = spec.stream("coordinate", j);
            let mut z = normal(&mut rng);
            for _ in 0..spec.burn_in {
                z = rho * z + innov * normal(&mut rng);
            }
            (0..spec.n)
                .map(|_| {
                    z = rho * z + innov * normal(&mut rng);
                    z
                })
                .collect()
        })
        .collect();
    Ok(GeneratedRow {
        data: interleave(&columns)?,
        gaussian: None,
        spec: spec.clone(),
    })
}

/// Fixed `20 × 5` matrix with orthonormal columns, stored column-major.
///
/// Drawn as a standard normal matrix from `seed`, then orthonormalised by
/// modified Gram–Schmidt with one re-orthogonalisation pass.
pub fn orthonormal_map(seed: u64) -> Vec<[f64; AMBIENT_DIM]> {
    let mut rng = rng::stream(seed, "embedding", 0, 0);
    let mut cols: Vec<[f64; AMBIENT_DIM]> = (0..SIGNAL_DIM)
        .map(|_| {
            let mut c = [0.0; AMBIENT_DIM];
            c.iter_mut().for_each(|v| *v = normal(&mut rng));
            c
        })
        .collect();
    for j in 0..SIGNAL_DIM {
        for _pass in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj: f64 = done[i].iter().zip(rest[0].iter()).map(|(a, b)| a * b).sum();
                rest[0].iter_mut().zip(done[i].iter()).for_each(|(v, q)| *v -= proj * q);
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    cols
}

/// Maps latent `s`-vectors to ℝ^20 as `Q · pad₅(z)`; the `s` latent
/// coordinates fill the first `s` signal slots and the rest are zero.
pub fn embed_ambient(latent: &GeneratedRow, s: usize, seed: u64) -> Result<GeneratedRow> {
    if s > SIGNAL_DIM {
        return Err(Error::Parameter(format!(
            "latent dimension {s} exceeds signal width {SIGNAL_DIM}"
        )));
    }
    if latent.data.dim() != s {
        return Err(Error::Shape {
            expected: s,
            got: latent.data.dim(),
        });
    }
    let q = orthonormal_map(seed);
    let mut data = Vec::with_capacity(latent.data.len() * AMBIENT_DIM);
    for z in latent.data.iter() {
        let mut x = [0.0; AMBIENT_DIM];
        for (zj, col) in z.iter().zip(&q) {
            x.iter_mut().zip(col).for_each(|(xi, qi)| *xi += zj * qi);
        }
        data.extend_from_slice(&x);
    }
    Ok(GeneratedRow {
        data: PointSet::new(data, AMBIENT_DIM)?,
        gaussian: None,
        spec: SequenceSpec {
            d: AMBIENT_DIM,
            ..latent.spec.clone()
        },
    })
}
