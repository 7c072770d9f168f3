//! Stationary Gaussian sequences with RBF covariance via circulant embedding.
//!
//! The lag covariance `k(h) = exp(−h²/(2ℓ²))` is wrapped onto a circle of
//! length `m` (a power of two, at least `2n`), diagonalised by one FFT, and
//! sampled as `Re(F · diag(√(λ/m)) · (a + ib))` with `a, b ~ N(0, I_m)`; the
//! first `n` values are kept. Negative eigenvalues are clamped to zero. The
//! clamped mass bounds the max-norm covariance error, and `m` is doubled
//! until that bound is at most [`MAX_EMBEDDING_ERROR`].

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{expect_family, interleave, normal, Family, GeneratedRow, SequenceSpec};
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::special::normal_cdf;

/// Largest accepted max-norm covariance error after clamping.
pub const MAX_EMBEDDING_ERROR: f64 = 1e-6;
const MAX_EMBEDDING_LEN: usize = 1 << 26;

pub fn rbf_kernel(h: f64, lengthscale: f64) -> f64 {
    (-h * h / (2.0 * lengthscale * lengthscale)).exp()
}

pub struct CirculantEmbedding {
    pub n: usize,
    pub lengthscale: f64,
    /// Embedding length.
    pub m: usize,
    /// Bound on `max_h |cov_realized(h) − k(h)|`.
    pub max_cov_error: f64,
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("n", &self.n)
            .field("lengthscale", &self.lengthscale)
            .field("m", &self.m)
            .field("max_cov_error", &self.max_cov_error)
            .finish_non_exhaustive()
    }
}

pub fn circulant_embedding(n: usize, lengthscale: f64) -> Result<CirculantEmbedding> {
    if !(lengthscale > 0.0) || !lengthscale.is_finite() {
        return Err(Error::Parameter(format!(
            "gp_fft requires a positive lengthscale, got {lengthscale}"
        )));
    }
    if n == 0 {
        return Err(Error::Parameter("sample size n must be positive".into()));
    }
    let mut planner = FftPlanner::new();
    let mut m = (2 * n).next_power_of_two();
    loop {
        let fft = planner.plan_fft_forward(m);
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|j| Complex::new(rbf_kernel(j.min(m - j) as f64, lengthscale), 0.0))
            .collect();
        fft.process(&mut buf);
        let clamped: f64 = buf.iter().map(|z| (-z.re).max(0.0)).sum::<f64>() / m as f64;
        if clamped <= MAX_EMBEDDING_ERROR {
            let scale = buf
                .iter()
                .map(|z| (z.re.max(0.0) / m as f64).sqrt())
                .collect();
            return Ok(CirculantEmbedding {
                n,
                lengthscale,
                m,
                max_cov_error: clamped,
                scale,
                fft,
            });
        }
        if m >= MAX_EMBEDDING_LEN {
            return Err(Error::Parameter(format!(
                "no valid circulant embedding for n = {n}, lengthscale = {lengthscale}"
            )));
        }
        m *= 2;
    }
}

impl CirculantEmbedding {
    /// One zero-mean, unit-variance sequence of length `n`.
    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re = normal(rng);
                let im = normal(rng);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Covariance at lags `0..n` of the sequences this embedding produces.
    pub fn realized_covariance(&self) -> Vec<f64> {
        // Inverse transform of the clamped spectrum, via conj(F(conj(x))).
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| Complex::new(s * s, 0.0))
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        buf.into_iter().map(|z| z.re).collect()
    }
}

pub fn gen_gp_fft(spec: &SequenceSpec) -> Result<GeneratedRow> {
    expect_family(spec, Family::GpFft)?;
    spec.validate()?;
    let embedding = circulant_embedding(spec.n, spec.parameter()?)?;
    let gaussian: Vec<Vec<f64>> = (0..spec.d)
        .map(|j| embedding.sample(&mut spec.stream("coordinate", j)))
        .collect();
    let uniform: Vec<Vec<f64>> = gaussian
        .iter()
        .map(|col| col.iter().map(|&z| normal_cdf(z)).collect())
        .collect();
    Ok(GeneratedRow {
        data: interleave(&uniform)?,
        gaussian: Some(interleave(&gaussian)?),
        spec: spec.clone(),
    })
}
