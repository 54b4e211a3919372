//! Inference targets: the functional finite Fourier transform, bootstrap
//! estimation of the standard deviation of the sample mean, and the fully
//! functional two-sample mean test with sieve-bootstrap critical values.

use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;

use crate::curve::{check_same_grid, norm, Curve, FunctionalSeries, Grid};
use crate::sieve::{FitOptions, Selection, SieveModel};
use crate::{Error, Result};

/// A complex-valued curve on the grid.
#[derive(Debug, Clone)]
pub struct ComplexCurve {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl ComplexCurve {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.im).collect()
    }

    /// Squared quadrature norm `Σ_i w_i |z(τ_i)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, z)| w * z.norm_sqr())
            .sum()
    }
}

/// Functional finite Fourier transform `S_n(ω) = Σ_{t=1}^n X_t e^{−itω}`;
/// with `scaled` the `n^{−1/2} S_n(ω)` variant is returned.
pub fn fourier_transform(series: &FunctionalSeries, omega: f64, scaled: bool) -> ComplexCurve {
    let n = series.len();
    let t_len = series.grid().len();
    let x = series.matrix();
    let scale = if scaled { 1.0 / (n as f64).sqrt() } else { 1.0 };
    let mut values = vec![Complex64::new(0.0, 0.0); t_len];
    for t in 0..n {
        let phase = Complex64::from_polar(scale, -omega * (t + 1) as f64);
        for (i, v) in values.iter_mut().enumerate() {
            *v += phase * x[(t, i)];
        }
    }
    ComplexCurve {
        grid: series.grid().clone(),
        values,
    }
}

/// Anything that can emit bootstrap replicate series.
pub trait Resampler: Sync {
    fn replicate(&self, rng: &mut dyn RngCore) -> Result<FunctionalSeries>;
}

impl Resampler for SieveModel {
    fn replicate(&self, rng: &mut dyn RngCore) -> Result<FunctionalSeries> {
        SieveModel::replicate(self, rng)
    }
}

/// A block-bootstrap method bound to the series it resamples.
pub struct BlockResampler<'a> {
    pub series: &'a FunctionalSeries,
    pub method: crate::blockboot::BlockBootstrap,
}

impl Resampler for BlockResampler<'_> {
    fn replicate(&self, rng: &mut dyn RngCore) -> Result<FunctionalSeries> {
        self.method.replicate(self.series, rng)
    }
}

/// Per-τ bootstrap standard deviation of `√n X̄*_n(τ)` over `b` replicates
/// (sample sd, divisor `b − 1`).
pub fn mean_sd_bootstrap(
    resampler: &dyn Resampler,
    b: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if b < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: b });
    }
    let mut sums: Vec<f64> = Vec::new();
    let mut sumsq: Vec<f64> = Vec::new();
    for _ in 0..b {
        let rep = resampler.replicate(rng)?;
        let sqrt_n = (rep.len() as f64).sqrt();
        let mean = rep.mean_curve();
        if sums.is_empty() {
            sums = vec![0.0; mean.values().len()];
            sumsq = vec![0.0; mean.values().len()];
        }
        for (j, &v) in mean.values().iter().enumerate() {
            let z = sqrt_n * v;
            sums[j] += z;
            sumsq[j] += z * z;
        }
    }
    let bf = b as f64;
    Ok(sums
        .iter()
        .zip(&sumsq)
        .map(|(&s, &ss)| ((ss - s * s / bf) / (bf - 1.0)).max(0.0).sqrt())
        .collect())
}

/// Two-sample mean statistic
/// `U = n₁n₂/(n₁+n₂) · ‖X̄_{n₁} − Ȳ_{n₂}‖²`.
pub fn two_sample_statistic(x: &FunctionalSeries, y: &FunctionalSeries) -> Result<f64> {
    check_same_grid(x.grid(), y.grid())?;
    let mx = x.mean_curve();
    let my = y.mean_curve();
    let diff = Curve::new(
        x.grid().clone(),
        mx.values()
            .iter()
            .zip(my.values())
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let d = norm(&diff);
    let n1 = x.len() as f64;
    let n2 = y.len() as f64;
    Ok(n1 * n2 / (n1 + n2) * d * d)
}

/// Options for [`two_sample_test`]: per-sample sieve parameters and the
/// number of bootstrap pairs.
#[derive(Debug, Clone)]
pub struct TwoSampleOptions {
    pub m_x: Selection,
    pub p_x: Selection,
    pub m_y: Selection,
    pub p_y: Selection,
    pub q: f64,
    pub replicates: usize,
}

impl Default for TwoSampleOptions {
    fn default() -> Self {
        TwoSampleOptions {
            m_x: Selection::Auto,
            p_x: Selection::Auto,
            m_y: Selection::Auto,
            p_y: Selection::Auto,
            q: 0.85,
            replicates: 1000,
        }
    }
}

/// Result of the bootstrap two-sample mean test.
#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic: f64,
    /// Bootstrap draws `U*_1 … U*_B`.
    pub draws: Vec<f64>,
    /// `(1 + #{U*_b ≥ U}) / (B + 1)`.
    pub p_value: f64,
    /// Selected `(m, p)` for the first sample.
    pub x_params: (usize, usize),
    /// Selected `(m, p)` for the second sample.
    pub y_params: (usize, usize),
}

/// Sieve-bootstrap two-sample mean test: fits one model per sample, draws
/// independent pairs of mean-zero replicates (so the resampling scheme
/// satisfies the null), and compares the observed statistic against the
/// bootstrap draws.
pub fn two_sample_test(
    x: &FunctionalSeries,
    y: &FunctionalSeries,
    options: &TwoSampleOptions,
    rng: &mut dyn RngCore,
) -> Result<TestResult> {
    check_same_grid(x.grid(), y.grid())?;
    if options.replicates == 0 {
        return Err(Error::InvalidArgument(
            "need at least one bootstrap replicate".into(),
        ));
    }
    let statistic = two_sample_statistic(x, y)?;
    let fit_x = FitOptions {
        m: options.m_x,
        p: options.p_x,
        q: options.q,
        ..FitOptions::default()
    };
    let fit_y = FitOptions {
        m: options.m_y,
        p: options.p_y,
        q: options.q,
        ..FitOptions::default()
    };
    let model_x = SieveModel::fit(x, &fit_x)?;
    let model_y = SieveModel::fit(y, &fit_y)?;

    let mut draws = Vec::with_capacity(options.replicates);
    for _ in 0..options.replicates {
        let xb = model_x.replicate_null(rng)?;
        let yb = model_y.replicate_null(rng)?;
        draws.push(two_sample_statistic(&xb, &yb)?);
    }
    let exceed = draws.iter().filter(|&&u| u >= statistic).count();
    let p_value = (1.0 + exceed as f64) / (options.replicates as f64 + 1.0);
    Ok(TestResult {
        statistic,
        draws,
        p_value,
        x_params: (model_x.m(), model_x.p()),
        y_params: (model_y.m(), model_y.p()),
    })
}
