//! Data-generating processes for the simulation studies: a functional
//! MA(1) built on a random Fourier-coefficient operator, a functional
//! MA(1) with a fixed Gaussian kernel driven by Brownian bridges, and the
//! Brownian-bridge sampler itself. All generators are pure functions of
//! their RNG stream.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use crate::curve::{fourier_basis, Curve, FunctionalSeries, Grid};
use crate::{Error, Result};

/// `∫₀¹ exp(−x²) dx = (√π/2)·erf(1)`, the normalizing constant of the
/// Gaussian moving-average kernel (integration limits taken over the
/// process domain `[0,1]`).
pub const INTEGRAL_EXP_NEG_X2: f64 = 0.746_824_132_812_427_1;

/// Anything that can emit a fresh functional series of length `n`.
pub trait SeriesGenerator: Sync {
    fn generate(&self, n: usize, rng: &mut dyn RngCore) -> FunctionalSeries;
}

/// Functional MA(1) `X_t = ε_t + θ₀ Ψ(ε_{t−1})` on a Fourier basis of size
/// `d`, with `Ψ` drawn at random: a `d × d` Gaussian matrix with entry
/// standard deviations `j₁⁻¹ j₂⁻¹`, rescaled to unit spectral norm. The
/// innovations are `ε_t = Σ_j Z_{t,j} f_j` with `Z_{t,j} ~ N(0, j⁻²)`.
#[derive(Debug, Clone)]
pub struct Fma1FourierSpec {
    grid: Arc<Grid>,
    d: usize,
    theta: f64,
}

impl Fma1FourierSpec {
    pub fn new(grid: Arc<Grid>, d: usize, theta: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("basis size must be >= 1".into()));
        }
        Ok(Fma1FourierSpec { grid, d, theta })
    }

    /// The simulation-study default: `d = 21`, `θ₀ = 0.8`.
    pub fn standard(grid: Arc<Grid>) -> Self {
        Fma1FourierSpec {
            grid,
            d: 21,
            theta: 0.8,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn basis_size(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Draws a fresh coefficient operator `B_Ψ` (unit spectral norm).
    pub fn sample_operator(&self, rng: &mut dyn RngCore) -> Fma1Operator {
        let d = self.d;
        let mut b = DMatrix::from_fn(d, d, |i, j| {
            let z: f64 = (&mut *rng).sample(StandardNormal);
            z / ((i + 1) * (j + 1)) as f64
        });
        let spectral_norm = b.clone().singular_values()[0];
        if spectral_norm > 0.0 {
            b /= spectral_norm;
        }
        let basis = fourier_basis(&self.grid, d);
        let basis_matrix = DMatrix::from_fn(d, self.grid.len(), |j, i| basis[j].values()[i]);
        Fma1Operator {
            spec: self.clone(),
            b_psi: b,
            basis_matrix,
        }
    }
}

impl SeriesGenerator for Fma1FourierSpec {
    /// Fresh `B_Ψ` on every call, matching the simulation design where the
    /// operator is regenerated in every replication.
    fn generate(&self, n: usize, rng: &mut dyn RngCore) -> FunctionalSeries {
        let op = self.sample_operator(rng);
        op.generate(n, rng)
    }
}

/// A concrete sampled operator: fixes `B_Ψ` so several series (or the
/// model's exact second-order structure) can be produced for one draw.
#[derive(Debug, Clone)]
pub struct Fma1Operator {
    spec: Fma1FourierSpec,
    b_psi: DMatrix<f64>,
    /// `d × T`, row `j` holds `f_j` on the grid.
    basis_matrix: DMatrix<f64>,
}

impl Fma1Operator {
    pub fn b_psi(&self) -> &DMatrix<f64> {
        &self.b_psi
    }

    fn innovation_coeffs(&self, rng: &mut dyn RngCore) -> DVector<f64> {
        DVector::from_iterator(
            self.spec.d,
            (0..self.spec.d).map(|j| {
                let z: f64 = (&mut *rng).sample(StandardNormal);
                z / (j + 1) as f64
            }),
        )
    }

    /// Coefficient recursion `c_t = z_t + θ₀ B_Ψ z_{t−1}` with a stationary
    /// presample `z_0`, evaluated on the grid.
    pub fn generate(&self, n: usize, rng: &mut dyn RngCore) -> FunctionalSeries {
        let d = self.spec.d;
        let theta = self.spec.theta;
        let mut coeffs = DMatrix::zeros(n, d);
        let mut prev = self.innovation_coeffs(rng);
        for t in 0..n {
            let z = self.innovation_coeffs(rng);
            let c = &z + theta * (&self.b_psi * &prev);
            coeffs.row_mut(t).copy_from(&c.transpose());
            prev = z;
        }
        let values = coeffs * &self.basis_matrix;
        FunctionalSeries::from_matrix(self.spec.grid.clone(), values)
            .expect("generated matrix matches the grid")
    }

    /// Exact spectral density kernel of this operator's process at `ω`:
    /// in coefficient space `(2π)⁻¹ (I + θ₀ B e^{iω}) Σ_z (I + θ₀ B e^{iω})^H`
    /// with `Σ_z = diag(j⁻²)`, mapped to the grid through the basis.
    pub fn spectral_density_kernel(&self, omega: f64) -> DMatrix<Complex64> {
        let d = self.spec.d;
        let theta = self.spec.theta;
        let phase = Complex64::from_polar(theta, omega);
        let mut m = DMatrix::<Complex64>::identity(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += Complex64::new(self.b_psi[(i, j)], 0.0) * phase;
            }
        }
        // m = I + θ B e^{iω}
        let sigma_z = DVector::from_iterator(d, (0..d).map(|j| 1.0 / ((j + 1) * (j + 1)) as f64));
        let mut f_c = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += m[(i, k)] * Complex64::new(sigma_z[k], 0.0) * m[(j, k)].conj();
                }
                f_c[(i, j)] = acc / Complex64::new(2.0 * std::f64::consts::PI, 0.0);
            }
        }
        // kernel(τ₁,τ₂) = Σ_{j,l} f_c[j][l] f_j(τ₁) f_l(τ₂)
        let t_len = self.spec.grid.len();
        let basis = &self.basis_matrix;
        let mut kernel = DMatrix::<Complex64>::zeros(t_len, t_len);
        for t1 in 0..t_len {
            for t2 in 0..t_len {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    for l in 0..d {
                        acc += f_c[(j, l)] * Complex64::new(basis[(j, t1)] * basis[(l, t2)], 0.0);
                    }
                }
                kernel[(t1, t2)] = acc;
            }
        }
        kernel
    }
}

/// Which of the two samples of the two-sample design to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSide {
    /// Mean zero.
    First,
    /// Mean `μ₂(τ) = γ τ(1−τ)`.
    Second,
}

/// Functional MA(1) `X_t = Θ₁(ε_{t−1}) + ε_t + μ` with the Gaussian
/// integral kernel `θ₁(t,s) = exp{−(t²+s²)/2} / (4∫₀¹exp(−x²)dx)` and
/// i.i.d. Brownian-bridge innovations.
#[derive(Debug, Clone)]
pub struct Fma1KernelSpec {
    grid: Arc<Grid>,
    /// `T × T` quadrature-weighted kernel: row `i`, column `s` holds
    /// `w_s θ₁(τ_i, τ_s)`.
    operator: DMatrix<f64>,
    bridge: BridgeSampler,
}

impl Fma1KernelSpec {
    pub fn new(grid: Arc<Grid>) -> Result<Self> {
        let t_len = grid.len();
        let denom = 4.0 * INTEGRAL_EXP_NEG_X2;
        let pts = grid.points().to_vec();
        let w = grid.weights().to_vec();
        let operator = DMatrix::from_fn(t_len, t_len, |i, s| {
            w[s] * (-(pts[i] * pts[i] + pts[s] * pts[s]) / 2.0).exp() / denom
        });
        Ok(Fma1KernelSpec {
            bridge: BridgeSampler::new(grid.clone())?,
            grid,
            operator,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Quadrature application of the integral operator `Θ₁` to a curve.
    pub fn apply_kernel(&self, curve: &Curve) -> Curve {
        let out = &self.operator * curve.vector();
        Curve::from_vector(self.grid.clone(), out)
    }

    /// Mean curve of the second sample, `μ₂(τ) = γ τ(1−τ)`.
    pub fn shift_curve(&self, gamma: f64) -> Curve {
        Curve::from_fn(self.grid.clone(), move |t| gamma * t * (1.0 - t))
    }

    /// Draws a series with the mean of the requested sample side.
    pub fn generate_sample(
        &self,
        n: usize,
        gamma: f64,
        side: SampleSide,
        rng: &mut dyn RngCore,
    ) -> FunctionalSeries {
        let shift = match side {
            SampleSide::First => Curve::zero(self.grid.clone()),
            SampleSide::Second => self.shift_curve(gamma),
        };
        let t_len = self.grid.len();
        let mut values = DMatrix::zeros(n, t_len);
        let mut prev = self.bridge.sample(rng);
        for t in 0..n {
            let eps = self.bridge.sample(rng);
            let ma = &self.operator * prev.vector();
            for i in 0..t_len {
                values[(t, i)] = ma[i] + eps.values()[i] + shift.values()[i];
            }
            prev = eps;
        }
        FunctionalSeries::from_matrix(self.grid.clone(), values)
            .expect("generated matrix matches the grid")
    }

    /// Generator view of one side of the two-sample design.
    pub fn sampler(&self, gamma: f64, side: SampleSide) -> Fma1KernelSampler<'_> {
        Fma1KernelSampler {
            spec: self,
            gamma,
            side,
        }
    }
}

/// [`SeriesGenerator`] for one sample side of [`Fma1KernelSpec`].
pub struct Fma1KernelSampler<'a> {
    spec: &'a Fma1KernelSpec,
    gamma: f64,
    side: SampleSide,
}

impl SeriesGenerator for Fma1KernelSampler<'_> {
    fn generate(&self, n: usize, rng: &mut dyn RngCore) -> FunctionalSeries {
        self.spec.generate_sample(n, self.gamma, self.side, rng)
    }
}

/// Brownian-bridge sampler: endpoints pinned at zero, interior values drawn
/// through the Cholesky factor of the exact bridge covariance
/// `min(s,t) − st`, so the finite-dimensional law is exact.
#[derive(Debug, Clone)]
pub struct BridgeSampler {
    grid: Arc<Grid>,
    chol: DMatrix<f64>,
}

impl BridgeSampler {
    pub fn new(grid: Arc<Grid>) -> Result<Self> {
        let t_len = grid.len();
        if t_len < 2 {
            return Err(Error::InvalidGrid("bridge needs at least 2 points".into()));
        }
        let interior = t_len - 2;
        let pts = grid.points();
        let cov = DMatrix::from_fn(interior, interior, |i, j| {
            let s = pts[i + 1];
            let t = pts[j + 1];
            s.min(t) - s * t
        });
        let chol = Cholesky::new(cov)
            .ok_or_else(|| Error::InvalidGrid("bridge covariance is not positive definite".into()))?
            .l();
        Ok(BridgeSampler { grid, chol })
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Curve {
        let interior = self.grid.len() - 2;
        let z = DVector::from_iterator(
            interior,
            (0..interior).map(|_| (&mut *rng).sample::<f64, _>(StandardNormal)),
        );
        let inner = &self.chol * z;
        let mut values = vec![0.0; self.grid.len()];
        values[1..1 + interior].copy_from_slice(inner.as_slice());
        Curve::new(self.grid.clone(), values).expect("bridge values match the grid")
    }
}

/// One Brownian bridge on the grid.
pub fn brownian_bridge(grid: &Arc<Grid>, rng: &mut dyn RngCore) -> Result<Curve> {
    Ok(BridgeSampler::new(grid.clone())?.sample(rng))
}
