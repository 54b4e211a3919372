//! The functional sieve bootstrap: center, extract principal component
//! scores, fit a Yule-Walker VAR to the score vectors, resample VAR
//! residuals and functional residuals, and reassemble curves as
//! `X*_t = X̄_n + Σ_j ξ*_{j,t} v̂_j + U*_t`.
//!
//! The fitted [`SieveModel`] also carries the closed-form second-order
//! structure of the bootstrap process — autocovariance operators and the
//! spectral density operator — which serve as exact oracles for the
//! resampling side.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore};

use crate::curve::{center, Curve, FunctionalSeries};
use crate::fpca::{
    covariance_operator, eigendecompose, scores, truncated_fit, EigenSystem, ResidualPool,
    ScoreSeries,
};
use crate::select::{aicc_select, default_p_max, m_hat, CombinedSelection, RatioCriterion, SelectionReport};
use crate::var::{Innovations, VarModel};
use crate::{Error, Result};

/// A bootstrap replicate series; same grid and length as the input.
pub type BootstrapSeries = FunctionalSeries;

/// Fixed or data-driven choice of a tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Auto,
    Fixed(usize),
}

/// Options for [`SieveModel::fit`].
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub m: Selection,
    pub p: Selection,
    /// Variance-ratio threshold for automatic `m`.
    pub q: f64,
    /// Ratio criterion for automatic `m`; default is VR for `n ≤ 100` and
    /// GVR otherwise.
    pub criterion: Option<RatioCriterion>,
    /// Burn-in accuracy δ for the truncated lag-0 covariance.
    pub burn_in_delta: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            m: Selection::Auto,
            p: Selection::Auto,
            q: 0.85,
            criterion: None,
            burn_in_delta: 1e-5,
        }
    }
}

/// What the fit decided and why.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub m: usize,
    pub p: usize,
    /// Present when `m` was selected automatically.
    pub m_selection: Option<CombinedSelection>,
    /// Present when `p` was selected automatically.
    pub p_selection: Option<SelectionReport>,
    /// Criterion actually used for automatic `m`.
    pub criterion: Option<RatioCriterion>,
    /// `1 − ρ(companion)`; 1.0 for the white-noise model.
    pub stability_margin: f64,
    pub burn_in: usize,
}

/// Fitted sieve bootstrap model, immutable after [`SieveModel::fit`].
#[derive(Debug, Clone)]
pub struct SieveModel {
    n: usize,
    mean: Curve,
    /// Leading `m` eigenpairs.
    eig: EigenSystem,
    scores: ScoreSeries,
    /// `None` in the white-noise (`m = 0`) degenerate case.
    var: Option<VarModel>,
    pool: ResidualPool,
    burn_in: usize,
    report: FitReport,
}

impl SieveModel {
    /// Runs the full pipeline: center, FPCA, select `m` (combined rule),
    /// select `p` (AICC), Yule-Walker fit, functional residual pool.
    pub fn fit(series: &FunctionalSeries, options: &FitOptions) -> Result<SieveModel> {
        let n = series.len();
        let grid = series.grid();
        let kernel = covariance_operator(series)?;
        let eig_full = eigendecompose(&kernel, grid, grid.len())?;

        let criterion_used = match options.m {
            Selection::Auto => Some(options.criterion.unwrap_or(if n <= 100 {
                RatioCriterion::Vr
            } else {
                RatioCriterion::Gvr
            })),
            Selection::Fixed(_) => None,
        };
        let (m, m_selection) = match options.m {
            Selection::Fixed(m) => {
                if m > eig_full.len() {
                    return Err(Error::TooManyComponents {
                        requested: m,
                        available: eig_full.len(),
                    });
                }
                (m, None)
            }
            Selection::Auto => {
                let combined = m_hat(series, &eig_full, options.q, criterion_used.unwrap())?;
                // a white-noise verdict from the ratio criterion (m_Q = 0)
                // overrides the eigenvalue rule: the bootstrap degenerates
                // to i.i.d. curve resampling
                let chosen = if combined.m_q == 0 { 0 } else { combined.chosen };
                (chosen, Some(combined))
            }
        };

        let (_, mean) = center(series);
        let (_, pool) = truncated_fit(series, &eig_full, m)?;
        let xi = scores(series, &eig_full, m)?;
        let eig = eig_full.truncate(m)?;

        if m == 0 {
            let report = FitReport {
                m: 0,
                p: 0,
                m_selection,
                p_selection: None,
                criterion: criterion_used,
                stability_margin: 1.0,
                burn_in: 0,
            };
            return Ok(SieveModel {
                n,
                mean,
                eig,
                scores: xi,
                var: None,
                pool,
                burn_in: 0,
                report,
            });
        }

        let (p, p_selection) = match options.p {
            Selection::Fixed(p) => {
                if p == 0 {
                    return Err(Error::InvalidArgument(
                        "autoregressive order must be at least 1 when m > 0".into(),
                    ));
                }
                (p, None)
            }
            Selection::Auto => {
                let report = aicc_select(&xi, default_p_max(n, m))?;
                (report.chosen, Some(report))
            }
        };
        let var = VarModel::fit(&xi, p)?;
        let burn_in = var.burn_in_length(options.burn_in_delta)?;
        let report = FitReport {
            m,
            p,
            m_selection,
            p_selection,
            criterion: criterion_used,
            stability_margin: var.stability_margin(),
            burn_in,
        };
        Ok(SieveModel {
            n,
            mean,
            eig,
            scores: xi,
            var: Some(var),
            pool,
            burn_in,
            report,
        })
    }

    /// Length of the series the model was fitted on (and of replicates).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.report.m
    }

    pub fn p(&self) -> usize {
        self.report.p
    }

    pub fn mean_curve(&self) -> &Curve {
        &self.mean
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn score_series(&self) -> &ScoreSeries {
        &self.scores
    }

    pub fn var_model(&self) -> Option<&VarModel> {
        self.var.as_ref()
    }

    pub fn residual_pool(&self) -> &ResidualPool {
        &self.pool
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn report(&self) -> &FitReport {
        &self.report
    }

    fn emit(&self, recentre: bool, mut rng: &mut dyn RngCore) -> Result<BootstrapSeries> {
        let t_len = self.mean.grid().len();
        let mut values = DMatrix::zeros(self.n, t_len);
        if let Some(var) = &self.var {
            let sim = var.simulate(
                self.n,
                self.burn_in,
                Innovations::ResamplePool,
                self.scores.matrix(),
                &mut rng,
            )?;
            values = sim * self.eig.function_matrix();
        }
        let pool_len = self.pool.len();
        let pool_matrix = self.pool.series().matrix();
        for t in 0..self.n {
            let idx = (&mut *rng).random_range(0..pool_len);
            for j in 0..t_len {
                values[(t, j)] += pool_matrix[(idx, j)];
                if recentre {
                    values[(t, j)] += self.mean.values()[j];
                }
            }
        }
        FunctionalSeries::from_matrix(self.mean.grid().clone(), values)
    }

    /// One bootstrap replicate `X*_t = X̄_n + Σ_j ξ*_{j,t} v̂_j + U*_t`.
    pub fn replicate(&self, rng: &mut dyn RngCore) -> Result<BootstrapSeries> {
        self.emit(true, rng)
    }

    /// Mean-zero replicate (no `X̄_n` term), as used for null-hypothesis
    /// resampling in the two-sample test.
    pub fn replicate_null(&self, rng: &mut dyn RngCore) -> Result<BootstrapSeries> {
        self.emit(false, rng)
    }

    /// Lag-`h` autocovariance matrix `Γ*_h = Σ_{l≥0} Ψ_l Σ̂*_e Ψ_{l+h}ᵀ` of
    /// the simulated score process.
    pub fn score_autocovariance(&self, h: usize) -> Result<DMatrix<f64>> {
        match &self.var {
            Some(var) => var.implied_autocovariance(h),
            None => Ok(DMatrix::zeros(0, 0)),
        }
    }

    /// Closed-form autocovariance kernel of the bootstrap process at lag
    /// `h`: the score part mapped through the eigenfunctions, plus the
    /// functional-residual covariance at lag zero.
    pub fn bootstrap_autocovariance(&self, h: i64) -> Result<DMatrix<f64>> {
        let t_len = self.mean.grid().len();
        let mut kernel = DMatrix::zeros(t_len, t_len);
        if self.var.is_some() && self.m() > 0 {
            let gamma = self.score_autocovariance(h.unsigned_abs() as usize)?;
            let v = self.eig.function_matrix(); // m × T
            let score_kernel = v.transpose() * &gamma * v;
            kernel += if h >= 0 {
                score_kernel
            } else {
                score_kernel.transpose()
            };
        }
        if h == 0 {
            kernel += self.pool.covariance_kernel();
        }
        Ok(kernel)
    }

    /// Closed-form spectral density kernel of the bootstrap process at
    /// frequency `ω`: `(2π)⁻¹ conj(Ψ(e^{−iω})) Σ̂*_e Ψ(e^{−iω})ᵀ` in score
    /// coordinates mapped through the eigenfunctions, plus `(2π)⁻¹ Ĉ_U`.
    pub fn bootstrap_spectral_density(&self, omega: f64) -> Result<DMatrix<Complex64>> {
        let t_len = self.mean.grid().len();
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut kernel = DMatrix::<Complex64>::zeros(t_len, t_len);
        if let Some(var) = &self.var {
            let m = var.dim();
            if var.spectral_radius() >= 1.0 {
                return Err(Error::UnstableModel {
                    rho: var.spectral_radius(),
                });
            }
            // H = I − Σ_j A_j e^{−iωj}
            let mut h = DMatrix::<Complex64>::identity(m, m);
            for (j, a) in var.coefficients().iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -omega * (j + 1) as f64);
                for r in 0..m {
                    for c in 0..m {
                        h[(r, c)] -= Complex64::new(a[(r, c)], 0.0) * phase;
                    }
                }
            }
            let g = h
                .lu()
                .try_inverse()
                .ok_or(Error::UnstableModel {
                    rho: var.spectral_radius(),
                })?;
            let sigma = var.sigma_e().map(|x| Complex64::new(x, 0.0));
            let f_score = (g.map(|z| z.conj()) * sigma * g.transpose()) / Complex64::from(two_pi);
            let v = self
                .eig
                .function_matrix()
                .map(|x| Complex64::new(x, 0.0));
            kernel += v.transpose() * f_score * v;
        }
        let c_u = self.pool.covariance_kernel();
        for r in 0..t_len {
            for c in 0..t_len {
                kernel[(r, c)] += Complex64::new(c_u[(r, c)] / two_pi, 0.0);
            }
        }
        Ok(kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{fourier_basis, synthesize, Grid};
    use crate::simgen::{Fma1FourierSpec, SeriesGenerator};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn fma_series(n: usize, seed: u64) -> FunctionalSeries {
        let spec = Fma1FourierSpec::standard(Grid::uniform(21));
        spec.generate(n, &mut ChaCha12Rng::seed_from_u64(seed))
    }

    #[test]
    fn fixed_parameters_are_echoed_without_selection() {
        let series = fma_series(60, 1);
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(2),
                p: Selection::Fixed(3),
                ..FitOptions::default()
            },
        )
        .unwrap();
        assert_eq!(model.m(), 2);
        assert_eq!(model.p(), 3);
        assert!(model.report().m_selection.is_none());
        assert!(model.report().p_selection.is_none());
        assert!(model.report().stability_margin > 0.0);
        assert!(model.burn_in() >= 2 * 3);
    }

    #[test]
    fn auto_fit_selects_and_reports() {
        let series = fma_series(80, 2);
        let model = SieveModel::fit(&series, &FitOptions::default()).unwrap();
        assert!(model.m() >= 1);
        assert!(model.p() >= 1);
        let report = model.report();
        assert_eq!(report.criterion, Some(RatioCriterion::Vr)); // n ≤ 100
        assert!(report.m_selection.is_some());
        assert!(report.p_selection.is_some());
    }

    #[test]
    fn flat_spectrum_series_degenerates_to_iid_resampling() {
        // single impulse-like score direction: GVR selects m = 0 and the
        // model resamples centered curves around the mean
        let g = Grid::uniform(7);
        let n = 16;
        let dir = Curve::from_fn(g.clone(), |t| (1.0 + t).sqrt());
        let curves: Vec<Curve> = (0..n)
            .map(|t| {
                let xi = if t == 0 { 1.0 - 1.0 / n as f64 } else { -1.0 / n as f64 };
                Curve::new(
                    g.clone(),
                    dir.values().iter().map(|v| v * xi + 0.3).collect(),
                )
                .unwrap()
            })
            .collect();
        let series = FunctionalSeries::new(g, curves).unwrap();
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                criterion: Some(RatioCriterion::Gvr),
                ..FitOptions::default()
            },
        )
        .unwrap();
        assert_eq!(model.m(), 0);
        assert!(model.var_model().is_none());

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let rep = model.replicate(&mut rng).unwrap();
        let (centered, mean) = center(&series);
        for t in 0..rep.len() {
            let matched = (0..n).any(|s| {
                (0..rep.grid().len()).all(|j| {
                    let expect = mean.values()[j] + centered.matrix()[(s, j)];
                    (rep.matrix()[(t, j)] - expect).abs() <= 1e-12
                })
            });
            assert!(matched, "replicate row {t} is not mean + centered curve");
        }
    }

    /// A hand-built model around an orthonormal direction, for exact
    /// emission checks.
    fn toy_model(
        score_pool: Vec<f64>,
        func_pool_scale: f64,
        a_coeff: f64,
    ) -> (SieveModel, FunctionalSeries) {
        let g = Grid::uniform(9);
        let basis = fourier_basis(&g, 3);
        let curves: Vec<Curve> = score_pool
            .iter()
            .enumerate()
            .map(|(t, &s)| {
                synthesize(&[1.0, s, func_pool_scale * ((t % 2) as f64 - 0.5)], &basis).unwrap()
            })
            .collect();
        let series = FunctionalSeries::new(g, curves).unwrap();
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(1),
                p: Selection::Fixed(1),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let mut model = model;
        if a_coeff == 0.0 {
            // replace the fitted VAR with an exact zero-coefficient one on
            // the same score pool
            let pool = crate::var::residuals(
                model.score_series(),
                &[DMatrix::zeros(1, 1)],
            )
            .unwrap();
            model.var = Some(VarModel::from_parts(vec![DMatrix::zeros(1, 1)], pool).unwrap());
            model.burn_in = 2;
        }
        (model, series)
    }

    #[test]
    fn zero_residual_zero_innovation_model_emits_the_mean() {
        // rank-one data has zero functional residuals; swapping in a VAR
        // with zero coefficients and an all-zero innovation pool makes
        // every replicate collapse onto the sample mean
        let g = Grid::uniform(9);
        let base = Curve::from_fn(g.clone(), |t| 1.0 + t);
        let dir = Curve::from_fn(g.clone(), |t| (2.0 * t).cos());
        let xi = [1.0, -1.0, 0.5, -0.5, 0.25, -0.25];
        let curves: Vec<Curve> = xi
            .iter()
            .map(|&s| {
                Curve::new(
                    g.clone(),
                    base.values()
                        .iter()
                        .zip(dir.values())
                        .map(|(b, d)| b + s * d)
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let series = FunctionalSeries::new(g, curves).unwrap();
        let mut model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(1),
                p: Selection::Fixed(1),
                ..FitOptions::default()
            },
        )
        .unwrap();
        model.var =
            Some(VarModel::from_parts(vec![DMatrix::zeros(1, 1)], DMatrix::zeros(5, 1)).unwrap());
        let mean = series.mean_curve();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let rep = model.replicate(&mut rng).unwrap();
        for t in 0..rep.len() {
            for (a, b) in rep.curve(t).values().iter().zip(mean.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn replicate_mean_identity_by_exhaustive_enumeration() {
        // zero-coefficient VAR and tiny pools: the resampling measure is a
        // finite product space, so E*X*_t = X̄ can be summed exactly
        let (model, series) = toy_model(vec![1.0, -0.5, -0.5, 0.0], 0.8, 0.0);
        let var = model.var_model().unwrap();
        let score_pool = var.residual_pool();
        let func_pool = model.pool.series().matrix();
        let v = model.eig.function_matrix();
        let t_len = series.grid().len();
        let mut acc = vec![0.0; t_len];
        let mut count = 0.0;
        for e in 0..score_pool.nrows() {
            for u in 0..func_pool.nrows() {
                // with A = 0 a score draw is just the innovation e
                for j in 0..t_len {
                    let score_part = score_pool[(e, 0)] * v[(0, j)];
                    acc[j] += model.mean.values()[j] + score_part + func_pool[(u, j)];
                }
                count += 1.0;
            }
        }
        let mean = series.mean_curve();
        for j in 0..t_len {
            assert_abs_diff_eq!(acc[j] / count, mean.values()[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn replicate_average_approaches_the_sample_mean() {
        let series = fma_series(20, 5);
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(3),
                p: Selection::Fixed(2),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let b = 5000;
        let t_len = series.grid().len();
        let mut acc = vec![0.0; t_len];
        for _ in 0..b {
            let rep = model.replicate(&mut rng).unwrap();
            let m = rep.mean_curve();
            for j in 0..t_len {
                acc[j] += m.values()[j];
            }
        }
        let mean = series.mean_curve();
        // per-τ sd of a replicate mean is ≈ sd(X)/√n ≲ 0.5; with b·n draws
        // the MC band is generous
        let band = 3.0 * 0.5 / ((b * 20) as f64).sqrt() * (20.0f64).sqrt();
        for j in 0..t_len {
            let err = (acc[j] / b as f64 - mean.values()[j]).abs();
            assert!(err < band, "τ index {j}: error {err} vs band {band}");
        }
    }

    #[test]
    fn null_replicates_drop_the_mean() {
        let (model, _) = toy_model(vec![2.0, -1.0, -1.0, 0.0], 0.0, 0.0);
        let mut r1 = ChaCha12Rng::seed_from_u64(7);
        let mut r2 = ChaCha12Rng::seed_from_u64(7);
        let with_mean = model.replicate(&mut r1).unwrap();
        let without = model.replicate_null(&mut r2).unwrap();
        for t in 0..with_mean.len() {
            for j in 0..with_mean.grid().len() {
                assert_abs_diff_eq!(
                    with_mean.matrix()[(t, j)] - model.mean.values()[j],
                    without.matrix()[(t, j)],
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn distant_lags_have_negligible_autocovariance() {
        let series = fma_series(80, 8);
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(3),
                p: Selection::Fixed(2),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let far = model.bootstrap_autocovariance(500).unwrap();
        assert!(far.norm() < 1e-8, "‖C*_500‖_F = {}", far.norm());
    }

    #[test]
    fn zero_coefficient_closed_forms() {
        let (model, _) = toy_model(vec![1.5, -0.5, -0.5, -0.5], 1.0, 0.0);
        // h = 1 with A = 0 and i.i.d. functional noise: exactly zero
        let lag1 = model.bootstrap_autocovariance(1).unwrap();
        assert_eq!(lag1.amax(), 0.0);
        // h = 0: VᵀΣ*V + Ĉ_U
        let var = model.var_model().unwrap();
        let v = model.eig.function_matrix();
        let expect = v.transpose() * var.sigma_e() * v + model.pool.covariance_kernel();
        let got = model.bootstrap_autocovariance(0).unwrap();
        assert!((got - expect).amax() <= 1e-12);
        // flat spectrum: kernels agree across frequencies
        let f1 = model.bootstrap_spectral_density(0.3).unwrap();
        let f2 = model.bootstrap_spectral_density(1.7).unwrap();
        assert!((&f1 - &f2).map(|z| z.norm()).max() <= 1e-12);
    }

    #[test]
    fn zero_coefficient_lag0_matches_monte_carlo_moments() {
        let (model, series) = toy_model(vec![1.0, 0.5, -0.75, -0.75], 0.7, 0.0);
        let closed = model.bootstrap_autocovariance(0).unwrap();
        let t_len = series.grid().len();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let reps = 30_000; // n = 4 rows each → 1.2e5 draws
        let mut acc = DMatrix::zeros(t_len, t_len);
        let mean = model.mean.values();
        for _ in 0..reps {
            let rep = model.replicate(&mut rng).unwrap();
            for t in 0..rep.len() {
                for i in 0..t_len {
                    for j in 0..t_len {
                        let a = rep.matrix()[(t, i)] - mean[i];
                        let b = rep.matrix()[(t, j)] - mean[j];
                        acc[(i, j)] += a * b;
                    }
                }
            }
        }
        acc /= (reps * 4) as f64;
        let rel = (&acc - &closed).norm() / closed.norm();
        assert!(rel < 0.02, "relative error {rel}");
    }

    #[test]
    fn spectral_density_is_hermitian_and_inverts_to_lag0() {
        let series = fma_series(100, 10);
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(3),
                p: Selection::Fixed(3),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let f = model.bootstrap_spectral_density(0.73).unwrap();
        let t_len = series.grid().len();
        for i in 0..t_len {
            for j in 0..t_len {
                assert!((f[(i, j)] - f[(j, i)].conj()).norm() <= 1e-12);
            }
        }
        // Riemann sum of F*(ω) over 512 frequencies recovers C*_0
        let k = 512;
        let mut integral = DMatrix::<Complex64>::zeros(t_len, t_len);
        for i in 0..k {
            let omega = -std::f64::consts::PI
                + (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / k as f64;
            integral += model.bootstrap_spectral_density(omega).unwrap();
        }
        integral *= Complex64::from(2.0 * std::f64::consts::PI / k as f64);
        let c0 = model.bootstrap_autocovariance(0).unwrap();
        let mut max_err = 0.0f64;
        for i in 0..t_len {
            for j in 0..t_len {
                let err = (integral[(i, j)] - Complex64::new(c0[(i, j)], 0.0)).norm();
                max_err = max_err.max(err);
            }
        }
        assert!(max_err < 1e-6, "inversion error {max_err}");
    }

    #[test]
    fn implied_score_autocovariance_matches_long_simulation() {
        let series = fma_series(200, 11);
        let model = SieveModel::fit(
            &series,
            &FitOptions {
                m: Selection::Fixed(2),
                p: Selection::Fixed(2),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let var = model.var_model().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let steps = 1_000_000;
        let sim = var
            .simulate(
                steps,
                model.burn_in(),
                Innovations::ResamplePool,
                model.score_series().matrix(),
                &mut rng,
            )
            .unwrap();
        for h in 0..=2usize {
            let closed = model.score_autocovariance(h).unwrap();
            let mut emp = DMatrix::zeros(2, 2);
            for t in 0..steps - h {
                for a in 0..2 {
                    for b in 0..2 {
                        emp[(a, b)] += sim[(t, a)] * sim[(t + h, b)];
                    }
                }
            }
            emp /= (steps - h) as f64;
            // Γ*_h = E ξ*_t ξ*_{t+h}ᵀ matches Σ_l Ψ_l Σ* Ψ_{l+h}ᵀ; the
            // relative error is MC noise scaled by ‖Γ*_0‖/‖Γ*_h‖
            let rel = (&emp - &closed).norm() / closed.norm();
            let budget = 0.02 * (model.score_autocovariance(0).unwrap().norm() / closed.norm());
            assert!(rel < budget.max(0.02), "lag {h}: relative error {rel}");
        }
    }
}
