//! Yule-Walker estimation of vector autoregressions on score series,
//! stability verification, residual extraction and simulation with burn-in.
//!
//! Autocovariances use the biased divisor `n`, which keeps the block
//! Toeplitz system positive definite and the fitted polynomial stable.
//! Coefficients solve the forward prediction equations: with
//! `C(h) = n⁻¹ Σ_t ξ_{t+h} ξ_tᵀ`, the matrices `A_1 … A_p` satisfy
//! `Σ_j A_j C(k−j) = C(k)` for `k = 1…p`, so that the time-domain
//! residuals `ê_t = ξ_t − Σ_j A_j ξ_{t−j}` are the one-step prediction
//! errors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fpca::ScoreSeries;
use crate::{Error, Result};

/// Hard cap on power-series truncation; hitting it signals near-instability.
const PSI_TERM_CAP: usize = 10_000;

/// Sample autocovariance matrices `Γ̂_h = n⁻¹ Σ_{t=1}^{n−h} ξ_t ξ_{t+h}ᵀ`
/// for `h = 0…p`.
#[derive(Debug, Clone)]
pub struct AutocovSet {
    gammas: Vec<DMatrix<f64>>,
    n: usize,
}

impl AutocovSet {
    /// `Γ̂_h`; panics if `h` exceeds the computed range.
    pub fn gamma(&self, h: usize) -> &DMatrix<f64> {
        &self.gammas[h]
    }

    pub fn max_lag(&self) -> usize {
        self.gammas.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].nrows()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(h) = n⁻¹ Σ_t ξ_{t+h} ξ_tᵀ = Γ̂_hᵀ`, the convention entering the
    /// forward prediction equations.
    fn c(&self, h: usize) -> DMatrix<f64> {
        self.gammas[h].transpose()
    }
}

/// Computes `Γ̂_0 … Γ̂_p` with divisor `n`.
pub fn autocovariances(scores: &ScoreSeries, p: usize) -> Result<AutocovSet> {
    let n = scores.len();
    let m = scores.dim();
    if p >= n {
        return Err(Error::InvalidArgument(format!(
            "autocovariance lag {p} needs more than {p} observations, got {n}"
        )));
    }
    let x = scores.matrix();
    let mut gammas = Vec::with_capacity(p + 1);
    for h in 0..=p {
        let mut g = DMatrix::zeros(m, m);
        for t in 0..n - h {
            // Γ̂_h += ξ_t ξ_{t+h}ᵀ
            for a in 0..m {
                for b in 0..m {
                    g[(a, b)] += x[(t, a)] * x[(t + h, b)];
                }
            }
        }
        g /= n as f64;
        gammas.push(g);
    }
    Ok(AutocovSet { gammas, n })
}

/// Fitted VAR(p): coefficient matrices, innovation covariance of the
/// centered residuals, and the centered residual pool used for resampling.
#[derive(Debug, Clone)]
pub struct VarModel {
    a: Vec<DMatrix<f64>>,
    sigma_e: DMatrix<f64>,
    /// Centered residuals `ẽ_{t,p}`, one row per residual (`n − p` rows).
    residual_pool: DMatrix<f64>,
    spectral_radius: f64,
}

/// Innovation law for [`VarModel::simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Innovations {
    /// Draw i.i.d. uniformly with replacement from the centered residual pool.
    ResamplePool,
    /// Draw i.i.d. `N(0, Σ̂_e)`.
    Gaussian,
}

impl VarModel {
    /// Fits a VAR(p) to the score series by Yule-Walker.
    pub fn fit(scores: &ScoreSeries, p: usize) -> Result<VarModel> {
        if p == 0 {
            return Err(Error::InvalidArgument(
                "autoregressive order must be at least 1".into(),
            ));
        }
        let acov = autocovariances(scores, p)?;
        let a = yule_walker_matrices(&acov, p)?;
        let residual_pool = residuals(scores, &a)?;
        Self::assemble(a, residual_pool)
    }

    /// Builds a model from explicit parts, verifying stability. The pool
    /// may be empty when only Gaussian simulation is intended.
    pub fn from_parts(a: Vec<DMatrix<f64>>, residual_pool: DMatrix<f64>) -> Result<VarModel> {
        Self::assemble(a, residual_pool)
    }

    fn assemble(a: Vec<DMatrix<f64>>, residual_pool: DMatrix<f64>) -> Result<VarModel> {
        let m = a.first().map(|m0| m0.nrows()).unwrap_or(0);
        if a.iter().any(|ai| ai.nrows() != m || ai.ncols() != m) {
            return Err(Error::InvalidArgument(
                "coefficient matrices must be square with equal dimension".into(),
            ));
        }
        if !residual_pool.is_empty() && residual_pool.ncols() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: residual_pool.ncols(),
            });
        }
        let spectral_radius = companion_spectral_radius(&a);
        if spectral_radius >= 1.0 {
            return Err(Error::UnstableModel {
                rho: spectral_radius,
            });
        }
        let q = residual_pool.nrows();
        let sigma_e = if q > 0 {
            (residual_pool.transpose() * &residual_pool) / q as f64
        } else {
            DMatrix::zeros(m, m)
        };
        Ok(VarModel {
            a,
            sigma_e,
            residual_pool,
            spectral_radius,
        })
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.a.first().map(|m0| m0.nrows()).unwrap_or(0)
    }

    /// Coefficient matrices `Â_1 … Â_p`.
    pub fn coefficients(&self) -> &[DMatrix<f64>] {
        &self.a
    }

    /// Covariance of the resampling distribution: second moment of the
    /// centered residual pool with divisor `n − p`.
    pub fn sigma_e(&self) -> &DMatrix<f64> {
        &self.sigma_e
    }

    /// Centered residual rows `ẽ_{t,p}`.
    pub fn residual_pool(&self) -> &DMatrix<f64> {
        &self.residual_pool
    }

    /// Companion-matrix spectral radius; `< 1` for every constructed model.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Margin to instability, `1 − ρ`.
    pub fn stability_margin(&self) -> f64 {
        1.0 - self.spectral_radius
    }

    /// Moving-average coefficients `Ψ_0 = I, Ψ_1, …` of the inverse
    /// polynomial, truncated once the remaining tail is negligible
    /// relative to `tail_tol`.
    pub fn psi_series(&self, tail_tol: f64) -> Result<Vec<DMatrix<f64>>> {
        let m = self.dim();
        let p = self.order();
        let mut psi = vec![DMatrix::identity(m, m)];
        if self.a.iter().all(|a| a.amax() == 0.0) {
            return Ok(psi);
        }
        let mut quiet_run = 0usize;
        for k in 1..=PSI_TERM_CAP {
            let mut next = DMatrix::zeros(m, m);
            for j in 1..=p.min(k) {
                next += &self.a[j - 1] * &psi[k - j];
            }
            let term_norm = next.norm();
            psi.push(next);
            // geometric decay: once p consecutive terms fall below the
            // threshold every later term does too
            if term_norm < tail_tol * 1e-2 {
                quiet_run += 1;
                if quiet_run >= p {
                    return Ok(psi);
                }
            } else {
                quiet_run = 0;
            }
        }
        Err(Error::TruncationCap(format!(
            "moving-average series did not decay below {tail_tol:.1e} within {PSI_TERM_CAP} terms (spectral radius {:.6})",
            self.spectral_radius
        )))
    }

    /// Lag-`h` autocovariance `Γ_h = Σ_{l≥0} Ψ_l Σ̂_e Ψ_{l+h}ᵀ` implied by
    /// the fitted model and the residual-pool covariance.
    pub fn implied_autocovariance(&self, h: usize) -> Result<DMatrix<f64>> {
        let psi = self.psi_series(1e-10)?;
        let m = self.dim();
        let mut gamma = DMatrix::zeros(m, m);
        for l in 0..psi.len().saturating_sub(h) {
            gamma += &psi[l] * &self.sigma_e * psi[l + h].transpose();
        }
        Ok(gamma)
    }

    /// Burn-in length: the smallest `S` for which the lag-0 autocovariance
    /// truncated at `S` moving-average terms is within `delta` (Frobenius)
    /// of the full sum, floored at `2p`.
    pub fn burn_in_length(&self, delta: f64) -> Result<usize> {
        let psi = self.psi_series((delta * 1e-4).min(1e-10))?;
        let terms: Vec<DMatrix<f64>> = psi
            .iter()
            .map(|pk| pk * &self.sigma_e * pk.transpose())
            .collect();
        // suffix sums: tail(s) = ‖Σ_{j>s} term_j‖_F
        let m = self.dim();
        let mut tail = DMatrix::zeros(m, m);
        let mut tails = vec![0.0; terms.len()];
        for s in (0..terms.len()).rev() {
            tails[s] = tail.norm();
            tail += &terms[s];
        }
        let s = tails
            .iter()
            .position(|&t| t < delta)
            .unwrap_or(terms.len().saturating_sub(1));
        Ok(s.max(2 * self.order()))
    }

    /// Generates `n` score rows: runs the recursion from the first `p`
    /// rows of `start`, discards `burn_in` values, then returns the next
    /// `n` rows.
    pub fn simulate(
        &self,
        n: usize,
        burn_in: usize,
        innovations: Innovations,
        start: &DMatrix<f64>,
        rng: &mut impl Rng,
    ) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let p = self.order();
        if start.nrows() < p {
            return Err(Error::TooFewObservations {
                needed: p,
                got: start.nrows(),
            });
        }
        if start.ncols() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: start.ncols(),
            });
        }
        if innovations == Innovations::ResamplePool && self.residual_pool.nrows() == 0 {
            return Err(Error::EmptyPool);
        }
        if self.spectral_radius >= 1.0 {
            return Err(Error::UnstableModel {
                rho: self.spectral_radius,
            });
        }
        let gauss_factor = match innovations {
            Innovations::Gaussian => Some(symmetric_sqrt(&self.sigma_e)),
            Innovations::ResamplePool => None,
        };

        // ring of the last p values, newest last
        let mut hist: Vec<DVector<f64>> = (0..p).map(|t| start.row(t).transpose()).collect();
        let mut out = DMatrix::zeros(n, m);
        let pool_len = self.residual_pool.nrows();
        for step in 0..burn_in + n {
            let mut next = DVector::zeros(m);
            for j in 1..=p {
                next += &self.a[j - 1] * &hist[p - j];
            }
            match innovations {
                Innovations::ResamplePool => {
                    let idx = rng.random_range(0..pool_len);
                    next += self.residual_pool.row(idx).transpose();
                }
                Innovations::Gaussian => {
                    let z = DVector::from_iterator(
                        m,
                        (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)),
                    );
                    next += gauss_factor.as_ref().unwrap() * z;
                }
            }
            if step >= burn_in {
                out.row_mut(step - burn_in).copy_from(&next.transpose());
            }
            if p > 0 {
                hist.rotate_left(1);
                hist[p - 1] = next;
            }
        }
        Ok(out)
    }
}

/// Solves the forward block Yule-Walker system for the coefficient
/// matrices. Errors when the block Toeplitz matrix has condition number
/// above `1e12`.
pub fn yule_walker_matrices(acov: &AutocovSet, p: usize) -> Result<Vec<DMatrix<f64>>> {
    if p == 0 || p > acov.max_lag() {
        return Err(Error::InvalidArgument(format!(
            "order {p} outside the computed lag range 1..={}",
            acov.max_lag()
        )));
    }
    let m = acov.dim();
    let mp = m * p;
    let mut g = DMatrix::zeros(mp, mp);
    for j in 0..p {
        for k in 0..p {
            // block (j,k) = C(k−j); C(−h) = C(h)ᵀ
            let block = if k >= j {
                acov.c(k - j)
            } else {
                acov.c(j - k).transpose()
            };
            g.view_mut((j * m, k * m), (m, m)).copy_from(&block);
        }
    }
    let svd_vals = g.clone().singular_values();
    let smax = svd_vals.max();
    let smin = svd_vals.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::SingularYuleWalker {
            block_size: mp,
            cond,
        });
    }
    let mut rhs = DMatrix::zeros(mp, m);
    for k in 0..p {
        rhs.view_mut((k * m, 0), (m, m))
            .copy_from(&acov.c(k + 1).transpose());
    }
    let solved = g
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularYuleWalker { block_size: mp, cond })?;
    Ok((0..p)
        .map(|j| solved.view((j * m, 0), (m, m)).transpose())
        .collect())
}

/// Uncentered one-step prediction residuals `ê_t = ξ_t − Σ_j A_j ξ_{t−j}`
/// for `t = p+1…n`.
pub(crate) fn raw_residuals(scores: &ScoreSeries, a: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let n = scores.len();
    let m = scores.dim();
    let p = a.len();
    if a.iter().any(|ai| ai.nrows() != m || ai.ncols() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            got: a.first().map(|ai| ai.nrows()).unwrap_or(0),
        });
    }
    if n <= p {
        return Err(Error::TooFewObservations { needed: p + 1, got: n });
    }
    let x = scores.matrix();
    let mut pool = DMatrix::zeros(n - p, m);
    for t in p..n {
        let mut e = x.row(t).transpose();
        for j in 1..=p {
            e -= &a[j - 1] * x.row(t - j).transpose();
        }
        pool.row_mut(t - p).copy_from(&e.transpose());
    }
    Ok(pool)
}

/// One-step prediction residuals `ê_t = ξ_t − Σ_j A_j ξ_{t−j}` for
/// `t = p+1…n`, centered to exact zero mean.
pub fn residuals(scores: &ScoreSeries, a: &[DMatrix<f64>]) -> Result<DMatrix<f64>> {
    let mut pool = raw_residuals(scores, a)?;
    let q = pool.nrows();
    let means = pool.row_sum() / q as f64;
    for mut row in pool.row_iter_mut() {
        row -= &means;
    }
    Ok(pool)
}

/// Spectral radius of the companion matrix of `A_1 … A_p`.
pub fn companion_spectral_radius(a: &[DMatrix<f64>]) -> f64 {
    let p = a.len();
    let m = a.first().map(|m0| m0.nrows()).unwrap_or(0);
    if p == 0 || m == 0 || a.iter().all(|ai| ai.amax() == 0.0) {
        return 0.0;
    }
    let mp = m * p;
    let mut companion = DMatrix::zeros(mp, mp);
    for j in 0..p {
        companion.view_mut((0, j * m), (m, m)).copy_from(&a[j]);
    }
    for j in 1..p {
        companion
            .view_mut((j * m, (j - 1) * m), (m, m))
            .copy_from(&DMatrix::identity(m, m));
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Symmetric square root of a PSD matrix via its eigendecomposition;
/// negative round-off eigenvalues are clamped at zero.
fn symmetric_sqrt(sigma: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = sigma.clone().symmetric_eigen();
    let m = sigma.nrows();
    let mut out = DMatrix::zeros(m, m);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        let u = eig.eigenvectors.column(k);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] += s * u[i] * u[j];
            }
        }
    }
    out
}
