//! Functional principal component analysis on the quadrature grid.
//!
//! The sample covariance operator of a centered series is an integral
//! operator with kernel `K(τ_i, τ_k) = n⁻¹ Σ_t Xc_t(τ_i) Xc_t(τ_k)`. Its
//! eigenproblem is solved in weighted coordinates: with `W` the diagonal
//! matrix of quadrature weights, the symmetric matrix `W^{1/2} K W^{1/2}`
//! has the same eigenvalues as the integral operator and its eigenvectors
//! map back through `W^{-1/2}`, which makes eigenfunction orthonormality
//! exact at grid level.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::curve::{center, check_same_grid, Curve, FunctionalSeries, Grid};
use crate::{Error, Result};

/// Eigenvalues (descending) and quadrature-orthonormal eigenfunctions of a
/// covariance kernel.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    /// Row `j` holds eigenfunction `v_j` evaluated on the grid.
    functions: DMatrix<f64>,
    grid: Arc<Grid>,
    warnings: Vec<String>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunction(&self, j: usize) -> Curve {
        Curve::from_vector(self.grid.clone(), self.functions.row(j).transpose())
    }

    /// Row-per-eigenfunction value matrix (`K × T`).
    pub fn function_matrix(&self) -> &DMatrix<f64> {
        &self.functions
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Diagnostics emitted during the eigendecomposition, e.g. on
    /// near-degenerate eigenvalue gaps.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Restriction to the leading `m` eigenpairs.
    pub fn truncate(&self, m: usize) -> Result<EigenSystem> {
        if m > self.len() {
            return Err(Error::TooManyComponents {
                requested: m,
                available: self.len(),
            });
        }
        Ok(EigenSystem {
            eigenvalues: self.eigenvalues[..m].to_vec(),
            functions: self.functions.rows(0, m).into_owned(),
            grid: self.grid.clone(),
            warnings: self.warnings.clone(),
        })
    }
}

/// Score matrix `ξ̂_{t,j} = ⟨X_t − X̄, v̂_j⟩`, one row per time point.
#[derive(Debug, Clone)]
pub struct ScoreSeries {
    matrix: DMatrix<f64>,
}

impl ScoreSeries {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        ScoreSeries { matrix }
    }

    /// Number of time points `n`.
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Number of retained components `m`.
    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// `n × m` score matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn row(&self, t: usize) -> DVector<f64> {
        self.matrix.row(t).transpose()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j).iter().copied().collect()
    }
}

/// Centered functional residuals `Û_{t,m} − Ū̂_n`; the resampling pool for
/// the additive functional noise.
#[derive(Debug, Clone)]
pub struct ResidualPool {
    series: FunctionalSeries,
}

impl ResidualPool {
    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn series(&self) -> &FunctionalSeries {
        &self.series
    }

    pub fn curve(&self, t: usize) -> Curve {
        self.series.curve(t)
    }

    /// Empirical covariance kernel of the pool, `n⁻¹ Σ_t Ũ_t(τ_i) Ũ_t(τ_k)`.
    pub fn covariance_kernel(&self) -> DMatrix<f64> {
        let u = self.series.matrix();
        (u.transpose() * u) / self.len() as f64
    }
}

/// Sample covariance kernel `K(τ_i, τ_k) = n⁻¹ Σ_t Xc_t(τ_i) Xc_t(τ_k)`.
pub fn covariance_operator(series: &FunctionalSeries) -> Result<DMatrix<f64>> {
    if series.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: series.len(),
        });
    }
    let (centered, _) = center(series);
    let x = centered.matrix();
    Ok((x.transpose() * x) / series.len() as f64)
}

/// Top-`k` eigenpairs of the integral operator with the given symmetric
/// kernel, orthonormal in the quadrature inner product, eigenvalues
/// descending and clamped at zero, signs fixed so the coordinate of
/// largest absolute value is positive (ties broken by smallest index).
pub fn eigendecompose(kernel: &DMatrix<f64>, grid: &Arc<Grid>, k: usize) -> Result<EigenSystem> {
    let t = grid.len();
    if kernel.nrows() != t || kernel.ncols() != t {
        return Err(Error::LengthMismatch {
            expected: t,
            got: kernel.nrows(),
        });
    }
    if k > t {
        return Err(Error::TooManyComponents {
            requested: k,
            available: t,
        });
    }
    let max_asym = (kernel - kernel.transpose()).amax();
    if max_asym > 1e-8 {
        return Err(Error::AsymmetricKernel { max_asym });
    }

    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut b = kernel.clone();
    for i in 0..t {
        for j in 0..t {
            b[(i, j)] *= sqrt_w[i] * sqrt_w[j];
        }
    }
    // exact symmetry for the solver
    let b = (&b + b.transpose()) * 0.5;

    let eig = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &c| {
        eig.eigenvalues[c]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    let mut eigenvalues = Vec::with_capacity(k);
    let mut functions = DMatrix::zeros(k, t);
    for (row, &idx) in order.iter().take(k).enumerate() {
        eigenvalues.push(eig.eigenvalues[idx].max(0.0));
        let u = eig.eigenvectors.column(idx);
        // map back and renormalize in the quadrature inner product
        let mut v: Vec<f64> = (0..t).map(|i| u[i] / sqrt_w[i]).collect();
        let nrm = grid
            .weights()
            .iter()
            .zip(&v)
            .map(|(w, x)| w * x * x)
            .sum::<f64>()
            .sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|x| *x /= nrm);
        }
        let mut pivot = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[pivot].abs() + 1e-15 {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for (i, x) in v.iter().enumerate() {
            functions[(row, i)] = *x;
        }
    }

    let mut warnings = Vec::new();
    if let Some(&lambda1) = eigenvalues.first() {
        for j in 1..eigenvalues.len() {
            let gap = eigenvalues[j - 1] - eigenvalues[j];
            if gap < 1e-10 * lambda1 {
                warnings.push(format!(
                    "near-degenerate eigenvalue pair ({}, {}): gap {gap:.3e}",
                    j,
                    j + 1
                ));
            }
        }
    }

    Ok(EigenSystem {
        eigenvalues,
        functions,
        grid: grid.clone(),
        warnings,
    })
}

/// Scores of the centered series on the leading `m` eigenfunctions.
pub fn scores(series: &FunctionalSeries, eig: &EigenSystem, m: usize) -> Result<ScoreSeries> {
    check_same_grid(series.grid(), eig.grid())?;
    if m > eig.len() {
        return Err(Error::TooManyComponents {
            requested: m,
            available: eig.len(),
        });
    }
    let (centered, _) = center(series);
    let x = centered.matrix();
    let t = series.grid().len();
    let mut weighted_v = eig.functions.rows(0, m).transpose(); // T × m
    for i in 0..t {
        let w = series.grid().weights()[i];
        weighted_v.row_mut(i).scale_mut(w);
    }
    Ok(ScoreSeries {
        matrix: x * weighted_v,
    })
}

/// Rank-`m` Karhunen-Loève fit of the centered series and the centered
/// functional residuals. The fitted curves exclude the sample mean.
pub fn truncated_fit(
    series: &FunctionalSeries,
    eig: &EigenSystem,
    m: usize,
) -> Result<(FunctionalSeries, ResidualPool)> {
    let xi = scores(series, eig, m)?;
    let (centered, _) = center(series);
    let fitted_matrix = xi.matrix() * eig.functions.rows(0, m);
    let mut residual = centered.matrix() - &fitted_matrix;
    // Step 6 centering; with centered scores the mean is already zero up to
    // rounding, subtract it anyway so the pool mean is exactly zero.
    let n = residual.nrows();
    let col_means = residual.row_sum() / n as f64;
    for mut row in residual.row_iter_mut() {
        row -= &col_means;
    }
    let fitted = FunctionalSeries::from_matrix(series.grid().clone(), fitted_matrix)?;
    let pool = ResidualPool {
        series: FunctionalSeries::from_matrix(series.grid().clone(), residual)?,
    };
    Ok((fitted, pool))
}
