//! Grid-based curves in `L²([0,1])` with quadrature-consistent inner
//! products and a Fourier basis.
//!
//! Curves are sampled on a shared [`Grid`] of points `0 = τ₁ < … < τ_T = 1`
//! carrying positive quadrature weights, so that `⟨x,y⟩ = Σ_i w_i x(τ_i) y(τ_i)`
//! approximates the integral `∫₀¹ x y`. All values are immutable after
//! construction and safe to share across threads.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Points and quadrature weights shared by every curve of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds a grid from explicit points and weights.
    ///
    /// Requires `τ₁ = 0`, `τ_T = 1`, strictly increasing points, positive
    /// weights and `Σ w_i = 1` within `1e-12`.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Arc<Self>> {
        if points.len() < 2 || points.len() != weights.len() {
            return Err(Error::InvalidGrid(format!(
                "need matching point/weight vectors of length >= 2, got {}/{}",
                points.len(),
                weights.len()
            )));
        }
        if points[0] != 0.0 || *points.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid("grid must span [0,1] inclusive".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidGrid("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "weights must sum to 1, got {total:.15}"
            )));
        }
        Ok(Arc::new(Grid { points, weights }))
    }

    /// Equidistant grid with `t` points including both endpoints and
    /// composite trapezoidal weights.
    pub fn uniform(t: usize) -> Arc<Self> {
        assert!(t >= 2, "a grid needs at least two points");
        let h = 1.0 / (t - 1) as f64;
        let points: Vec<f64> = (0..t)
            .map(|i| if i == t - 1 { 1.0 } else { i as f64 * h })
            .collect();
        let mut weights = vec![h; t];
        weights[0] = h / 2.0;
        weights[t - 1] = h / 2.0;
        Grid::new(points, weights).expect("uniform grid is always valid")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature approximation of `∫₀¹ f` from point values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Returns an error unless both grids are the same object or value-equal.
pub(crate) fn check_same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// A single curve: values sampled on a grid.
#[derive(Debug, Clone)]
pub struct Curve {
    grid: Arc<Grid>,
    values: DVector<f64>,
}

impl Curve {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Curve {
            grid,
            values: DVector::from_vec(values),
        })
    }

    /// Curve built by evaluating `f` at every grid point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = DVector::from_iterator(grid.len(), grid.points().iter().map(|&t| f(t)));
        Curve { grid, values }
    }

    pub fn zero(grid: Arc<Grid>) -> Self {
        let values = DVector::zeros(grid.len());
        Curve { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<f64> {
        &self.values
    }

    pub(crate) fn from_vector(grid: Arc<Grid>, values: DVector<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Curve { grid, values }
    }
}

/// Quadrature inner product `Σ_i w_i x(τ_i) y(τ_i) ≈ ∫₀¹ x y`.
pub fn inner_product(x: &Curve, y: &Curve) -> Result<f64> {
    check_same_grid(&x.grid, &y.grid)?;
    Ok(x.grid
        .weights()
        .iter()
        .zip(x.values().iter().zip(y.values()))
        .map(|(w, (a, b))| w * a * b)
        .sum())
}

/// Induced norm `sqrt(⟨x,x⟩)`.
pub fn norm(x: &Curve) -> f64 {
    inner_product(x, x)
        .expect("a curve shares its own grid")
        .max(0.0)
        .sqrt()
}

/// An ordered sequence of curves on a common grid, stored as an
/// `n × T` matrix (one row per curve).
#[derive(Debug, Clone)]
pub struct FunctionalSeries {
    grid: Arc<Grid>,
    values: DMatrix<f64>,
}

impl FunctionalSeries {
    pub fn new(grid: Arc<Grid>, curves: Vec<Curve>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        for c in &curves {
            check_same_grid(&grid, &c.grid)?;
        }
        let n = curves.len();
        let t = grid.len();
        let values = DMatrix::from_fn(n, t, |i, j| curves[i].values[j]);
        Ok(FunctionalSeries { grid, values })
    }

    /// Builds a series from a row-per-curve matrix.
    pub fn from_matrix(grid: Arc<Grid>, values: DMatrix<f64>) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.ncols(),
            });
        }
        if values.nrows() == 0 {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        Ok(FunctionalSeries { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Row-per-curve value matrix (`n × T`).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn curve(&self, t: usize) -> Curve {
        Curve {
            grid: self.grid.clone(),
            values: self.values.row(t).transpose(),
        }
    }

    pub fn curves(&self) -> impl Iterator<Item = Curve> + '_ {
        (0..self.len()).map(|t| self.curve(t))
    }

    /// Pointwise sample mean curve.
    pub fn mean_curve(&self) -> Curve {
        let n = self.len() as f64;
        let mean = self.values.row_mean().transpose() * (self.values.nrows() as f64) / n;
        Curve {
            grid: self.grid.clone(),
            values: mean,
        }
    }
}

/// Removes the pointwise sample mean; returns the centered series and the
/// mean curve. The centered curves sum to the zero curve.
pub fn center(series: &FunctionalSeries) -> (FunctionalSeries, Curve) {
    let mean = series.mean_curve();
    let mut values = series.values.clone();
    for mut row in values.row_iter_mut() {
        row -= mean.values.transpose();
    }
    (
        FunctionalSeries {
            grid: series.grid.clone(),
            values,
        },
        mean,
    )
}

/// First `d` elements of the Fourier basis on `[0,1]`:
/// `f₁ ≡ 1`, `f_{2k}(τ) = √2 sin(2πkτ)`, `f_{2k+1}(τ) = √2 cos(2πkτ)`.
pub fn fourier_basis(grid: &Arc<Grid>, d: usize) -> Vec<Curve> {
    assert!(d >= 1, "basis size must be at least 1");
    let sqrt2 = std::f64::consts::SQRT_2;
    (1..=d)
        .map(|j| {
            if j == 1 {
                Curve::from_fn(grid.clone(), |_| 1.0)
            } else if j % 2 == 0 {
                let k = (j / 2) as f64;
                Curve::from_fn(grid.clone(), move |t| sqrt2 * (2.0 * PI * k * t).sin())
            } else {
                let k = (j / 2) as f64;
                Curve::from_fn(grid.clone(), move |t| sqrt2 * (2.0 * PI * k * t).cos())
            }
        })
        .collect()
}

/// Pointwise linear combination `Σ_j coeffs[j] · basis[j]`.
pub fn synthesize(coeffs: &[f64], basis: &[Curve]) -> Result<Curve> {
    if coeffs.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    let first = basis.first().ok_or(Error::InvalidArgument(
        "cannot synthesize from an empty basis".into(),
    ))?;
    let mut out = DVector::zeros(first.grid.len());
    for (c, b) in coeffs.iter().zip(basis) {
        check_same_grid(&first.grid, &b.grid)?;
        out.axpy(*c, &b.values, 1.0);
    }
    Ok(Curve {
        grid: first.grid.clone(),
        values: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_grid_has_trapezoid_weights() {
        let g = Grid::uniform(21);
        assert_eq!(g.len(), 21);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[20], 1.0);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.weights()[0], 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights()[10], 0.05, epsilon = 1e-15);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(Grid::new(vec![0.0, 0.5], vec![0.5, 0.5]).is_err()); // end != 1
        assert!(Grid::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.25; 4]).is_err()); // not increasing
        assert!(Grid::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err()); // negative weight
        assert!(Grid::new(vec![0.0, 1.0], vec![0.6, 0.6]).is_err()); // sum != 1
    }

    #[test]
    fn inner_product_of_unit_constants_is_one() {
        let g = Grid::uniform(21);
        let one = Curve::from_fn(g.clone(), |_| 1.0);
        assert_abs_diff_eq!(inner_product(&one, &one).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_product_of_orthogonal_fourier_pair_vanishes() {
        let g = Grid::uniform(21);
        let basis = fourier_basis(&g, 3);
        // √2 sin(2πτ) vs √2 cos(2πτ)
        let ip = inner_product(&basis[1], &basis[2]).unwrap();
        assert!(ip.abs() < 1e-3, "got {ip}");
    }

    #[test]
    fn inner_product_matches_analytic_integral_of_monomials() {
        // oracle: ∫₀¹ τ·τ² dτ = 1/4, composite trapezoid error <= h²/12 · max|f''| = h²
        let g = Grid::uniform(21);
        let h: f64 = 0.05;
        let x = Curve::from_fn(g.clone(), |t| t);
        let y = Curve::from_fn(g.clone(), |t| t * t);
        let ip = inner_product(&x, &y).unwrap();
        assert!((ip - 0.25).abs() <= h * h * 0.5, "got {ip}");
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = Curve::zero(Grid::uniform(11));
        let b = Curve::zero(Grid::uniform(21));
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn norm_edge_cases() {
        let g = Grid::uniform(21);
        assert_eq!(norm(&Curve::zero(g.clone())), 0.0);
        let two = Curve::from_fn(g.clone(), |_| 2.0);
        assert_abs_diff_eq!(norm(&two), 2.0, epsilon = 1e-12);
        // oracle: sqrt(∫ τ²) = 3^{-1/2}; trapezoid bias on ∫τ² is h²/6
        let lin = Curve::from_fn(g, |t| t);
        let exact = 1.0 / 3.0_f64.sqrt();
        assert!((norm(&lin) - exact).abs() < 1e-3);
    }

    #[test]
    fn centering_identities() {
        let g = Grid::uniform(11);
        let c = Curve::from_fn(g.clone(), |t| 1.0 + t);
        let series =
            FunctionalSeries::new(g.clone(), vec![c.clone(), c.clone(), c.clone()]).unwrap();
        let (centered, mean) = center(&series);
        assert!(centered.matrix().amax() <= 1e-15);
        for (a, b) in mean.values().iter().zip(c.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        let v = Curve::from_fn(g.clone(), |t| (2.0 * PI * t).sin());
        let neg = Curve::from_fn(g.clone(), |t| -(2.0 * PI * t).sin());
        let pm = FunctionalSeries::new(g.clone(), vec![v.clone(), neg]).unwrap();
        let (centered, mean) = center(&pm);
        assert!(mean.values().iter().all(|&x| x.abs() <= 1e-15));
        for (a, b) in centered.curve(0).values().iter().zip(v.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn centered_columns_sum_to_zero() {
        let g = Grid::uniform(13);
        let curves: Vec<Curve> = (0..5)
            .map(|i| Curve::from_fn(g.clone(), move |t| ((i as f64) + 1.3 * t).sin() * 2.4))
            .collect();
        let series = FunctionalSeries::new(g, curves).unwrap();
        let (centered, _) = center(&series);
        for j in 0..centered.grid().len() {
            let col_sum: f64 = centered.matrix().column(j).sum();
            assert!(col_sum.abs() <= 1e-12);
        }
    }

    #[test]
    fn fourier_basis_shapes() {
        let g = Grid::uniform(21);
        let b1 = fourier_basis(&g, 1);
        assert_eq!(b1.len(), 1);
        assert!(b1[0].values().iter().all(|&v| v == 1.0));

        // f₂(0.25) = √2 sin(π/2) = √2
        let b = fourier_basis(&g, 3);
        let idx = g.points().iter().position(|&t| t == 0.25).unwrap();
        assert_abs_diff_eq!(b[1].values()[idx], std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn fourier_basis_gram_matrix_is_near_identity() {
        let g = Grid::uniform(21);
        let b = fourier_basis(&g, 3);
        for i in 0..3 {
            for j in 0..3 {
                let ip = inner_product(&b[i], &b[j]).unwrap();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).abs() < 1e-2, "gram[{i}][{j}] = {ip}");
            }
        }
    }

    #[test]
    fn synthesize_basic() {
        let g = Grid::uniform(21);
        let b = fourier_basis(&g, 4);

        let zero = synthesize(&[0.0; 4], &b).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let e1 = synthesize(&[1.0, 0.0, 0.0, 0.0], &b).unwrap();
        for (a, c) in e1.values().iter().zip(b[0].values()) {
            assert_abs_diff_eq!(a, c, epsilon = 1e-15);
        }

        // direct-evaluation oracle for (1,1) on (f₁,f₂)
        let s = synthesize(&[1.0, 1.0], &b[..2]).unwrap();
        for (i, &t) in g.points().iter().enumerate() {
            let expect = 1.0 + std::f64::consts::SQRT_2 * (2.0 * PI * t).sin();
            assert_abs_diff_eq!(s.values()[i], expect, epsilon = 1e-12);
        }

        assert!(synthesize(&[1.0], &b).is_err());
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_holds(
            xs in prop::collection::vec(-10.0f64..10.0, 9),
            ys in prop::collection::vec(-10.0f64..10.0, 9),
        ) {
            let g = Grid::uniform(9);
            let x = Curve::new(g.clone(), xs).unwrap();
            let y = Curve::new(g, ys).unwrap();
            let ip = inner_product(&x, &y).unwrap();
            prop_assert!(ip.abs() <= norm(&x) * norm(&y) + 1e-12);
        }

        #[test]
        fn inner_product_is_bilinear(
            xs in prop::collection::vec(-5.0f64..5.0, 9),
            ys in prop::collection::vec(-5.0f64..5.0, 9),
            zs in prop::collection::vec(-5.0f64..5.0, 9),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let g = Grid::uniform(9);
            let x = Curve::new(g.clone(), xs).unwrap();
            let y = Curve::new(g.clone(), ys).unwrap();
            let z = Curve::new(g.clone(), zs).unwrap();
            let combo_values: Vec<f64> = x.values().iter().zip(y.values())
                .map(|(xv, yv)| a * xv + b * yv)
                .collect();
            let combo = Curve::new(g, combo_values).unwrap();
            let lhs = inner_product(&combo, &z).unwrap();
            let rhs = a * inner_product(&x, &z).unwrap() + b * inner_product(&y, &z).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() / scale <= 1e-12);
        }

        #[test]
        fn synthesize_then_project_recovers_coefficients(
            c1 in -4.0f64..4.0,
            c2 in -4.0f64..4.0,
            c3 in -4.0f64..4.0,
        ) {
            let g = Grid::uniform(21);
            let basis = fourier_basis(&g, 3);
            let coeffs = [c1, c2, c3];
            let s = synthesize(&coeffs, &basis).unwrap();
            for (k, b) in basis.iter().enumerate() {
                let proj = inner_product(&s, b).unwrap();
                // bounded by the Gram-matrix deviation at T = 21
                prop_assert!((proj - coeffs[k]).abs() <= 1e-2 * (1.0 + coeffs.iter().map(|c| c.abs()).sum::<f64>()));
            }
        }
    }
}
