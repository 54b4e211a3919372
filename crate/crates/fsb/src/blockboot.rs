//! Block-bootstrap baselines operating on whole curves: moving blocks,
//! tapered blocks (trapezoidal taper on centered blocks, mean re-added),
//! and the stationary bootstrap (geometric block lengths, circular wrap).

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Geometric};

use crate::curve::{center, FunctionalSeries};
use crate::{Error, Result};

/// Default taper ramp fraction for the tapered block bootstrap.
pub const DEFAULT_TAPER_RAMP: f64 = 0.43;

/// Block-resampling scheme on curve units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockBootstrap {
    /// Overlapping fixed-length blocks, uniform starts.
    Moving { block_len: usize },
    /// Moving blocks with a trapezoidal taper of ramp fraction `ramp`
    /// applied to centered curves, rescaled so `Σ w̃_i² = b`.
    Tapered { block_len: usize, ramp: f64 },
    /// Geometric block lengths with the given mean, circular wrap.
    Stationary { mean_block_len: f64 },
}

impl BlockBootstrap {
    pub fn replicate(
        &self,
        series: &FunctionalSeries,
        rng: &mut dyn RngCore,
    ) -> Result<FunctionalSeries> {
        match *self {
            BlockBootstrap::Moving { block_len } => mbb_replicate(series, block_len, rng),
            BlockBootstrap::Tapered { block_len, ramp } => {
                tbb_replicate(series, block_len, ramp, rng)
            }
            BlockBootstrap::Stationary { mean_block_len } => {
                sb_replicate(series, mean_block_len, rng)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BlockBootstrap::Moving { .. } => "mbb",
            BlockBootstrap::Tapered { .. } => "tbb",
            BlockBootstrap::Stationary { .. } => "sb",
        }
    }
}

fn check_block_len(b: usize, n: usize) -> Result<()> {
    if b == 0 || b > n {
        return Err(Error::InvalidArgument(format!(
            "block length {b} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Moving block bootstrap: `⌈n/b⌉` uniformly chosen overlapping blocks of
/// `b` consecutive curves, concatenated and truncated to `n`.
pub fn mbb_replicate(
    series: &FunctionalSeries,
    b: usize,
    rng: &mut dyn RngCore,
) -> Result<FunctionalSeries> {
    let n = series.len();
    check_block_len(b, n)?;
    let x = series.matrix();
    let mut out = DMatrix::zeros(n, series.grid().len());
    let mut filled = 0;
    while filled < n {
        let start = (&mut *rng).random_range(0..=n - b);
        let take = b.min(n - filled);
        out.rows_mut(filled, take)
            .copy_from(&x.rows(start, take));
        filled += take;
    }
    FunctionalSeries::from_matrix(series.grid().clone(), out)
}

/// Trapezoidal taper weight at relative position `u ∈ (0,1)` with ramp
/// fraction `c`: `u/c` rising, 1 on the plateau, `(1−u)/c` falling.
fn trapezoid(u: f64, c: f64) -> f64 {
    (u / c).min(1.0).min((1.0 - u) / c)
}

/// Taper weights `w̃_1…w̃_b` at block positions `(i − 1/2)/b`, rescaled so
/// that `Σ w̃_i² = b`.
pub fn taper_weights(b: usize, ramp: f64) -> Result<Vec<f64>> {
    if !(ramp > 0.0 && ramp <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "taper ramp fraction must lie in (0, 0.5], got {ramp}"
        )));
    }
    let raw: Vec<f64> = (1..=b)
        .map(|i| trapezoid((i as f64 - 0.5) / b as f64, ramp))
        .collect();
    let sum_sq: f64 = raw.iter().map(|w| w * w).sum();
    let scale = (b as f64 / sum_sq).sqrt();
    Ok(raw.into_iter().map(|w| w * scale).collect())
}

/// Tapered block bootstrap: centered curves inside each sampled block are
/// multiplied by the rescaled trapezoidal taper, blocks are concatenated
/// and the sample mean is re-added.
pub fn tbb_replicate(
    series: &FunctionalSeries,
    b: usize,
    ramp: f64,
    rng: &mut dyn RngCore,
) -> Result<FunctionalSeries> {
    let n = series.len();
    check_block_len(b, n)?;
    let weights = taper_weights(b, ramp)?;
    let (centered, mean) = center(series);
    let xc = centered.matrix();
    let t_len = series.grid().len();
    let mut out = DMatrix::zeros(n, t_len);
    let mut filled = 0;
    while filled < n {
        let start = (&mut *rng).random_range(0..=n - b);
        let take = b.min(n - filled);
        for i in 0..take {
            for j in 0..t_len {
                out[(filled + i, j)] = mean.values()[j] + weights[i] * xc[(start + i, j)];
            }
        }
        filled += take;
    }
    FunctionalSeries::from_matrix(series.grid().clone(), out)
}

/// Stationary bootstrap: blocks with geometric lengths of the given mean,
/// uniform starts and circular wrap-around, concatenated to length `n`.
pub fn sb_replicate(
    series: &FunctionalSeries,
    mean_block_len: f64,
    rng: &mut dyn RngCore,
) -> Result<FunctionalSeries> {
    if mean_block_len < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "mean block length must be at least 1, got {mean_block_len}"
        )));
    }
    let n = series.len();
    let x = series.matrix();
    let geom = Geometric::new(1.0 / mean_block_len)
        .map_err(|e| Error::InvalidArgument(format!("geometric block law: {e}")))?;
    let mut out = DMatrix::zeros(n, series.grid().len());
    let mut filled = 0;
    while filled < n {
        let start = (&mut *rng).random_range(0..n);
        let len = 1 + geom.sample(&mut *rng) as usize;
        for i in 0..len.min(n - filled) {
            out.row_mut(filled + i).copy_from(&x.row((start + i) % n));
        }
        filled += len.min(n - filled);
    }
    FunctionalSeries::from_matrix(series.grid().clone(), out)
}
