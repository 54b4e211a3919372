//! Sieve bootstrap for stationary functional time series.
//!
//! A functional time series is a sequence of random curves observed on a
//! common grid in `[0,1]`. The sieve bootstrap implemented here generates
//! pseudo-series by (1) extracting functional principal component scores,
//! (2) fitting a Yule-Walker vector autoregression to the score vectors,
//! (3) resampling the VAR residuals and the leftover functional residuals,
//! and (4) reassembling curves through the truncated Karhunen-Loève
//! expansion. The crate also ships the tuning criteria for the number of
//! components and the VAR order, block-bootstrap baselines, data
//! generators, and the inference targets (functional Fourier transforms,
//! bootstrap standard deviation of the sample mean, a fully functional
//! two-sample mean test).
//!
//! All randomized operations take caller-owned RNGs; see [`streams`] for
//! the replicate stream family used by the experiment harness.

pub mod blockboot;
pub mod curve;
pub mod fpca;
pub mod metrics;
pub mod select;
pub mod sieve;
pub mod simgen;
pub mod stats;
pub mod streams;
pub mod var;

pub use curve::{Curve, FunctionalSeries, Grid};
pub use fpca::{EigenSystem, ResidualPool, ScoreSeries};
pub use sieve::{BootstrapSeries, SieveModel};
pub use var::VarModel;

/// Error type shared by all modules of this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("curves are defined on different grids")]
    GridMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("kernel matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    AsymmetricKernel { max_asym: f64 },
    #[error("requested {requested} components but only {available} are available")]
    TooManyComponents { requested: usize, available: usize },
    #[error("all eigenvalues are zero; criterion undefined")]
    DegenerateSpectrum,
    #[error("Yule-Walker block matrix of size {block_size} is numerically singular (cond {cond:.3e})")]
    SingularYuleWalker { block_size: usize, cond: f64 },
    #[error("autoregressive model is unstable (spectral radius {rho:.6})")]
    UnstableModel { rho: f64 },
    #[error("order selection infeasible: {0}")]
    InfeasibleOrder(String),
    #[error("residual pool is empty")]
    EmptyPool,
    #[error("moving-average series diverged: {0}")]
    TruncationCap(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
