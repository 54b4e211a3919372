//! Evaluation metrics for bootstrap standard-deviation estimates and the
//! exact-sd Monte Carlo oracle they are judged against.

use rand::RngCore;

use crate::simgen::SeriesGenerator;
use crate::{Error, Result};

/// The three summary metrics over the grid: averaged absolute bias,
/// averaged relative bias, and averaged standard deviation of the
/// per-replicate estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub abias: f64,
    pub rbias: f64,
    pub astd: f64,
}

/// Computes `ABias = T⁻¹ Σ_j |σ̄*(τ_j) − σ(τ_j)|`,
/// `RBias = T⁻¹ Σ_j |σ̄*(τ_j)/σ(τ_j) − 1|` and
/// `AStd = T⁻¹ Σ_j sqrt(Var̂(σ*(τ_j)))` (divisor `R − 1`) from per-replicate
/// sd curves against the exact sd curve.
pub fn metrics(estimates: &[Vec<f64>], exact: &[f64]) -> Result<MetricSummary> {
    let r = estimates.len();
    if r == 0 {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let t = exact.len();
    for e in estimates {
        if e.len() != t {
            return Err(Error::LengthMismatch {
                expected: t,
                got: e.len(),
            });
        }
    }
    if exact.iter().any(|&s| s == 0.0) {
        return Err(Error::InvalidArgument(
            "exact sd is zero at some grid point; relative bias undefined".into(),
        ));
    }
    let mut abias = 0.0;
    let mut rbias = 0.0;
    let mut astd = 0.0;
    for j in 0..t {
        let mean = estimates.iter().map(|e| e[j]).sum::<f64>() / r as f64;
        abias += (mean - exact[j]).abs();
        rbias += (mean / exact[j] - 1.0).abs();
        if r >= 2 {
            let var = estimates
                .iter()
                .map(|e| (e[j] - mean) * (e[j] - mean))
                .sum::<f64>()
                / (r - 1) as f64;
            astd += var.sqrt();
        }
    }
    let tf = t as f64;
    Ok(MetricSummary {
        abias: abias / tf,
        rbias: rbias / tf,
        astd: astd / tf,
    })
}

/// Empirical per-τ standard deviation of `√n X̄_n(τ)` over `r_exact` fresh
/// series from the generator.
pub fn exact_sd_oracle(
    generator: &dyn SeriesGenerator,
    n: usize,
    r_exact: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if r_exact < 100 {
        return Err(Error::TooFewObservations {
            needed: 100,
            got: r_exact,
        });
    }
    let sqrt_n = (n as f64).sqrt();
    let mut sums: Vec<f64> = Vec::new();
    let mut sumsq: Vec<f64> = Vec::new();
    for _ in 0..r_exact {
        let series = generator.generate(n, rng);
        let mean = series.mean_curve();
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
    let rf = r_exact as f64;
    Ok(sums
        .iter()
        .zip(&sumsq)
        .map(|(&s, &ss)| ((ss - s * s / rf) / (rf - 1.0)).max(0.0).sqrt())
        .collect())
}
