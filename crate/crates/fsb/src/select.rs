//! Data-driven tuning rules: variance-ratio criteria for the number `m` of
//! principal components and AICC for the autoregressive order `p`.
//!
//! `VR` uses eigenvalues only. `GVR` and `DVR` account for temporal
//! dependence through periodograms of the score series, evaluated over the
//! Fourier frequencies `ω_j = 2πj/n`, `j ∈ F_n = {−N,…,−1,1,…,N}`,
//! `N = ⌊n/2⌋`. Periodogram operators are rank one, so their
//! Hilbert-Schmidt norms collapse to fourth powers of functional DFT
//! norms and the double sums over score pairs collapse to squared sums of
//! single-score periodograms; a literal double-sum oracle pins these
//! identities in the tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::curve::{center, FunctionalSeries};
use crate::fpca::{scores, EigenSystem, ScoreSeries};
use crate::var::{autocovariances, raw_residuals, yule_walker_matrices};
use crate::{Error, Result};

/// Outcome of a selection rule: the chosen value and the per-candidate
/// criterion values that produced it.
#[derive(Debug, Clone)]
pub struct SelectionReport {
    /// Rule identifier, e.g. `"vr"`, `"gvr"`, `"aicc"`.
    pub criterion: &'static str,
    /// Selected `m` (or `p` for AICC).
    pub chosen: usize,
    /// `(candidate, criterion value)` pairs; skipped candidates carry NaN.
    pub candidates: Vec<(usize, f64)>,
    /// Threshold `Q` for ratio rules.
    pub threshold: Option<f64>,
    pub warnings: Vec<String>,
}

/// Which variance-ratio rule feeds the combined selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioCriterion {
    Vr,
    Gvr,
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold Q must lie in (0, 1], got {q}"
        )))
    }
}

/// Smallest `m` with `Σ_{j≤m} λ̂_j / Σ_j λ̂_j ≥ Q`.
pub fn vr_select(eigenvalues: &[f64], q: f64) -> Result<SelectionReport> {
    check_q(q)?;
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let mut candidates = Vec::with_capacity(eigenvalues.len());
    let mut cum = 0.0;
    let mut chosen = None;
    for (idx, &l) in eigenvalues.iter().enumerate() {
        cum += l;
        let ratio = cum / total;
        candidates.push((idx + 1, ratio));
        if chosen.is_none() && ratio >= q {
            chosen = Some(idx + 1);
        }
    }
    let mut warnings = Vec::new();
    let chosen = chosen.unwrap_or_else(|| {
        warnings.push(format!("no candidate reached Q = {q}; using all components"));
        eigenvalues.len()
    });
    Ok(SelectionReport {
        criterion: "vr",
        chosen,
        candidates,
        threshold: Some(q),
        warnings,
    })
}

/// Finite Fourier transforms `Ĵ_s(ω_j) = (2πn)^{-1/2} Σ_t ξ_{s,t} e^{-iω_j t}`
/// of each score column over the positive Fourier frequencies; negative
/// frequencies follow by conjugation since the scores are real.
#[derive(Debug, Clone)]
pub struct ScoreDft {
    n: usize,
    /// `values[s][k-1] = Ĵ_s(ω_k)` for `k = 1…N`.
    values: Vec<Vec<Complex64>>,
}

impl ScoreDft {
    /// Series length `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_columns(&self) -> usize {
        self.values.len()
    }

    /// `N = ⌊n/2⌋`.
    pub fn max_index(&self) -> usize {
        self.n / 2
    }

    /// `Ĵ_s(ω_j)` for `j ∈ F_n`.
    pub fn value(&self, s: usize, j: i64) -> Complex64 {
        assert!(j != 0 && j.unsigned_abs() as usize <= self.max_index());
        let v = self.values[s][j.unsigned_abs() as usize - 1];
        if j > 0 {
            v
        } else {
            v.conj()
        }
    }

    /// Indices of `F_n`.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> {
        let n_max = self.max_index() as i64;
        (-n_max..=n_max).filter(|&j| j != 0)
    }
}

/// DFT of every column of a real `n × c` slice-of-columns accessor,
/// returning per-column values at `ω_k`, `k = 1…N`.
fn real_columns_dft(n: usize, columns: usize, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<Complex64>> {
    let big_n = n / 2;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let scale = 1.0 / (2.0 * PI * n as f64).sqrt();
    let mut out = Vec::with_capacity(columns);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..columns {
        for (t, slot) in buf.iter_mut().enumerate() {
            *slot = Complex64::new(get(t, c), 0.0);
        }
        fft.process(&mut buf);
        // time index starts at 1: Σ_{t=1}^n x_t e^{-iω_k t} = e^{-iω_k} · fft[k]
        let col: Vec<Complex64> = (1..=big_n)
            .map(|k| {
                let omega = 2.0 * PI * k as f64 / n as f64;
                Complex64::from_polar(1.0, -omega) * buf[k] * scale
            })
            .collect();
        out.push(col);
    }
    out
}

/// Finite Fourier transform of every score column.
pub fn score_fft(scores: &ScoreSeries) -> Result<ScoreDft> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let x = scores.matrix();
    Ok(ScoreDft {
        n,
        values: real_columns_dft(n, scores.dim(), |t, c| x[(t, c)]),
    })
}

/// Periodogram building blocks shared by GVR and DVR: per positive
/// frequency, the cumulative score powers and the squared functional DFT
/// norm.
struct PeriodogramParts {

    /// `score_power[k-1][l] = |Ĵ_{l+1}(ω_k)|²`
    score_power: Vec<Vec<f64>>,
    /// `‖J_{n,ω_k}‖²` in the quadrature norm
    func_norm2: Vec<f64>,
}

fn periodogram_parts(series: &FunctionalSeries, eig: &EigenSystem) -> Result<PeriodogramParts> {
    let n = series.len();
    let k_all = eig.len();
    let xi = scores(series, eig, k_all)?;
    let dft = score_fft(&xi)?;
    let big_n = dft.max_index();
    let mut score_power = Vec::with_capacity(big_n);
    for k in 1..=big_n {
        score_power.push(
            (0..k_all)
                .map(|l| dft.value(l, k as i64).norm_sqr())
                .collect(),
        );
    }

    let (centered, _) = center(series);
    let t_len = series.grid().len();
    let cm = centered.matrix();
    let func = real_columns_dft(n, t_len, |t, c| cm[(t, c)]);
    let weights = series.grid().weights();
    let func_norm2: Vec<f64> = (0..big_n)
        .map(|k| {
            (0..t_len)
                .map(|i| weights[i] * func[i][k].norm_sqr())
                .sum()
        })
        .collect();
    Ok(PeriodogramParts {
        score_power,
        func_norm2,
    })
}

impl PeriodogramParts {
    /// `Σ_{j ∈ F_n} ‖I_{n,ω_j}‖²_HS = Σ_{j ∈ F_n} ‖J_{n,ω_j}‖⁴`; both signs
    /// contribute equally for real data.
    fn periodogram_norm4_sum(&self) -> f64 {
        2.0 * self.func_norm2.iter().map(|v| v * v).sum::<f64>()
    }

    /// `Σ_{j ∈ F_n} (Σ_{l≤m} |Ĵ_l(ω_j)|²)²` for every `m = 0…K`, computed
    /// by cumulative sums.
    fn score_double_sums(&self, k_all: usize) -> Vec<f64> {
        let mut totals = vec![0.0; k_all + 1];
        let mut partial = vec![0.0; self.score_power.len()];
        for m in 1..=k_all {
            for (k, row) in self.score_power.iter().enumerate() {
                partial[k] += row[m - 1];
            }
            totals[m] = 2.0 * partial.iter().map(|s| s * s).sum::<f64>();
        }
        totals
    }
}

/// Smallest `m ≥ 0` with `GVR_n(m) ≥ Q`; `m = 0` is the white-noise
/// convention and is reached when the periodogram carries no more
/// structure than the eigenvalue tail.
pub fn gvr_select(series: &FunctionalSeries, eig: &EigenSystem, q: f64) -> Result<SelectionReport> {
    check_q(q)?;
    let n = series.len();
    if n < 4 {
        return Err(Error::TooFewObservations { needed: 4, got: n });
    }
    let parts = periodogram_parts(series, eig)?;
    let k_all = eig.len();
    let denominator = (2.0 * PI / n as f64) * parts.periodogram_norm4_sum();
    if denominator <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let score_sums = parts.score_double_sums(k_all);
    // λ̂ tail runs l = m+1 … min(n, K); eigenpairs beyond K are zero
    let lambda2: Vec<f64> = eig
        .eigenvalues()
        .iter()
        .take(n)
        .map(|l| l * l)
        .collect();
    let mut tail: Vec<f64> = vec![0.0; k_all + 1];
    for m in (0..k_all).rev() {
        tail[m] = tail[m + 1] + lambda2.get(m).copied().unwrap_or(0.0);
    }

    let mut candidates = Vec::with_capacity(k_all + 1);
    let mut chosen = None;
    for m in 0..=k_all {
        let numerator =
            (2.0 * PI / n as f64) * score_sums[m] + tail[m] / (2.0 * PI);
        let gvr = numerator / denominator;
        candidates.push((m, gvr));
        if chosen.is_none() && gvr >= q {
            chosen = Some(m);
        }
    }
    let mut warnings = Vec::new();
    let chosen = chosen.unwrap_or_else(|| {
        warnings.push(format!("no candidate reached Q = {q}; using all components"));
        k_all
    });
    Ok(SelectionReport {
        criterion: "gvr",
        chosen,
        candidates,
        threshold: Some(q),
        warnings,
    })
}

/// Dependent variance ratio at a given `m`: the GVR numerator without the
/// eigenvalue tail, over the same periodogram denominator.
pub fn dvr_ratio(series: &FunctionalSeries, eig: &EigenSystem, m: usize) -> Result<f64> {
    let n = series.len();
    if n < 4 {
        return Err(Error::TooFewObservations { needed: 4, got: n });
    }
    if m > eig.len() {
        return Err(Error::TooManyComponents {
            requested: m,
            available: eig.len(),
        });
    }
    let parts = periodogram_parts(series, eig)?;
    let denominator = parts.periodogram_norm4_sum();
    if denominator <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(parts.score_double_sums(eig.len())[m] / denominator)
}

/// Largest `j ≥ 1` with `λ̂_1/λ̂_j ≤ √n / log n`.
pub fn m_n_e(eigenvalues: &[f64], n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let lambda1 = *eigenvalues.first().unwrap_or(&0.0);
    if lambda1 <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let threshold = (n as f64).sqrt() / (n as f64).ln();
    let mut m = 1;
    for (idx, &l) in eigenvalues.iter().enumerate().skip(1) {
        if l > 0.0 && lambda1 / l <= threshold {
            m = idx + 1;
        }
    }
    Ok(m)
}

/// Combined dimension rule `m̂ = max{m_{n,Q}, m_{n,E}}`.
#[derive(Debug, Clone)]
pub struct CombinedSelection {
    pub chosen: usize,
    pub m_q: usize,
    pub m_e: usize,
    pub ratio_report: SelectionReport,
}

pub fn m_hat(
    series: &FunctionalSeries,
    eig: &EigenSystem,
    q: f64,
    criterion: RatioCriterion,
) -> Result<CombinedSelection> {
    let ratio_report = match criterion {
        RatioCriterion::Vr => vr_select(eig.eigenvalues(), q)?,
        RatioCriterion::Gvr => gvr_select(series, eig, q)?,
    };
    let m_e = m_n_e(eig.eigenvalues(), series.len())?;
    Ok(CombinedSelection {
        chosen: ratio_report.chosen.max(m_e),
        m_q: ratio_report.chosen,
        m_e,
        ratio_report,
    })
}

/// Default AICC search cap: `min(10, ⌊(n/m − 1)/2⌋ − 1)`, at least 1. Keeps
/// the correction denominator `n − m(p+1) − 1` comfortably positive.
pub fn default_p_max(n: usize, m: usize) -> usize {
    let m = m.max(1);
    let cap = ((n as f64 / m as f64 - 1.0) / 2.0).floor() as i64 - 1;
    cap.clamp(1, 10) as usize
}

/// Selects the VAR order by minimizing
/// `AICC(p) = n log|Σ̂_{e,p}| + n(nm + pm²)/(n − m(p+1) − 1)` over
/// `p = 1…p_max`, ties resolved toward the smaller order. `Σ̂_{e,p}` is the
/// uncentered second-moment matrix of the `n − p` prediction residuals
/// with divisor `n − p`; dividing by `n` instead would shrink the
/// log-determinant by roughly `m` per extra lag and cancel the penalty.
pub fn aicc_select(scores: &ScoreSeries, p_max: usize) -> Result<SelectionReport> {
    let n = scores.len();
    let m = scores.dim();
    if m == 0 {
        return Err(Error::InvalidArgument(
            "AICC needs at least one score column".into(),
        ));
    }
    if p_max == 0 {
        return Err(Error::InfeasibleOrder("p_max must be at least 1".into()));
    }
    let worst_denom = n as i64 - (m * (p_max + 1)) as i64 - 1;
    if worst_denom <= 0 {
        return Err(Error::InfeasibleOrder(format!(
            "n − m(p_max+1) − 1 = {worst_denom} must be positive (n = {n}, m = {m}, p_max = {p_max})"
        )));
    }

    let mut candidates = Vec::with_capacity(p_max);
    let mut warnings = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for p in 1..=p_max {
        let value = match aicc_value(scores, p) {
            Ok(v) => v,
            Err(e) => {
                warnings.push(format!("order {p} skipped: {e}"));
                candidates.push((p, f64::NAN));
                continue;
            }
        };
        candidates.push((p, value));
        if best.map_or(true, |(_, b)| value < b) {
            best = Some((p, value));
        }
    }
    let (chosen, _) = best.ok_or_else(|| {
        Error::InfeasibleOrder("every candidate order was skipped".into())
    })?;
    Ok(SelectionReport {
        criterion: "aicc",
        chosen,
        candidates,
        threshold: None,
        warnings,
    })
}

fn aicc_value(scores: &ScoreSeries, p: usize) -> Result<f64> {
    let n = scores.len();
    let m = scores.dim();
    let acov = autocovariances(scores, p)?;
    let a = yule_walker_matrices(&acov, p)?;
    let raw = raw_residuals(scores, &a)?;
    let sigma = (raw.transpose() * &raw) / (n - p) as f64;
    let det = sigma.determinant();
    if !(det > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "residual covariance is singular at order {p} (det {det:.3e})"
        )));
    }
    let denom = (n - m * (p + 1) - 1) as f64;
    Ok(n as f64 * det.ln() + n as f64 * (n * m + p * m * m) as f64 / denom)
}
