//! Experiment configuration: a TOML file with one section per concern.
//! Unknown keys are hard errors so that typos cannot silently change an
//! experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Top-level experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub kind: ExperimentKind,
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub selection: Option<SelectionConfig>,
    #[serde(default)]
    pub sd_of_mean: Option<SdOfMeanConfig>,
    #[serde(default)]
    pub two_sample: Option<TwoSampleConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Frequencies of the dimension selected by VR/GVR and the combined rule.
    Selection,
    /// Bootstrap estimates of the sd of the sample mean vs. the exact oracle.
    SdOfMean,
    /// Size and power of the two-sample mean test.
    TwoSample,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Selection => "selection",
            ExperimentKind::SdOfMean => "sd-of-mean",
            ExperimentKind::TwoSample => "two-sample",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: ModelName,
    /// Number of grid points `T`.
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    /// Fourier basis size of the coefficient-operator model.
    #[serde(default = "default_basis_size")]
    pub basis_size: usize,
    /// Moving-average scale of the coefficient-operator model.
    #[serde(default = "default_theta")]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Fma1Fourier,
    Fma1Kernel,
}

fn default_grid_size() -> usize {
    21
}
fn default_basis_size() -> usize {
    21
}
fn default_theta() -> f64 {
    0.8
}
fn default_q() -> f64 {
    0.85
}
fn default_taper_ramp() -> f64 {
    fsb::blockboot::DEFAULT_TAPER_RAMP
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    pub sample_sizes: Vec<usize>,
    /// Criteria to tabulate: "vr" and/or "gvr".
    pub criteria: Vec<String>,
    #[serde(default = "default_q")]
    pub q: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SdOfMeanConfig {
    pub n: usize,
    pub replications: usize,
    pub bootstrap: usize,
    pub exact_replications: usize,
    /// Fixed sieve parameter pairs `(m, p)`.
    #[serde(default)]
    pub sieve_params: Vec<(usize, usize)>,
    /// Also run the data-driven parameter rule.
    #[serde(default)]
    pub sieve_auto: bool,
    #[serde(default = "default_q")]
    pub q: f64,
    /// Block sizes swept for each block-bootstrap baseline; empty skips them.
    #[serde(default)]
    pub block_sizes: Vec<usize>,
    #[serde(default = "default_taper_ramp")]
    pub taper_ramp: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TwoSampleConfig {
    pub n1: usize,
    pub n2: usize,
    /// Mean-shift magnitudes; 0 is the null.
    pub gammas: Vec<f64>,
    /// Fixed `(m, p)` used for both samples; omit for the data-driven rule.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub p: Option<usize>,
    pub replications: usize,
    pub bootstrap: usize,
    pub alphas: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical serialized form; hashed into the manifest.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self) -> Result<()> {
        let section = |present: bool, name: &str, wanted: bool| -> Result<()> {
            if wanted && !present {
                Err(Error::Config(format!(
                    "kind = \"{}\" needs a [{name}] section",
                    self.kind.name()
                )))
            } else {
                Ok(())
            }
        };
        section(
            self.selection.is_some(),
            "selection",
            self.kind == ExperimentKind::Selection,
        )?;
        section(
            self.sd_of_mean.is_some(),
            "sd_of_mean",
            self.kind == ExperimentKind::SdOfMean,
        )?;
        section(
            self.two_sample.is_some(),
            "two_sample",
            self.kind == ExperimentKind::TwoSample,
        )?;

        if let Some(s) = &self.selection {
            if s.replications == 0 || s.sample_sizes.is_empty() || s.criteria.is_empty() {
                return Err(Error::Config("selection: empty replication plan".into()));
            }
            for c in &s.criteria {
                if c != "vr" && c != "gvr" {
                    return Err(Error::Config(format!("selection: unknown criterion {c:?}")));
                }
            }
        }
        if let Some(s) = &self.sd_of_mean {
            if s.replications == 0 || s.bootstrap == 0 {
                return Err(Error::Config("sd_of_mean: R and B must be positive".into()));
            }
            if s.sieve_params.is_empty() && !s.sieve_auto && s.block_sizes.is_empty() {
                return Err(Error::Config("sd_of_mean: no methods configured".into()));
            }
            for &b in &s.block_sizes {
                if b == 0 || b > s.n {
                    return Err(Error::Config(format!(
                        "sd_of_mean: block size {b} infeasible for n = {}",
                        s.n
                    )));
                }
            }
        }
        if let Some(s) = &self.two_sample {
            if s.replications == 0 || s.bootstrap == 0 || s.gammas.is_empty() || s.alphas.is_empty()
            {
                return Err(Error::Config("two_sample: empty replication plan".into()));
            }
            if s.m.is_some() != s.p.is_some() {
                return Err(Error::Config(
                    "two_sample: set both m and p, or neither".into(),
                ));
            }
        }
        Ok(())
    }
}
