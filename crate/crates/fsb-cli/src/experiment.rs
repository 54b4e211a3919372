//! Monte Carlo experiment orchestration: replicate fan-out over a worker
//! pool with per-replicate RNG streams, metric aggregation, CSV
//! persistence, and a manifest that makes finished runs reproducible and
//! rerun-safe.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use fsb::blockboot::BlockBootstrap;
use fsb::curve::{FunctionalSeries, Grid};
use fsb::fpca::{covariance_operator, eigendecompose};
use fsb::metrics::{exact_sd_oracle, metrics, MetricSummary};
use fsb::select::{gvr_select, m_n_e, vr_select, RatioCriterion};
use fsb::sieve::{FitOptions, Selection, SieveModel};
use fsb::simgen::{Fma1FourierSpec, Fma1KernelSpec, SampleSide, SeriesGenerator};
use fsb::stats::{mean_sd_bootstrap, two_sample_test, BlockResampler, Resampler, TwoSampleOptions};
use fsb::streams::{stream_rng, StreamKey, STREAM_ALGORITHM};

use crate::config::{ExperimentConfig, ExperimentKind, ModelConfig, ModelName};
use crate::io::write_table;
use crate::{Error, Result};

/// Fraction of replicates that may fail before the experiment errors out.
const FAILURE_BUDGET: f64 = 0.01;

/// What `run_experiment` did.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// True when a complete run with the same hash was already present.
    pub skipped: bool,
    pub failures: usize,
    pub replicates: usize,
    pub hash: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    kind: String,
    hash: String,
    seed: u64,
    stream_algorithm: String,
    wall_clock_secs: f64,
    replicates: usize,
    failures: usize,
    status: String,
}

fn config_hash(config: &ExperimentConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical_toml().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

enum ModelGen {
    Fourier(Fma1FourierSpec),
    Kernel(Fma1KernelSpec),
}

impl ModelGen {
    fn build(model: &ModelConfig) -> Result<ModelGen> {
        let grid = Grid::uniform(model.grid_size);
        Ok(match model.name {
            ModelName::Fma1Fourier => ModelGen::Fourier(Fma1FourierSpec::new(
                grid,
                model.basis_size,
                model.theta,
            )?),
            ModelName::Fma1Kernel => ModelGen::Kernel(Fma1KernelSpec::new(grid)?),
        })
    }
}

impl SeriesGenerator for ModelGen {
    fn generate(&self, n: usize, rng: &mut dyn rand::RngCore) -> FunctionalSeries {
        match self {
            ModelGen::Fourier(spec) => spec.generate(n, rng),
            ModelGen::Kernel(spec) => spec.generate_sample(n, 0.0, SampleSide::First, rng),
        }
    }
}

/// Runs the configured experiment into `out_dir`, creating it if needed.
/// A finished run with the same configuration hash is a no-op; a manifest
/// from a different configuration is an error.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunOutcome> {
    let hash = config_hash(config);
    std::fs::create_dir_all(out_dir)?;
    let manifest_path = out_dir.join("manifest.toml");
    if manifest_path.exists() {
        let text = std::fs::read_to_string(&manifest_path)?;
        let manifest: Manifest =
            toml::from_str(&text).map_err(|e| Error::Experiment(format!("bad manifest: {e}")))?;
        if manifest.hash == hash && manifest.status == "complete" {
            return Ok(RunOutcome {
                skipped: true,
                failures: manifest.failures,
                replicates: manifest.replicates,
                hash,
                files: Vec::new(),
            });
        }
        if manifest.hash != hash {
            return Err(Error::Experiment(format!(
                "output directory {} holds a manifest for a different configuration",
                out_dir.display()
            )));
        }
    }

    let start = Instant::now();
    let run = || -> Result<(Vec<PathBuf>, usize, usize)> {
        match config.kind {
            ExperimentKind::Selection => run_selection(config, out_dir, &hash),
            ExperimentKind::SdOfMean => run_sd_of_mean(config, out_dir, &hash),
            ExperimentKind::TwoSample => run_two_sample(config, out_dir, &hash),
        }
    };
    let (files, replicates, failures) = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Experiment(e.to_string()))?
            .install(run),
        None => run(),
    }?;

    let manifest = Manifest {
        kind: config.kind.name().to_string(),
        hash: hash.clone(),
        seed: config.seed,
        stream_algorithm: STREAM_ALGORITHM.to_string(),
        wall_clock_secs: start.elapsed().as_secs_f64(),
        replicates,
        failures,
        status: "complete".to_string(),
    };
    std::fs::write(
        &manifest_path,
        toml::to_string(&manifest).expect("manifest serializes"),
    )?;
    std::fs::write(out_dir.join("config.echo.toml"), config.canonical_toml())?;
    Ok(RunOutcome {
        skipped: false,
        failures,
        replicates,
        hash,
        files,
    })
}

fn check_failures(failures: &[String], total: usize) -> Result<usize> {
    for f in failures {
        eprintln!("replicate failed: {f}");
    }
    if failures.len() as f64 > FAILURE_BUDGET * total as f64 {
        return Err(Error::Experiment(format!(
            "{} of {} replicates failed, over the {}% budget",
            failures.len(),
            total,
            FAILURE_BUDGET * 100.0
        )));
    }
    Ok(failures.len())
}

/// Splits replicate results into successes and failure descriptions.
fn partition<T: Send>(results: Vec<(usize, fsb::Result<T>)>) -> (Vec<T>, Vec<String>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (idx, r) in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failed.push(format!("replicate {idx}: {e}")),
        }
    }
    (ok, failed)
}

struct SelectionRow {
    m_q: Vec<(String, usize)>,
    m_e: usize,
    m_hat: usize,
}

fn run_selection(
    config: &ExperimentConfig,
    out_dir: &Path,
    hash: &str,
) -> Result<(Vec<PathBuf>, usize, usize)> {
    let plan = config.selection.as_ref().expect("validated");
    let model = ModelGen::build(&config.model)?;
    let seed = config.seed;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut total = 0;
    let mut all_failures = Vec::new();

    for (n_idx, &n) in plan.sample_sizes.iter().enumerate() {
        let results: Vec<(usize, fsb::Result<SelectionRow>)> = (0..plan.replications)
            .into_par_iter()
            .map(|r| {
                let out = (|| {
                    let mut rng = stream_rng(seed, StreamKey::new(n_idx as u16, 0, r as u32));
                    let series = model.generate(n, &mut rng);
                    let kernel = covariance_operator(&series)?;
                    let eig = eigendecompose(&kernel, series.grid(), series.grid().len())?;
                    let mut m_q = Vec::new();
                    for criterion in &plan.criteria {
                        let chosen = match criterion.as_str() {
                            "vr" => vr_select(eig.eigenvalues(), plan.q)?.chosen,
                            _ => gvr_select(&series, &eig, plan.q)?.chosen,
                        };
                        m_q.push((criterion.clone(), chosen));
                    }
                    let m_e = m_n_e(eig.eigenvalues(), n)?;
                    // combined rule with the recommended default criterion
                    let default = if n <= 100 {
                        RatioCriterion::Vr
                    } else {
                        RatioCriterion::Gvr
                    };
                    let m_default = match default {
                        RatioCriterion::Vr => vr_select(eig.eigenvalues(), plan.q)?.chosen,
                        RatioCriterion::Gvr => gvr_select(&series, &eig, plan.q)?.chosen,
                    };
                    Ok(SelectionRow {
                        m_q,
                        m_e,
                        m_hat: m_default.max(m_e),
                    })
                })();
                (r, out)
            })
            .collect();
        total += plan.replications;
        let (ok, failed) = partition(results);
        all_failures.extend(failed);

        let tally = |values: Vec<usize>, rule: &str, rows: &mut Vec<Vec<String>>| {
            let max_m = values.iter().copied().max().unwrap_or(0);
            for m in 0..=max_m {
                let count = values.iter().filter(|&&v| v == m).count();
                if count > 0 {
                    rows.push(vec![
                        n.to_string(),
                        rule.to_string(),
                        m.to_string(),
                        count.to_string(),
                        (count as f64 / values.len() as f64).to_string(),
                    ]);
                }
            }
        };
        for criterion in &plan.criteria {
            let values: Vec<usize> = ok
                .iter()
                .map(|row| {
                    row.m_q
                        .iter()
                        .find(|(c, _)| c == criterion)
                        .map(|&(_, m)| m)
                        .unwrap_or(0)
                })
                .collect();
            tally(values, criterion, &mut rows);
        }
        tally(ok.iter().map(|r| r.m_e).collect(), "m_e", &mut rows);
        tally(ok.iter().map(|r| r.m_hat).collect(), "m_hat", &mut rows);
    }

    let failures = check_failures(&all_failures, total)?;
    let path = out_dir.join("selection_frequencies.csv");
    write_table(
        &path,
        Some(&format!("manifest {hash}")),
        &["n", "rule", "m", "count", "frequency"],
        &rows,
    )?;
    Ok((vec![path], total, failures))
}

/// One method column of the sd-of-mean experiment.
#[derive(Clone)]
enum SdMethod {
    SieveFixed { m: usize, p: usize },
    SieveAuto,
    Block(BlockBootstrap, usize),
}

impl SdMethod {
    fn id(&self) -> (String, String) {
        match self {
            SdMethod::SieveFixed { m, p } => ("fsb".into(), format!("m={m} p={p}")),
            SdMethod::SieveAuto => ("fsb".into(), "auto".into()),
            SdMethod::Block(method, b) => (method.name().into(), format!("b={b}")),
        }
    }
}

struct SdReplicate {
    curves: Vec<Vec<f64>>,
    auto_params: Option<(usize, usize)>,
}

fn run_sd_of_mean(
    config: &ExperimentConfig,
    out_dir: &Path,
    hash: &str,
) -> Result<(Vec<PathBuf>, usize, usize)> {
    let plan = config.sd_of_mean.as_ref().expect("validated");
    let model = ModelGen::build(&config.model)?;
    let seed = config.seed;
    let n = plan.n;
    let q = plan.q;

    let mut methods: Vec<SdMethod> = plan
        .sieve_params
        .iter()
        .map(|&(m, p)| SdMethod::SieveFixed { m, p })
        .collect();
    if plan.sieve_auto {
        methods.push(SdMethod::SieveAuto);
    }
    for &b in &plan.block_sizes {
        methods.push(SdMethod::Block(BlockBootstrap::Moving { block_len: b }, b));
        methods.push(SdMethod::Block(
            BlockBootstrap::Tapered {
                block_len: b,
                ramp: plan.taper_ramp,
            },
            b,
        ));
        methods.push(SdMethod::Block(
            BlockBootstrap::Stationary {
                mean_block_len: b as f64,
            },
            b,
        ));
    }

    // exact oracle on its own stream
    let mut oracle_rng = stream_rng(seed, StreamKey::new(0, 0, 0));
    let exact = exact_sd_oracle(&model, n, plan.exact_replications, &mut oracle_rng)?;

    let methods_ref = &methods;
    let model_ref = &model;
    let results: Vec<(usize, fsb::Result<SdReplicate>)> = (0..plan.replications)
        .into_par_iter()
        .map(|r| {
            let out = (|| {
                let mut data_rng = stream_rng(seed, StreamKey::new(0, 1, r as u32));
                let series = model_ref.generate(n, &mut data_rng);
                let mut curves = Vec::with_capacity(methods_ref.len());
                let mut auto_params = None;
                for (idx, method) in methods_ref.iter().enumerate() {
                    let mut boot_rng =
                        stream_rng(seed, StreamKey::new(0, 2 + idx as u16, r as u32));
                    let sd = match method {
                        SdMethod::SieveFixed { m, p } => {
                            let fitted = SieveModel::fit(
                                &series,
                                &FitOptions {
                                    m: Selection::Fixed(*m),
                                    p: Selection::Fixed(*p),
                                    q,
                                    ..FitOptions::default()
                                },
                            )?;
                            mean_sd_bootstrap(&fitted, plan.bootstrap, &mut boot_rng)?
                        }
                        SdMethod::SieveAuto => {
                            let fitted = SieveModel::fit(
                                &series,
                                &FitOptions {
                                    q,
                                    ..FitOptions::default()
                                },
                            )?;
                            auto_params = Some((fitted.m(), fitted.p()));
                            mean_sd_bootstrap(&fitted, plan.bootstrap, &mut boot_rng)?
                        }
                        SdMethod::Block(method, _) => {
                            let resampler = BlockResampler {
                                series: &series,
                                method: *method,
                            };
                            mean_sd_bootstrap(&resampler, plan.bootstrap, &mut boot_rng)?
                        }
                    };
                    curves.push(sd);
                }
                Ok(SdReplicate {
                    curves,
                    auto_params,
                })
            })();
            (r, out)
        })
        .collect();
    let (ok, failed) = partition(results);
    let failures = check_failures(&failed, plan.replications)?;

    // aggregate metrics per method
    let mut summaries: Vec<(String, String, MetricSummary)> = Vec::new();
    for (idx, method) in methods.iter().enumerate() {
        let estimates: Vec<Vec<f64>> = ok.iter().map(|r| r.curves[idx].clone()).collect();
        let summary = metrics(&estimates, &exact)?;
        let (name, params) = method.id();
        summaries.push((name, params, summary));
    }

    // flag the two lowest-ABias block sizes per block method
    let mut best_two: Vec<bool> = vec![false; summaries.len()];
    for block_name in ["mbb", "tbb", "sb"] {
        let mut indexed: Vec<(usize, f64)> = summaries
            .iter()
            .enumerate()
            .filter(|(_, (name, _, _))| name == block_name)
            .map(|(i, (_, _, s))| (i, s.abias))
            .collect();
        indexed.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite metrics"));
        for (i, _) in indexed.into_iter().take(2) {
            best_two[i] = true;
        }
    }

    let comment = format!("manifest {hash}");
    let mut files = Vec::new();

    let rows: Vec<Vec<String>> = summaries
        .iter()
        .zip(&best_two)
        .map(|((name, params, s), best)| {
            vec![
                name.clone(),
                params.clone(),
                s.abias.to_string(),
                s.rbias.to_string(),
                s.astd.to_string(),
                best.to_string(),
            ]
        })
        .collect();
    let metrics_path = out_dir.join("metrics.csv");
    write_table(
        &metrics_path,
        Some(&comment),
        &["method", "params", "abias", "rbias", "astd", "best_two"],
        &rows,
    )?;
    files.push(metrics_path);

    // per-τ profile: exact sd plus mean/sd of each sieve estimate
    let grid = Grid::uniform(config.model.grid_size);
    let mut profile_header: Vec<String> = vec!["tau".into(), "exact".into()];
    let mut profile_cols: Vec<Vec<f64>> = Vec::new();
    for (idx, method) in methods.iter().enumerate() {
        if matches!(method, SdMethod::Block(..)) {
            continue;
        }
        let (name, params) = method.id();
        let label = format!("{name}_{}", params.replace([' ', '='], "_"));
        let r = ok.len() as f64;
        let mut mean_col = vec![0.0; exact.len()];
        let mut sd_col = vec![0.0; exact.len()];
        for rep in &ok {
            for (j, &v) in rep.curves[idx].iter().enumerate() {
                mean_col[j] += v;
            }
        }
        mean_col.iter_mut().for_each(|v| *v /= r);
        if ok.len() > 1 {
            for rep in &ok {
                for (j, &v) in rep.curves[idx].iter().enumerate() {
                    sd_col[j] += (v - mean_col[j]) * (v - mean_col[j]);
                }
            }
            sd_col
                .iter_mut()
                .for_each(|v| *v = (*v / (r - 1.0)).sqrt());
        }
        profile_header.push(format!("{label}_mean"));
        profile_header.push(format!("{label}_sd"));
        profile_cols.push(mean_col);
        profile_cols.push(sd_col);
    }
    let profile_path = out_dir.join("sd_profile.csv");
    {
        let mut rows: Vec<Vec<String>> = Vec::new();
        for (i, p) in grid.points().iter().enumerate() {
            let mut row = vec![p.to_string(), exact[i].to_string()];
            for col in &profile_cols {
                row.push(col[i].to_string());
            }
            rows.push(row);
        }
        let header: Vec<&str> = profile_header.iter().map(|s| s.as_str()).collect();
        write_table(&profile_path, Some(&comment), &header, &rows)?;
    }
    files.push(profile_path);

    if plan.sieve_auto {
        let mut counts = std::collections::BTreeMap::<(usize, usize), usize>::new();
        for rep in &ok {
            if let Some(mp) = rep.auto_params {
                *counts.entry(mp).or_insert(0) += 1;
            }
        }
        let rows: Vec<Vec<String>> = counts
            .iter()
            .map(|(&(m, p), &c)| {
                vec![
                    m.to_string(),
                    p.to_string(),
                    c.to_string(),
                    (c as f64 / ok.len() as f64).to_string(),
                ]
            })
            .collect();
        let auto_path = out_dir.join("auto_params.csv");
        write_table(
            &auto_path,
            Some(&comment),
            &["m", "p", "count", "frequency"],
            &rows,
        )?;
        files.push(auto_path);
    }

    Ok((files, plan.replications, failures))
}

fn run_two_sample(
    config: &ExperimentConfig,
    out_dir: &Path,
    hash: &str,
) -> Result<(Vec<PathBuf>, usize, usize)> {
    let plan = config.two_sample.as_ref().expect("validated");
    let spec = match ModelGen::build(&config.model)? {
        ModelGen::Kernel(spec) => spec,
        ModelGen::Fourier(_) => {
            return Err(Error::Experiment(
                "the two-sample experiment needs model name = \"fma1-kernel\"".into(),
            ))
        }
    };
    let seed = config.seed;
    let (m_sel, p_sel) = match (plan.m, plan.p) {
        (Some(m), Some(p)) => (Selection::Fixed(m), Selection::Fixed(p)),
        _ => (Selection::Auto, Selection::Auto),
    };
    let options = TwoSampleOptions {
        m_x: m_sel,
        p_x: p_sel,
        m_y: m_sel,
        p_y: p_sel,
        q: plan.q,
        replicates: plan.bootstrap,
    };

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut total = 0;
    let mut all_failures = Vec::new();
    for (g_idx, &gamma) in plan.gammas.iter().enumerate() {
        let spec_ref = &spec;
        let options_ref = &options;
        let results: Vec<(usize, fsb::Result<f64>)> = (0..plan.replications)
            .into_par_iter()
            .map(|r| {
                let out = (|| {
                    let mut x_rng = stream_rng(seed, StreamKey::new(g_idx as u16, 0, r as u32));
                    let mut y_rng = stream_rng(seed, StreamKey::new(g_idx as u16, 1, r as u32));
                    let mut boot_rng =
                        stream_rng(seed, StreamKey::new(g_idx as u16, 2, r as u32));
                    let x = spec_ref.generate_sample(plan.n1, 0.0, SampleSide::First, &mut x_rng);
                    let y =
                        spec_ref.generate_sample(plan.n2, gamma, SampleSide::Second, &mut y_rng);
                    let result = two_sample_test(&x, &y, options_ref, &mut boot_rng)?;
                    Ok(result.p_value)
                })();
                (r, out)
            })
            .collect();
        total += plan.replications;
        let (p_values, failed) = partition(results);
        all_failures.extend(failed);

        for &alpha in &plan.alphas {
            let rejections = p_values.iter().filter(|&&p| p <= alpha).count();
            rows.push(vec![
                gamma.to_string(),
                plan.m.map_or("auto".into(), |m| m.to_string()),
                plan.p.map_or("auto".into(), |p| p.to_string()),
                alpha.to_string(),
                rejections.to_string(),
                (rejections as f64 / p_values.len() as f64).to_string(),
            ]);
        }
    }
    let failures = check_failures(&all_failures, total)?;
    let path = out_dir.join("rejection_rates.csv");
    write_table(
        &path,
        Some(&format!("manifest {hash}")),
        &["gamma", "m", "p", "alpha", "rejections", "rate"],
        &rows,
    )?;
    Ok((vec![path], total, failures))
}

/// Owning resampler used by the CLI `bootstrap` subcommand.
pub enum AnyResampler {
    Sieve(SieveModel),
    SieveNull(SieveModel),
    Block {
        series: FunctionalSeries,
        method: BlockBootstrap,
    },
}

impl Resampler for AnyResampler {
    fn replicate(&self, rng: &mut dyn rand::RngCore) -> fsb::Result<FunctionalSeries> {
        match self {
            AnyResampler::Sieve(model) => model.replicate(rng),
            AnyResampler::SieveNull(model) => model.replicate_null(rng),
            AnyResampler::Block { series, method } => method.replicate(series, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use tempfile::tempdir;

    fn tiny_sd_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
kind = "sd-of-mean"
seed = 7

[model]
name = "fma1-fourier"
grid_size = 11
basis_size = 11

[sd_of_mean]
n = 40
replications = 4
bootstrap = 12
exact_replications = 150
sieve_params = [[2, 1]]
block_sizes = [4]
"#,
        )
        .unwrap()
    }

    #[test]
    fn identical_config_and_seed_give_byte_identical_outputs() {
        let config = tiny_sd_config();
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        run_experiment(&config, dir_a.path(), Some(2)).unwrap();
        run_experiment(&config, dir_b.path(), Some(1)).unwrap();
        for file in ["metrics.csv", "sd_profile.csv"] {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between runs");
        }
    }

    #[test]
    fn finished_runs_are_not_repeated() {
        let config = tiny_sd_config();
        let dir = tempdir().unwrap();
        let first = run_experiment(&config, dir.path(), Some(1)).unwrap();
        assert!(!first.skipped);
        let metrics_path = dir.path().join("metrics.csv");
        let mtime = std::fs::metadata(&metrics_path).unwrap().modified().unwrap();
        let second = run_experiment(&config, dir.path(), Some(1)).unwrap();
        assert!(second.skipped);
        assert_eq!(
            std::fs::metadata(&metrics_path).unwrap().modified().unwrap(),
            mtime,
            "no-op rerun must not rewrite outputs"
        );
    }

    #[test]
    fn conflicting_manifest_is_an_error() {
        let config = tiny_sd_config();
        let dir = tempdir().unwrap();
        run_experiment(&config, dir.path(), Some(1)).unwrap();
        let mut other = config.clone();
        other.seed = 8;
        assert!(run_experiment(&other, dir.path(), Some(1)).is_err());
    }

    #[test]
    fn selection_experiment_writes_frequencies() {
        let config = ExperimentConfig::from_toml(
            r#"
kind = "selection"
seed = 3

[model]
name = "fma1-fourier"
grid_size = 11
basis_size = 11

[selection]
sample_sizes = [30]
criteria = ["vr", "gvr"]
replications = 5
"#,
        )
        .unwrap();
        let dir = tempdir().unwrap();
        let outcome = run_experiment(&config, dir.path(), Some(1)).unwrap();
        assert_eq!(outcome.failures, 0);
        let text =
            std::fs::read_to_string(dir.path().join("selection_frequencies.csv")).unwrap();
        assert!(text.starts_with(&format!("# manifest {}", outcome.hash)));
        assert!(text.lines().any(|l| l.starts_with("30,vr,")));
        assert!(text.lines().any(|l| l.starts_with("30,m_hat,")));
    }

    #[test]
    fn two_sample_experiment_writes_rates() {
        let config = ExperimentConfig::from_toml(
            r#"
kind = "two-sample"
seed = 5

[model]
name = "fma1-kernel"
grid_size = 11

[two_sample]
n1 = 30
n2 = 30
gammas = [0.0, 2.0]
m = 2
p = 1
replications = 6
bootstrap = 19
alphas = [0.05]
"#,
        )
        .unwrap();
        let dir = tempdir().unwrap();
        run_experiment(&config, dir.path(), Some(2)).unwrap();
        let text = std::fs::read_to_string(dir.path().join("rejection_rates.csv")).unwrap();
        let rates: Vec<f64> = text
            .lines()
            .skip(2)
            .map(|l| l.split(',').next_back().unwrap().parse().unwrap())
            .collect();
        assert_eq!(rates.len(), 2);
        // a huge shift must reject more often than the null
        assert!(rates[1] >= rates[0]);
    }
}
