//! `fsb`: simulate functional time series, tune and run the functional
//! sieve bootstrap, compare against block-bootstrap baselines, test
//! two-sample mean hypotheses, and drive Monte Carlo experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fsb::blockboot::{BlockBootstrap, DEFAULT_TAPER_RAMP};
use fsb::curve::Grid;
use fsb::fpca::{covariance_operator, eigendecompose, scores};
use fsb::select::{aicc_select, default_p_max, gvr_select, m_n_e, vr_select, RatioCriterion};
use fsb::sieve::{FitOptions, Selection, SieveModel};
use fsb::simgen::{Fma1FourierSpec, Fma1KernelSpec, SampleSide, SeriesGenerator};
use fsb::stats::{mean_sd_bootstrap, two_sample_test, Resampler, TwoSampleOptions};
use fsb::streams::{stream_rng, StreamKey};

use fsb_cli::config::ExperimentConfig;
use fsb_cli::experiment::{run_experiment, AnyResampler};
use fsb_cli::io;

#[derive(Parser)]
#[command(name = "fsb", version, about = "Sieve bootstrap for functional time series")]
struct Cli {
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic functional time series and write it as CSV.
    Simulate(SimulateArgs),
    /// Tune the number of principal components and the VAR order on a series.
    Select(SelectArgs),
    /// Draw bootstrap replicates of a series.
    Bootstrap(BootstrapArgs),
    /// Hypothesis tests with bootstrap critical values.
    #[command(subcommand)]
    Test(TestCommand),
    /// Run a configured Monte Carlo experiment.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Fma1Fourier,
    Fma1Kernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichSample {
    First,
    Second,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 21)]
    grid_size: usize,
    #[arg(long)]
    seed: u64,
    /// Mean-shift magnitude of the second sample (kernel model).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Which sample of the two-sample design to draw (kernel model).
    #[arg(long, value_enum, default_value = "first")]
    which: WhichSample,
    /// Fourier basis size (coefficient-operator model).
    #[arg(long, default_value_t = 21)]
    basis_size: usize,
    /// Moving-average scale (coefficient-operator model).
    #[arg(long, default_value_t = 0.8)]
    theta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Vr,
    Gvr,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    /// Ratio criterion; default follows the sample size (VR for n ≤ 100).
    #[arg(long, value_enum)]
    criterion: Option<CriterionArg>,
    #[arg(long, default_value_t = 0.85)]
    q: f64,
    /// Also write the candidate table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sieve,
    Mbb,
    Tbb,
    Sb,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    /// One CSV per replicate.
    Series,
    /// Per-τ bootstrap sd of √n times the replicate mean.
    MeanSd,
}

fn parse_selection(value: &str) -> Result<Selection, String> {
    if value == "auto" {
        Ok(Selection::Auto)
    } else {
        value
            .parse::<usize>()
            .map(Selection::Fixed)
            .map_err(|e| format!("expected 'auto' or an integer: {e}"))
    }
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sieve")]
    method: MethodArg,
    /// Number of principal components: integer or 'auto'.
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    m: Selection,
    /// VAR order: integer or 'auto'.
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    p: Selection,
    #[arg(long, default_value_t = 0.85)]
    q: f64,
    /// Block length (block methods).
    #[arg(long)]
    b: Option<usize>,
    /// Taper ramp fraction (tapered blocks).
    #[arg(long, default_value_t = DEFAULT_TAPER_RAMP)]
    c: f64,
    #[arg(long)]
    replicates: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "series")]
    emit: EmitArg,
    /// Emit mean-zero replicates (sieve only).
    #[arg(long)]
    no_recentre: bool,
    /// Also dump the fitted score VAR model (sieve only).
    #[arg(long)]
    dump_model: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum TestCommand {
    /// Two-sample mean test with sieve-bootstrap critical values.
    TwoSample(TwoSampleArgs),
}

#[derive(Args)]
struct TwoSampleArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Bootstrap replicate pairs.
    #[arg(long = "B")]
    b: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    m_x: Selection,
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    p_x: Selection,
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    m_y: Selection,
    #[arg(long, value_parser = parse_selection, default_value = "auto")]
    p_y: Selection,
    #[arg(long, default_value_t = 0.85)]
    q: f64,
    /// Rejection levels, e.g. 0.01,0.05,0.10
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.10])]
    alpha: Vec<f64>,
    /// Write the bootstrap draws as CSV.
    #[arg(long)]
    dump_ustar: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> fsb_cli::Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Select(args) => select(args),
        Command::Bootstrap(args) => bootstrap(args),
        Command::Test(TestCommand::TwoSample(args)) => two_sample(args),
        Command::Experiment(args) => {
            let config = ExperimentConfig::load(&args.config)?;
            let outcome = run_experiment(&config, &args.out, cli.threads)?;
            if outcome.skipped {
                println!("experiment already complete (manifest {})", outcome.hash);
            } else {
                println!(
                    "experiment complete: {} replicates, {} failures, manifest {}",
                    outcome.replicates, outcome.failures, outcome.hash
                );
                for f in outcome.files {
                    println!("wrote {}", f.display());
                }
            }
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> fsb_cli::Result<()> {
    let grid = Grid::uniform(args.grid_size);
    let mut rng = stream_rng(args.seed, StreamKey::new(0, 0, 0));
    let series = match args.model {
        ModelArg::Fma1Fourier => {
            Fma1FourierSpec::new(grid, args.basis_size, args.theta)?.generate(args.n, &mut rng)
        }
        ModelArg::Fma1Kernel => {
            let side = match args.which {
                WhichSample::First => SampleSide::First,
                WhichSample::Second => SampleSide::Second,
            };
            Fma1KernelSpec::new(grid)?.generate_sample(args.n, args.gamma, side, &mut rng)
        }
    };
    io::write_series(&args.out, &series)?;
    println!("wrote {} curves to {}", series.len(), args.out.display());
    Ok(())
}

fn select(args: SelectArgs) -> fsb_cli::Result<()> {
    let series = io::read_series(&args.input)?;
    let n = series.len();
    let kernel = covariance_operator(&series)?;
    let eig = eigendecompose(&kernel, series.grid(), series.grid().len())?;
    let criterion = match args.criterion {
        Some(CriterionArg::Vr) => RatioCriterion::Vr,
        Some(CriterionArg::Gvr) => RatioCriterion::Gvr,
        None => {
            if n <= 100 {
                RatioCriterion::Vr
            } else {
                RatioCriterion::Gvr
            }
        }
    };
    let report = match criterion {
        RatioCriterion::Vr => vr_select(eig.eigenvalues(), args.q)?,
        RatioCriterion::Gvr => gvr_select(&series, &eig, args.q)?,
    };

    println!("criterion {} (Q = {})", report.criterion, args.q);
    println!("{:>9} {:>14} chosen", "candidate", "value");
    for &(cand, value) in &report.candidates {
        let marker = if cand == report.chosen { "  <-" } else { "" };
        println!("{cand:>9} {value:>14.6}{marker}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let m_e = m_n_e(eig.eigenvalues(), n)?;
    let m_hat = report.chosen.max(m_e);
    println!("m_Q = {}, m_E = {m_e}, combined m = {m_hat}", report.chosen);

    if m_hat > 0 {
        let xi = scores(&series, &eig, m_hat)?;
        let aicc = aicc_select(&xi, default_p_max(n, m_hat))?;
        println!("AICC order p = {} over 1..={}", aicc.chosen, default_p_max(n, m_hat));
        for w in &aicc.warnings {
            eprintln!("warning: {w}");
        }
    }

    if let Some(out) = args.out {
        io::write_selection_report(&out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn bootstrap(args: BootstrapArgs) -> fsb_cli::Result<()> {
    let series = io::read_series(&args.input)?;
    std::fs::create_dir_all(&args.out)?;

    let resampler = match args.method {
        MethodArg::Sieve => {
            let model = SieveModel::fit(
                &series,
                &FitOptions {
                    m: args.m,
                    p: args.p,
                    q: args.q,
                    ..FitOptions::default()
                },
            )?;
            println!(
                "fitted sieve model: m = {}, p = {}, burn-in = {}, stability margin {:.4}",
                model.m(),
                model.p(),
                model.burn_in(),
                model.report().stability_margin
            );
            if let Some(path) = &args.dump_model {
                match model.var_model() {
                    Some(var) => {
                        io::write_var_model(path, var)?;
                        println!("wrote {}", path.display());
                    }
                    None => eprintln!("warning: degenerate model has no VAR to dump"),
                }
            }
            if args.no_recentre {
                AnyResampler::SieveNull(model)
            } else {
                AnyResampler::Sieve(model)
            }
        }
        method => {
            let b = args.b.ok_or_else(|| {
                fsb_cli::Error::Config("block methods need --b <block length>".into())
            })?;
            let block = match method {
                MethodArg::Mbb => BlockBootstrap::Moving { block_len: b },
                MethodArg::Tbb => BlockBootstrap::Tapered {
                    block_len: b,
                    ramp: args.c,
                },
                MethodArg::Sb => BlockBootstrap::Stationary {
                    mean_block_len: b as f64,
                },
                MethodArg::Sieve => unreachable!(),
            };
            AnyResampler::Block {
                series: series.clone(),
                method: block,
            }
        }
    };

    match args.emit {
        EmitArg::Series => {
            for rep in 0..args.replicates {
                let mut rng = stream_rng(args.seed, StreamKey::new(0, 0, rep as u32));
                let replicate = resampler.replicate(&mut rng)?;
                let path = args.out.join(format!("replicate_{:04}.csv", rep + 1));
                io::write_series(&path, &replicate)?;
            }
            println!("wrote {} replicates to {}", args.replicates, args.out.display());
        }
        EmitArg::MeanSd => {
            let mut rng = stream_rng(args.seed, StreamKey::new(0, 0, 0));
            let sd = mean_sd_bootstrap(&resampler, args.replicates, &mut rng)?;
            let path = args.out.join("mean_sd.csv");
            io::write_tau_columns(&path, None, series.grid(), &[("sd", &sd)])?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn two_sample(args: TwoSampleArgs) -> fsb_cli::Result<()> {
    let x = io::read_series(&args.x)?;
    let y = io::read_series(&args.y)?;
    let mut rng = stream_rng(args.seed, StreamKey::new(0, 0, 0));
    let result = two_sample_test(
        &x,
        &y,
        &TwoSampleOptions {
            m_x: args.m_x,
            p_x: args.p_x,
            m_y: args.m_y,
            p_y: args.p_y,
            q: args.q,
            replicates: args.b,
        },
        &mut rng,
    )?;
    println!(
        "U = {:.6}  (x: m = {}, p = {}; y: m = {}, p = {}; theta = {:.3})",
        result.statistic,
        result.x_params.0,
        result.x_params.1,
        result.y_params.0,
        result.y_params.1,
        x.len() as f64 / (x.len() + y.len()) as f64,
    );
    println!("p-value = {:.6}  (B = {})", result.p_value, args.b);
    for &alpha in &args.alpha {
        let reject = result.p_value <= alpha;
        println!("alpha = {alpha}: {}", if reject { "reject" } else { "keep" });
    }
    if let Some(path) = args.dump_ustar {
        let rows: Vec<Vec<String>> = result
            .draws
            .iter()
            .enumerate()
            .map(|(i, u)| vec![(i + 1).to_string(), u.to_string()])
            .collect();
        io::write_table(&path, None, &["b", "u_star"], &rows)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
