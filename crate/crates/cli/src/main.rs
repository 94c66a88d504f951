//! Command-line driver for sensitivity-guided Bayesian calibration studies.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 partial sweep failure under `--strict`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use sensid_cli::commands;
use sensid_cli::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "sensid",
    version,
    about = "Bayesian inverse UQ with GP emulation, Sobol' sensitivity analysis and response-subset identifiability studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML configuration file; omitted sections take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $SENSID_OUT_ROOT/out or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Model kind override: benchmark | linear_additive | ishigami |
    /// conjugate_gaussian.
    #[arg(long)]
    model: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Sobol' indices and interaction diagnostics.
    Sa {
        #[command(flatten)]
        common: CommonArgs,
        /// Pick-freeze base sample count (power of two).
        #[arg(long)]
        n: Option<usize>,
        /// Estimator seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also estimate closed second-order indices.
        #[arg(long)]
        second_order: bool,
    },
    /// Calibrate against all responses and write the posterior chain.
    Calibrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Dataset JSON produced by gen-data.
        #[arg(long)]
        data: Option<PathBuf>,
        /// MCMC steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Chain seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Calibrate every nonempty response subset and report identifiability.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Per-subset MCMC steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Base seed (subset i runs with base + i).
        #[arg(long)]
        seed: Option<u64>,
        /// Exit 4 when any subset fails instead of warning.
        #[arg(long)]
        strict: bool,
    },
    /// Repeat calibration, recycling each posterior as the next prior.
    Iterate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Number of calibration passes.
        #[arg(long)]
        n_iter: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a synthetic dataset from the benchmark truth.
    GenData {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of design points.
        #[arg(long)]
        n: Option<usize>,
        /// Noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-render charts from the CSV files of a previous run.
    Report {
        /// Directory holding the CSV outputs.
        #[arg(long)]
        dir: PathBuf,
    },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn config_failure(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn numerical_failure(error: anyhow::Error) -> Failure {
    Failure { code: 3, error }
}

fn init_workers(jobs: Option<usize>, config: &RunConfig) {
    let n = jobs.unwrap_or(config.output.jobs);
    if n > 0 {
        // Ignore the error if a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::load(common.config.as_deref()).map_err(config_failure)?;
    if let Some(kind) = &common.model {
        config.model.kind = kind.clone();
    }
    Ok(config)
}

fn finish(config: &RunConfig, common: &CommonArgs) -> Result<RunConfig, Failure> {
    config.validate().map_err(config_failure)?;
    if common.print_config {
        print!("{}", config.to_toml());
        return Err(Failure {
            code: 0,
            error: anyhow::anyhow!("printed config"),
        });
    }
    Ok(config.clone())
}

fn run() -> Result<(), Failure> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sa { common, n, seed, second_order } => {
            let mut config = load_config(&common)?;
            if let Some(n) = n {
                config.sa.n = n;
            }
            if let Some(seed) = seed {
                config.sa.seed = seed;
            }
            config.sa.second_order |= second_order;
            let config = finish(&config, &common)?;
            init_workers(common.jobs, &config);
            let out = config.resolve_out_dir(common.out.as_deref());
            commands::cmd_sa(&config, &out).map_err(numerical_failure)?;
            Ok(())
        }
        Command::Calibrate { common, data, steps, seed } => {
            let mut config = load_config(&common)?;
            if let Some(p) = data {
                config.data.path = Some(p);
            }
            if let Some(steps) = steps {
                config.mcmc.n_steps = steps;
            }
            if let Some(seed) = seed {
                config.mcmc.seed = seed;
            }
            let config = finish(&config, &common)?;
            init_workers(common.jobs, &config);
            let out = config.resolve_out_dir(common.out.as_deref());
            commands::cmd_calibrate(&config, &out).map_err(numerical_failure)?;
            Ok(())
        }
        Command::Sweep { common, data, steps, seed, strict } => {
            let mut config = load_config(&common)?;
            if let Some(p) = data {
                config.data.path = Some(p);
            }
            if let Some(steps) = steps {
                config.sweep.mcmc_steps = steps;
            }
            if let Some(seed) = seed {
                config.sweep.base_seed = seed;
            }
            let config = finish(&config, &common)?;
            init_workers(common.jobs, &config);
            let out = config.resolve_out_dir(common.out.as_deref());
            let outcome = commands::cmd_sweep(&config, &out).map_err(numerical_failure)?;
            if !outcome.partial_failures.is_empty() {
                eprintln!(
                    "warning: {} subset(s) failed: {}",
                    outcome.partial_failures.len(),
                    outcome.partial_failures.join(", ")
                );
                if strict {
                    return Err(Failure {
                        code: 4,
                        error: anyhow::anyhow!("sweep incomplete under --strict"),
                    });
                }
            }
            Ok(())
        }
        Command::Iterate { common, data, n_iter, steps, seed } => {
            let mut config = load_config(&common)?;
            if let Some(p) = data {
                config.data.path = Some(p);
            }
            if let Some(n) = n_iter {
                config.iterate.n_iter = n;
            }
            if let Some(steps) = steps {
                config.mcmc.n_steps = steps;
            }
            if let Some(seed) = seed {
                config.iterate.seed = seed;
            }
            let config = finish(&config, &common)?;
            init_workers(common.jobs, &config);
            let out = config.resolve_out_dir(common.out.as_deref());
            commands::cmd_iterate(&config, &out).map_err(numerical_failure)?;
            Ok(())
        }
        Command::GenData { common, n, seed } => {
            let mut config = load_config(&common)?;
            if let Some(n) = n {
                config.data.n_points = n;
            }
            if let Some(seed) = seed {
                config.data.noise_seed = seed;
            }
            let config = finish(&config, &common)?;
            let out = config.resolve_out_dir(common.out.as_deref());
            commands::cmd_gen_data(&config, &out).map_err(numerical_failure)?;
            Ok(())
        }
        Command::Report { dir } => {
            commands::cmd_report(&dir).map_err(config_failure)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if failure.code == 0 {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
