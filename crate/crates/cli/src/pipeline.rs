//! Shared wiring between subcommands: model construction, dataset
//! loading/generation and option translation.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sensid::calib::{McmcConfig, PriorSpec};
use sensid::design::latin_hypercube;
use sensid::ident::StudyOptions;
use sensid::model::benchmark::nominal_design;
use sensid::model::{
    builtin_model, generate_dataset, make_benchmark, BenchmarkConfig, BenchmarkTruth, DesignPoint,
    ExperimentRecord, ResponseVector, SimulatorSpec,
};
use sensid::rng::rng_from;
use sensid::sa::InputDistribution;

use crate::config::{McmcSection, RunConfig};

pub struct ModelBundle {
    pub sim: SimulatorSpec,
    pub truth: Option<BenchmarkTruth>,
}

pub fn build_model(config: &RunConfig) -> Result<ModelBundle> {
    match config.model.kind.as_str() {
        "benchmark" => {
            let truth = make_benchmark(&BenchmarkConfig {
                seed: config.model.seed,
                discrepancy_amplitude: config.model.discrepancy_amplitude,
                noise_std: config.model.noise_std,
            })?;
            Ok(ModelBundle {
                sim: truth.simulator.clone(),
                truth: Some(truth),
            })
        }
        name => {
            let params = serde_json::json!({
                "coefficients": config.model.coefficients,
                "a": config.model.a,
                "b": config.model.b,
            });
            Ok(ModelBundle {
                sim: builtin_model(name, &params)?,
                truth: None,
            })
        }
    }
}

/// Serialized dataset format (JSON keeps floats bit-exact).
#[derive(Serialize, Deserialize)]
pub struct DatasetFile {
    pub model: String,
    pub records: Vec<ExperimentRecord>,
}

pub fn write_dataset(path: &Path, model: &str, records: &[ExperimentRecord]) -> Result<()> {
    let file = DatasetFile {
        model: model.into(),
        records: records.to_vec(),
    };
    let json = serde_json::to_string_pretty(&file).context("serializing dataset")?;
    std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: DatasetFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing dataset {}", path.display()))?;
    Ok(file.records)
}

/// Produce the experiment records for the configured model: load from disk
/// when a path is given, generate from the benchmark truth, or synthesize
/// the canonical conjugate-test observation.
pub fn load_or_generate_dataset(
    config: &RunConfig,
    bundle: &ModelBundle,
) -> Result<Vec<ExperimentRecord>> {
    if let Some(path) = &config.data.path {
        let records = read_dataset(path)?;
        if records.is_empty() {
            bail!("dataset {} contains no records", path.display());
        }
        if records[0].observed.values.len() != bundle.sim.response_dim {
            bail!(
                "dataset has {} responses but the model declares {}",
                records[0].observed.values.len(),
                bundle.sim.response_dim
            );
        }
        return Ok(records);
    }
    match &bundle.truth {
        Some(truth) => {
            let design: Vec<DesignPoint> = latin_hypercube(
                &truth.simulator.design_bounds,
                config.data.n_points,
                &mut rng_from(config.data.design_seed),
            )?
            .into_iter()
            .map(DesignPoint::new)
            .collect();
            Ok(generate_dataset(truth, &design, config.data.noise_seed)?)
        }
        None if bundle.sim.name == "conjugate_gaussian" => {
            Ok(vec![ExperimentRecord::new(
                DesignPoint::new(vec![]),
                ResponseVector {
                    values: vec![config.data.conjugate_observation],
                    labels: bundle.sim.response_labels.clone(),
                },
                vec![config.data.conjugate_noise_std],
            )?])
        }
        None => bail!(
            "model '{}' has no data generator; provide data.path",
            bundle.sim.name
        ),
    }
}

pub fn study_options(config: &RunConfig, sim: &SimulatorSpec) -> StudyOptions {
    // Models without design variables cannot carry a discrepancy GP.
    let discrepancy_possible = sim.design_dim > 0;
    StudyOptions {
        use_emulator: config.pipeline.use_emulator,
        emulator_training_points: config.pipeline.emulator_training_points,
        use_discrepancy: config.pipeline.use_discrepancy && discrepancy_possible,
        validation_fraction: config.pipeline.validation_fraction,
        ..Default::default()
    }
}

pub fn mcmc_config(section: &McmcSection, steps: usize) -> McmcConfig {
    McmcConfig {
        n_steps: steps,
        n_burn: (steps as f64 * section.burn_fraction) as usize,
        seed: section.seed,
        ..Default::default()
    }
}

/// Sensitivity-analysis input distributions derived from the prior.
pub fn sa_dists(prior: &PriorSpec) -> Vec<InputDistribution> {
    use sensid::calib::Marginal;
    match prior {
        PriorSpec::Independent { marginals } => marginals
            .iter()
            .map(|m| match m {
                Marginal::Uniform { lo, hi } => InputDistribution::Uniform { lo: *lo, hi: *hi },
                Marginal::Gaussian { mean, std } => InputDistribution::Gaussian {
                    mean: *mean,
                    std: *std,
                },
            })
            .collect(),
        PriorSpec::MultivariateGaussian { mean, cov, .. } => mean
            .iter()
            .enumerate()
            .map(|(k, &m)| InputDistribution::Gaussian {
                mean: m,
                std: cov[k][k].sqrt(),
            })
            .collect(),
    }
}

/// Nominal design point for θ-only sensitivity analysis.
pub fn sa_nominal_x(sim: &SimulatorSpec) -> Vec<f64> {
    if sim.name == "benchmark" {
        nominal_design()
    } else {
        sim.design_bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}
