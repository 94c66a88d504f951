//! Subset sweeps: one full calibration per response combination.
//!
//! Emulators and discrepancy GPs are fitted once per dataset and shared by
//! every subset; only the active-response masking changes between chains.
//! Subset calibrations are independent, so they run on the worker pool and
//! reduce in label order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calib::{
    build_discrepancy, log_posterior, run_mcmc, split_data, summarize_posterior, DataSplit,
    LikelihoodContext, McmcConfig, PriorSpec, ResponseModel,
};
use crate::design::latin_hypercube;
use crate::emulator::{fit_mle, Basis, MleOptions, TrainedGp};
use crate::error::{Error, Result};
use crate::model::{ExperimentRecord, SimulatorSpec};
use crate::rng::{derive_seed, rng_from};
use crate::sa::SobolTable;

use super::flags::{flag_fake_identifiability, FakeFlagThresholds, FlagReport};
use super::score::sensitivity_identifiability_score;
use super::subsets::ResponseSubset;

use nalgebra::{DMatrix, DVector};

/// How the shared model and discrepancy set are built before a sweep.
#[derive(Debug, Clone)]
pub struct StudyOptions {
    /// Replace the simulator by per-response GPs during MCMC (adds the
    /// code-uncertainty block to the likelihood).
    pub use_emulator: bool,
    /// Training budget for each emulator GP.
    pub emulator_training_points: usize,
    pub emulator_mle: MleOptions,
    /// Fit discrepancy GPs from validation residuals; without this the
    /// likelihood reduces to measurement noise only.
    pub use_discrepancy: bool,
    pub discrepancy_mle: MleOptions,
    pub validation_fraction: f64,
    /// Reference θ for discrepancy residuals; prior mean when absent.
    pub theta_ref: Option<Vec<f64>>,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            use_emulator: true,
            emulator_training_points: 120,
            emulator_mle: MleOptions::default(),
            use_discrepancy: true,
            discrepancy_mle: MleOptions::default(),
            validation_fraction: 0.5,
            theta_ref: None,
        }
    }
}

/// Shared state for a sweep: the data split, the (possibly emulated) model,
/// the discrepancy GPs and the prior.
pub struct StudySetup {
    /// Records the chains condition on.
    pub calibration: Vec<ExperimentRecord>,
    /// Records behind the discrepancy GPs (empty when discrepancy is off).
    pub validation: Vec<ExperimentRecord>,
    pub model: ResponseModel,
    pub discrepancy: Option<Vec<TrainedGp>>,
    pub prior: PriorSpec,
    pub response_labels: Vec<String>,
    pub parameter_labels: Vec<String>,
}

impl StudySetup {
    /// Split the data, train the emulators (when enabled) and fit the
    /// discrepancy GPs, all deterministically from `seed`.
    pub fn build(
        dataset: &[ExperimentRecord],
        sim: &SimulatorSpec,
        prior: &PriorSpec,
        opts: &StudyOptions,
        seed: u64,
    ) -> Result<Self> {
        prior.validate()?;
        if prior.dim() != sim.calib_dim {
            return Err(Error::DimensionMismatch {
                context: "prior dimension",
                expected: sim.calib_dim,
                actual: prior.dim(),
            });
        }
        // Only the discrepancy construction needs held-out records.
        let (calibration, validation) = if opts.use_discrepancy {
            let split: DataSplit =
                split_data(dataset, opts.validation_fraction, derive_seed(seed, 1))?;
            (split.calibration, split.validation)
        } else {
            (dataset.to_vec(), Vec::new())
        };

        let model = if opts.use_emulator {
            let gps = train_emulators(sim, prior, opts, derive_seed(seed, 2))?;
            ResponseModel::Emulated {
                gps,
                labels: sim.response_labels.clone(),
                design_dim: sim.design_dim,
            }
        } else {
            ResponseModel::Direct(sim.clone())
        };

        let theta_ref = opts
            .theta_ref
            .clone()
            .unwrap_or_else(|| default_theta_ref(sim, prior));
        let discrepancy = if opts.use_discrepancy {
            Some(build_discrepancy(
                &model,
                &validation,
                &theta_ref,
                &opts.discrepancy_mle,
                derive_seed(seed, 3),
            )?)
        } else {
            None
        };

        Ok(StudySetup {
            calibration,
            validation,
            model,
            discrepancy,
            prior: prior.clone(),
            response_labels: sim.response_labels.clone(),
            parameter_labels: sim.calib_labels.clone(),
        })
    }

    /// Likelihood context for one response subset.
    pub fn context(&self, subset: &ResponseSubset) -> Result<LikelihoodContext> {
        LikelihoodContext::new(
            self.calibration.clone(),
            self.model.clone(),
            self.discrepancy.clone(),
            subset.indices.clone(),
        )
    }
}

/// Reference θ for the discrepancy residuals: the simulator's nominal
/// value where the prior is noninformative (uniform), the prior mean where
/// it carries real information.
pub fn default_theta_ref(sim: &SimulatorSpec, prior: &PriorSpec) -> Vec<f64> {
    use crate::calib::Marginal;
    match prior {
        PriorSpec::Independent { marginals } => marginals
            .iter()
            .enumerate()
            .map(|(k, m)| match m {
                Marginal::Uniform { .. } => sim.calib_nominal[k],
                Marginal::Gaussian { mean, .. } => *mean,
            })
            .collect(),
        PriorSpec::MultivariateGaussian { .. } => prior.mean(),
    }
}

/// θ sampling box for emulator training: the prior support where finite,
/// otherwise mean ± 3 std, clipped to the simulator's reference box.
fn theta_training_box(prior: &PriorSpec, sim: &SimulatorSpec) -> Vec<(f64, f64)> {
    let support = prior.support_bounds();
    let mean = prior.mean();
    let std = prior.marginal_std();
    (0..prior.dim())
        .map(|k| {
            let (slo, shi) = support[k];
            let lo = if slo.is_finite() { slo } else { mean[k] - 3.0 * std[k] };
            let hi = if shi.is_finite() { shi } else { mean[k] + 3.0 * std[k] };
            let (ref_lo, ref_hi) = sim.calib_bounds[k];
            (lo.max(ref_lo.min(hi)), hi.min(ref_hi.max(lo)))
        })
        .collect()
}

fn train_emulators(
    sim: &SimulatorSpec,
    prior: &PriorSpec,
    opts: &StudyOptions,
    seed: u64,
) -> Result<Vec<TrainedGp>> {
    let n = opts.emulator_training_points;
    let d_in = sim.design_dim + sim.calib_dim;
    if n < d_in + 2 {
        return Err(Error::InvalidArgument(format!(
            "emulator training needs at least {} points, got {n}",
            d_in + 2
        )));
    }
    let mut box_all = sim.design_bounds.clone();
    box_all.extend(theta_training_box(prior, sim));
    let points = latin_hypercube(&box_all, n, &mut rng_from(seed))?;
    let outputs: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| sim.eval_unchecked(&p[..sim.design_dim], &p[sim.design_dim..]))
        .collect();

    let inputs = DMatrix::from_fn(n, d_in, |i, j| points[i][j]);
    let mut gps = Vec::with_capacity(sim.response_dim);
    for r in 0..sim.response_dim {
        let y = DVector::from_fn(n, |i, _| outputs[i][r]);
        // The simulator is deterministic; a relative nugget only guards
        // conditioning.
        let var = crate::stats::variance(&y.iter().copied().collect::<Vec<_>>());
        let nugget = vec![1e-8 * var.max(1e-300); n];
        let gp = fit_mle(
            &inputs,
            &y,
            &nugget,
            Basis::Constant,
            &opts.emulator_mle,
            derive_seed(seed, 100 + r as u64),
        )
        .map_err(|e| e.labeled(sim.response_labels[r].clone()))?;
        gps.push(gp);
    }
    Ok(gps)
}

/// Posterior mean/STD and chain diagnostics for one response subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetStudyResult {
    pub label: String,
    pub indices: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub split_rhat: Vec<f64>,
    pub ess: Vec<f64>,
    pub acceptance_rate: f64,
    pub converged: bool,
    pub seed: u64,
}

fn sweep_impl(
    setup: &StudySetup,
    subsets: &[ResponseSubset],
    mcmc: &McmcConfig,
    base_seed: u64,
) -> Vec<(String, Result<SubsetStudyResult>)> {
    subsets
        .par_iter()
        .enumerate()
        .map(|(i, subset)| {
            let run = || -> Result<SubsetStudyResult> {
                let ctx = setup.context(subset)?;
                let config = McmcConfig {
                    seed: base_seed.wrapping_add(i as u64),
                    ..mcmc.clone()
                };
                let samples = run_mcmc(
                    |theta| log_posterior(theta, &ctx, &setup.prior),
                    &setup.prior,
                    &config,
                )?;
                let summary = summarize_posterior(&samples)?;
                Ok(SubsetStudyResult {
                    label: subset.label.clone(),
                    indices: subset.indices.clone(),
                    mean: summary.mean,
                    std: summary.std,
                    split_rhat: samples.split_rhat.clone(),
                    ess: samples.ess.clone(),
                    acceptance_rate: samples.acceptance_rate,
                    converged: samples.converged(),
                    seed: config.seed,
                })
            };
            (subset.label.clone(), run())
        })
        .collect()
}

fn check_subsets(setup: &StudySetup, subsets: &[ResponseSubset]) -> Result<()> {
    let m = setup.model.response_dim();
    for s in subsets {
        if s.indices.iter().any(|&r| r >= m) {
            return Err(Error::InvalidArgument(format!(
                "subset {} references a response beyond the dataset's {m}",
                s.label
            )));
        }
    }
    Ok(())
}

/// Run one calibration per subset, seeding chain `i` with
/// `base_seed + i`. Chains that miss the R̂ threshold are retained with
/// `converged = false`; numerical failures abort the sweep.
pub fn run_subset_study(
    setup: &StudySetup,
    subsets: &[ResponseSubset],
    mcmc: &McmcConfig,
    base_seed: u64,
) -> Result<Vec<SubsetStudyResult>> {
    check_subsets(setup, subsets)?;
    sweep_impl(setup, subsets, mcmc, base_seed)
        .into_iter()
        .map(|(label, r)| r.map_err(|e| e.labeled(format!("subset {label}"))))
        .collect()
}

/// Like [`run_subset_study`], but per-subset failures are collected rather
/// than aborting the sweep.
pub fn run_subset_study_lenient(
    setup: &StudySetup,
    subsets: &[ResponseSubset],
    mcmc: &McmcConfig,
    base_seed: u64,
) -> Result<(Vec<SubsetStudyResult>, Vec<(String, Error)>)> {
    check_subsets(setup, subsets)?;
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (label, r) in sweep_impl(setup, subsets, mcmc, base_seed) {
        match r {
            Ok(result) => ok.push(result),
            Err(e) => failed.push((label, e)),
        }
    }
    Ok((ok, failed))
}

/// The assembled identifiability report for one sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    pub results: Vec<SubsetStudyResult>,
    pub reference_label: String,
    pub parameter_labels: Vec<String>,
    /// Subset with the smallest posterior STD per parameter.
    pub best_subset: Vec<String>,
    /// Subset with the largest posterior STD per parameter.
    pub worst_subset: Vec<String>,
    /// Sensitivity–identifiability rank correlation per parameter
    /// (undefined for constant inputs).
    pub scores: Vec<Option<f64>>,
    pub flags: FlagReport,
    pub iteration: usize,
}

/// Combine sweep results with a Sobol' table into the report. The result
/// list must cover all `2^m − 1` subsets; the reference is the full set.
pub fn assemble_report(
    results: Vec<SubsetStudyResult>,
    sobol: &SobolTable,
    parameter_labels: Vec<String>,
    thresholds: &FakeFlagThresholds,
    iteration: usize,
) -> Result<IdentifiabilityReport> {
    let m = sobol.n_responses();
    let expected = (1usize << m) - 1;
    if results.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "identifiability report needs all {expected} subsets, got {}",
            results.len()
        )));
    }
    let reference = results
        .iter()
        .find(|r| r.indices.len() == m)
        .ok_or_else(|| Error::InvalidArgument("full response subset missing".into()))?
        .clone();

    let d = parameter_labels.len();
    let mut best = Vec::with_capacity(d);
    let mut worst = Vec::with_capacity(d);
    for k in 0..d {
        let mut lo = (f64::INFINITY, String::new());
        let mut hi = (f64::NEG_INFINITY, String::new());
        for r in &results {
            if r.std[k] < lo.0 {
                lo = (r.std[k], r.label.clone());
            }
            if r.std[k] > hi.0 {
                hi = (r.std[k], r.label.clone());
            }
        }
        best.push(lo.1);
        worst.push(hi.1);
    }

    let scores = sensitivity_identifiability_score(sobol, &results)?;
    let flags = flag_fake_identifiability(&results, &reference, thresholds);

    Ok(IdentifiabilityReport {
        results,
        reference_label: reference.label,
        parameter_labels,
        best_subset: best,
        worst_subset: worst,
        scores,
        flags,
        iteration,
    })
}
