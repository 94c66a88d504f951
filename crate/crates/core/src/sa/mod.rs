//! Variance-based global sensitivity analysis.
//!
//! Main effects `S_i = Var(E[Y|X_i]) / Var(Y)` are estimated with the
//! pick-freeze estimator and total effects
//! `T_i = E[Var(Y|X_~i)] / Var(Y)` with the Jansen estimator, both driven by
//! the paired Saltelli sample blocks. A literal double-loop Monte Carlo
//! oracle ([`brute_force_sobol`]) evaluates the defining conditional
//! moments directly and is used to cross-check the fast estimators.

mod brute;
mod estimate;
mod interactions;
mod saltelli;

pub use brute::{brute_force_sobol, BruteForceResult};
pub use estimate::estimate_sobol;
pub use interactions::{detect_interactions, InteractionCell, InteractionReport, ResponseInteraction};
pub use saltelli::{saltelli_design, SaltelliDesign};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SimulatorSpec;

/// Marginal distribution of one input dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDistribution {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
    /// Resampling from a stored sample (e.g. a posterior chain column).
    /// Dimensions are resampled independently, so any correlation present
    /// in the source sample is deliberately discarded.
    Empirical { sample: Vec<f64> },
}

impl InputDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            InputDistribution::Uniform { lo, hi } if !(hi > lo) => Err(Error::InvalidArgument(
                format!("uniform distribution needs lo < hi, got [{lo}, {hi}]"),
            )),
            InputDistribution::Gaussian { std, .. } if !(*std > 0.0) => Err(
                Error::InvalidArgument(format!("gaussian distribution needs std > 0, got {std}")),
            ),
            InputDistribution::Empirical { sample } if sample.len() < 100 => {
                Err(Error::InvalidArgument(format!(
                    "empirical distribution needs at least 100 points, got {}",
                    sample.len()
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            InputDistribution::Uniform { lo, hi } => lo + rng.random::<f64>() * (hi - lo),
            InputDistribution::Gaussian { mean, std } => {
                Normal::new(*mean, *std).unwrap().sample(rng)
            }
            InputDistribution::Empirical { sample } => {
                sample[rng.random_range(0..sample.len())]
            }
        }
    }
}

/// A deterministic multi-response function of the sampled inputs.
///
/// Adapters exist for a simulator with the design point held fixed
/// ([`FixedDesignModel`]) and for plain closures ([`FnModel`]); the emulator
/// module provides one for a set of trained GPs.
pub trait SensitivityModel: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn output_labels(&self) -> Vec<String>;
    fn eval(&self, input: &[f64]) -> Vec<f64>;
}

/// A simulator viewed as a function of θ alone, with `x` frozen at a
/// nominal design point.
pub struct FixedDesignModel<'a> {
    sim: &'a SimulatorSpec,
    x: Vec<f64>,
}

impl<'a> FixedDesignModel<'a> {
    pub fn new(sim: &'a SimulatorSpec, x: Vec<f64>) -> Result<Self> {
        sim.check_design(&x)?;
        Ok(FixedDesignModel { sim, x })
    }
}

impl SensitivityModel for FixedDesignModel<'_> {
    fn input_dim(&self) -> usize {
        self.sim.calib_dim
    }
    fn output_dim(&self) -> usize {
        self.sim.response_dim
    }
    fn output_labels(&self) -> Vec<String> {
        self.sim.response_labels.clone()
    }
    fn eval(&self, input: &[f64]) -> Vec<f64> {
        self.sim.eval_unchecked(&self.x, input)
    }
}

/// Closure adapter, mostly for tests and analytic functions.
pub struct FnModel<F: Fn(&[f64]) -> Vec<f64> + Sync> {
    pub input_dim: usize,
    pub labels: Vec<String>,
    pub f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> SensitivityModel for FnModel<F> {
    fn input_dim(&self) -> usize {
        self.input_dim
    }
    fn output_dim(&self) -> usize {
        self.labels.len()
    }
    fn output_labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn eval(&self, input: &[f64]) -> Vec<f64> {
        (self.f)(input)
    }
}

/// Second-order (closed pair) indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecondOrder {
    /// Index pairs `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// `values[pair][response]` — the interaction index `S_ij`.
    pub values: Vec<Vec<f64>>,
}

/// Estimated Sobol' indices for every (input, response) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SobolTable {
    pub input_names: Vec<String>,
    pub response_names: Vec<String>,
    /// `main[input][response]` — the first-order index S_i.
    pub main: Vec<Vec<f64>>,
    /// `total[input][response]` — the total-effect index T_i.
    pub total: Vec<Vec<f64>>,
    /// Bootstrap CI half-widths for `main` (zero when no bootstrap ran).
    pub main_ci: Vec<Vec<f64>>,
    /// Bootstrap CI half-widths for `total`.
    pub total_ci: Vec<Vec<f64>>,
    pub second_order: Option<SecondOrder>,
    /// Base sample count N (pick-freeze) or n_outer·n_inner (brute force).
    pub estimator_n: usize,
}

impl SobolTable {
    pub fn n_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn n_responses(&self) -> usize {
        self.response_names.len()
    }

    /// Σ_i S_i for one response.
    pub fn main_sum(&self, response: usize) -> f64 {
        self.main.iter().map(|row| row[response]).sum()
    }

    /// Σ_i T_i for one response.
    pub fn total_sum(&self, response: usize) -> f64 {
        self.total.iter().map(|row| row[response]).sum()
    }

    /// Apply an input permutation: row `k` of the result is row `perm[k]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SobolTable {
        let pick = |rows: &Vec<Vec<f64>>| perm.iter().map(|&k| rows[k].clone()).collect();
        SobolTable {
            input_names: perm.iter().map(|&k| self.input_names[k].clone()).collect(),
            response_names: self.response_names.clone(),
            main: pick(&self.main),
            total: pick(&self.total),
            main_ci: pick(&self.main_ci),
            total_ci: pick(&self.total_ci),
            second_order: None,
            estimator_n: self.estimator_n,
        }
    }
}
