//! The modular Bayesian calibration engine.
//!
//! The workflow mirrors the improved modular approach: split the dataset
//! into calibration and validation sides, run the model at a reference
//! parameter value over the validation side, fit a discrepancy GP to the
//! residuals (with the observation noise as nugget), and sample the
//! posterior of θ under a likelihood whose covariance stacks three parts —
//! experiment noise, discrepancy uncertainty and (when an emulator stands
//! in for the simulator) code uncertainty.

mod discrepancy;
mod likelihood;
mod mcmc;
mod prior;
mod split;
mod summary;

pub use discrepancy::build_discrepancy;
pub use likelihood::{assemble_covariance, log_posterior, LikelihoodContext, ResponseModel};
pub use mcmc::{run_mcmc, McmcConfig, PosteriorSamples};
pub use prior::{Marginal, PriorSpec};
pub use split::{split_data, DataSplit};
pub use summary::{posterior_to_prior, summarize_posterior, PosteriorSummary, PriorFromPosterior};
