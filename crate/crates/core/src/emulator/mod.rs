//! Gaussian-process regression with MLE-fitted hyperparameters.
//!
//! The covariance family is the anisotropic power-exponential kernel
//!
//! ```text
//! c(x, x') = σ² · exp( −Σ_k ω_k · |x_k − x'_k|^{p_k} )
//! ```
//!
//! with a per-point nugget added on the diagonal, so observation noise can
//! enter directly as `noise_std²`. The mean is a constant or linear basis
//! whose coefficients β are profiled out in closed form (generalized least
//! squares) during fitting. Hyperparameter search is derivative-free:
//! bounded Nelder–Mead in log-hyperparameter space from Latin-hypercube
//! starts, on inputs standardized to the unit box and centered/scaled
//! outputs. Roughness is held at p = 2 unless optimization is requested.
//!
//! The same machinery serves two roles in the calibration pipeline: as the
//! code surrogate (its predictive covariance supplies the code-uncertainty
//! block of the likelihood) and as the model-discrepancy representation
//! fitted to validation residuals.

mod fit;
mod gp;

pub use fit::{
    default_mle_bounds, fit_mle, fit_mle_with_report, mle_start_points, MleBounds, MleOptions,
    MleReport, MleStart,
};
pub use gp::{
    log_marginal_likelihood, predict, Basis, EmulatorSet, GpHyperparameters, TrainedGp,
};
