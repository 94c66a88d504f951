//! Posterior summaries and posterior→prior recycling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{self, Histogram};

use super::mcmc::PosteriorSamples;
use super::prior::{Marginal, PriorSpec};

/// Number of histogram bins kept for plotting.
pub const HISTOGRAM_BINS: usize = 50;

/// Moments, correlations and marginal histograms of a chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Pairwise Pearson correlations; zero (with the degeneracy flag set)
    /// for constant parameters.
    pub correlation: Vec<Vec<f64>>,
    pub histograms: Vec<Histogram>,
    /// Marks parameters whose chain never moved.
    pub degenerate: Vec<bool>,
}

/// Summarize a retained chain.
pub fn summarize_posterior(samples: &PosteriorSamples) -> Result<PosteriorSummary> {
    if samples.n_kept() < 1000 {
        return Err(Error::InvalidArgument(format!(
            "posterior summary needs at least 1000 retained samples, got {}",
            samples.n_kept()
        )));
    }
    let d = samples.dim();
    let cols: Vec<Vec<f64>> = (0..d).map(|k| samples.column(k)).collect();
    let mean: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let std: Vec<f64> = cols.iter().map(|c| stats::std_dev(c)).collect();
    let degenerate: Vec<bool> = std.iter().map(|&s| s == 0.0).collect();

    let mut correlation = vec![vec![0.0; d]; d];
    for i in 0..d {
        correlation[i][i] = if degenerate[i] { 0.0 } else { 1.0 };
        for j in (i + 1)..d {
            let c = if degenerate[i] || degenerate[j] {
                0.0
            } else {
                stats::pearson(&cols[i], &cols[j])
            };
            correlation[i][j] = c;
            correlation[j][i] = c;
        }
    }

    let histograms = cols
        .iter()
        .map(|c| {
            let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                Histogram::new(c, lo, hi, HISTOGRAM_BINS)
            } else {
                Histogram::new(c, lo - 0.5, lo + 0.5, HISTOGRAM_BINS)
            }
        })
        .collect();

    Ok(PosteriorSummary {
        mean,
        std,
        correlation,
        histograms,
        degenerate,
    })
}

/// Result of converting a posterior into the next prior.
#[derive(Debug, Clone)]
pub struct PriorFromPosterior {
    pub prior: PriorSpec,
    /// The sample covariance failed to factorize, so independent Gaussian
    /// marginals were used instead.
    pub used_diagonal_fallback: bool,
}

/// Moment-match a multivariate Gaussian prior to a chain, truncated to the
/// given support (normally the original prior's support).
///
/// With `marginals_only`, posterior correlations are dropped and the prior
/// consists of independent Gaussian marginals.
pub fn posterior_to_prior(
    samples: &PosteriorSamples,
    support: &[(f64, f64)],
    marginals_only: bool,
) -> Result<PriorFromPosterior> {
    if samples.n_kept() < 1000 {
        return Err(Error::InvalidArgument(format!(
            "posterior-to-prior needs at least 1000 retained samples, got {}",
            samples.n_kept()
        )));
    }
    let d = samples.dim();
    if support.len() != d {
        return Err(Error::DimensionMismatch {
            context: "posterior-to-prior support",
            expected: d,
            actual: support.len(),
        });
    }
    let cols: Vec<Vec<f64>> = (0..d).map(|k| samples.column(k)).collect();
    let mean: Vec<f64> = cols.iter().map(|c| stats::mean(c)).collect();
    let std: Vec<f64> = cols.iter().map(|c| stats::std_dev(c)).collect();
    if std.iter().any(|&s| s == 0.0) {
        return Err(Error::DegeneratePosterior(
            "a parameter's chain is constant; no Gaussian prior can represent it".into(),
        ));
    }

    if !marginals_only {
        let n = samples.n_kept() as f64;
        let mut cov = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in i..d {
                let c: f64 = cols[i]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| (a - mean[i]) * (b - mean[j]))
                    .sum::<f64>()
                    / (n - 1.0);
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        let candidate = PriorSpec::MultivariateGaussian {
            mean: mean.clone(),
            cov,
            support: support.to_vec(),
        };
        if candidate.validate().is_ok() {
            return Ok(PriorFromPosterior {
                prior: candidate,
                used_diagonal_fallback: false,
            });
        }
    }

    let marginals = mean
        .iter()
        .zip(&std)
        .map(|(&m, &s)| Marginal::Gaussian { mean: m, std: s })
        .collect();
    Ok(PriorFromPosterior {
        prior: PriorSpec::Independent { marginals },
        used_diagonal_fallback: !marginals_only,
    })
}
