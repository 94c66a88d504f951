//! Adaptive random-walk Metropolis sampling.
//!
//! The proposal is a multivariate Gaussian whose covariance and global
//! scale adapt during burn-in: the scale chases a target acceptance rate of
//! ~0.23 by a decaying Robbins–Monro update, and once enough burn-in
//! samples exist the proposal shape follows their sample covariance
//! (scaled by 2.38²/d). After burn-in the proposal freezes, which keeps
//! the retained chain a valid Markov chain.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::stats;

use super::prior::PriorSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McmcConfig {
    pub n_steps: usize,
    pub n_burn: usize,
    pub seed: u64,
    /// Chain start; prior mean when absent.
    pub init: Option<Vec<f64>>,
    /// Steps between adaptation updates during burn-in.
    pub adapt_window: usize,
    pub target_acceptance: f64,
    /// Split-R̂ above this marks the chain as unconverged.
    pub rhat_warn_threshold: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_steps: 50_000,
            n_burn: 25_000,
            seed: 0,
            init: None,
            adapt_window: 500,
            target_acceptance: 0.23,
            rhat_warn_threshold: 1.05,
        }
    }
}

impl McmcConfig {
    pub fn with_steps(n_steps: usize, seed: u64) -> Self {
        McmcConfig {
            n_steps,
            n_burn: n_steps / 2,
            seed,
            ..Default::default()
        }
    }
}

/// A retained posterior chain with its diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorSamples {
    /// Retained samples, one row per kept step.
    pub chain: Vec<Vec<f64>>,
    /// Post-burn-in acceptance rate.
    pub acceptance_rate: f64,
    /// Split-R̂ per parameter from 4 segments of the retained chain.
    pub split_rhat: Vec<f64>,
    /// Effective sample size per parameter.
    pub ess: Vec<f64>,
    pub seed: u64,
    pub config: McmcConfig,
}

impl PosteriorSamples {
    pub fn n_kept(&self) -> usize {
        self.chain.len()
    }

    pub fn dim(&self) -> usize {
        self.chain.first().map_or(0, |row| row.len())
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.chain.iter().map(|row| row[k]).collect()
    }

    /// All split-R̂ values below the configured threshold.
    pub fn converged(&self) -> bool {
        self.split_rhat
            .iter()
            .all(|r| r.is_finite() && *r <= self.config.rhat_warn_threshold)
    }
}

/// Sample the posterior with an adaptive random-walk Metropolis chain.
///
/// `logpost` must return −∞ (not an error) outside the prior support;
/// errors abort the run. An entire adaptation window without a single
/// acceptance aborts with [`Error::ScaleCollapse`].
pub fn run_mcmc<F>(logpost: F, prior: &PriorSpec, config: &McmcConfig) -> Result<PosteriorSamples>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    prior.validate()?;
    if config.n_steps <= config.n_burn {
        return Err(Error::InvalidArgument(format!(
            "n_steps ({}) must exceed n_burn ({})",
            config.n_steps, config.n_burn
        )));
    }
    if config.adapt_window < 20 {
        return Err(Error::InvalidArgument(
            "adaptation window must be at least 20 steps".into(),
        ));
    }
    let d = prior.dim();
    let init = config.init.clone().unwrap_or_else(|| prior.mean());
    if init.len() != d {
        return Err(Error::DimensionMismatch {
            context: "MCMC init",
            expected: d,
            actual: init.len(),
        });
    }
    if !prior.contains(&init) {
        return Err(Error::InvalidArgument(
            "MCMC init lies outside the prior support".into(),
        ));
    }

    let mut current = init;
    let mut lp_current = logpost(&current)?;
    if !lp_current.is_finite() {
        return Err(Error::InvalidArgument(
            "log-posterior is not finite at the initial point".into(),
        ));
    }

    let mut rng = rng_from(config.seed);

    // Proposal state: shape L (Cholesky of the proposal covariance) and a
    // global log-scale.
    let prior_std = prior.marginal_std();
    let mut shape = DMatrix::zeros(d, d);
    for k in 0..d {
        shape[(k, k)] = 0.1 * prior_std[k].max(1e-12);
    }
    let mut log_scale: f64 = 0.0;

    let n_kept = config.n_steps - config.n_burn;
    let mut chain: Vec<Vec<f64>> = Vec::with_capacity(n_kept);
    let mut burn_samples: Vec<Vec<f64>> = Vec::with_capacity(config.n_burn);

    let mut window_accepts = 0usize;
    let mut window_index = 0usize;
    let mut post_accepts = 0usize;

    for step in 0..config.n_steps {
        let scale = log_scale.exp();
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let jump = &shape * z * scale;
        let proposal: Vec<f64> = current.iter().zip(jump.iter()).map(|(c, j)| c + j).collect();

        let lp_prop = logpost(&proposal)?;
        let accept = lp_prop.is_finite()
            && (lp_prop >= lp_current || rng.random::<f64>().ln() < lp_prop - lp_current);
        if accept {
            current = proposal;
            lp_current = lp_prop;
            window_accepts += 1;
            if step >= config.n_burn {
                post_accepts += 1;
            }
        }

        if step < config.n_burn {
            burn_samples.push(current.clone());
            if (step + 1) % config.adapt_window == 0 {
                if window_accepts == 0 {
                    return Err(Error::ScaleCollapse(config.adapt_window));
                }
                let rate = window_accepts as f64 / config.adapt_window as f64;
                window_index += 1;
                let gain = 2.0 / (window_index as f64).sqrt();
                log_scale += gain * (rate - config.target_acceptance);
                window_accepts = 0;

                // Re-shape the proposal from the burn-in sample covariance
                // once there is enough history.
                if burn_samples.len() >= (10 * d).max(200) {
                    if let Some(l) = sample_covariance_factor(&burn_samples, &prior_std) {
                        shape = l * (2.38 * 2.38 / d as f64).sqrt();
                        log_scale = 0.0;
                    }
                }
            }
        } else {
            chain.push(current.clone());
        }
    }

    let acceptance_rate = post_accepts as f64 / n_kept as f64;
    let mut split_rhat = Vec::with_capacity(d);
    let mut ess = Vec::with_capacity(d);
    for k in 0..d {
        let col: Vec<f64> = chain.iter().map(|row| row[k]).collect();
        split_rhat.push(stats::split_rhat(&col, 4));
        ess.push(stats::effective_sample_size(&col));
    }

    Ok(PosteriorSamples {
        chain,
        acceptance_rate,
        split_rhat,
        ess,
        seed: config.seed,
        config: config.clone(),
    })
}

/// Cholesky factor of the regularized sample covariance of the burn-in
/// history; `None` when it cannot be factorized.
fn sample_covariance_factor(
    samples: &[Vec<f64>],
    prior_std: &[f64],
) -> Option<DMatrix<f64>> {
    let d = samples[0].len();
    let n = samples.len() as f64;
    let mut mean = vec![0.0; d];
    for s in samples {
        for k in 0..d {
            mean[k] += s[k] / n;
        }
    }
    let mut cov = DMatrix::zeros(d, d);
    for s in samples {
        for i in 0..d {
            for j in i..d {
                let v = (s[i] - mean[i]) * (s[j] - mean[j]) / (n - 1.0);
                cov[(i, j)] += v;
            }
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            cov[(j, i)] = cov[(i, j)];
        }
        // Keep the proposal full-rank even when a direction has not moved.
        cov[(i, i)] += 1e-12 * prior_std[i] * prior_std[i] + 1e-300;
    }
    Cholesky::new(cov).map(|c| c.l())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::Marginal;

    fn gaussian_prior(mean: f64, std: f64) -> PriorSpec {
        PriorSpec::Independent {
            marginals: vec![Marginal::Gaussian { mean, std }],
        }
    }

    #[test]
    fn conjugate_gaussian_posterior_is_recovered() {
        // Prior N(0,1), one observation y = 2 with unit noise:
        // posterior N(1, 0.5).
        let prior = gaussian_prior(0.0, 1.0);
        let logpost = |t: &[f64]| Ok(-0.5 * t[0] * t[0] - 0.5 * (2.0 - t[0]).powi(2));
        let config = McmcConfig::with_steps(50_000, 11);
        let samples = run_mcmc(logpost, &prior, &config).unwrap();

        let col = samples.column(0);
        let mean = stats::mean(&col);
        let var = stats::variance(&col);
        let mcse = (0.5f64).sqrt() / samples.ess[0].sqrt();
        assert!(
            (mean - 1.0).abs() < 3.0 * mcse,
            "mean {mean} vs 1.0 (mcse {mcse})"
        );
        assert!((var - 0.5).abs() < 0.05, "var {var} vs 0.5");
        assert!(samples.acceptance_rate > 0.0 && samples.acceptance_rate < 1.0);
    }

    #[test]
    fn flat_likelihood_samples_the_prior() {
        let prior = PriorSpec::uniform(&[(0.0, 5.0)]);
        let logpost = |_t: &[f64]| Ok(0.0);
        let config = McmcConfig::with_steps(40_000, 3);
        let samples = run_mcmc(|t| {
            if t[0] < 0.0 || t[0] > 5.0 {
                Ok(f64::NEG_INFINITY)
            } else {
                logpost(t)
            }
        }, &prior, &config)
        .unwrap();
        let col = samples.column(0);
        assert!(col.iter().all(|&t| (0.0..=5.0).contains(&t)));
        let mean = stats::mean(&col);
        let se = 5.0 / 12f64.sqrt() / samples.ess[0].sqrt();
        assert!((mean - 2.5).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn correlated_gaussian_target() {
        // 2-parameter Gaussian with correlation 0.8; oracle is the target
        // itself, sampled directly.
        let rho: f64 = 0.8;
        let prior = PriorSpec::Independent {
            marginals: vec![
                Marginal::Gaussian { mean: 0.0, std: 10.0 },
                Marginal::Gaussian { mean: 0.0, std: 10.0 },
            ],
        };
        let det = 1.0 - rho * rho;
        let logpost = move |t: &[f64]| {
            Ok(-(t[0] * t[0] - 2.0 * rho * t[0] * t[1] + t[1] * t[1]) / (2.0 * det))
        };
        let config = McmcConfig::with_steps(60_000, 5);
        let samples = run_mcmc(logpost, &prior, &config).unwrap();
        let a = samples.column(0);
        let b = samples.column(1);
        let corr = stats::pearson(&a, &b);
        assert!((corr - rho).abs() < 0.1, "correlation {corr} vs {rho}");
    }

    #[test]
    fn support_is_respected() {
        let prior = PriorSpec::uniform(&[(1.0, 2.0)]);
        let samples = run_mcmc(
            |t| {
                Ok(if (1.0..=2.0).contains(&t[0]) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                })
            },
            &prior,
            &McmcConfig::with_steps(5_000, 7),
        )
        .unwrap();
        assert!(samples.chain.iter().all(|row| (1.0..=2.0).contains(&row[0])));
    }

    #[test]
    fn hopeless_target_collapses_the_scale() {
        // Finite only exactly at the initial point: nothing is ever
        // accepted, and the first adaptation window reports the collapse.
        let prior = gaussian_prior(0.0, 1.0);
        let logpost = |t: &[f64]| {
            Ok(if t[0] == 0.0 { 0.0 } else { f64::NEG_INFINITY })
        };
        let err = run_mcmc(logpost, &prior, &McmcConfig::with_steps(10_000, 1)).unwrap_err();
        assert!(matches!(err, Error::ScaleCollapse(_)), "{err:?}");
    }

    #[test]
    fn init_outside_support_is_rejected() {
        let prior = PriorSpec::uniform(&[(0.0, 1.0)]);
        let config = McmcConfig {
            init: Some(vec![2.0]),
            ..McmcConfig::with_steps(1_000, 0)
        };
        assert!(run_mcmc(|_| Ok(0.0), &prior, &config).is_err());
    }
}
