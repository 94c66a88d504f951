//! Prior specifications over the calibration parameters.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marginal prior of a single parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Marginal {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
}

/// Prior over the full parameter vector: independent marginals, or a
/// multivariate Gaussian truncated to a box (the form produced when a
/// posterior is recycled as the next prior).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    Independent { marginals: Vec<Marginal> },
    MultivariateGaussian {
        mean: Vec<f64>,
        /// Row-major covariance.
        cov: Vec<Vec<f64>>,
        /// Truncation box, usually the original prior support. The density
        /// is reported without the truncation constant, which cancels in
        /// MCMC.
        support: Vec<(f64, f64)>,
    },
}

impl PriorSpec {
    /// Independent uniform prior over per-parameter boxes.
    pub fn uniform(bounds: &[(f64, f64)]) -> Self {
        PriorSpec::Independent {
            marginals: bounds
                .iter()
                .map(|&(lo, hi)| Marginal::Uniform { lo, hi })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PriorSpec::Independent { marginals } => marginals.len(),
            PriorSpec::MultivariateGaussian { mean, .. } => mean.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PriorSpec::Independent { marginals } => {
                if marginals.is_empty() {
                    return Err(Error::InvalidArgument("prior has no parameters".into()));
                }
                for (k, m) in marginals.iter().enumerate() {
                    match m {
                        Marginal::Uniform { lo, hi } if !(hi > lo) => {
                            return Err(Error::InvalidArgument(format!(
                                "uniform prior {k} needs lo < hi, got [{lo}, {hi}]"
                            )));
                        }
                        Marginal::Gaussian { std, .. } if !(*std > 0.0) => {
                            return Err(Error::InvalidArgument(format!(
                                "gaussian prior {k} needs std > 0, got {std}"
                            )));
                        }
                        _ => {}
                    }
                }
                Ok(())
            }
            PriorSpec::MultivariateGaussian { mean, cov, support } => {
                let d = mean.len();
                if d == 0 {
                    return Err(Error::InvalidArgument("prior has no parameters".into()));
                }
                if cov.len() != d || cov.iter().any(|row| row.len() != d) {
                    return Err(Error::DimensionMismatch {
                        context: "prior covariance",
                        expected: d,
                        actual: cov.len(),
                    });
                }
                if support.len() != d {
                    return Err(Error::DimensionMismatch {
                        context: "prior support",
                        expected: d,
                        actual: support.len(),
                    });
                }
                let m = self.cov_matrix();
                crate::linalg::check_symmetric(&m, 1e-8, "prior covariance")?;
                Cholesky::new(m).ok_or(Error::Conditioning {
                    context: "prior covariance not positive definite",
                    max_jitter: 0.0,
                })?;
                Ok(())
            }
        }
    }

    fn cov_matrix(&self) -> DMatrix<f64> {
        match self {
            PriorSpec::MultivariateGaussian { cov, .. } => {
                let d = cov.len();
                DMatrix::from_fn(d, d, |i, j| cov[i][j])
            }
            PriorSpec::Independent { marginals } => {
                let d = marginals.len();
                let mut m = DMatrix::zeros(d, d);
                for (k, s) in self.marginal_std().iter().enumerate() {
                    m[(k, k)] = s * s;
                }
                m
            }
        }
    }

    /// Per-parameter support intervals (±∞ for Gaussian marginals).
    pub fn support_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            PriorSpec::Independent { marginals } => marginals
                .iter()
                .map(|m| match m {
                    Marginal::Uniform { lo, hi } => (*lo, *hi),
                    Marginal::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
                })
                .collect(),
            PriorSpec::MultivariateGaussian { support, .. } => support.clone(),
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.support_bounds())
                .all(|(&t, (lo, hi))| t >= lo && t <= hi)
    }

    /// Prior mean (used as the default chain start and the reference value
    /// for discrepancy construction).
    pub fn mean(&self) -> Vec<f64> {
        match self {
            PriorSpec::Independent { marginals } => marginals
                .iter()
                .map(|m| match m {
                    Marginal::Uniform { lo, hi } => 0.5 * (lo + hi),
                    Marginal::Gaussian { mean, .. } => *mean,
                })
                .collect(),
            PriorSpec::MultivariateGaussian { mean, .. } => mean.clone(),
        }
    }

    /// Per-parameter standard deviations (used to size initial proposals).
    pub fn marginal_std(&self) -> Vec<f64> {
        match self {
            PriorSpec::Independent { marginals } => marginals
                .iter()
                .map(|m| match m {
                    Marginal::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
                    Marginal::Gaussian { std, .. } => *std,
                })
                .collect(),
            PriorSpec::MultivariateGaussian { cov, .. } => {
                (0..cov.len()).map(|k| cov[k][k].sqrt()).collect()
            }
        }
    }

    /// Log prior density; −∞ outside the support. Gaussian factors carry
    /// their full normalization, uniform factors their volume; the
    /// truncation constant of the multivariate form is omitted.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        if !self.contains(theta) {
            return f64::NEG_INFINITY;
        }
        match self {
            PriorSpec::Independent { marginals } => marginals
                .iter()
                .zip(theta)
                .map(|(m, &t)| match m {
                    Marginal::Uniform { lo, hi } => -(hi - lo).ln(),
                    Marginal::Gaussian { mean, std } => {
                        let z = (t - mean) / std;
                        -0.5 * z * z - std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
                    }
                })
                .sum(),
            PriorSpec::MultivariateGaussian { mean, .. } => {
                let d = mean.len();
                let m = self.cov_matrix();
                let chol = match Cholesky::new(m) {
                    Some(c) => c,
                    None => return f64::NEG_INFINITY,
                };
                let r = DVector::from_fn(d, |k, _| theta[k] - mean[k]);
                let half_solve = chol.l_dirty().solve_lower_triangular(&r).unwrap();
                let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
                -0.5 * half_solve.norm_squared()
                    - 0.5 * log_det
                    - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln()
            }
        }
    }
}
