//! The three-part likelihood covariance and the log-posterior.
//!
//! Per active response, the residual stacks over calibration records as
//! `r = y^E − y^M(·, θ) − δ(·)` and the covariance as
//! `Σ = Σ_exp + Σ_bias + Σ_code`: diagonal measurement noise, the
//! discrepancy GP's predictive covariance, and — only when the model is an
//! emulator — the emulator's predictive covariance at `(x, θ)`. Responses
//! are treated as uncorrelated, so the total log-density is the sum of
//! per-response Gaussian terms (the additive `−n/2·ln 2π` is omitted
//! throughout; MCMC is invariant to it).

use nalgebra::{DMatrix, DVector};

use crate::emulator::TrainedGp;
use crate::error::{Error, Result};
use crate::linalg::{check_symmetric, cholesky_with_jitter, CholFactor};
use crate::model::{ExperimentRecord, SimulatorSpec};

use super::prior::PriorSpec;

/// The computer model as seen by the likelihood: the simulator itself, or
/// one trained GP per response over the joint `(x, θ)` input.
#[derive(Debug, Clone)]
pub enum ResponseModel {
    Direct(SimulatorSpec),
    Emulated {
        gps: Vec<TrainedGp>,
        labels: Vec<String>,
        design_dim: usize,
    },
}

impl ResponseModel {
    pub fn response_dim(&self) -> usize {
        match self {
            ResponseModel::Direct(sim) => sim.response_dim,
            ResponseModel::Emulated { gps, .. } => gps.len(),
        }
    }

    pub fn response_labels(&self) -> Vec<String> {
        match self {
            ResponseModel::Direct(sim) => sim.response_labels.clone(),
            ResponseModel::Emulated { labels, .. } => labels.clone(),
        }
    }

    pub fn design_dim(&self) -> usize {
        match self {
            ResponseModel::Direct(sim) => sim.design_dim,
            ResponseModel::Emulated { design_dim, .. } => *design_dim,
        }
    }

    /// Mean model output for all responses at one `(x, θ)`.
    pub fn eval_mean(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        match self {
            ResponseModel::Direct(sim) => sim.eval_unchecked(x, theta),
            ResponseModel::Emulated { gps, .. } => {
                let joint: Vec<f64> = x.iter().chain(theta).copied().collect();
                gps.iter().map(|g| g.predict_mean_one(&joint)).collect()
            }
        }
    }
}

/// Everything the log-posterior needs, precomputed once per response
/// subset: observations, discrepancy means/covariances at the calibration
/// points, noise variances, and — in direct-simulator mode — the
/// prefactorized θ-independent covariance.
pub struct LikelihoodContext {
    pub records: Vec<ExperimentRecord>,
    pub model: ResponseModel,
    /// One discrepancy GP per response (the full set; masking happens via
    /// `active`). `None` switches the discrepancy terms off entirely.
    pub discrepancy: Option<Vec<TrainedGp>>,
    /// Active response indices (the subset being calibrated against).
    pub active: Vec<usize>,
    per_response: Vec<ResponseBlock>,
}

struct ResponseBlock {
    response: usize,
    observed: DVector<f64>,
    delta_mean: DVector<f64>,
    /// Σ_exp + Σ_bias (θ-independent part).
    base_cov: DMatrix<f64>,
    /// Factorization of `base_cov`, reusable when Σ_code is absent.
    base_factor: CholFactor,
    /// Mean diagonal of `base_cov`; jitter scale for per-θ factorizations.
    cov_scale: f64,
}

impl LikelihoodContext {
    pub fn new(
        records: Vec<ExperimentRecord>,
        model: ResponseModel,
        discrepancy: Option<Vec<TrainedGp>>,
        active: Vec<usize>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidArgument(
                "likelihood context needs at least one calibration record".into(),
            ));
        }
        let m = model.response_dim();
        if active.is_empty() {
            return Err(Error::InvalidArgument("no active responses".into()));
        }
        let mut seen = vec![false; m];
        for &r in &active {
            if r >= m {
                return Err(Error::DimensionMismatch {
                    context: "active response index",
                    expected: m,
                    actual: r,
                });
            }
            if seen[r] {
                return Err(Error::InvalidArgument(format!(
                    "active response {r} listed twice"
                )));
            }
            seen[r] = true;
        }
        if let Some(gps) = &discrepancy {
            if gps.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "discrepancy GP set",
                    expected: m,
                    actual: gps.len(),
                });
            }
        }
        for rec in &records {
            if rec.observed.values.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "record response dimension",
                    expected: m,
                    actual: rec.observed.values.len(),
                });
            }
        }

        let n = records.len();
        let design_dim = model.design_dim();
        let x_mat = DMatrix::from_fn(n, design_dim, |i, j| records[i].x.values[j]);

        let mut per_response = Vec::with_capacity(active.len());
        for &r in &active {
            let observed = DVector::from_fn(n, |i, _| records[i].observed.values[r]);
            let (delta_mean, sigma_bias) = match &discrepancy {
                Some(gps) => {
                    let (mean, cov) = gps[r]
                        .predict(&x_mat)
                        .map_err(|e| e.labeled(model.response_labels()[r].clone()))?;
                    (mean, cov)
                }
                None => (DVector::zeros(n), DMatrix::zeros(n, n)),
            };
            let mut base_cov = sigma_bias;
            for i in 0..n {
                base_cov[(i, i)] += records[i].noise_std[r] * records[i].noise_std[r];
            }
            let cov_scale = base_cov.diagonal().mean().max(f64::MIN_POSITIVE);
            let base_factor =
                cholesky_with_jitter(&base_cov, cov_scale, "likelihood covariance")?;
            per_response.push(ResponseBlock {
                response: r,
                observed,
                delta_mean,
                base_cov,
                base_factor,
                cov_scale,
            });
        }

        Ok(LikelihoodContext {
            records,
            model,
            discrepancy,
            active,
            per_response,
        })
    }

    pub fn n_records(&self) -> usize {
        self.records.len()
    }

    /// Gaussian log-likelihood part (no prior), for one θ.
    fn log_likelihood(&self, theta: &[f64]) -> Result<f64> {
        let n = self.records.len();

        // One model evaluation per record covers all responses.
        let means: Vec<Vec<f64>> = match &self.model {
            ResponseModel::Direct(sim) => self
                .records
                .iter()
                .map(|rec| sim.eval_unchecked(&rec.x.values, theta))
                .collect(),
            ResponseModel::Emulated { .. } => self
                .records
                .iter()
                .map(|rec| self.model.eval_mean(&rec.x.values, theta))
                .collect(),
        };

        let mut total = 0.0;
        for block in &self.per_response {
            let r = block.response;
            let resid = DVector::from_fn(n, |i, _| {
                block.observed[i] - means[i][r] - block.delta_mean[i]
            });
            let quad_logdet = match &self.model {
                ResponseModel::Direct(_) => {
                    let alpha = block.base_factor.solve_vec(&resid);
                    (resid.dot(&alpha), block.base_factor.log_det())
                }
                ResponseModel::Emulated { gps, .. } => {
                    // Σ_code: emulator predictive covariance across the
                    // calibration points at this θ.
                    let queries = DMatrix::from_fn(
                        n,
                        self.model.design_dim() + theta.len(),
                        |i, j| {
                            if j < self.model.design_dim() {
                                self.records[i].x.values[j]
                            } else {
                                theta[j - self.model.design_dim()]
                            }
                        },
                    );
                    let (_, sigma_code) = gps[r].predict(&queries)?;
                    let cov = &block.base_cov + sigma_code;
                    let factor =
                        cholesky_with_jitter(&cov, block.cov_scale, "likelihood covariance")?;
                    let alpha = factor.solve_vec(&resid);
                    (resid.dot(&alpha), factor.log_det())
                }
            };
            total += -0.5 * quad_logdet.1 - 0.5 * quad_logdet.0;
        }
        Ok(total)
    }
}

/// Sum the three covariance parts and verify the result factorizes.
pub fn assemble_covariance(
    sigma_exp_diag: &[f64],
    sigma_bias: &DMatrix<f64>,
    sigma_code: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = sigma_exp_diag.len();
    for (name, m) in [("sigma_bias", sigma_bias), ("sigma_code", sigma_code)] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "covariance part size",
                expected: n,
                actual: m.nrows(),
            });
        }
        check_symmetric(m, 1e-8, "covariance part")?;
        let _ = name;
    }
    if let Some(v) = sigma_exp_diag.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "experimental variances must be nonnegative, got {v}"
        )));
    }
    let mut sum = sigma_bias + sigma_code;
    for i in 0..n {
        sum[(i, i)] += sigma_exp_diag[i];
    }
    let scale = sum.diagonal().mean().max(f64::MIN_POSITIVE);
    cholesky_with_jitter(&sum, scale, "assembled covariance")?;
    Ok(sum)
}

/// Log-posterior of θ: log prior plus the Gaussian log-likelihood over the
/// active responses; −∞ outside the prior support.
pub fn log_posterior(theta: &[f64], ctx: &LikelihoodContext, prior: &PriorSpec) -> Result<f64> {
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("theta contains non-finite values".into()));
    }
    let lp = prior.log_density(theta);
    if lp == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lp + ctx.log_likelihood(theta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_model, DesignPoint, ResponseVector};
    use approx::assert_relative_eq;

    fn record(x: Vec<f64>, y: Vec<f64>, sd: Vec<f64>) -> ExperimentRecord {
        let labels = (0..y.len()).map(|i| format!("y{i}")).collect();
        ExperimentRecord::new(
            DesignPoint::new(x),
            ResponseVector { values: y, labels },
            sd,
        )
        .unwrap()
    }

    #[test]
    fn covariance_assembly_identities() {
        let exp = [1.0, 2.0];
        let zero = DMatrix::zeros(2, 2);
        let sum = assemble_covariance(&exp, &zero, &zero).unwrap();
        assert_eq!(sum, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]));

        let identity = DMatrix::identity(2, 2);
        let sum = assemble_covariance(&[1.0, 1.0], &identity, &identity).unwrap();
        assert_eq!(sum, 3.0 * DMatrix::identity(2, 2));
    }

    #[test]
    fn covariance_assembly_rejects_asymmetry() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.1, 1.0]);
        assert!(assemble_covariance(&[1.0, 1.0], &bad, &DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn adding_psd_bias_never_shrinks_the_diagonal() {
        let exp = [0.5, 0.5, 0.5];
        let zero = DMatrix::zeros(3, 3);
        let base = assemble_covariance(&exp, &zero, &zero).unwrap();
        let bias = DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.8, 0.3, 0.8, 1.0, 0.5, 0.3, 0.5, 0.6],
        );
        let with_bias = assemble_covariance(&exp, &bias, &zero).unwrap();
        for i in 0..3 {
            assert!(with_bias[(i, i)] >= base[(i, i)]);
        }
    }

    /// Identity model, one record, unit noise: the conjugate-Gaussian
    /// building block used across the MCMC tests.
    fn conjugate_ctx(y: f64) -> LikelihoodContext {
        let sim = builtin_model("conjugate_gaussian", &serde_json::json!({})).unwrap();
        let records = vec![record(vec![], vec![y], vec![1.0])];
        LikelihoodContext::new(records, ResponseModel::Direct(sim), None, vec![0]).unwrap()
    }

    #[test]
    fn outside_support_is_minus_infinity() {
        let ctx = conjugate_ctx(2.0);
        let prior = PriorSpec::uniform(&[(0.0, 5.0)]);
        assert_eq!(log_posterior(&[-1.0], &ctx, &prior).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn zero_residual_identity_covariance_is_log_inverse_volume() {
        // r = 0 and Σ = I: only the uniform prior's −log V remains.
        let ctx = conjugate_ctx(2.0);
        let prior = PriorSpec::uniform(&[(0.0, 5.0)]);
        let lp = log_posterior(&[2.0], &ctx, &prior).unwrap();
        assert_relative_eq!(lp, -(5.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn matches_dense_gaussian_oracle() {
        // Two records of a 1-parameter linear model with distinct noise;
        // the oracle evaluates the same density with an explicit inverse.
        let sim = crate::model::SimulatorSpec::new(
            "line",
            vec![(0.0, 1.0)],
            vec![(0.0, 10.0)],
            vec!["x".into()],
            vec!["slope".into()],
            vec!["y".into()],
            std::sync::Arc::new(|x: &[f64], t: &[f64]| vec![t[0] * x[0]]),
        );
        let records = vec![
            record(vec![0.3], vec![0.5], vec![0.2]),
            record(vec![0.9], vec![1.6], vec![0.4]),
        ];
        let ctx =
            LikelihoodContext::new(records.clone(), ResponseModel::Direct(sim), None, vec![0])
                .unwrap();
        let prior = PriorSpec::uniform(&[(0.0, 10.0)]);
        let theta = [1.7];

        let sigma = DMatrix::from_row_slice(2, 2, &[0.04, 0.0, 0.0, 0.16]);
        let sigma_inv = sigma.clone().try_inverse().unwrap();
        let r = DVector::from_vec(vec![
            0.5 - 1.7 * 0.3,
            1.6 - 1.7 * 0.9,
        ]);
        let quad = (r.transpose() * &sigma_inv * &r)[(0, 0)];
        let log_det: f64 = sigma.determinant();
        let expected = -(10.0f64).ln() - 0.5 * log_det.ln() - 0.5 * quad;

        let lp = log_posterior(&theta, &ctx, &prior).unwrap();
        assert_relative_eq!(lp, expected, epsilon = 1e-10);
    }

    #[test]
    fn record_order_does_not_matter() {
        let sim = crate::model::SimulatorSpec::new(
            "line",
            vec![(0.0, 1.0)],
            vec![(0.0, 10.0)],
            vec!["x".into()],
            vec!["slope".into()],
            vec!["y".into()],
            std::sync::Arc::new(|x: &[f64], t: &[f64]| vec![t[0] * x[0]]),
        );
        let recs = vec![
            record(vec![0.1], vec![0.2], vec![0.3]),
            record(vec![0.5], vec![0.9], vec![0.1]),
            record(vec![0.8], vec![1.1], vec![0.2]),
        ];
        let mut reversed = recs.clone();
        reversed.reverse();
        let prior = PriorSpec::uniform(&[(0.0, 10.0)]);
        let ctx1 =
            LikelihoodContext::new(recs, ResponseModel::Direct(sim.clone()), None, vec![0])
                .unwrap();
        let ctx2 =
            LikelihoodContext::new(reversed, ResponseModel::Direct(sim), None, vec![0]).unwrap();
        let a = log_posterior(&[1.3], &ctx1, &prior).unwrap();
        let b = log_posterior(&[1.3], &ctx2, &prior).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }
}
