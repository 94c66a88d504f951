//! Kernel evaluation, the marginal likelihood and GP prediction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_with_jitter, CholFactor};
use crate::sa::SensitivityModel;

/// Regression basis for the GP mean function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Constant,
    Linear,
}

impl Basis {
    /// Number of regression coefficients for `d` input dimensions.
    pub fn size(&self, d: usize) -> usize {
        match self {
            Basis::Constant => 1,
            Basis::Linear => 1 + d,
        }
    }

    /// Design matrix H (n × size).
    pub fn matrix(&self, inputs: &DMatrix<f64>) -> DMatrix<f64> {
        let n = inputs.nrows();
        match self {
            Basis::Constant => DMatrix::from_element(n, 1, 1.0),
            Basis::Linear => {
                let mut h = DMatrix::zeros(n, 1 + inputs.ncols());
                for i in 0..n {
                    h[(i, 0)] = 1.0;
                    for j in 0..inputs.ncols() {
                        h[(i, j + 1)] = inputs[(i, j)];
                    }
                }
                h
            }
        }
    }
}

/// GP hyperparameters: regression coefficients β, process variance σ²,
/// per-input length-scale rates ω and roughness exponents p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpHyperparameters {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub omega: Vec<f64>,
    pub roughness: Vec<f64>,
}

impl GpHyperparameters {
    pub fn validate(&self, d: usize, basis: Basis) -> Result<()> {
        if self.omega.len() != d || self.roughness.len() != d {
            return Err(Error::DimensionMismatch {
                context: "GP hyperparameters",
                expected: d,
                actual: self.omega.len().min(self.roughness.len()),
            });
        }
        if self.beta.len() != basis.size(d) {
            return Err(Error::DimensionMismatch {
                context: "GP basis coefficients",
                expected: basis.size(d),
                actual: self.beta.len(),
            });
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "process variance must be positive, got {}",
                self.sigma2
            )));
        }
        if let Some(w) = self.omega.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "length-scale rates must be positive, got {w}"
            )));
        }
        if let Some(p) = self.roughness.iter().find(|p| !(**p > 0.0 && **p <= 2.0)) {
            return Err(Error::InvalidArgument(format!(
                "roughness exponents must lie in (0, 2], got {p}"
            )));
        }
        Ok(())
    }

    /// Kernel value between two points (without nugget).
    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut expo = 0.0;
        for k in 0..a.len() {
            let d = (a[k] - b[k]).abs();
            let p = self.roughness[k];
            // p == 2 is the common case; avoid powf there.
            expo += self.omega[k] * if p == 2.0 { d * d } else { d.powf(p) };
        }
        self.sigma2 * (-expo).exp()
    }
}

/// Kernel matrix over training rows, plus the per-point nugget.
fn kernel_matrix(hyper: &GpHyperparameters, inputs: &DMatrix<f64>, nugget: &[f64]) -> DMatrix<f64> {
    let n = inputs.nrows();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = hyper.sigma2 + nugget[i];
        let row_i: Vec<f64> = inputs.row(i).iter().copied().collect();
        for j in (i + 1)..n {
            let row_j: Vec<f64> = inputs.row(j).iter().copied().collect();
            let v = hyper.kernel(&row_i, &row_j);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cross-kernel matrix between training rows and query rows (n × m).
fn cross_kernel(
    hyper: &GpHyperparameters,
    inputs: &DMatrix<f64>,
    queries: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = inputs.nrows();
    let m = queries.nrows();
    let mut k = DMatrix::zeros(n, m);
    for i in 0..n {
        let row_i: Vec<f64> = inputs.row(i).iter().copied().collect();
        for j in 0..m {
            let row_j: Vec<f64> = queries.row(j).iter().copied().collect();
            k[(i, j)] = hyper.kernel(&row_i, &row_j);
        }
    }
    k
}

/// Exact duplicate rows with no nugget make the covariance singular; catch
/// them before factorization instead of letting jitter silently paper over
/// a genuinely rank-deficient matrix.
fn check_duplicates(inputs: &DMatrix<f64>, nugget: &[f64]) -> Result<()> {
    let n = inputs.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if nugget[i] == 0.0 && nugget[j] == 0.0 && inputs.row(i) == inputs.row(j) {
                return Err(Error::Conditioning {
                    context: "duplicate training inputs with zero nugget",
                    max_jitter: 0.0,
                });
            }
        }
    }
    Ok(())
}

fn validate_training(
    inputs: &DMatrix<f64>,
    outputs: &DVector<f64>,
    nugget: &[f64],
) -> Result<()> {
    if outputs.len() != inputs.nrows() {
        return Err(Error::DimensionMismatch {
            context: "GP training outputs",
            expected: inputs.nrows(),
            actual: outputs.len(),
        });
    }
    if nugget.len() != inputs.nrows() {
        return Err(Error::DimensionMismatch {
            context: "GP nugget vector",
            expected: inputs.nrows(),
            actual: nugget.len(),
        });
    }
    if let Some(v) = nugget.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "nugget variances must be nonnegative, got {v}"
        )));
    }
    Ok(())
}

/// Gaussian log-likelihood of the outputs under the GP prior:
/// `−n/2·ln 2π − ½ ln|K + diag(nugget)| − ½ rᵀ (K + diag(nugget))⁻¹ r`
/// with `r = y − Hβ`.
pub fn log_marginal_likelihood(
    hyper: &GpHyperparameters,
    inputs: &DMatrix<f64>,
    outputs: &DVector<f64>,
    nugget: &[f64],
    basis: Basis,
) -> Result<f64> {
    hyper.validate(inputs.ncols(), basis)?;
    validate_training(inputs, outputs, nugget)?;
    check_duplicates(inputs, nugget)?;
    let k = kernel_matrix(hyper, inputs, nugget);
    let factor = cholesky_with_jitter(&k, hyper.sigma2, "GP covariance")?;
    let h = basis.matrix(inputs);
    let r = outputs - &h * &hyper.beta;
    let alpha = factor.solve_vec(&r);
    let n = outputs.len() as f64;
    Ok(-0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * factor.log_det() - 0.5 * r.dot(&alpha))
}

/// A fitted Gaussian process: training data, hyperparameters, nugget and
/// the cached factorization of the regularized covariance.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "TrainedGpData", into = "TrainedGpData")]
pub struct TrainedGp {
    inputs: DMatrix<f64>,
    outputs: DVector<f64>,
    hyper: GpHyperparameters,
    nugget: Vec<f64>,
    basis: Basis,
    factor: CholFactor,
    /// `(K + diag(nugget))⁻¹ (y − Hβ)`.
    alpha: DVector<f64>,
}

impl std::fmt::Debug for TrainedGp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrainedGp")
            .field("n_train", &self.inputs.nrows())
            .field("dim", &self.inputs.ncols())
            .field("sigma2", &self.hyper.sigma2)
            .field("omega", &self.hyper.omega)
            .finish()
    }
}

impl TrainedGp {
    /// Build a GP with given hyperparameters (no fitting).
    pub fn with_hyperparameters(
        inputs: DMatrix<f64>,
        outputs: DVector<f64>,
        hyper: GpHyperparameters,
        nugget: Vec<f64>,
        basis: Basis,
    ) -> Result<Self> {
        hyper.validate(inputs.ncols(), basis)?;
        validate_training(&inputs, &outputs, &nugget)?;
        check_duplicates(&inputs, &nugget)?;
        let k = kernel_matrix(&hyper, &inputs, &nugget);
        let factor = cholesky_with_jitter(&k, hyper.sigma2, "GP covariance")?;
        let h = basis.matrix(&inputs);
        let r = &outputs - &h * &hyper.beta;
        let alpha = factor.solve_vec(&r);
        Ok(TrainedGp {
            inputs,
            outputs,
            hyper,
            nugget,
            basis,
            factor,
            alpha,
        })
    }

    pub fn hyper(&self) -> &GpHyperparameters {
        &self.hyper
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nugget(&self) -> &[f64] {
        &self.nugget
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn outputs(&self) -> &DVector<f64> {
        &self.outputs
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.ncols()
    }

    /// Training-data log marginal likelihood at the stored hyperparameters.
    pub fn score(&self) -> Result<f64> {
        log_marginal_likelihood(&self.hyper, &self.inputs, &self.outputs, &self.nugget, self.basis)
    }

    /// Conditional mean and covariance at the query rows.
    ///
    /// The covariance is the latent-function uncertainty (no observation
    /// noise added at the queries); its diagonal is clamped at zero.
    pub fn predict(&self, queries: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        if queries.ncols() != self.inputs.ncols() {
            return Err(Error::DimensionMismatch {
                context: "GP query dimension",
                expected: self.inputs.ncols(),
                actual: queries.ncols(),
            });
        }
        let k_tq = cross_kernel(&self.hyper, &self.inputs, queries);
        let h_q = self.basis.matrix(queries);
        let mean = &h_q * &self.hyper.beta + k_tq.transpose() * &self.alpha;

        let m = queries.nrows();
        let mut k_qq = DMatrix::zeros(m, m);
        for i in 0..m {
            k_qq[(i, i)] = self.hyper.sigma2;
            let row_i: Vec<f64> = queries.row(i).iter().copied().collect();
            for j in (i + 1)..m {
                let row_j: Vec<f64> = queries.row(j).iter().copied().collect();
                let v = self.hyper.kernel(&row_i, &row_j);
                k_qq[(i, j)] = v;
                k_qq[(j, i)] = v;
            }
        }
        let v = self.factor.forward_solve(&k_tq);
        let mut cov = k_qq - v.transpose() * v;
        crate::linalg::symmetrize(&mut cov);
        for i in 0..m {
            if cov[(i, i)] < 0.0 {
                cov[(i, i)] = 0.0;
            }
        }
        Ok((mean, cov))
    }

    /// Predictive mean at a single point (hot path for Monte Carlo use).
    pub fn predict_mean_one(&self, x: &[f64]) -> f64 {
        let mut mean = match self.basis {
            Basis::Constant => self.hyper.beta[0],
            Basis::Linear => {
                self.hyper.beta[0]
                    + x.iter()
                        .enumerate()
                        .map(|(k, v)| self.hyper.beta[k + 1] * v)
                        .sum::<f64>()
            }
        };
        for i in 0..self.inputs.nrows() {
            let row: Vec<f64> = self.inputs.row(i).iter().copied().collect();
            mean += self.hyper.kernel(&row, x) * self.alpha[i];
        }
        mean
    }
}

/// Free-function form of [`TrainedGp::predict`].
pub fn predict(gp: &TrainedGp, queries: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    gp.predict(queries)
}

/// Serialized form: training data and hyperparameters; the factorization is
/// rebuilt on load.
#[derive(Serialize, Deserialize)]
struct TrainedGpData {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<f64>,
    hyper: GpHyperparameters,
    nugget: Vec<f64>,
    basis: Basis,
}

impl From<TrainedGp> for TrainedGpData {
    fn from(gp: TrainedGp) -> Self {
        TrainedGpData {
            inputs: (0..gp.inputs.nrows())
                .map(|i| gp.inputs.row(i).iter().copied().collect())
                .collect(),
            outputs: gp.outputs.iter().copied().collect(),
            hyper: gp.hyper,
            nugget: gp.nugget,
            basis: gp.basis,
        }
    }
}

impl TryFrom<TrainedGpData> for TrainedGp {
    type Error = Error;

    fn try_from(data: TrainedGpData) -> Result<Self> {
        let n = data.inputs.len();
        let d = data.inputs.first().map_or(0, |r| r.len());
        let inputs = DMatrix::from_fn(n, d, |i, j| data.inputs[i][j]);
        TrainedGp::with_hyperparameters(
            inputs,
            DVector::from_vec(data.outputs),
            data.hyper,
            data.nugget,
            data.basis,
        )
    }
}

/// A set of single-output GPs viewed as one multi-response model (one GP
/// per response label), evaluated by predictive mean.
pub struct EmulatorSet {
    pub gps: Vec<TrainedGp>,
    pub labels: Vec<String>,
}

impl SensitivityModel for EmulatorSet {
    fn input_dim(&self) -> usize {
        self.gps.first().map_or(0, |g| g.input_dim())
    }
    fn output_dim(&self) -> usize {
        self.gps.len()
    }
    fn output_labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn eval(&self, input: &[f64]) -> Vec<f64> {
        self.gps.iter().map(|g| g.predict_mean_one(input)).collect()
    }
}
