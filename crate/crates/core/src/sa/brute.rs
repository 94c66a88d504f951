//! Double-loop Monte Carlo oracle for the defining conditional moments.
//!
//! Evaluates the variance of conditional expectations and the expectation
//! of conditional variances literally, with nothing shared with the
//! pick-freeze estimators, so the two can cross-check each other.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::stats;

use super::{InputDistribution, SensitivityModel, SobolTable};

/// Oracle output: the Sobol' table plus the raw conditional-moment pieces,
/// so the law-of-total-variance identity can be checked directly.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub table: SobolTable,
    /// `E{Var(Y|X_i)}`, indexed `[input][response]`.
    pub mean_conditional_variance: Vec<Vec<f64>>,
    /// `Var{E(Y|X_i)}`, indexed `[input][response]`.
    pub variance_conditional_mean: Vec<Vec<f64>>,
    /// Pooled `Var(Y)` from the same draws, indexed `[input][response]`.
    pub total_variance: Vec<Vec<f64>>,
}

impl BruteForceResult {
    /// Worst relative violation of
    /// `E{Var(Y|X_i)} + Var{E(Y|X_i)} = Var(Y)` over all cells.
    pub fn max_identity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.total_variance.len() {
            for r in 0..self.total_variance[i].len() {
                let lhs = self.mean_conditional_variance[i][r] + self.variance_conditional_mean[i][r];
                let v = self.total_variance[i][r];
                worst = worst.max((lhs - v).abs() / v);
            }
        }
        worst
    }
}

/// Estimate Sobol' indices by nested sampling.
///
/// For each input `i`, the outer loop draws `X_i` and the inner loop draws
/// the complement, giving `Var{E(Y|X_i)}` (main effect) and
/// `E{Var(Y|X_i)}`; a second pass with the roles flipped gives
/// `E{Var(Y|X_~i)}` (total effect). Costs `2·d·n_outer·n_inner` model runs.
pub fn brute_force_sobol(
    model: &dyn SensitivityModel,
    dists: &[InputDistribution],
    n_outer: usize,
    n_inner: usize,
    seed: u64,
) -> Result<BruteForceResult> {
    if model.input_dim() != dists.len() {
        return Err(Error::DimensionMismatch {
            context: "sensitivity inputs",
            expected: model.input_dim(),
            actual: dists.len(),
        });
    }
    if n_outer < 2 || n_inner < 2 {
        return Err(Error::InvalidArgument(
            "brute force needs n_outer >= 2 and n_inner >= 2".into(),
        ));
    }
    for d in dists {
        d.validate()?;
    }
    let d = dists.len();
    let m = model.output_dim();

    let mut main = vec![vec![0.0; m]; d];
    let mut total = vec![vec![0.0; m]; d];
    let mut e_var = vec![vec![0.0; m]; d];
    let mut var_e = vec![vec![0.0; m]; d];
    let mut var_y = vec![vec![0.0; m]; d];

    for i in 0..d {
        // Main-effect pass: fix X_i in the outer loop.
        let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..n_outer)
            .into_par_iter()
            .map(|o| {
                let mut rng = rng_for(seed, (i as u64) << 32 | o as u64);
                let xi = dists[i].sample(&mut rng);
                let mut evals: Vec<Vec<f64>> = Vec::with_capacity(n_inner);
                for _ in 0..n_inner {
                    let mut x: Vec<f64> =
                        dists.iter().map(|dist| dist.sample(&mut rng)).collect();
                    x[i] = xi;
                    evals.push(model.eval(&x));
                }
                let mut means = vec![0.0; m];
                let mut vars = vec![0.0; m];
                let mut sq = vec![0.0; m];
                for e in &evals {
                    for r in 0..m {
                        means[r] += e[r];
                        sq[r] += e[r] * e[r];
                    }
                }
                for r in 0..m {
                    means[r] /= n_inner as f64;
                    vars[r] = (sq[r] - n_inner as f64 * means[r] * means[r])
                        / (n_inner as f64 - 1.0);
                }
                (means, vars, sq)
            })
            .collect();

        for r in 0..m {
            let inner_means: Vec<f64> = rows.iter().map(|t| t.0[r]).collect();
            let inner_vars: Vec<f64> = rows.iter().map(|t| t.1[r]).collect();
            // Pooled variance over every evaluation in this pass.
            let grand_mean = stats::mean(&inner_means);
            let total_sq: f64 = rows.iter().map(|t| t.2[r]).sum();
            let n_all = (n_outer * n_inner) as f64;
            let pooled = (total_sq - n_all * grand_mean * grand_mean) / (n_all - 1.0);
            if !(pooled > 0.0) {
                return Err(Error::ZeroVariance(model.output_labels()[r].clone()));
            }
            var_e[i][r] = stats::variance(&inner_means);
            e_var[i][r] = stats::mean(&inner_vars);
            var_y[i][r] = pooled;
            main[i][r] = var_e[i][r] / pooled;
        }

        // Total-effect pass: fix the complement in the outer loop and vary
        // only X_i inside, so the inner variance is Var(Y|X_~i).
        let rows_t: Vec<Vec<f64>> = (0..n_outer)
            .into_par_iter()
            .map(|o| {
                let mut rng = rng_for(seed, (1u64 << 63) | (i as u64) << 32 | o as u64);
                let frozen: Vec<f64> = dists.iter().map(|dist| dist.sample(&mut rng)).collect();
                let mut evals: Vec<Vec<f64>> = Vec::with_capacity(n_inner);
                for _ in 0..n_inner {
                    let mut x = frozen.clone();
                    x[i] = dists[i].sample(&mut rng);
                    evals.push(model.eval(&x));
                }
                (0..m)
                    .map(|r| {
                        let col: Vec<f64> = evals.iter().map(|e| e[r]).collect();
                        stats::variance(&col)
                    })
                    .collect()
            })
            .collect();

        for r in 0..m {
            let inner_vars: Vec<f64> = rows_t.iter().map(|t| t[r]).collect();
            total[i][r] = stats::mean(&inner_vars) / var_y[i][r];
        }
    }

    let zeros = vec![vec![0.0; m]; d];
    Ok(BruteForceResult {
        table: SobolTable {
            input_names: (0..d).map(|i| format!("x{}", i + 1)).collect(),
            response_names: model.output_labels(),
            main,
            total,
            main_ci: zeros.clone(),
            total_ci: zeros,
            second_order: None,
            estimator_n: n_outer * n_inner,
        },
        mean_conditional_variance: e_var,
        variance_conditional_mean: var_e,
        total_variance: var_y,
    })
}
