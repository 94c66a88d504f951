//! Hyperparameter estimation by maximum likelihood.
//!
//! β is profiled out in closed form at every objective evaluation, so the
//! search runs over (log σ², log ω₁..ω_d) only — plus the roughness
//! exponents when their optimization is requested. Inputs are standardized
//! to the unit box and outputs centered and scaled during the search; the
//! returned GP carries back-transformed hyperparameters over the raw data.

use nalgebra::{DMatrix, DVector};

use crate::design::latin_hypercube;
use crate::error::{Error, Result};
use crate::linalg::cholesky_with_jitter;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::rng::rng_for;

use super::gp::{Basis, GpHyperparameters, TrainedGp};

/// Box constraints for the hyperparameter search, expressed in the
/// standardized space (inputs in the unit box, outputs with unit variance).
#[derive(Debug, Clone)]
pub struct MleBounds {
    pub sigma2: (f64, f64),
    pub omega: (f64, f64),
    pub roughness: (f64, f64),
}

/// Default search box: generous on both sides of σ² = 1 and length-scales
/// from 10 units down to ~3% of a unit interval.
pub fn default_mle_bounds() -> MleBounds {
    MleBounds {
        sigma2: (1e-6, 1e3),
        omega: (1e-2, 1e3),
        roughness: (0.5, 2.0),
    }
}

#[derive(Debug, Clone)]
pub struct MleOptions {
    pub bounds: MleBounds,
    /// Latin-hypercube multi-starts for the simplex search.
    pub n_starts: usize,
    /// Optimize the roughness exponents p (held at 2 when false).
    pub optimize_roughness: bool,
    /// Iteration cap per simplex run.
    pub max_iters: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            bounds: default_mle_bounds(),
            n_starts: 8,
            optimize_roughness: false,
            max_iters: 200,
        }
    }
}

/// One multi-start initial point, with its profiled β and the likelihood
/// there, back-transformed to raw data space so it can be recomputed
/// independently.
#[derive(Debug, Clone)]
pub struct MleStart {
    pub hyper: GpHyperparameters,
    pub log_likelihood: f64,
}

/// Fit report: the starts and the winning likelihood (raw space).
#[derive(Debug, Clone)]
pub struct MleReport {
    pub starts: Vec<MleStart>,
    pub best_log_likelihood: f64,
}

struct Standardization {
    input_lo: Vec<f64>,
    input_range: Vec<f64>,
    output_mean: f64,
    output_scale: f64,
}

impl Standardization {
    fn from_data(inputs: &DMatrix<f64>, outputs: &DVector<f64>) -> Self {
        let d = inputs.ncols();
        let mut input_lo = vec![0.0; d];
        let mut input_range = vec![1.0; d];
        for j in 0..d {
            let col = inputs.column(j);
            let lo = col.min();
            let hi = col.max();
            input_lo[j] = lo;
            input_range[j] = if hi > lo { hi - lo } else { 1.0 };
        }
        let ys: Vec<f64> = outputs.iter().copied().collect();
        let mean = crate::stats::mean(&ys);
        let sd = crate::stats::std_dev(&ys);
        Standardization {
            input_lo,
            input_range,
            output_mean: mean,
            output_scale: if sd > 0.0 { sd } else { 1.0 },
        }
    }

    fn apply(&self, inputs: &DMatrix<f64>, outputs: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let mut x = inputs.clone();
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                x[(i, j)] = (x[(i, j)] - self.input_lo[j]) / self.input_range[j];
            }
        }
        let y = outputs.map(|v| (v - self.output_mean) / self.output_scale);
        (x, y)
    }

    /// Map standardized-space hyperparameters back to raw data space.
    fn hyper_to_raw(&self, hyper: &GpHyperparameters, basis: Basis) -> GpHyperparameters {
        let d = hyper.omega.len();
        let omega: Vec<f64> = (0..d)
            .map(|k| hyper.omega[k] / self.input_range[k].powf(hyper.roughness[k]))
            .collect();
        let sigma2 = hyper.sigma2 * self.output_scale * self.output_scale;
        let beta = match basis {
            Basis::Constant => {
                DVector::from_vec(vec![self.output_mean + self.output_scale * hyper.beta[0]])
            }
            Basis::Linear => {
                let mut b = DVector::zeros(1 + d);
                let mut intercept = self.output_mean + self.output_scale * hyper.beta[0];
                for k in 0..d {
                    let slope = self.output_scale * hyper.beta[k + 1] / self.input_range[k];
                    intercept -= slope * self.input_lo[k];
                    b[k + 1] = slope;
                }
                b[0] = intercept;
                b
            }
        };
        GpHyperparameters {
            beta,
            sigma2,
            omega,
            roughness: hyper.roughness.clone(),
        }
    }
}

/// Profiled negative log likelihood in standardized space; returns the
/// profiled β alongside. `None` stands for a conditioning failure.
fn profiled_objective(
    sigma2: f64,
    omega: &[f64],
    roughness: &[f64],
    inputs: &DMatrix<f64>,
    outputs: &DVector<f64>,
    nugget: &[f64],
    basis: Basis,
) -> Option<(f64, DVector<f64>)> {
    let d = inputs.ncols();
    let n = inputs.nrows();
    let hyper = GpHyperparameters {
        beta: DVector::zeros(basis.size(d)),
        sigma2,
        omega: omega.to_vec(),
        roughness: roughness.to_vec(),
    };
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = sigma2 + nugget[i];
        let row_i: Vec<f64> = inputs.row(i).iter().copied().collect();
        for j in (i + 1)..n {
            let row_j: Vec<f64> = inputs.row(j).iter().copied().collect();
            let v = hyper.kernel(&row_i, &row_j);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let factor = cholesky_with_jitter(&k, sigma2, "MLE covariance").ok()?;
    let h = basis.matrix(inputs);
    let w = factor.solve_mat(&h);
    let m = h.transpose() * &w;
    let rhs = w.transpose() * outputs;
    let beta = m.cholesky()?.solve(&rhs);
    let r = outputs - &h * &beta;
    let alpha = factor.solve_vec(&r);
    let lml = -0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln()
        - 0.5 * factor.log_det()
        - 0.5 * r.dot(&alpha);
    lml.is_finite().then_some((-lml, beta))
}

/// The Latin-hypercube start points of the search, in the log space the
/// optimizer walks. Exposed so the multi-start dominance property can be
/// verified from outside.
pub fn mle_start_points(log_bounds: &[(f64, f64)], n_starts: usize, seed: u64) -> Vec<Vec<f64>> {
    latin_hypercube(log_bounds, n_starts, &mut rng_for(seed, 0x517a))
        .expect("valid bounds")
}

/// Fit GP hyperparameters by multi-start bounded Nelder–Mead over the
/// marginal likelihood.
pub fn fit_mle(
    inputs: &DMatrix<f64>,
    outputs: &DVector<f64>,
    nugget: &[f64],
    basis: Basis,
    options: &MleOptions,
    seed: u64,
) -> Result<TrainedGp> {
    fit_mle_with_report(inputs, outputs, nugget, basis, options, seed).map(|(gp, _)| gp)
}

/// [`fit_mle`] plus the multi-start report.
pub fn fit_mle_with_report(
    inputs: &DMatrix<f64>,
    outputs: &DVector<f64>,
    nugget: &[f64],
    basis: Basis,
    options: &MleOptions,
    seed: u64,
) -> Result<(TrainedGp, MleReport)> {
    let n = inputs.nrows();
    let d = inputs.ncols();
    if n < d + 2 {
        return Err(Error::InvalidArgument(format!(
            "GP fit needs at least d_in + 2 = {} training points, got {n}",
            d + 2
        )));
    }
    if options.n_starts == 0 {
        return Err(Error::InvalidArgument("fit needs at least one start".into()));
    }
    let b = &options.bounds;
    for (name, (lo, hi)) in [
        ("sigma2", b.sigma2),
        ("omega", b.omega),
        ("roughness", b.roughness),
    ] {
        if !(hi > lo && lo > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bounds for {name} must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
    }

    let std = Standardization::from_data(inputs, outputs);
    let (x, y) = std.apply(inputs, outputs);
    let scale2 = std.output_scale * std.output_scale;
    let nugget_std: Vec<f64> = nugget.iter().map(|v| v / scale2).collect();

    // Reject exactly singular setups before searching.
    super::gp::log_marginal_likelihood(
        &GpHyperparameters {
            beta: DVector::zeros(basis.size(d)),
            sigma2: 1.0,
            omega: vec![1.0; d],
            roughness: vec![2.0; d],
        },
        &x,
        &y,
        &nugget_std,
        basis,
    )
    .map_err(|e| match e {
        Error::Conditioning { .. } => e,
        other => other,
    })?;

    // Search space: log σ², log ω per dimension, then p per dimension when
    // roughness is free.
    let mut log_bounds: Vec<(f64, f64)> = vec![(b.sigma2.0.ln(), b.sigma2.1.ln())];
    log_bounds.extend(std::iter::repeat_n((b.omega.0.ln(), b.omega.1.ln()), d));
    if options.optimize_roughness {
        log_bounds.extend(std::iter::repeat_n(b.roughness, d));
    }

    let unpack = |z: &[f64]| -> (f64, Vec<f64>, Vec<f64>) {
        let sigma2 = z[0].exp();
        let omega: Vec<f64> = z[1..=d].iter().map(|v| v.exp()).collect();
        let roughness: Vec<f64> = if options.optimize_roughness {
            z[d + 1..=2 * d].to_vec()
        } else {
            vec![2.0; d]
        };
        (sigma2, omega, roughness)
    };

    let objective = |z: &[f64]| -> f64 {
        let (sigma2, omega, roughness) = unpack(z);
        match profiled_objective(sigma2, &omega, &roughness, &x, &y, &nugget_std, basis) {
            Some((neg_lml, _)) => neg_lml,
            None => f64::INFINITY,
        }
    };

    let starts = mle_start_points(&log_bounds, options.n_starts, seed);
    let nm_opts = NelderMeadOptions {
        max_iters: options.max_iters,
        f_tol: 1e-7,
        x_tol: 1e-7,
        initial_step: 0.15,
    };

    let mut report_starts = Vec::with_capacity(starts.len());
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in &starts {
        let (s0, w0, p0) = unpack(start);
        if let Some((neg, beta)) =
            profiled_objective(s0, &w0, &p0, &x, &y, &nugget_std, basis)
        {
            let std_hyper = GpHyperparameters {
                beta,
                sigma2: s0,
                omega: w0,
                roughness: p0,
            };
            report_starts.push(MleStart {
                hyper: std.hyper_to_raw(&std_hyper, basis),
                log_likelihood: -neg - (n as f64) * std.output_scale.ln(),
            });
        }
        let result = nelder_mead(&objective, start, &log_bounds, &nm_opts);
        if result.f.is_finite() {
            match &best {
                Some((f, _)) if *f <= result.f => {}
                _ => best = Some((result.f, result.x)),
            }
        }
    }

    let (best_f, best_z) = best.ok_or(Error::Conditioning {
        context: "every MLE start failed to factorize",
        max_jitter: crate::linalg::JITTER_MAX,
    })?;
    let (sigma2, omega, roughness) = unpack(&best_z);
    let (_, beta) = profiled_objective(sigma2, &omega, &roughness, &x, &y, &nugget_std, basis)
        .ok_or(Error::Conditioning {
            context: "MLE optimum failed to factorize",
            max_jitter: crate::linalg::JITTER_MAX,
        })?;

    let std_hyper = GpHyperparameters {
        beta,
        sigma2,
        omega,
        roughness,
    };
    let raw_hyper = std.hyper_to_raw(&std_hyper, basis);
    let gp = TrainedGp::with_hyperparameters(
        inputs.clone(),
        outputs.clone(),
        raw_hyper,
        nugget.to_vec(),
        basis,
    )?;
    let report = MleReport {
        starts: report_starts,
        // Same Jacobian shift as the starts, so scores are comparable.
        best_log_likelihood: -best_f - (n as f64) * std.output_scale.ln(),
    };
    Ok((gp, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_outputs_pin_sigma2_to_the_lower_bound() {
        let inputs = DMatrix::from_row_slice(6, 1, &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        let outputs = DVector::from_element(6, 3.25);
        let gp = fit_mle(
            &inputs,
            &outputs,
            &[0.0; 6],
            Basis::Constant,
            &MleOptions::default(),
            1,
        )
        .unwrap();
        assert_relative_eq!(gp.hyper().beta[0], 3.25, epsilon = 1e-9);
        // Output scale collapses to 1, so the raw bound applies directly.
        let bound = default_mle_bounds().sigma2.0;
        assert!(
            gp.hyper().sigma2 <= bound * 1.01,
            "sigma2 {} should sit at the lower bound {bound}",
            gp.hyper().sigma2
        );
    }

    #[test]
    fn too_few_points_is_an_error() {
        let inputs = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let outputs = DVector::from_vec(vec![1.0, 2.0]);
        assert!(fit_mle(
            &inputs,
            &outputs,
            &[0.0; 2],
            Basis::Constant,
            &MleOptions::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn duplicated_rows_with_zero_nugget_fail() {
        let inputs = DMatrix::from_row_slice(4, 1, &[0.0, 0.5, 0.5, 1.0]);
        let outputs = DVector::from_vec(vec![0.0, 1.0, 2.0, 3.0]);
        let err = fit_mle(
            &inputs,
            &outputs,
            &[0.0; 4],
            Basis::Constant,
            &MleOptions::default(),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Conditioning { .. }), "{err:?}");
    }

    #[test]
    fn fit_recovers_a_smooth_function() {
        // y = sin(2x) on [0, 3]: the fitted GP should interpolate well
        // between training points.
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 3.0 / 11.0).collect();
        let inputs = DMatrix::from_fn(12, 1, |i, _| xs[i]);
        let outputs = DVector::from_fn(12, |i, _| (2.0 * xs[i]).sin());
        let gp = fit_mle(
            &inputs,
            &outputs,
            &[1e-10; 12],
            Basis::Constant,
            &MleOptions::default(),
            3,
        )
        .unwrap();
        for q in [0.4, 1.13, 2.77] {
            let query = DMatrix::from_row_slice(1, 1, &[q]);
            let (mean, _) = gp.predict(&query).unwrap();
            assert!(
                (mean[0] - (2.0 * q).sin()).abs() < 0.01,
                "at {q}: {} vs {}",
                mean[0],
                (2.0 * q).sin()
            );
        }
    }

    #[test]
    fn result_dominates_every_start() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let inputs = DMatrix::from_fn(10, 1, |i, _| xs[i]);
        let outputs = DVector::from_fn(10, |i, _| (6.0 * xs[i]).cos() + 0.5 * xs[i]);
        let (gp, report) = fit_mle_with_report(
            &inputs,
            &outputs,
            &[1e-8; 10],
            Basis::Constant,
            &MleOptions::default(),
            7,
        )
        .unwrap();
        let final_score = gp.score().unwrap();
        assert_relative_eq!(final_score, report.best_log_likelihood, epsilon = 1e-6);
        for (i, start) in report.starts.iter().enumerate() {
            assert!(
                final_score >= start.log_likelihood - 1e-9,
                "start {i}: {} beats final {final_score}",
                start.log_likelihood
            );
        }
    }
}
