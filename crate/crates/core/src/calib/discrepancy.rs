//! Model-discrepancy GPs from validation residuals.
//!
//! The computer model runs over the validation records at a reference
//! parameter value (nominal values or the prior mean); the differences
//! between model outputs and observations become training data for one GP
//! per response, with the observation-noise variances as per-point nugget.
//! No prior on the discrepancy is involved anywhere.

use nalgebra::{DMatrix, DVector};

use crate::emulator::{fit_mle, Basis, MleOptions, TrainedGp};
use crate::error::{Error, Result};
use crate::model::ExperimentRecord;
use crate::rng::derive_seed;

use super::likelihood::ResponseModel;

/// Fit one discrepancy GP per response from validation residuals.
pub fn build_discrepancy(
    model: &ResponseModel,
    validation: &[ExperimentRecord],
    theta_ref: &[f64],
    options: &MleOptions,
    seed: u64,
) -> Result<Vec<TrainedGp>> {
    if validation.is_empty() {
        return Err(Error::InvalidArgument(
            "discrepancy construction needs a nonempty validation set".into(),
        ));
    }
    let design_dim = validation[0].x.values.len();
    if design_dim == 0 {
        return Err(Error::InvalidArgument(
            "discrepancy needs design variables; this model has none".into(),
        ));
    }
    let n = validation.len();
    let m = model.response_dim();

    let inputs = DMatrix::from_fn(n, design_dim, |i, j| validation[i].x.values[j]);
    let model_out: Vec<Vec<f64>> = validation
        .iter()
        .map(|rec| model.eval_mean(&rec.x.values, theta_ref))
        .collect();

    let mut gps = Vec::with_capacity(m);
    for r in 0..m {
        let residuals =
            DVector::from_fn(n, |i, _| validation[i].observed.values[r] - model_out[i][r]);
        // Observation noise enters as the nugget.
        let nugget: Vec<f64> = validation
            .iter()
            .map(|rec| rec.noise_std[r] * rec.noise_std[r])
            .collect();
        let label = model.response_labels()[r].clone();
        let gp = fit_mle(
            &inputs,
            &residuals,
            &nugget,
            Basis::Constant,
            options,
            derive_seed(seed, r as u64),
        )
        .map_err(|e| e.labeled(label))?;
        gps.push(gp);
    }
    Ok(gps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::latin_hypercube;
    use crate::model::{
        make_benchmark, generate_dataset, BenchmarkConfig, DesignPoint,
    };
    use crate::rng::rng_from;

    fn validation_records(noise: f64, amp: f64, n: usize) -> (ResponseModel, Vec<ExperimentRecord>) {
        let config = BenchmarkConfig {
            discrepancy_amplitude: amp,
            noise_std: noise,
            ..Default::default()
        };
        let truth = make_benchmark(&config).unwrap();
        let design: Vec<DesignPoint> =
            latin_hypercube(&truth.simulator.design_bounds, n, &mut rng_from(2))
                .unwrap()
                .into_iter()
                .map(DesignPoint::new)
                .collect();
        let records = generate_dataset(&truth, &design, 3).unwrap();
        (ResponseModel::Direct(truth.simulator.clone()), records)
    }

    #[test]
    fn perfect_model_gives_zero_discrepancy() {
        // Model ≡ reality, zero noise: residuals vanish, so the GP mean at
        // the validation points must be zero too.
        let (model, records) = validation_records(0.0, 0.0, 12);
        let theta_ref = vec![1.0; 5];
        let gps = build_discrepancy(&model, &records, &theta_ref, &Default::default(), 1).unwrap();
        for (r, gp) in gps.iter().enumerate() {
            for rec in &records {
                let q = DMatrix::from_fn(1, 4, |_, j| rec.x.values[j]);
                let (mean, _) = gp.predict(&q).unwrap();
                assert!(
                    mean[0].abs() <= 1e-8,
                    "response {r}: discrepancy mean {} at a zero-residual point",
                    mean[0]
                );
            }
        }
    }

    #[test]
    fn recovers_an_injected_constant_shift() {
        // Direct regression sanity run: residuals identically 0.1 and no
        // noise — the fitted discrepancy must predict 0.1 across the hull.
        let (model, mut records) = validation_records(0.0, 0.0, 12);
        let theta_ref = vec![1.0; 5];
        for rec in &mut records {
            for v in &mut rec.observed.values {
                *v += 0.1;
            }
        }
        let gps = build_discrepancy(&model, &records, &theta_ref, &Default::default(), 1).unwrap();
        for gp in &gps {
            for rec in &records {
                let q = DMatrix::from_fn(1, 4, |_, j| rec.x.values[j]);
                let (mean, _) = gp.predict(&q).unwrap();
                assert!(
                    (mean[0] - 0.1).abs() < 1e-3,
                    "constant shift not recovered: {}",
                    mean[0]
                );
            }
        }
    }

    #[test]
    fn empty_validation_is_rejected() {
        let (model, _) = validation_records(0.0, 0.0, 4);
        assert!(build_discrepancy(&model, &[], &[1.0; 5], &Default::default(), 0).is_err());
    }
}
