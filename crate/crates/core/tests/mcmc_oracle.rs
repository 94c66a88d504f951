//! Sampler validation against closed-form and grid oracles.

use std::sync::Arc;

use sensid::calib::{
    log_posterior, run_mcmc, LikelihoodContext, Marginal, McmcConfig, PriorSpec, ResponseModel,
};
use sensid::model::{DesignPoint, ExperimentRecord, ResponseVector, SimulatorSpec};
use sensid::stats;

#[test]
fn conjugate_case_over_ten_seeds() {
    // Prior N(0,1), model y = θ, one observation y = 2 with unit noise:
    // posterior N(1, 0.5) on every seed.
    let prior = PriorSpec::Independent {
        marginals: vec![Marginal::Gaussian { mean: 0.0, std: 1.0 }],
    };
    for seed in 0..10 {
        let samples = run_mcmc(
            |t: &[f64]| Ok(-0.5 * t[0] * t[0] - 0.5 * (2.0 - t[0]).powi(2)),
            &prior,
            &McmcConfig::with_steps(50_000, seed),
        )
        .unwrap();
        let col = samples.column(0);
        let mean = stats::mean(&col);
        let var = stats::variance(&col);
        let mcse = (0.5f64).sqrt() / samples.ess[0].sqrt();
        assert!(
            (mean - 1.0).abs() < 3.0 * mcse,
            "seed {seed}: mean {mean}, mcse {mcse}"
        );
        assert!(
            (var - 0.5).abs() < 0.05,
            "seed {seed}: variance {var} vs 0.5"
        );
    }
}

/// Two-parameter line fit with three records, used for the grid oracle.
fn line_context() -> (LikelihoodContext, PriorSpec) {
    let sim = SimulatorSpec::new(
        "line2",
        vec![(0.0, 1.0)],
        vec![(0.0, 3.0), (0.0, 3.0)],
        vec!["x".into()],
        vec!["intercept".into(), "slope".into()],
        vec!["y".into()],
        Arc::new(|x: &[f64], t: &[f64]| vec![t[0] + t[1] * x[0]]),
    );
    let mk = |x: f64, y: f64| {
        ExperimentRecord::new(
            DesignPoint::new(vec![x]),
            ResponseVector {
                values: vec![y],
                labels: vec!["y".into()],
            },
            vec![0.25],
        )
        .unwrap()
    };
    // Data generated from intercept 1, slope 1.5 with small perturbations.
    let records = vec![mk(0.1, 1.17), mk(0.5, 1.72), mk(0.9, 2.38)];
    let ctx =
        LikelihoodContext::new(records, ResponseModel::Direct(sim), None, vec![0]).unwrap();
    let prior = PriorSpec::uniform(&[(0.0, 3.0), (0.0, 3.0)]);
    (ctx, prior)
}

#[test]
fn marginals_match_a_dense_grid_evaluation() {
    let (ctx, prior) = line_context();
    let bins = 50;
    let grid = 400;

    // Oracle: normalized exp(log-posterior) on a dense grid, reduced to
    // marginal bin masses.
    let mut marginal = vec![vec![0.0f64; bins]; 2];
    let mut total = 0.0;
    for i in 0..grid {
        let a = (i as f64 + 0.5) / grid as f64 * 3.0;
        for j in 0..grid {
            let b = (j as f64 + 0.5) / grid as f64 * 3.0;
            let w = log_posterior(&[a, b], &ctx, &prior).unwrap().exp();
            total += w;
            marginal[0][i * bins / grid] += w;
            marginal[1][j * bins / grid] += w;
        }
    }
    for m in &mut marginal {
        for v in m.iter_mut() {
            *v /= total;
        }
    }

    let samples = run_mcmc(
        |t: &[f64]| log_posterior(t, &ctx, &prior),
        &prior,
        &McmcConfig::with_steps(200_000, 12),
    )
    .unwrap();
    for k in 0..2 {
        let hist = stats::Histogram::new(&samples.column(k), 0.0, 3.0, bins);
        let tv = stats::total_variation(&hist.probabilities(), &marginal[k]);
        assert!(tv <= 0.05, "parameter {k}: total variation {tv}");
    }
}
