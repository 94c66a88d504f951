//! Simulator abstraction, analytic test functions, the synthetic
//! multi-response benchmark and experimental-data generation.
//!
//! A simulator is a deterministic map `(x, θ) → y` from design variables and
//! calibration parameters to a response vector. Experimental records follow
//! the model updating equation: observations are the truth model at the true
//! parameters plus a smooth discrepancy in `x` plus Gaussian noise.

pub mod benchmark;
pub mod builtins;
mod dataset;

pub use benchmark::{make_benchmark, BenchmarkConfig, BenchmarkTruth, SobolPattern};
pub use builtins::builtin_model;
pub use dataset::generate_dataset;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in design-variable space (one experimental condition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub values: Vec<f64>,
}

impl DesignPoint {
    pub fn new(values: Vec<f64>) -> Self {
        DesignPoint { values }
    }
}

/// A vector of calibration parameters θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationVector {
    pub values: Vec<f64>,
}

impl CalibrationVector {
    pub fn new(values: Vec<f64>) -> Self {
        CalibrationVector { values }
    }
}

/// A labeled response vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseVector {
    pub values: Vec<f64>,
    pub labels: Vec<String>,
}

/// One physical test: a design point, the measured responses and the
/// per-response measurement-noise standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub x: DesignPoint,
    pub observed: ResponseVector,
    pub noise_std: Vec<f64>,
}

impl ExperimentRecord {
    pub fn new(x: DesignPoint, observed: ResponseVector, noise_std: Vec<f64>) -> Result<Self> {
        if observed.values.len() != noise_std.len() {
            return Err(Error::DimensionMismatch {
                context: "experiment record noise_std",
                expected: observed.values.len(),
                actual: noise_std.len(),
            });
        }
        if let Some(s) = noise_std.iter().find(|s| !(**s >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "noise_std must be nonnegative, got {s}"
            )));
        }
        Ok(ExperimentRecord { x, observed, noise_std })
    }
}

type Evaluator = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// A deterministic simulator with declared dimensions and design bounds.
///
/// The evaluator must be pure: identical `(x, θ)` give identical output, and
/// it must be callable concurrently.
#[derive(Clone)]
pub struct SimulatorSpec {
    pub name: String,
    pub design_dim: usize,
    pub calib_dim: usize,
    pub response_dim: usize,
    /// Closed intervals per design dimension.
    pub design_bounds: Vec<(f64, f64)>,
    /// Reference box per calibration dimension (natural prior support,
    /// used for space-filling designs and default priors).
    pub calib_bounds: Vec<(f64, f64)>,
    /// Nominal calibration values (the model's as-shipped parameters, used
    /// as the default reference point for discrepancy construction).
    pub calib_nominal: Vec<f64>,
    pub design_labels: Vec<String>,
    pub response_labels: Vec<String>,
    pub calib_labels: Vec<String>,
    evaluator: Evaluator,
}

impl fmt::Debug for SimulatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimulatorSpec")
            .field("name", &self.name)
            .field("design_dim", &self.design_dim)
            .field("calib_dim", &self.calib_dim)
            .field("response_dim", &self.response_dim)
            .finish()
    }
}

impl SimulatorSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        design_bounds: Vec<(f64, f64)>,
        calib_bounds: Vec<(f64, f64)>,
        design_labels: Vec<String>,
        calib_labels: Vec<String>,
        response_labels: Vec<String>,
        evaluator: Evaluator,
    ) -> Self {
        let calib_nominal = calib_bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        SimulatorSpec {
            name: name.into(),
            design_dim: design_bounds.len(),
            calib_dim: calib_bounds.len(),
            response_dim: response_labels.len(),
            design_bounds,
            calib_bounds,
            calib_nominal,
            design_labels,
            calib_labels,
            response_labels,
            evaluator,
        }
    }

    /// Override the nominal calibration values (defaults to the midpoint
    /// of the reference box).
    pub fn with_nominal(mut self, nominal: Vec<f64>) -> Self {
        assert_eq!(nominal.len(), self.calib_dim);
        self.calib_nominal = nominal;
        self
    }

    /// Raw evaluation without validation; used on hot paths after inputs
    /// have been checked once.
    pub fn eval_unchecked(&self, x: &[f64], theta: &[f64]) -> Vec<f64> {
        (self.evaluator)(x, theta)
    }

    /// Check a design point against the declared bounds.
    pub fn check_design(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.design_dim {
            return Err(Error::DimensionMismatch {
                context: "design point",
                expected: self.design_dim,
                actual: x.len(),
            });
        }
        for (i, (&v, &(lo, hi))) in x.iter().zip(&self.design_bounds).enumerate() {
            if !(v >= lo && v <= hi) {
                return Err(Error::OutOfBounds { index: i, value: v, lo, hi });
            }
        }
        Ok(())
    }
}

/// Evaluate a simulator at `(x, θ)` after validating dimensions and bounds.
pub fn evaluate(
    sim: &SimulatorSpec,
    x: &DesignPoint,
    theta: &CalibrationVector,
) -> Result<ResponseVector> {
    sim.check_design(&x.values)?;
    if theta.values.len() != sim.calib_dim {
        return Err(Error::DimensionMismatch {
            context: "calibration vector",
            expected: sim.calib_dim,
            actual: theta.values.len(),
        });
    }
    Ok(ResponseVector {
        values: sim.eval_unchecked(&x.values, &theta.values),
        labels: sim.response_labels.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_additive_at_zero_is_zero() {
        let sim = builtin_model(
            "linear_additive",
            &serde_json::json!({ "coefficients": [1.0, 2.0] }),
        )
        .unwrap();
        assert_eq!(sim.calib_dim, 2);
        assert_eq!(sim.response_dim, 1);
        let y = evaluate(
            &sim,
            &DesignPoint::new(vec![]),
            &CalibrationVector::new(vec![0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(y.values, vec![0.0]);
    }

    #[test]
    fn ishigami_shape_and_zero() {
        let sim = builtin_model("ishigami", &serde_json::json!({})).unwrap();
        assert_eq!(sim.calib_dim, 3);
        assert_eq!(sim.response_dim, 1);
        assert_eq!(sim.calib_bounds[0], (-std::f64::consts::PI, std::f64::consts::PI));
        let y = sim.eval_unchecked(&[], &[0.0, 0.0, 0.0]);
        assert_relative_eq!(y[0], 0.0);
    }

    #[test]
    fn conjugate_gaussian_is_identity() {
        let sim = builtin_model("conjugate_gaussian", &serde_json::json!({})).unwrap();
        assert_eq!(sim.calib_dim, 1);
        let y = sim.eval_unchecked(&[], &[0.37]);
        assert_eq!(y, vec![0.37]);
    }

    #[test]
    fn unknown_builtin_is_rejected() {
        assert!(builtin_model("nope", &serde_json::json!({})).is_err());
    }

    #[test]
    fn out_of_bounds_design_reports_interval() {
        let truth = make_benchmark(&BenchmarkConfig::default()).unwrap();
        let mut x = vec![0.0; 4];
        x[0] = truth.simulator.design_bounds[0].0; // valid
        x[1] = truth.simulator.design_bounds[1].1 + 1.0; // out of range
        x[2] = truth.simulator.design_bounds[2].0;
        x[3] = truth.simulator.design_bounds[3].0;
        let err = evaluate(
            &truth.simulator,
            &DesignPoint::new(x),
            &truth.theta_true,
        )
        .unwrap_err();
        match err {
            Error::OutOfBounds { index, .. } => assert_eq!(index, 1),
            other => panic!("expected OutOfBounds, got {other:?}"),
        }
    }

    #[test]
    fn evaluations_are_bit_identical() {
        let truth = make_benchmark(&BenchmarkConfig::default()).unwrap();
        let x: Vec<f64> = truth
            .simulator
            .design_bounds
            .iter()
            .map(|&(lo, hi)| 0.3 * lo + 0.7 * hi)
            .collect();
        let theta = vec![0.7, 1.3, 2.9, 0.4, 4.2];
        let first = truth.simulator.eval_unchecked(&x, &theta);
        for _ in 0..100 {
            assert_eq!(truth.simulator.eval_unchecked(&x, &theta), first);
        }
    }
}
