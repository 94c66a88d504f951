//! Analytic test models with known sensitivity structure.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::SimulatorSpec;

fn param_f64_vec(params: &serde_json::Value, key: &str) -> Option<Vec<f64>> {
    params.get(key)?.as_array().map(|a| {
        a.iter().filter_map(|v| v.as_f64()).collect()
    })
}

fn param_f64(params: &serde_json::Value, key: &str, default: f64) -> f64 {
    params.get(key).and_then(|v| v.as_f64()).unwrap_or(default)
}

/// Construct one of the named analytic models.
///
/// * `linear_additive` — `Y = Σ cᵢ Xᵢ` with inputs on `U(0,1)`; the main
///   effects are `cᵢ²/Σcⱼ²` and there are no interactions.
///   Parameter: `coefficients` (default `[1, 2]`).
/// * `ishigami` — `Y = sin X₁ + a sin² X₂ + b X₃⁴ sin X₁` with inputs on
///   `U(−π, π)`; the classic benchmark with a pure X₁–X₃ interaction.
///   Parameters: `a` (default 7), `b` (default 0.1).
/// * `conjugate_gaussian` — `Y = θ`, the identity model used to validate the
///   sampler against the closed-form Gaussian posterior.
///
/// All three have no design variables; every input is a calibration
/// parameter.
pub fn builtin_model(name: &str, params: &serde_json::Value) -> Result<SimulatorSpec> {
    match name {
        "linear_additive" => {
            let c = param_f64_vec(params, "coefficients").unwrap_or_else(|| vec![1.0, 2.0]);
            if c.is_empty() {
                return Err(Error::InvalidArgument(
                    "linear_additive needs at least one coefficient".into(),
                ));
            }
            let labels: Vec<String> = (1..=c.len()).map(|i| format!("x{i}")).collect();
            let coeffs = c.clone();
            Ok(SimulatorSpec::new(
                "linear_additive",
                vec![],
                vec![(0.0, 1.0); c.len()],
                vec![],
                labels,
                vec!["y".into()],
                Arc::new(move |_x, theta| {
                    vec![theta.iter().zip(&coeffs).map(|(t, c)| t * c).sum()]
                }),
            ))
        }
        "ishigami" => {
            let a = param_f64(params, "a", 7.0);
            let b = param_f64(params, "b", 0.1);
            Ok(SimulatorSpec::new(
                "ishigami",
                vec![],
                vec![(-PI, PI); 3],
                vec![],
                vec!["x1".into(), "x2".into(), "x3".into()],
                vec!["y".into()],
                Arc::new(move |_x, t| {
                    vec![t[0].sin() + a * t[1].sin().powi(2) + b * t[2].powi(4) * t[0].sin()]
                }),
            ))
        }
        "conjugate_gaussian" => Ok(SimulatorSpec::new(
            "conjugate_gaussian",
            vec![],
            vec![(-10.0, 10.0)],
            vec![],
            vec!["theta".into()],
            vec!["y".into()],
            Arc::new(|_x, t| vec![t[0]]),
        )),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// Analytic Sobol' decomposition of the Ishigami function.
///
/// Variance terms for `Y = sin X₁ + a sin² X₂ + b X₃⁴ sin X₁` with
/// independent `U(−π, π)` inputs:
///
/// ```text
/// V₁  = ½ (1 + b π⁴ / 5)²      V₂ = a²/8      V₃ = 0
/// V₁₃ = 8 b² π⁸ / 225
/// V   = ½ + a²/8 + b π⁴/5 + b² π⁸/18
/// ```
///
/// Returns `(s, t)`: main and total effects for the three inputs.
pub fn ishigami_analytic_indices(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    let pi4 = PI.powi(4);
    let pi8 = PI.powi(8);
    let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = 8.0 * b * b * pi8 / 225.0;
    let v = 0.5 + a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0;
    let s = [v1 / v, v2 / v, 0.0];
    let t = [(v1 + v13) / v, v2 / v, v13 / v];
    (s, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ishigami_reference_values() {
        // a = 7, b = 0.1: the standard configuration.
        let (s, t) = ishigami_analytic_indices(7.0, 0.1);
        assert!((s[0] - 0.3139).abs() < 5e-4, "S1 = {}", s[0]);
        assert!((s[1] - 0.4424).abs() < 5e-4, "S2 = {}", s[1]);
        assert_eq!(s[2], 0.0);
        assert!((t[2] - 0.2437).abs() < 5e-4, "T3 = {}", t[2]);
    }

    #[test]
    fn linear_additive_requires_coefficients() {
        assert!(builtin_model("linear_additive", &serde_json::json!({ "coefficients": [] })).is_err());
    }
}
