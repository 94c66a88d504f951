//! Pick-freeze estimation of main, total and closed second-order indices.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::stats;

use super::{saltelli_design, InputDistribution, SecondOrder, SensitivityModel, SobolTable};

/// Number of bootstrap resamples behind the reported CI half-widths.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

fn eval_block(model: &dyn SensitivityModel, block: &[Vec<f64>]) -> Vec<Vec<f64>> {
    block.par_iter().map(|row| model.eval(row)).collect()
}

/// Column `r` of an N×m evaluation block.
fn column(block: &[Vec<f64>], r: usize) -> Vec<f64> {
    block.iter().map(|row| row[r]).collect()
}

/// Pooled mean and variance of the A and B evaluations for one response.
fn pooled_stats(ya: &[f64], yb: &[f64], idx: &[usize]) -> (f64, f64) {
    let n = idx.len() as f64;
    let mut sum = 0.0;
    for &j in idx {
        sum += ya[j] + yb[j];
    }
    let mean = sum / (2.0 * n);
    let mut ss = 0.0;
    for &j in idx {
        ss += (ya[j] - mean).powi(2) + (yb[j] - mean).powi(2);
    }
    (mean, ss / (2.0 * n - 1.0))
}

/// Pick-freeze main effect: `S_i = (1/N) Σ y_B (y_AB − y_A) / Var(Y)`.
///
/// Outputs are centered by the pooled mean first; the estimator is the
/// same in expectation but loses the mean-induced variance term.
fn main_effect(ya: &[f64], yb: &[f64], yab: &[f64], idx: &[usize], mean: f64, var: f64) -> f64 {
    let mut acc = 0.0;
    for &j in idx {
        acc += (yb[j] - mean) * (yab[j] - ya[j]);
    }
    acc / idx.len() as f64 / var
}

/// Jansen total effect: `T_i = (1/2N) Σ (y_A − y_AB)² / Var(Y)`.
fn total_effect(ya: &[f64], yab: &[f64], idx: &[usize], var: f64) -> f64 {
    let mut acc = 0.0;
    for &j in idx {
        acc += (ya[j] - yab[j]).powi(2);
    }
    acc / (2.0 * idx.len() as f64) / var
}

/// Half-width of the central 95% percentile interval.
fn percentile_halfwidth(samples: &mut [f64]) -> f64 {
    if samples.len() < 10 {
        return f64::NAN;
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    0.5 * (stats::quantile(samples, 0.975) - stats::quantile(samples, 0.025))
}

/// Estimate Sobol' indices for every (input, response) pair.
///
/// Evaluates the model on `A`, `B` and the `d` mixed blocks (`N·(d+2)` runs,
/// plus `N·d` more when `with_second_order` adds the complementary blocks).
/// Negative estimates are reported as-is together with their bootstrap CI
/// half-widths so estimator noise stays visible.
pub fn estimate_sobol(
    model: &dyn SensitivityModel,
    dists: &[InputDistribution],
    n: usize,
    seed: u64,
    with_second_order: bool,
) -> Result<SobolTable> {
    if model.input_dim() != dists.len() {
        return Err(Error::DimensionMismatch {
            context: "sensitivity inputs",
            expected: model.input_dim(),
            actual: dists.len(),
        });
    }
    let d = dists.len();
    let m = model.output_dim();
    let design = saltelli_design(dists, n, seed)?;

    let ya = eval_block(model, &design.a);
    let yb = eval_block(model, &design.b);
    let yab: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| eval_block(model, &design.a_with_b_column(i)))
        .collect();
    let yba: Option<Vec<Vec<Vec<f64>>>> = with_second_order.then(|| {
        (0..d)
            .map(|i| eval_block(model, &design.b_with_a_column(i)))
            .collect()
    });

    let all: Vec<usize> = (0..n).collect();
    let mut main = vec![vec![0.0; m]; d];
    let mut total = vec![vec![0.0; m]; d];
    let mut main_ci = vec![vec![0.0; m]; d];
    let mut total_ci = vec![vec![0.0; m]; d];

    // One shared set of bootstrap index vectors, so resampling is paired
    // across inputs and responses.
    let mut boot_rng = rng_for(seed, 0xb007);
    let boot_idx: Vec<Vec<usize>> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..n).map(|_| boot_rng.random_range(0..n)).collect())
        .collect();

    for r in 0..m {
        let a_col = column(&ya, r);
        let b_col = column(&yb, r);
        let (mean, var) = pooled_stats(&a_col, &b_col, &all);
        if !(var > 0.0) {
            return Err(Error::ZeroVariance(model.output_labels()[r].clone()));
        }
        for i in 0..d {
            let ab_col = column(&yab[i], r);
            main[i][r] = main_effect(&a_col, &b_col, &ab_col, &all, mean, var);
            total[i][r] = total_effect(&a_col, &ab_col, &all, var);

            let mut s_boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
            let mut t_boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
            for idx in &boot_idx {
                let (mu, v) = pooled_stats(&a_col, &b_col, idx);
                if v > 0.0 {
                    s_boot.push(main_effect(&a_col, &b_col, &ab_col, idx, mu, v));
                    t_boot.push(total_effect(&a_col, &ab_col, idx, v));
                }
            }
            main_ci[i][r] = percentile_halfwidth(&mut s_boot);
            total_ci[i][r] = percentile_halfwidth(&mut t_boot);
        }
    }

    let second_order = yba.map(|yba| {
        let mut pairs = Vec::new();
        let mut values = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                let mut per_resp = Vec::with_capacity(m);
                for r in 0..m {
                    let a_col = column(&ya, r);
                    let b_col = column(&yb, r);
                    let (mean, var) = pooled_stats(&a_col, &b_col, &all);
                    let ba_i = column(&yba[i], r);
                    let ab_j = column(&yab[j], r);
                    // Closed pair effect: E[y(B_A^i)·y(A_B^j)] − f0²; the
                    // blocks share exactly the columns {i, j}, and the f0²
                    // subtraction is absorbed by centering.
                    let cross = ba_i
                        .iter()
                        .zip(&ab_j)
                        .map(|(u, v)| (u - mean) * (v - mean))
                        .sum::<f64>()
                        / n as f64;
                    let closed = cross / var;
                    per_resp.push(closed - main[i][r] - main[j][r]);
                }
                pairs.push((i, j));
                values.push(per_resp);
            }
        }
        SecondOrder { pairs, values }
    });

    Ok(SobolTable {
        input_names: (0..d).map(|i| format!("x{}", i + 1)).collect(),
        response_names: model.output_labels(),
        main,
        total,
        main_ci,
        total_ci,
        second_order,
        estimator_n: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtins::ishigami_analytic_indices;
    use crate::sa::FnModel;

    fn uniform(d: usize, lo: f64, hi: f64) -> Vec<InputDistribution> {
        vec![InputDistribution::Uniform { lo, hi }; d]
    }

    #[test]
    fn linear_additive_matches_analytic_shares() {
        // Y = X1 + 2 X2 on U(0,1)²: S = (0.2, 0.8) and T = S.
        let model = FnModel {
            input_dim: 2,
            labels: vec!["y".into()],
            f: |x: &[f64]| vec![x[0] + 2.0 * x[1]],
        };
        let table = estimate_sobol(&model, &uniform(2, 0.0, 1.0), 1 << 14, 42, false).unwrap();
        assert!((table.main[0][0] - 0.2).abs() < 0.02, "S1 = {}", table.main[0][0]);
        assert!((table.main[1][0] - 0.8).abs() < 0.02, "S2 = {}", table.main[1][0]);
        for i in 0..2 {
            assert!((table.total[i][0] - table.main[i][0]).abs() < 0.02);
        }
        assert!((table.main_sum(0) - 1.0).abs() < 0.03);
    }

    #[test]
    fn ishigami_matches_analytic_decomposition() {
        let (s_ref, t_ref) = ishigami_analytic_indices(7.0, 0.1);
        let model = FnModel {
            input_dim: 3,
            labels: vec!["y".into()],
            f: |x: &[f64]| {
                vec![x[0].sin() + 7.0 * x[1].sin().powi(2) + 0.1 * x[2].powi(4) * x[0].sin()]
            },
        };
        let pi = std::f64::consts::PI;
        let table = estimate_sobol(&model, &uniform(3, -pi, pi), 1 << 16, 7, false).unwrap();
        for i in 0..3 {
            assert!(
                (table.main[i][0] - s_ref[i]).abs() < 0.02,
                "S{}: {} vs {}",
                i + 1,
                table.main[i][0],
                s_ref[i]
            );
            assert!(
                (table.total[i][0] - t_ref[i]).abs() < 0.02,
                "T{}: {} vs {}",
                i + 1,
                table.total[i][0],
                t_ref[i]
            );
        }
    }

    #[test]
    fn second_order_recovers_product_interaction() {
        // Y = X1 + X2 + X1·X2 with centered uniforms: V1 = V2 = 1/12,
        // V12 = 1/144, V = 1/12 + 1/12 + 1/144.
        let model = FnModel {
            input_dim: 2,
            labels: vec!["y".into()],
            f: |x: &[f64]| vec![x[0] + x[1] + x[0] * x[1]],
        };
        let table = estimate_sobol(&model, &uniform(2, -0.5, 0.5), 1 << 14, 3, true).unwrap();
        let v = 2.0 / 12.0 + 1.0 / 144.0;
        let s12_expected = (1.0 / 144.0) / v;
        let so = table.second_order.as_ref().unwrap();
        assert_eq!(so.pairs, vec![(0, 1)]);
        assert!(
            (so.values[0][0] - s12_expected).abs() < 0.02,
            "S12 = {} vs {}",
            so.values[0][0],
            s12_expected
        );
    }

    #[test]
    fn constant_output_is_an_error() {
        let model = FnModel {
            input_dim: 1,
            labels: vec!["y".into()],
            f: |_x: &[f64]| vec![3.5],
        };
        match estimate_sobol(&model, &uniform(1, 0.0, 1.0), 64, 0, false) {
            Err(Error::ZeroVariance(_)) => {}
            other => panic!("expected ZeroVariance, got {other:?}"),
        }
    }

    #[test]
    fn null_input_estimates_are_exactly_zero() {
        // Y ignores X2 entirely, so the pick-freeze differences vanish
        // identically, not just in expectation.
        let model = FnModel {
            input_dim: 2,
            labels: vec!["y".into()],
            f: |x: &[f64]| vec![x[0] * x[0]],
        };
        let table = estimate_sobol(&model, &uniform(2, 0.0, 1.0), 256, 5, false).unwrap();
        assert_eq!(table.main[1][0], 0.0);
        assert_eq!(table.total[1][0], 0.0);
    }

    #[test]
    fn total_dominates_main_within_ci() {
        let model = FnModel {
            input_dim: 3,
            labels: vec!["y".into()],
            f: |x: &[f64]| {
                vec![x[0].sin() + 7.0 * x[1].sin().powi(2) + 0.1 * x[2].powi(4) * x[0].sin()]
            },
        };
        let pi = std::f64::consts::PI;
        let table = estimate_sobol(&model, &uniform(3, -pi, pi), 1 << 12, 11, false).unwrap();
        for i in 0..3 {
            assert!(
                table.total[i][0] + 3.0 * table.total_ci[i][0] >= table.main[i][0],
                "input {i}"
            );
        }
    }

    #[test]
    fn permutation_statistical_equivariance() {
        // Swapping the Ishigami arguments permutes the estimates within
        // bootstrap noise (the draws attach to column positions, so exact
        // bit equality is not available).
        let pi = std::f64::consts::PI;
        let base = FnModel {
            input_dim: 3,
            labels: vec!["y".into()],
            f: |x: &[f64]| {
                vec![x[0].sin() + 7.0 * x[1].sin().powi(2) + 0.1 * x[2].powi(4) * x[0].sin()]
            },
        };
        // Permutation π = (2, 0, 1): input k of `permuted` is input π(k).
        let permuted = FnModel {
            input_dim: 3,
            labels: vec!["y".into()],
            f: |x: &[f64]| {
                vec![x[1].sin() + 7.0 * x[2].sin().powi(2) + 0.1 * x[0].powi(4) * x[1].sin()]
            },
        };
        let dists = uniform(3, -pi, pi);
        let t1 = estimate_sobol(&base, &dists, 1 << 13, 17, false).unwrap();
        let t2 = estimate_sobol(&permuted, &dists, 1 << 13, 17, false).unwrap();
        for (k, &orig) in [2usize, 0, 1].iter().enumerate() {
            let tol = 3.0 * (t1.main_ci[orig][0] + t2.main_ci[k][0]);
            assert!(
                (t1.main[orig][0] - t2.main[k][0]).abs() <= tol,
                "main {k}: {} vs {}",
                t2.main[k][0],
                t1.main[orig][0]
            );
        }
    }
}
