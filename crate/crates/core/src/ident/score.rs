//! The sensitivity→identifiability rank correlation.

use crate::error::{Error, Result};
use crate::sa::SobolTable;
use crate::stats::spearman;

use super::study::SubsetStudyResult;

/// For each parameter, the Spearman correlation across subsets between the
/// strongest total effect among the included responses and the negated
/// posterior STD. High values mean "the more sensitive the included
/// responses, the tighter the posterior". `None` marks degenerate inputs
/// (constant sensitivity or constant STD across subsets).
pub fn sensitivity_identifiability_score(
    sobol: &SobolTable,
    study: &[SubsetStudyResult],
) -> Result<Vec<Option<f64>>> {
    if study.is_empty() {
        return Err(Error::InvalidArgument("no subset results given".into()));
    }
    let d = study[0].std.len();
    if sobol.n_inputs() != d {
        return Err(Error::DimensionMismatch {
            context: "score parameters",
            expected: d,
            actual: sobol.n_inputs(),
        });
    }
    let m = sobol.n_responses();
    let mut scores = Vec::with_capacity(d);
    for k in 0..d {
        let mut max_total = Vec::with_capacity(study.len());
        let mut neg_std = Vec::with_capacity(study.len());
        for result in study {
            if result.indices.iter().any(|&r| r >= m) {
                return Err(Error::InvalidArgument(format!(
                    "subset {} exceeds the Sobol' table's {m} responses",
                    result.label
                )));
            }
            let x = result
                .indices
                .iter()
                .map(|&r| sobol.total[k][r])
                .fold(f64::NEG_INFINITY, f64::max);
            max_total.push(x);
            neg_std.push(-result.std[k]);
        }
        scores.push(spearman(&max_total, &neg_std));
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(label: &str, indices: Vec<usize>, std: Vec<f64>) -> SubsetStudyResult {
        let d = std.len();
        SubsetStudyResult {
            label: label.into(),
            indices,
            mean: vec![1.0; d],
            std,
            split_rhat: vec![1.0; d],
            ess: vec![1000.0; d],
            acceptance_rate: 0.23,
            converged: true,
            seed: 0,
        }
    }

    fn toy_table(total: Vec<Vec<f64>>) -> SobolTable {
        let m = total[0].len();
        let d = total.len();
        SobolTable {
            input_names: (0..d).map(|i| format!("p{i}")).collect(),
            response_names: (0..m).map(|r| format!("y{r}")).collect(),
            main: total.clone(),
            total,
            main_ci: vec![vec![0.0; m]; d],
            total_ci: vec![vec![0.0; m]; d],
            second_order: None,
            estimator_n: 64,
        }
    }

    #[test]
    fn monotone_relation_scores_one() {
        // One parameter, two responses with totals (0.9, 0.1); STD strictly
        // falls as the best included total rises.
        let sobol = toy_table(vec![vec![0.9, 0.1]]);
        let study = vec![
            result("1", vec![0], vec![0.1]),
            result("2", vec![1], vec![0.8]),
            result("12", vec![0, 1], vec![0.09]),
        ];
        let scores = sensitivity_identifiability_score(&sobol, &study).unwrap();
        // x = (0.9, 0.1, 0.9), y = (−0.1, −0.8, −0.09): tied top ranks but
        // perfectly concordant.
        assert!(scores[0].unwrap() > 0.8, "{:?}", scores);
    }

    #[test]
    fn strictly_decreasing_std_gives_correlation_one() {
        let sobol = toy_table(vec![vec![0.1, 0.5, 0.9]]);
        let study = vec![
            result("1", vec![0], vec![0.9]),
            result("2", vec![1], vec![0.5]),
            result("3", vec![2], vec![0.2]),
        ];
        let scores = sensitivity_identifiability_score(&sobol, &study).unwrap();
        assert_eq!(scores[0], Some(1.0));
    }

    #[test]
    fn equal_stds_are_undefined() {
        let sobol = toy_table(vec![vec![0.2, 0.7]]);
        let study = vec![
            result("1", vec![0], vec![0.3]),
            result("2", vec![1], vec![0.3]),
        ];
        let scores = sensitivity_identifiability_score(&sobol, &study).unwrap();
        assert_eq!(scores[0], None);
    }
}
