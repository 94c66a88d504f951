//! Table layouts and chart builders shared by the run commands and the
//! `report` re-renderer.

use anyhow::{bail, Result};

use sensid::ident::SubsetStudyResult;
use sensid::sa::{InteractionReport, SobolTable};

use crate::csvio::{fmt_f64, CsvData, CsvTable};
use crate::svg::grouped_bar_chart;

/// Sobol' table in the published layout: one row per input, main-effect
/// columns per response then total-effect columns, and a final Sum row.
pub fn sobol_csv(table: &SobolTable) -> CsvTable {
    let mut header = vec!["input".to_string()];
    for r in &table.response_names {
        header.push(format!("main_{r}"));
    }
    for r in &table.response_names {
        header.push(format!("total_{r}"));
    }
    let mut csv = CsvTable::new(header);
    for (i, name) in table.input_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for r in 0..table.n_responses() {
            row.push(fmt_f64(table.main[i][r]));
        }
        for r in 0..table.n_responses() {
            row.push(fmt_f64(table.total[i][r]));
        }
        csv.push_row(row);
    }
    let mut sum_row = vec!["Sum".to_string()];
    for r in 0..table.n_responses() {
        sum_row.push(fmt_f64(table.main_sum(r)));
    }
    for r in 0..table.n_responses() {
        sum_row.push(fmt_f64(table.total_sum(r)));
    }
    csv.push_row(sum_row);
    csv
}

/// Bootstrap CI half-widths in the same layout as `sobol_csv`.
pub fn sobol_ci_csv(table: &SobolTable) -> CsvTable {
    let mut header = vec!["input".to_string()];
    for r in &table.response_names {
        header.push(format!("main_ci_{r}"));
    }
    for r in &table.response_names {
        header.push(format!("total_ci_{r}"));
    }
    let mut csv = CsvTable::new(header);
    for (i, name) in table.input_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for r in 0..table.n_responses() {
            row.push(fmt_f64(table.main_ci[i][r]));
        }
        for r in 0..table.n_responses() {
            row.push(fmt_f64(table.total_ci[i][r]));
        }
        csv.push_row(row);
    }
    csv
}

pub fn second_order_csv(table: &SobolTable) -> Option<CsvTable> {
    let so = table.second_order.as_ref()?;
    let mut header = vec!["pair".to_string()];
    header.extend(table.response_names.iter().cloned());
    let mut csv = CsvTable::new(header);
    for (k, &(i, j)) in so.pairs.iter().enumerate() {
        let mut row = vec![format!(
            "{}*{}",
            table.input_names[i], table.input_names[j]
        )];
        for r in 0..table.n_responses() {
            row.push(fmt_f64(so.values[k][r]));
        }
        csv.push_row(row);
    }
    Some(csv)
}

pub fn interactions_csv(report: &InteractionReport, table: &SobolTable) -> CsvTable {
    let mut csv = CsvTable::new(vec![
        "response", "input", "main", "total", "gap", "flag",
    ]);
    for cell in &report.cells {
        csv.push_row(vec![
            table.response_names[cell.response].clone(),
            table.input_names[cell.input].clone(),
            fmt_f64(cell.main),
            fmt_f64(cell.total),
            fmt_f64(cell.gap),
            cell.flagged.to_string(),
        ]);
    }
    for resp in &report.responses {
        csv.push_row(vec![
            table.response_names[resp.response].clone(),
            "(sum)".into(),
            fmt_f64(resp.main_sum),
            fmt_f64(resp.total_sum),
            fmt_f64(resp.total_sum - resp.main_sum),
            resp.interactions_present.to_string(),
        ]);
    }
    csv
}

/// Grouped bar charts of the Sobol' table (one bar series per response).
pub fn sobol_charts(
    input_names: &[String],
    response_names: &[String],
    main: &[Vec<f64>],
    total: &[Vec<f64>],
) -> (String, String) {
    let series = |values: &[Vec<f64>]| -> Vec<(String, Vec<f64>)> {
        response_names
            .iter()
            .enumerate()
            .map(|(r, name)| {
                (
                    name.clone(),
                    (0..input_names.len()).map(|i| values[i][r]).collect(),
                )
            })
            .collect()
    };
    (
        grouped_bar_chart(
            "Main-effect indices",
            input_names,
            &series(main),
            "main effect",
        ),
        grouped_bar_chart(
            "Total-effect indices",
            input_names,
            &series(total),
            "total effect",
        ),
    )
}

/// Parse `sobol.csv` back into the pieces the charts need.
pub fn parse_sobol_csv(data: &CsvData) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n_cols = data.header.len() - 1;
    if n_cols == 0 || n_cols % 2 != 0 {
        bail!("unexpected sobol.csv column count {}", data.header.len());
    }
    let m = n_cols / 2;
    let responses: Vec<String> = data.header[1..=m]
        .iter()
        .map(|h| h.trim_start_matches("main_").to_string())
        .collect();
    let mut inputs = Vec::new();
    let mut main = Vec::new();
    let mut total = Vec::new();
    for (rix, row) in data.rows.iter().enumerate() {
        if row[0] == "Sum" {
            continue;
        }
        inputs.push(row[0].clone());
        let mut mrow = Vec::with_capacity(m);
        let mut trow = Vec::with_capacity(m);
        for r in 0..m {
            mrow.push(data.f64_at(rix, 1 + r)?);
            trow.push(data.f64_at(rix, 1 + m + r)?);
        }
        main.push(mrow);
        total.push(trow);
    }
    Ok((inputs, responses, main, total))
}

/// Posterior summary row in the published layout:
/// `output, mean_<p>…, std_<p>…`.
pub fn summary_header(param_labels: &[String]) -> Vec<String> {
    let mut header = vec!["output".to_string()];
    for p in param_labels {
        header.push(format!("mean_{p}"));
    }
    for p in param_labels {
        header.push(format!("std_{p}"));
    }
    header
}

pub fn summary_row(label: &str, mean: &[f64], std: &[f64]) -> Vec<String> {
    let mut row = vec![label.to_string()];
    row.extend(mean.iter().map(|v| fmt_f64(*v)));
    row.extend(std.iter().map(|v| fmt_f64(*v)));
    row
}

pub fn sweep_csv(results: &[SubsetStudyResult], param_labels: &[String]) -> CsvTable {
    let mut csv = CsvTable::new(summary_header(param_labels));
    for r in results {
        csv.push_row(summary_row(&r.label, &r.mean, &r.std));
    }
    csv
}

/// Parse a sweep/summary CSV into (labels, params, means, stds).
pub fn parse_summary_csv(
    data: &CsvData,
) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n_cols = data.header.len() - 1;
    if n_cols == 0 || n_cols % 2 != 0 {
        bail!("unexpected summary column count {}", data.header.len());
    }
    let d = n_cols / 2;
    let params: Vec<String> = data.header[1..=d]
        .iter()
        .map(|h| h.trim_start_matches("mean_").to_string())
        .collect();
    let mut labels = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    for (rix, row) in data.rows.iter().enumerate() {
        labels.push(row[0].clone());
        means.push((0..d).map(|k| data.f64_at(rix, 1 + k)).collect::<Result<_>>()?);
        stds.push(
            (0..d)
                .map(|k| data.f64_at(rix, 1 + d + k))
                .collect::<Result<_>>()?,
        );
    }
    Ok((labels, params, means, stds))
}

/// Bar charts of per-subset posterior means and STDs (series per
/// parameter).
pub fn sweep_charts(
    subset_labels: &[String],
    param_labels: &[String],
    means: &[Vec<f64>],
    stds: &[Vec<f64>],
) -> (String, String) {
    let series = |values: &[Vec<f64>]| -> Vec<(String, Vec<f64>)> {
        param_labels
            .iter()
            .enumerate()
            .map(|(k, name)| {
                (
                    name.clone(),
                    (0..subset_labels.len()).map(|s| values[s][k]).collect(),
                )
            })
            .collect()
    };
    (
        grouped_bar_chart(
            "Posterior means by response subset",
            subset_labels,
            &series(means),
            "posterior mean",
        ),
        grouped_bar_chart(
            "Posterior STDs by response subset",
            subset_labels,
            &series(stds),
            "posterior STD",
        ),
    )
}

/// Chain CSV: one row per retained sample, one column per parameter.
pub fn chain_csv(chain: &[Vec<f64>], param_labels: &[String]) -> CsvTable {
    let mut csv = CsvTable::new(param_labels.to_vec());
    for row in chain {
        csv.push_row(row.iter().map(|v| fmt_f64(*v)).collect());
    }
    csv
}

pub fn parse_chain_csv(data: &CsvData) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let d = data.header.len();
    let mut columns = vec![Vec::with_capacity(data.rows.len()); d];
    for rix in 0..data.rows.len() {
        for (k, col) in columns.iter_mut().enumerate() {
            col.push(data.f64_at(rix, k)?);
        }
    }
    Ok((data.header.clone(), columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_table() -> SobolTable {
        SobolTable {
            input_names: vec!["a".into(), "b".into()],
            response_names: vec!["y1".into(), "y2".into()],
            main: vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            total: vec![vec![0.15, 0.25], vec![0.35, 0.45]],
            main_ci: vec![vec![0.01; 2]; 2],
            total_ci: vec![vec![0.01; 2]; 2],
            second_order: None,
            estimator_n: 64,
        }
    }

    #[test]
    fn sobol_layout_has_sum_row_and_round_trips() {
        let csv = sobol_csv(&small_table());
        let text = csv.render();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sobol.csv");
        std::fs::write(&path, &text).unwrap();
        let parsed = CsvData::read(&path).unwrap();
        assert_eq!(parsed.rows.last().unwrap()[0], "Sum");
        let (inputs, responses, main, total) = parse_sobol_csv(&parsed).unwrap();
        assert_eq!(inputs, vec!["a", "b"]);
        assert_eq!(responses, vec!["y1", "y2"]);
        assert_eq!(main[1][0], 0.3);
        assert_eq!(total[0][1], 0.25);
    }

    #[test]
    fn summary_layout_round_trips() {
        let params = vec!["p1".to_string(), "p2".to_string()];
        let mut csv = CsvTable::new(summary_header(&params));
        csv.push_row(summary_row("12", &[1.0, 2.0], &[0.1, 0.2]));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.csv");
        csv.write(&path).unwrap();
        let parsed = CsvData::read(&path).unwrap();
        let (labels, names, means, stds) = parse_summary_csv(&parsed).unwrap();
        assert_eq!(labels, vec!["12"]);
        assert_eq!(names, params);
        assert_eq!(means[0], vec![1.0, 2.0]);
        assert_eq!(stds[0], vec![0.1, 0.2]);
    }
}
