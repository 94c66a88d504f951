//! Interaction diagnostics from main/total effect gaps and index sums.

use serde::{Deserialize, Serialize};

use super::SobolTable;

/// One (input, response) cell of the interaction report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionCell {
    pub input: usize,
    pub response: usize,
    pub main: f64,
    pub total: f64,
    /// `total − main` after clamping both into [0, 1].
    pub gap: f64,
    pub flagged: bool,
}

/// Per-response summary based on the index sums.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseInteraction {
    pub response: usize,
    pub main_sum: f64,
    pub total_sum: f64,
    /// True when the sums indicate non-negligible interactions:
    /// `Σ S_i < 1 − tol` or `Σ T_i > 1 + tol`.
    pub interactions_present: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionReport {
    pub gap_threshold: f64,
    pub sum_tolerance: f64,
    pub cells: Vec<InteractionCell>,
    pub responses: Vec<ResponseInteraction>,
}

impl InteractionReport {
    /// Indices of flagged cells as (input, response) pairs.
    pub fn flagged_pairs(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .filter(|c| c.flagged)
            .map(|c| (c.input, c.response))
            .collect()
    }
}

/// Flag inputs whose total effect exceeds their main effect by more than
/// `gap_threshold`, and responses whose index sums deviate from 1 by more
/// than `sum_tolerance`.
///
/// Estimates are clamped into [0, 1] here (and only here), so estimator
/// noise below zero cannot produce spurious gaps.
pub fn detect_interactions(
    table: &SobolTable,
    gap_threshold: f64,
    sum_tolerance: f64,
) -> InteractionReport {
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let mut cells = Vec::with_capacity(table.n_inputs() * table.n_responses());
    for i in 0..table.n_inputs() {
        for r in 0..table.n_responses() {
            let main = clamp(table.main[i][r]);
            let total = clamp(table.total[i][r]);
            let gap = total - main;
            cells.push(InteractionCell {
                input: i,
                response: r,
                main: table.main[i][r],
                total: table.total[i][r],
                gap,
                flagged: gap > gap_threshold,
            });
        }
    }
    let responses = (0..table.n_responses())
        .map(|r| {
            let main_sum: f64 = (0..table.n_inputs()).map(|i| clamp(table.main[i][r])).sum();
            let total_sum: f64 = (0..table.n_inputs()).map(|i| clamp(table.total[i][r])).sum();
            ResponseInteraction {
                response: r,
                main_sum,
                total_sum,
                interactions_present: main_sum < 1.0 - sum_tolerance
                    || total_sum > 1.0 + sum_tolerance,
            }
        })
        .collect();
    InteractionReport {
        gap_threshold,
        sum_tolerance,
        cells,
        responses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sa::SobolTable;

    /// Published five-parameter, four-response index table used as a fixture
    /// (main effects then total effects, row per parameter).
    pub fn fixture_table() -> SobolTable {
        let main = vec![
            vec![0.0903, 0.0507, 0.0093, 0.0008],
            vec![0.6875, 0.2696, 0.0320, 0.0012],
            vec![0.0022, 0.1442, 0.1896, 0.6285],
            vec![0.0006, 0.4705, 0.7483, 0.0299],
            vec![0.0000, 0.0000, 0.0000, 0.3112],
        ];
        let total = vec![
            vec![0.2989, 0.1107, 0.0176, 0.0009],
            vec![0.9064, 0.3307, 0.0404, 0.0013],
            vec![0.0119, 0.1490, 0.2022, 0.6551],
            vec![0.0031, 0.4747, 0.7607, 0.0388],
            vec![0.0000, 0.0000, 0.0000, 0.3338],
        ];
        let zeros = vec![vec![0.0; 4]; 5];
        SobolTable {
            input_names: vec!["P1008".into(), "P1012".into(), "P1022".into(), "P1028".into(), "P1029".into()],
            response_names: vec!["VoidF1".into(), "VoidF2".into(), "VoidF3".into(), "VoidF4".into()],
            main,
            total,
            main_ci: zeros.clone(),
            total_ci: zeros,
            second_order: None,
            estimator_n: 0,
        }
    }

    #[test]
    fn fixture_flags_exactly_the_interacting_cells() {
        let report = detect_interactions(&fixture_table(), 0.05, 0.05);
        let flagged = report.flagged_pairs();
        // Parameters 1–2 interact on responses 1–2 and nowhere else.
        assert_eq!(flagged, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn fixture_cell_examples() {
        let report = detect_interactions(&fixture_table(), 0.05, 0.05);
        let cell = |i: usize, r: usize| {
            report
                .cells
                .iter()
                .find(|c| c.input == i && c.response == r)
                .unwrap()
                .clone()
        };
        // P1012 on VoidF1: S = 0.6875, T = 0.9064 → flagged.
        assert!(cell(1, 0).flagged);
        // P1029 on VoidF4: S = 0.3112, T = 0.3338 → gap 0.0226, not flagged.
        assert!(!cell(4, 3).flagged);
    }

    #[test]
    fn fixture_response_sums() {
        let report = detect_interactions(&fixture_table(), 0.05, 0.05);
        // First response: sums (0.7806, 1.2203) → interactions present.
        assert!(report.responses[0].interactions_present);
        assert!((report.responses[0].main_sum - 0.7806).abs() < 1e-9);
        // Third response: sums (0.9792, 1.0208) → negligible.
        assert!(!report.responses[2].interactions_present);
    }

    #[test]
    fn negative_estimates_are_clamped_inside_only() {
        let table = SobolTable {
            input_names: vec!["a".into()],
            response_names: vec!["y".into()],
            main: vec![vec![-0.04]],
            total: vec![vec![0.03]],
            main_ci: vec![vec![0.01]],
            total_ci: vec![vec![0.01]],
            second_order: None,
            estimator_n: 64,
        };
        let report = detect_interactions(&table, 0.05, 0.05);
        // Gap uses the clamped main (0.0), not −0.04.
        assert!((report.cells[0].gap - 0.03).abs() < 1e-12);
        assert!(!report.cells[0].flagged);
        // The raw estimate stays visible.
        assert_eq!(report.cells[0].main, -0.04);
    }
}
