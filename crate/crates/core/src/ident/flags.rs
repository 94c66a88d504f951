//! Fake-identifiability detection.
//!
//! A posterior is suspicious when its mean sits far from the reference
//! (all-responses) mean. Two failure modes are separated by the STD ratio:
//! a *tight* but shifted posterior is "fake identifiability" — it looks
//! informative while being wrong — whereas a wide and shifted one is merely
//! poorly identified.

use serde::{Deserialize, Serialize};

use super::study::SubsetStudyResult;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FakeFlagThresholds {
    /// Mean shifts beyond this many reference STDs count as "wrong mean".
    pub mean_shift: f64,
    /// STD ratios at or below this count as "tight".
    pub tightness_ratio: f64,
}

impl Default for FakeFlagThresholds {
    fn default() -> Self {
        FakeFlagThresholds {
            mean_shift: 1.5,
            tightness_ratio: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetClassification {
    /// Mean consistent with the reference.
    Consistent,
    /// Shifted mean with a tight posterior: the dangerous case.
    FakeIdentifiable,
    /// Shifted mean with a wide posterior.
    PoorlyIdentified,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagEntry {
    pub parameter: usize,
    pub subset_label: String,
    /// |mean − reference mean| in units of the reference STD.
    pub mean_shift_sigmas: f64,
    /// STD relative to the reference STD.
    pub std_ratio: f64,
    pub classification: SubsetClassification,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagReport {
    pub reference_label: String,
    pub thresholds: FakeFlagThresholds,
    pub entries: Vec<FlagEntry>,
    /// Parameters skipped because the reference STD is zero.
    pub skipped_parameters: Vec<usize>,
}

impl FlagReport {
    pub fn fakes(&self) -> Vec<&FlagEntry> {
        self.entries
            .iter()
            .filter(|e| e.classification == SubsetClassification::FakeIdentifiable)
            .collect()
    }

    pub fn entry(&self, parameter: usize, subset_label: &str) -> Option<&FlagEntry> {
        self.entries
            .iter()
            .find(|e| e.parameter == parameter && e.subset_label == subset_label)
    }
}

/// Classify every (parameter, subset) pair against the reference result.
pub fn flag_fake_identifiability(
    study: &[SubsetStudyResult],
    reference: &SubsetStudyResult,
    thresholds: &FakeFlagThresholds,
) -> FlagReport {
    let d = reference.mean.len();
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for k in 0..d {
        if reference.std[k] == 0.0 {
            skipped.push(k);
            continue;
        }
        for result in study {
            if result.label == reference.label {
                continue;
            }
            let shift = (result.mean[k] - reference.mean[k]).abs() / reference.std[k];
            let ratio = result.std[k] / reference.std[k];
            let classification = if shift > thresholds.mean_shift {
                if ratio <= thresholds.tightness_ratio {
                    SubsetClassification::FakeIdentifiable
                } else {
                    SubsetClassification::PoorlyIdentified
                }
            } else {
                SubsetClassification::Consistent
            };
            entries.push(FlagEntry {
                parameter: k,
                subset_label: result.label.clone(),
                mean_shift_sigmas: shift,
                std_ratio: ratio,
                classification,
            });
        }
    }
    FlagReport {
        reference_label: reference.label.clone(),
        thresholds: thresholds.clone(),
        entries,
        skipped_parameters: skipped,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Published posterior means/STDs for five parameters over all fifteen
    /// response combinations (first calibration pass), used as a fixture.
    pub fn fixture_study() -> Vec<SubsetStudyResult> {
        // label, means (5), stds (5)
        let rows: Vec<(&str, [f64; 5], [f64; 5])> = vec![
            ("1", [0.9943, 1.1422, 1.7042, 2.2032, 1.2974], [0.5241, 0.1539, 0.6474, 0.5093, 0.7677]),
            ("2", [1.3339, 1.1582, 0.8413, 1.1614, 2.7884], [0.6469, 0.2378, 0.4759, 0.1691, 1.2545]),
            ("3", [2.7964, 1.1109, 1.1060, 1.1660, 3.0939], [1.2038, 0.6112, 0.5287, 0.2944, 1.2177]),
            ("4", [1.9979, 2.3113, 1.6510, 2.5607, 1.3588], [1.2781, 1.3494, 0.4418, 1.2574, 0.5918]),
            ("12", [0.5854, 1.2321, 1.4871, 1.3385, 1.7452], [0.2374, 0.0921, 0.3723, 0.1500, 0.8096]),
            ("13", [0.5495, 1.2563, 1.7204, 1.4770, 1.4485], [0.2414, 0.1091, 0.3818, 0.2698, 0.8348]),
            ("14", [1.1119, 1.1215, 1.5256, 2.3491, 1.0182], [0.3971, 0.1285, 0.2604, 0.4491, 0.3081]),
            ("23", [1.4224, 1.1041, 0.9852, 1.1117, 3.5537], [0.6084, 0.2510, 0.3356, 0.1621, 0.9919]),
            ("24", [1.0176, 1.1510, 1.2568, 1.3054, 1.1722], [0.6200, 0.2249, 0.2509, 0.1476, 0.3651]),
            ("34", [2.3102, 0.9528, 1.4135, 1.3864, 1.3342], [1.1432, 0.5437, 0.2477, 0.2148, 0.4394]),
            ("123", [0.6201, 1.2210, 1.4362, 1.2921, 1.8126], [0.2305, 0.0920, 0.2668, 0.1376, 0.8596]),
            ("124", [0.5927, 1.2450, 1.4012, 1.3634, 1.2245], [0.2088, 0.0873, 0.2259, 0.1498, 0.3580]),
            ("134", [0.6062, 1.2497, 1.5421, 1.4711, 1.2252], [0.2274, 0.1007, 0.2412, 0.2239, 0.3467]),
            ("234", [1.3945, 1.0158, 1.3036, 1.3258, 1.2231], [0.6233, 0.2099, 0.2029, 0.1151, 0.3735]),
            ("1234", [0.6162, 1.2358, 1.4110, 1.3385, 1.2340], [0.2113, 0.0890, 0.1833, 0.1155, 0.3453]),
        ];
        rows.into_iter()
            .map(|(label, mean, std)| {
                let indices: Vec<usize> = label
                    .chars()
                    .map(|c| c.to_digit(10).unwrap() as usize - 1)
                    .collect();
                SubsetStudyResult {
                    label: label.into(),
                    indices,
                    mean: mean.to_vec(),
                    std: std.to_vec(),
                    split_rhat: vec![1.0; 5],
                    ess: vec![5000.0; 5],
                    acceptance_rate: 0.23,
                    converged: true,
                    seed: 0,
                }
            })
            .collect()
    }

    #[test]
    fn fixture_classifications_match_the_narrative() {
        let study = fixture_study();
        let reference = study.last().unwrap().clone();
        let report = flag_fake_identifiability(&study, &reference, &Default::default());

        // Parameter 1 under "234": mean 1.3945 vs 0.6162 → shift ≈ 3.68
        // reference STDs, but the STD ratio 2.95 exceeds the tightness cut,
        // so it is poor, not fake.
        let p1 = report.entry(0, "234").unwrap();
        assert!(p1.mean_shift_sigmas > 2.0);
        assert!(p1.std_ratio > 1.5);
        assert_eq!(p1.classification, SubsetClassification::PoorlyIdentified);

        // Parameter 5 under "123": shift ≈ 1.68 (borderline above 1.5),
        // ratio ≈ 2.49 → also poor rather than fake.
        let p5 = report.entry(4, "123").unwrap();
        assert!((p5.mean_shift_sigmas - 1.676).abs() < 0.01);
        assert_eq!(p5.classification, SubsetClassification::PoorlyIdentified);
    }

    #[test]
    fn tight_and_shifted_is_fake() {
        let mut study = fixture_study();
        let reference = study.last().unwrap().clone();
        // Force a tight-but-wrong entry: parameter 1 under "4".
        study[3].mean[0] = 3.0;
        study[3].std[0] = 0.1;
        let report = flag_fake_identifiability(&study, &reference, &Default::default());
        let e = report.entry(0, "4").unwrap();
        assert_eq!(e.classification, SubsetClassification::FakeIdentifiable);
        assert!(report
            .fakes()
            .iter()
            .any(|f| f.parameter == 0 && f.subset_label == "4"));
    }

    #[test]
    fn fixture_borderline_tight_cases() {
        // Parameter 4 under "2" and "23" sits just past both thresholds in
        // the fixture (shift ≈ 1.53/1.96 σ, ratio ≈ 1.46/1.40): the rule
        // calls these fake — tight posteriors whose means drifted.
        let study = fixture_study();
        let reference = study.last().unwrap().clone();
        let report = flag_fake_identifiability(&study, &reference, &Default::default());
        for label in ["2", "23"] {
            let e = report.entry(3, label).unwrap();
            assert_eq!(
                e.classification,
                SubsetClassification::FakeIdentifiable,
                "parameter 4 under {label}"
            );
        }
        // And nothing else in the untouched fixture is classified fake.
        assert_eq!(report.fakes().len(), 2);
    }

    #[test]
    fn zero_reference_std_is_skipped() {
        let mut study = fixture_study();
        let mut reference = study.last().unwrap().clone();
        reference.std[2] = 0.0;
        study.last_mut().unwrap().std[2] = 0.0;
        let report = flag_fake_identifiability(&study, &reference, &Default::default());
        assert_eq!(report.skipped_parameters, vec![2]);
        assert!(report.entries.iter().all(|e| e.parameter != 2));
    }
}
