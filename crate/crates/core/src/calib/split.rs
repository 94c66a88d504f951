//! Calibration/validation split by greedy maximin selection.
//!
//! A space-filling validation side is picked in normalized design space:
//! start from the most distant pair, then repeatedly add the record whose
//! minimum distance to the already-selected set is largest. Ties break
//! toward the lowest record index, so the split is fully deterministic.

use crate::error::{Error, Result};
use crate::model::ExperimentRecord;

/// Disjoint calibration/validation partition of a dataset.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub calibration: Vec<ExperimentRecord>,
    pub validation: Vec<ExperimentRecord>,
    /// Original dataset indices of the validation records.
    pub validation_indices: Vec<usize>,
}

fn normalized_coords(dataset: &[ExperimentRecord]) -> Vec<Vec<f64>> {
    let d = dataset[0].x.values.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for rec in dataset {
        for (j, &v) in rec.x.values.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    dataset
        .iter()
        .map(|rec| {
            rec.x
                .values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    if hi[j] > lo[j] {
                        (v - lo[j]) / (hi[j] - lo[j])
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Split a dataset into calibration and validation sides.
///
/// `validation_fraction` of the records (rounded) go to validation. The
/// `seed` parameter is part of the interface for drop-in replacement by
/// randomized allocation schemes; the maximin selection itself is
/// deterministic.
pub fn split_data(
    dataset: &[ExperimentRecord],
    validation_fraction: f64,
    _seed: u64,
) -> Result<DataSplit> {
    if dataset.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "data split needs at least 4 records, got {}",
            dataset.len()
        )));
    }
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction must lie in (0, 1), got {validation_fraction}"
        )));
    }
    let n = dataset.len();
    let n_val = (validation_fraction * n as f64).round() as usize;
    if n_val == 0 || n_val == n {
        return Err(Error::InvalidArgument(format!(
            "validation fraction {validation_fraction} leaves an empty side ({n_val} of {n})"
        )));
    }

    let coords = normalized_coords(dataset);
    let mut selected: Vec<usize> = Vec::with_capacity(n_val);

    if n_val == 1 {
        // Farthest point from the centroid.
        let d = coords[0].len();
        let centroid: Vec<f64> = (0..d)
            .map(|j| coords.iter().map(|c| c[j]).sum::<f64>() / n as f64)
            .collect();
        let mut best = (0, f64::NEG_INFINITY);
        for (i, c) in coords.iter().enumerate() {
            let dd = dist2(c, &centroid);
            if dd > best.1 {
                best = (i, dd);
            }
        }
        selected.push(best.0);
    } else {
        // Seed with the most distant pair (lexicographically first on ties).
        let mut best = (0, 1, f64::NEG_INFINITY);
        for i in 0..n {
            for j in (i + 1)..n {
                let dd = dist2(&coords[i], &coords[j]);
                if dd > best.2 {
                    best = (i, j, dd);
                }
            }
        }
        selected.push(best.0);
        selected.push(best.1);
        while selected.len() < n_val {
            let mut pick = (usize::MAX, f64::NEG_INFINITY);
            for i in 0..n {
                if selected.contains(&i) {
                    continue;
                }
                let min_d = selected
                    .iter()
                    .map(|&s| dist2(&coords[i], &coords[s]))
                    .fold(f64::INFINITY, f64::min);
                if min_d > pick.1 {
                    pick = (i, min_d);
                }
            }
            selected.push(pick.0);
        }
    }

    selected.sort_unstable();
    let mut calibration = Vec::with_capacity(n - n_val);
    let mut validation = Vec::with_capacity(n_val);
    for (i, rec) in dataset.iter().enumerate() {
        if selected.binary_search(&i).is_ok() {
            validation.push(rec.clone());
        } else {
            calibration.push(rec.clone());
        }
    }
    Ok(DataSplit {
        calibration,
        validation,
        validation_indices: selected,
    })
}
