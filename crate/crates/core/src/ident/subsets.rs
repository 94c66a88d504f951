//! Canonical enumeration of response subsets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty set of response indices with its canonical label
/// (1-based indices, e.g. "134"; '+'-separated beyond 9 responses).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseSubset {
    pub indices: Vec<usize>,
    pub label: String,
}

impl ResponseSubset {
    pub fn new(mut indices: Vec<usize>, m: usize) -> Self {
        indices.sort_unstable();
        indices.dedup();
        let sep = if m > 9 { "+" } else { "" };
        let label = indices
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(sep);
        ResponseSubset { indices, label }
    }

    pub fn contains(&self, response: usize) -> bool {
        self.indices.contains(&response)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// All `2^m − 1` nonempty subsets of `m` responses, ordered by size and
/// then lexicographically by index sequence.
pub fn enumerate_subsets(m: usize) -> Result<Vec<ResponseSubset>> {
    if m == 0 {
        return Err(Error::InvalidArgument("no responses to enumerate".into()));
    }
    if m > 16 {
        return Err(Error::InvalidArgument(format!(
            "subset sweeps are capped at 16 responses, got {m}"
        )));
    }
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << m))
        .map(|mask| (0..m).filter(|r| mask & (1 << r) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subsets
        .into_iter()
        .map(|indices| ResponseSubset::new(indices, m))
        .collect())
}
