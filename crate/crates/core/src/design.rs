//! Space-filling designs for experiments and optimizer starts.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Latin hypercube sample of `n` points over the given per-dimension bounds.
///
/// Each dimension is divided into `n` equal strata; every stratum receives
/// exactly one point, jittered uniformly within the stratum, and strata are
/// shuffled independently per dimension.
pub fn latin_hypercube(bounds: &[(f64, f64)], n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("latin hypercube needs n >= 1".into()));
    }
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "latin hypercube bounds for dimension {i} are empty: [{lo}, {hi}]"
            )));
        }
    }
    let d = bounds.len();
    let mut points = vec![vec![0.0; d]; n];
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (i, point) in points.iter_mut().enumerate() {
            let u: f64 = rng.random();
            point[j] = lo + (strata[i] as f64 + u) / n as f64 * (hi - lo);
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    #[test]
    fn strata_are_filled() {
        let mut rng = rng_from(3);
        let pts = latin_hypercube(&[(0.0, 1.0), (10.0, 20.0)], 8, &mut rng).unwrap();
        assert_eq!(pts.len(), 8);
        for j in 0..2 {
            let (lo, hi) = [(0.0, 1.0), (10.0, 20.0)][j];
            let mut seen = vec![false; 8];
            for p in &pts {
                assert!(p[j] >= lo && p[j] <= hi);
                let s = ((p[j] - lo) / (hi - lo) * 8.0).floor() as usize;
                assert!(!seen[s.min(7)], "stratum {s} hit twice in dim {j}");
                seen[s.min(7)] = true;
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = latin_hypercube(&[(0.0, 1.0)], 5, &mut rng_from(9)).unwrap();
        let b = latin_hypercube(&[(0.0, 1.0)], 5, &mut rng_from(9)).unwrap();
        assert_eq!(a, b);
    }
}
