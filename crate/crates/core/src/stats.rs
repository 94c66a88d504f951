//! Small statistical helpers: moments, quantiles, rank correlation,
//! histograms and MCMC chain diagnostics.

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Pearson correlation; 0 when either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Mid-ranks (ties get the average of the ranks they span), 1-based.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` when either vector is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if constant(xs) || constant(ys) {
        return None;
    }
    Some(pearson(&ranks(xs), &ranks(ys)))
}

/// Empirical quantile by linear interpolation of the order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Fixed-bin histogram.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bin `xs` into `bins` equal-width bins over `[lo, hi]`; values outside
    /// the range are clamped into the edge bins.
    pub fn new(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo);
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &x in xs {
            let b = ((x - lo) / width).floor() as i64;
            let b = b.clamp(0, bins as i64 - 1) as usize;
            counts[b] += 1;
        }
        Histogram { lo, hi, counts }
    }

    /// Normalized bin probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

/// Total-variation distance between two discrete distributions.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Split-R̂ computed from consecutive segments of a single chain.
///
/// The retained chain is split into `segments` equal parts which are treated
/// as independent chains; values near 1 indicate the segments agree in mean
/// and variance.
pub fn split_rhat(chain: &[f64], segments: usize) -> f64 {
    let seg_len = chain.len() / segments;
    if seg_len < 2 {
        return f64::NAN;
    }
    let segs: Vec<&[f64]> = (0..segments)
        .map(|s| &chain[s * seg_len..(s + 1) * seg_len])
        .collect();
    let m = segments as f64;
    let n = seg_len as f64;
    let means: Vec<f64> = segs.iter().map(|s| mean(s)).collect();
    let grand = mean(&means);
    let b = n / (m - 1.0) * means.iter().map(|&x| (x - grand).powi(2)).sum::<f64>();
    let w = segs.iter().map(|s| variance(s)).sum::<f64>() / m;
    if w <= 0.0 {
        // Constant chain: segments agree exactly.
        return if b <= 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    (var_plus / w).sqrt()
}

/// Effective sample size via Geyer's initial positive sequence estimator.
pub fn effective_sample_size(chain: &[f64]) -> f64 {
    let n = chain.len();
    if n < 4 {
        return n as f64;
    }
    let m = mean(chain);
    let centered: Vec<f64> = chain.iter().map(|x| x - m).collect();
    let c0 = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return n as f64;
    }
    let auto = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
            / c0
    };
    // Sum of paired autocorrelations while the pair sums stay positive.
    let mut sum = 0.0;
    let mut lag = 1;
    while lag + 1 < n / 2 {
        let pair = auto(lag) + auto(lag + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        lag += 2;
    }
    (n as f64 / (1.0 + 2.0 * sum)).min(n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(mean(&xs), 2.5);
        assert_relative_eq!(variance(&xs), 5.0 / 3.0);
    }

    #[test]
    fn spearman_monotone_is_one() {
        let xs = [0.1, 0.5, 0.9, 2.0];
        let ys = [1.0, 4.0, 9.0, 100.0];
        assert_relative_eq!(spearman(&xs, &ys).unwrap(), 1.0);
        let neg = [5.0, 4.0, 3.0, -1.0];
        assert_relative_eq!(spearman(&xs, &neg).unwrap(), -1.0);
    }

    #[test]
    fn spearman_constant_is_undefined() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn ranks_handle_ties() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn histogram_counts_and_tv() {
        let h = Histogram::new(&[0.1, 0.2, 0.9], 0.0, 1.0, 2);
        assert_eq!(h.counts, vec![2, 1]);
        let p = h.probabilities();
        assert_relative_eq!(total_variation(&p, &p), 0.0);
    }

    #[test]
    fn ess_of_iid_chain_is_large() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(1);
        let chain: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let ess = effective_sample_size(&chain);
        assert!(ess > 2000.0, "iid ESS should be near n, got {ess}");
    }

    #[test]
    fn rhat_of_stationary_chain_near_one() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(2);
        let chain: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let r = split_rhat(&chain, 4);
        assert!((r - 1.0).abs() < 0.05, "R-hat {r}");
    }
}
