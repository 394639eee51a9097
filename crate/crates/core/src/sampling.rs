//! Training-point selection.
//!
//! Three subsampling strategies share one contract: given the flattened
//! value array and an explicit RNG, produce a list of flat indices drawn
//! with replacement. Importance sampling draws proportionally to `|y|`
//! (epsilon for zeros); entropy-based sampling flattens the value histogram
//! under a per-bin quota with water-filling deficit redistribution; random
//! sampling is uniform.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math;
use crate::volume::{self, Volume3D, VolumeError};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SamplingError {
    #[error("input values are empty")]
    EmptyInput,
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("bin count must be >= 1")]
    ZeroBins,
    #[error("sampling ratio must lie in (0, 1], got {0}")]
    BadRho(f64),
    #[error("sample count must be >= 1")]
    ZeroSamples,
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// Normalized per-cell sampling weights; `w` sums to 1 and every entry is
/// strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceWeights {
    w: Vec<f64>,
    epsilon: f64,
}

impl ImportanceWeights {
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Default epsilon: 1e-3 times the mean nonzero magnitude, so the zero-cell
/// weight tracks the data scale. Falls back to 1e-3 on all-zero input.
pub fn default_epsilon(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in values {
        if v != 0.0 {
            sum += v.abs();
            count += 1;
        }
    }
    if count == 0 {
        1e-3
    } else {
        1e-3 * sum / count as f64
    }
}

/// `w_i = |y_i|` for nonzero values, epsilon for zeros, normalized to sum 1.
pub fn importance_weights(values: &[f64], epsilon: f64) -> Result<ImportanceWeights, SamplingError> {
    if values.is_empty() {
        return Err(SamplingError::EmptyInput);
    }
    if !(epsilon > 0.0) {
        return Err(SamplingError::BadEpsilon(epsilon));
    }
    let mut w: Vec<f64> = values
        .iter()
        .map(|&v| if v != 0.0 { v.abs() } else { epsilon })
        .collect();
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    Ok(ImportanceWeights { w, epsilon })
}

/// Cumulative-distribution sampler over importance weights. Building it is
/// O(n); each draw is a binary search.
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    cdf: Vec<f64>,
}

impl WeightedSampler {
    pub fn new(weights: &ImportanceWeights) -> Self {
        let mut cdf = Vec::with_capacity(weights.w.len());
        let mut acc = 0.0;
        for &w in &weights.w {
            acc += w;
            cdf.push(acc);
        }
        // Guard against rounding shortfall at the top end.
        if let Some(last) = cdf.last_mut() {
            *last = f64::INFINITY;
        }
        WeightedSampler { cdf }
    }

    pub fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.gen();
            out.push(self.cdf.partition_point(|&c| c <= u));
        }
        out
    }
}

/// `n` indices drawn i.i.d. with replacement, `P(i) = w_i`.
pub fn weighted_sample<R: Rng>(
    weights: &ImportanceWeights,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>, SamplingError> {
    if n == 0 {
        return Err(SamplingError::ZeroSamples);
    }
    Ok(WeightedSampler::new(weights).draw(n, rng))
}

/// Equal-width histogram of the value distribution over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramModel {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub bins: usize,
}

impl HistogramModel {
    /// Bin index for a value; the upper bound lands in the last bin, and a
    /// degenerate `lo == hi` range puts everything in bin 0.
    pub fn bin_of(&self, v: f64) -> usize {
        let lo = self.edges[0];
        let hi = self.edges[self.bins];
        if hi <= lo {
            return 0;
        }
        let idx = ((v - lo) / (hi - lo) * self.bins as f64) as usize;
        idx.min(self.bins - 1)
    }
}

/// Builds the histogram approximation `P(y)` used by entropy-based
/// sampling; bounds are the dataset min/max.
pub fn entropy_histogram(values: &[f64], bins: usize) -> Result<HistogramModel, SamplingError> {
    if values.is_empty() {
        return Err(SamplingError::EmptyInput);
    }
    if bins == 0 {
        return Err(SamplingError::ZeroBins);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect();
    let mut hist = HistogramModel {
        edges,
        counts: vec![0; bins],
        total: values.len() as u64,
        bins,
    };
    for &v in values {
        let bin = hist.bin_of(v);
        hist.counts[bin] += 1;
    }
    Ok(hist)
}

/// Per-bin sample quotas for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct BinAllocation {
    pub take: Vec<u64>,
    /// Base quota `N * rho / B`.
    pub quota: f64,
    pub rho: f64,
}

impl BinAllocation {
    pub fn budget(&self) -> u64 {
        self.take.iter().sum()
    }
}

/// Splits the budget `round(N * rho)` across bins as uniformly as the data
/// allows.
///
/// Bins below the water level contribute everything they have; the deficit
/// is redistributed by raising a common level `T` over the remaining bins
/// until the budget is met (`take_i = min(counts_i, T)`). Quotas are
/// rounded half-to-even and any rounding residual lands on the
/// largest-count bin so the budget is exact.
pub fn entropy_allocate(hist: &HistogramModel, rho: f64) -> Result<BinAllocation, SamplingError> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(SamplingError::BadRho(rho));
    }
    let n = hist.total as f64;
    let budget = math::round_ties_even(n * rho) as u64;
    let quota = n * rho / hist.bins as f64;

    // Find the water level T with sum(min(counts_i, T)) == budget over the
    // occupied bins.
    let mut sorted: Vec<u64> = hist.counts.iter().copied().filter(|&c| c > 0).collect();
    sorted.sort_unstable();
    let mut level = *sorted.last().unwrap_or(&0) as f64;
    let mut prefix = 0u64;
    for (i, &c) in sorted.iter().enumerate() {
        let candidate = (budget.saturating_sub(prefix)) as f64 / (sorted.len() - i) as f64;
        if candidate <= c as f64 {
            level = candidate;
            break;
        }
        prefix += c;
    }

    let mut take: Vec<u64> = hist
        .counts
        .iter()
        .map(|&c| {
            if c == 0 {
                0
            } else {
                math::round_ties_even((c as f64).min(level)) as u64
            }
        })
        .collect();

    // Budget exactness: per-bin rounding can leave a residual of up to
    // bins/2 samples, so adjust greedily. Surplus goes to the bin with the
    // most remaining cells; deficits come off the bin with the largest take.
    // Ties resolve to the lowest bin index so the result is deterministic.
    let mut assigned: u64 = take.iter().sum();
    while assigned < budget {
        let target = hist
            .counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        take[target] += 1;
        assigned += 1;
    }
    while assigned > budget {
        let target = take
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        take[target] -= 1;
        assigned -= 1;
    }
    Ok(BinAllocation { take, quota, rho })
}

/// Histogram-flattening sampler: builds the histogram, allocates per-bin
/// quotas, then draws uniformly with replacement inside each bin.
pub fn entropy_sample<R: Rng>(
    values: &[f64],
    rho: f64,
    bins: usize,
    rng: &mut R,
) -> Result<Vec<usize>, SamplingError> {
    let hist = entropy_histogram(values, bins)?;
    let alloc = entropy_allocate(&hist, rho)?;
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); bins];
    for (i, &v) in values.iter().enumerate() {
        members[hist.bin_of(v)].push(i as u32);
    }
    let mut out = Vec::with_capacity(alloc.budget() as usize);
    for (bin, &take) in alloc.take.iter().enumerate() {
        let m = &members[bin];
        if m.is_empty() {
            continue;
        }
        for _ in 0..take {
            out.push(m[rng.gen_range(0..m.len())] as usize);
        }
    }
    Ok(out)
}

/// `n` indices drawn uniformly with replacement over `[0, n_total)`.
pub fn random_sample<R: Rng>(
    n_total: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>, SamplingError> {
    if n == 0 {
        return Err(SamplingError::ZeroSamples);
    }
    if n_total == 0 {
        return Err(SamplingError::EmptyInput);
    }
    Ok((0..n).map(|_| rng.gen_range(0..n_total)).collect())
}

/// Aligned index/coordinate/value triples for one training draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub indices: Vec<usize>,
    pub coords: Vec<[f64; 3]>,
    pub targets: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Retrieves normalized coordinates and target values for sampled indices.
pub fn gather(volume: &Volume3D, indices: &[usize]) -> Result<SampleSet, SamplingError> {
    let dims = volume.dims();
    let n = dims.len();
    let mut coords = Vec::with_capacity(indices.len());
    let mut targets = Vec::with_capacity(indices.len());
    for &idx in indices {
        if idx >= n {
            let (i, j, k) = dims.unflat(idx.min(n));
            return Err(SamplingError::Volume(VolumeError::IndexOutOfRange {
                i,
                j,
                k,
                c: dims.c,
                z: dims.z,
                r: dims.r,
            }));
        }
        coords.push(volume::normalize_coords(dims.unflat(idx), dims)?);
        targets.push(volume::normalize_value(volume.values()[idx]));
    }
    Ok(SampleSet {
        indices: indices.to_vec(),
        coords,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Dims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn importance_weights_by_hand() {
        // Eq-style hand case: [0, 2, 0, 3] with eps 0.5 totals 6.
        let w = importance_weights(&[0.0, 2.0, 0.0, 3.0], 0.5).unwrap();
        let expected = [0.5 / 6.0, 2.0 / 6.0, 0.5 / 6.0, 3.0 / 6.0];
        for (a, b) in w.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn importance_weights_all_zero_is_uniform() {
        let w = importance_weights(&[0.0; 8], 0.25).unwrap();
        for &x in w.weights() {
            assert!((x - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn importance_weights_scale_invariant() {
        let a = importance_weights(&[0.0, 2.0, 5.0], 0.5).unwrap();
        let b = importance_weights(&[0.0, 6.0, 15.0], 1.5).unwrap();
        for (x, y) in a.weights().iter().zip(b.weights()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_sample_degenerate_distribution() {
        let w = importance_weights(&[5.0, 0.0, 0.0], 1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let idx = weighted_sample(&w, 5, &mut rng).unwrap();
        assert_eq!(idx, vec![0; 5]);
    }

    #[test]
    fn weighted_sample_is_deterministic() {
        let w = importance_weights(&[1.0, 2.0, 3.0, 4.0], 0.1).unwrap();
        let a = weighted_sample(&w, 100, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = weighted_sample(&w, 100, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_weights_draw_binomially() {
        let w = importance_weights(&[1.0, 1.0, 1.0, 1.0], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let idx = weighted_sample(&w, 1_000_000, &mut rng).unwrap();
        let mut counts = [0u64; 4];
        for i in idx {
            counts[i] += 1;
        }
        // mean 250k, sigma = sqrt(n p (1-p)) ~= 433; allow 3 sigma.
        for &c in &counts {
            assert!((c as i64 - 250_000).abs() < 3 * 433, "count {c}");
        }
    }

    #[test]
    fn histogram_by_hand() {
        let h = entropy_histogram(&[0.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(h.counts, vec![3, 1]);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn histogram_degenerate_range() {
        let h = entropy_histogram(&[0.7; 10], 4).unwrap();
        assert_eq!(h.counts, vec![10, 0, 0, 0]);
    }

    #[test]
    fn allocation_uniform_case() {
        let hist = HistogramModel {
            edges: (0..=10).map(|i| i as f64).collect(),
            counts: vec![100; 10],
            total: 1000,
            bins: 10,
        };
        let alloc = entropy_allocate(&hist, 0.1).unwrap();
        assert_eq!(alloc.take, vec![10; 10]);
        assert!((alloc.quota - 10.0).abs() < 1e-12);
    }

    #[test]
    fn allocation_water_fills_deficit() {
        let hist = HistogramModel {
            edges: vec![0.0, 0.5, 1.0],
            counts: vec![5, 95],
            total: 100,
            bins: 2,
        };
        let alloc = entropy_allocate(&hist, 0.2).unwrap();
        assert_eq!(alloc.take, vec![5, 15]);
    }

    #[test]
    fn allocation_full_ratio_takes_everything() {
        let hist = HistogramModel {
            edges: vec![0.0, 0.25, 0.5, 1.0],
            counts: vec![7, 0, 13],
            total: 20,
            bins: 3,
        };
        let alloc = entropy_allocate(&hist, 1.0).unwrap();
        assert_eq!(alloc.take, hist.counts);
    }

    #[test]
    fn entropy_sample_always_includes_rare_bin() {
        let values = [0.0, 0.0, 0.0, 0.0, 0.9];
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let idx = entropy_sample(&values, 0.4, 2, &mut rng).unwrap();
            assert_eq!(idx.len(), 2);
            assert!(idx.contains(&4), "draw {idx:?}");
        }
    }

    #[test]
    fn entropy_sample_flattens_two_bin_input() {
        // 90/10 split: the allocated histogram must be strictly closer to
        // uniform (chi-square) than the rho-scaled original.
        let mut values = vec![0.0; 90];
        values.extend(vec![1.0; 10]);
        let hist = entropy_histogram(&values, 2).unwrap();
        let rho = 0.5;
        let alloc = entropy_allocate(&hist, rho).unwrap();
        let budget = alloc.budget() as f64;
        let e = budget / 2.0;
        let chi_alloc: f64 = alloc
            .take
            .iter()
            .map(|&t| (t as f64 - e) * (t as f64 - e) / e)
            .sum();
        let chi_orig: f64 = hist
            .counts
            .iter()
            .map(|&c| (c as f64 * rho - e) * (c as f64 * rho - e) / e)
            .sum();
        assert!(chi_alloc < chi_orig, "{chi_alloc} vs {chi_orig}");
    }

    #[test]
    fn random_sample_bounds_and_determinism() {
        let a = random_sample(1, 10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, vec![0; 10]);
        let b = random_sample(100, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let c = random_sample(100, 50, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(b, c);
        assert!(b.iter().all(|&i| i < 100));
    }

    #[test]
    fn gather_matches_definitions() {
        let v = Volume3D::new(Dims::new(2, 2, 1), vec![512, 0, 64, 1023]).unwrap();
        let s = gather(&v, &[0, 3, 3]).unwrap();
        assert_eq!(s.coords[0], [-1.0, -1.0, 0.0]);
        assert!((s.targets[0] - 512.0 / 1023.0).abs() < 1e-15);
        assert_eq!(s.coords[1], s.coords[2]);
        assert_eq!(s.targets[1], 1.0);
        assert!(gather(&v, &[4]).is_err());
    }
}
