//! Estimation and goodness-of-fit toolkit.
//!
//! Contains the pieces used to decide whether data are compatible with a
//! model and to summarize ensembles of runs: the exponential maximum
//! likelihood estimator, an equal-width binned density estimator, KL
//! divergence between a binned density and a model density, and per-grid
//! ensemble statistics with normal-approximation confidence bands.

use thiserror::Error;

use crate::sim::Trajectory;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("non-positive wait {0}")]
    NonPositiveWait(f64),
    #[error("need at least one bin")]
    NoBins,
    #[error("degenerate range: all samples equal")]
    DegenerateRange,
    #[error("model density vanishes on an occupied bin (midpoint {midpoint})")]
    ModelVanishes { midpoint: f64 },
    #[error("trajectories do not share a grid")]
    GridMismatch,
    #[error("need at least two runs, got {0}")]
    TooFewRuns(usize),
}

/// Maximum likelihood rate of an exponential sample: `1 / mean(waits)`.
pub fn mle_exponential(waits: &[f64]) -> Result<f64, StatsError> {
    if waits.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sum = 0.0;
    for &w in waits {
        if w.is_nan() || w <= 0.0 {
            return Err(StatsError::NonPositiveWait(w));
        }
        sum += w;
    }
    Ok(waits.len() as f64 / sum)
}

/// Equal-width histogram normalized to a density.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDensity {
    /// `n_bins + 1` ascending bin boundaries.
    pub edges: Vec<f64>,
    /// Density per bin: `count / (width * sample_count)`.
    pub heights: Vec<f64>,
    pub sample_count: usize,
}

impl BinnedDensity {
    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Fraction of the sample inside `[edges[0], edges[n]]`; 1 when the
    /// range was taken from the sample itself.
    pub fn total_mass(&self) -> f64 {
        let w = self.bin_width();
        self.heights.iter().map(|h| h * w).sum()
    }
}

/// Bin `samples` into `n_bins` equal-width intervals spanning their range.
pub fn binned_density(samples: &[f64], n_bins: usize) -> Result<BinnedDensity, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(StatsError::DegenerateRange);
    }
    binned_density_with_range(samples, n_bins, lo, hi)
}

/// Same, over an explicit `[lo, hi]` range; samples outside are dropped
/// (total mass is then the covered fraction).
pub fn binned_density_with_range(
    samples: &[f64],
    n_bins: usize,
    lo: f64,
    hi: f64,
) -> Result<BinnedDensity, StatsError> {
    if n_bins == 0 {
        return Err(StatsError::NoBins);
    }
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(StatsError::DegenerateRange);
    }
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        if x < lo || x > hi {
            continue;
        }
        let idx = (((x - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let n = samples.len() as f64;
    let heights = counts.iter().map(|&c| c as f64 / (width * n)).collect();
    let edges = (0..=n_bins).map(|i| lo + i as f64 * width).collect();
    Ok(BinnedDensity {
        edges,
        heights,
        sample_count: samples.len(),
    })
}

/// KL divergence (nats) of a binned density against a model density
/// evaluated at bin midpoints; empty bins contribute zero.
pub fn kl_divergence(
    empirical: &BinnedDensity,
    model: impl Fn(f64) -> f64,
) -> Result<f64, StatsError> {
    let width = empirical.bin_width();
    let mut kl = 0.0;
    for (height, midpoint) in empirical.heights.iter().zip(empirical.midpoints()) {
        if *height == 0.0 {
            continue;
        }
        let m = model(midpoint);
        if m.is_nan() || m <= 0.0 {
            return Err(StatsError::ModelVanishes { midpoint });
        }
        kl += height * (height / m).ln() * width;
    }
    Ok(kl)
}

/// Cross-run statistics on a shared time grid.
#[derive(Debug, Clone)]
pub struct EnsembleSummary {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Sample standard deviation (n-1 denominator) per grid point.
    pub std: Vec<f64>,
    /// 95% normal-approximation band: `mean -+ 1.96 std / sqrt(runs)`.
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub n_runs: usize,
}

impl EnsembleSummary {
    pub fn ci_width(&self, i: usize) -> f64 {
        self.ci_high[i] - self.ci_low[i]
    }
}

/// Summarize the infection densities of an ensemble of trajectories.
pub fn summarize_ensemble(trajs: &[Trajectory]) -> Result<EnsembleSummary, StatsError> {
    if trajs.len() < 2 {
        return Err(StatsError::TooFewRuns(trajs.len()));
    }
    let grid = &trajs[0].grid;
    for t in &trajs[1..] {
        if t.grid != *grid {
            return Err(StatsError::GridMismatch);
        }
    }
    let n = trajs.len() as f64;
    let half_width_factor = 1.96 / n.sqrt();
    let mut mean = Vec::with_capacity(grid.len());
    let mut std = Vec::with_capacity(grid.len());
    let mut ci_low = Vec::with_capacity(grid.len());
    let mut ci_high = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let m = trajs.iter().map(|t| t.rho_i[i]).sum::<f64>() / n;
        let var = trajs
            .iter()
            .map(|t| {
                let d = t.rho_i[i] - m;
                d * d
            })
            .sum::<f64>()
            / (n - 1.0);
        let s = var.sqrt();
        mean.push(m);
        std.push(s);
        ci_low.push(m - half_width_factor * s);
        ci_high.push(m + half_width_factor * s);
    }
    Ok(EnsembleSummary {
        grid: grid.clone(),
        mean,
        std,
        ci_low,
        ci_high,
        n_runs: trajs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mle_is_inverse_sample_mean() {
        assert_eq!(mle_exponential(&[1.0, 2.0, 3.0]).unwrap(), 0.5);
        assert_eq!(mle_exponential(&[4.0]).unwrap(), 0.25);
    }

    #[test]
    fn mle_rejects_bad_samples() {
        assert_eq!(mle_exponential(&[]), Err(StatsError::EmptySample));
        assert_eq!(
            mle_exponential(&[1.0, 0.0]),
            Err(StatsError::NonPositiveWait(0.0))
        );
    }

    #[test]
    fn mle_recovers_the_rate_from_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let waits: Vec<f64> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.random();
                -(1.0 - u).ln() / 0.5
            })
            .collect();
        let mu_hat = mle_exponential(&waits).unwrap();
        assert!((0.49..=0.51).contains(&mu_hat), "mu_hat = {mu_hat}");
    }

    #[test]
    fn symmetric_samples_fill_bins_evenly() {
        // one sample at the midpoint of each of 4 bins
        let samples = [0.5, 1.5, 2.5, 3.5];
        let b = binned_density(&samples, 4).unwrap();
        for h in &b.heights {
            assert!((h - b.heights[0]).abs() < 1e-15);
        }
        assert!((b.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_bin_height_is_inverse_range() {
        let b = binned_density(&[1.0, 2.0, 5.0], 1).unwrap();
        assert_eq!(b.heights.len(), 1);
        assert!((b.heights[0] - 1.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_range_is_an_error() {
        assert_eq!(
            binned_density(&[2.0, 2.0, 2.0], 10),
            Err(StatsError::DegenerateRange)
        );
    }

    #[test]
    fn histogram_consistency_against_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            })
            .collect();
        let b = binned_density(&samples, 50).unwrap();
        let width = b.bin_width();
        let l1: f64 = b
            .heights
            .iter()
            .zip(b.midpoints())
            .map(|(h, m)| (h - (-m).exp()).abs() * width)
            .sum();
        assert!(l1 < 0.05, "L1 distance {l1}");
    }

    #[test]
    fn kl_self_divergence_vanishes_with_sample_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            })
            .collect();
        let b = binned_density(&samples, 50).unwrap();
        let kl = kl_divergence(&b, |t| (-t).exp()).unwrap();
        assert!(kl.abs() < 0.005, "KL = {kl}");
    }

    #[test]
    fn kl_flags_vanishing_model() {
        let b = binned_density(&[0.5, 1.5, 2.5], 3).unwrap();
        let err = kl_divergence(&b, |t| if t < 2.0 { 1.0 } else { 0.0 });
        assert!(matches!(err, Err(StatsError::ModelVanishes { .. })));
    }

    #[test]
    fn explicit_range_drops_outsiders() {
        let b = binned_density_with_range(&[0.5, 1.5, 9.0], 2, 0.0, 2.0).unwrap();
        assert_eq!(b.sample_count, 3);
        assert!((b.total_mass() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_runs_have_zero_spread() {
        let traj = Trajectory {
            grid: vec![0.0, 1.0, 2.0],
            rho_i: vec![0.3, 0.5, 0.6],
            rho_s: vec![0.7, 0.5, 0.4],
            final_ages: vec![],
            absorbed: false,
            seed: 0,
        };
        let s = summarize_ensemble(&[traj.clone(), traj.clone(), traj]).unwrap();
        for i in 0..3 {
            assert_eq!(s.std[i], 0.0);
            assert_eq!(s.ci_low[i], s.mean[i]);
            assert_eq!(s.ci_high[i], s.mean[i]);
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = Trajectory {
            grid: vec![0.0, 1.0],
            rho_i: vec![0.3, 0.4],
            rho_s: vec![0.7, 0.6],
            final_ages: vec![],
            absorbed: false,
            seed: 0,
        };
        let mut b = a.clone();
        b.grid = vec![0.0, 2.0];
        assert!(matches!(
            summarize_ensemble(&[a.clone(), b]),
            Err(StatsError::GridMismatch)
        ));
        assert!(matches!(
            summarize_ensemble(&[a]),
            Err(StatsError::TooFewRuns(1))
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // scaling every wait by c scales the rate estimate by 1/c
            #[test]
            fn mle_scale_invariance(
                waits in proptest::collection::vec(0.01f64..100.0, 1..50),
                c in 0.01f64..100.0,
            ) {
                let base = mle_exponential(&waits).unwrap();
                let scaled: Vec<f64> = waits.iter().map(|w| w * c).collect();
                let got = mle_exponential(&scaled).unwrap();
                prop_assert!((got - base / c).abs() <= 1e-9 * base / c);
            }

            // histogram mass is exactly 1 when the range covers the sample
            #[test]
            fn binned_mass_is_one(
                samples in proptest::collection::vec(-50.0f64..50.0, 2..200),
                n_bins in 1usize..40,
            ) {
                prop_assume!(samples.iter().any(|&x| x != samples[0]));
                let b = binned_density(&samples, n_bins).unwrap();
                prop_assert!((b.total_mass() - 1.0).abs() < 1e-9);
                prop_assert!(b.heights.iter().all(|&h| h >= 0.0));
            }

            // Gibbs: KL against any normalized model on the same support is
            // non-negative up to rounding
            #[test]
            fn kl_non_negative_on_matched_support(
                samples in proptest::collection::vec(0.01f64..10.0, 20..300),
                rate in 0.05f64..5.0,
                n_bins in 2usize..30,
            ) {
                prop_assume!(samples.iter().any(|&x| x != samples[0]));
                let b = binned_density(&samples, n_bins).unwrap();
                let (lo, hi) = (b.edges[0], *b.edges.last().unwrap());
                // exponential truncated to [lo, hi], a proper density there
                let z = (-rate * lo).exp() - (-rate * hi).exp();
                let model = move |t: f64| rate * (-rate * t).exp() / z;
                let kl = kl_divergence(&b, model).unwrap();
                prop_assert!(kl >= -1e-12, "KL = {kl}");
            }
        }
    }
}
