//! Sampling estimates of the law of `S_n` for sizes beyond exact computation.
//!
//! Samples are drawn in [`GROUPS`] groups. Group `g` uses a ChaCha8 generator
//! seeded with the master seed and switched to stream `g`, so results depend
//! only on `(seed, samples)` and not on the thread count. The groups double as
//! the jackknife blocks for the standard error of the TV estimate.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BernoulliMatrix;
use crate::measures::{poisson_pmf, tv_distance, PoissonParams, SignedPmf};

pub const MIN_SAMPLES: u64 = 10_000;
pub const GROUPS: u64 = 20;

/// One draw of `S_n`: a uniform permutation by Fisher–Yates, then one
/// Bernoulli draw per row along it.
pub fn sample_sn_with<R: Rng + ?Sized>(m: &BernoulliMatrix, perm: &mut [usize], rng: &mut R) -> usize {
    perm.shuffle(rng);
    perm.iter()
        .enumerate()
        .filter(|&(j, &r)| rng.gen::<f64>() < m.get(j, r))
        .count()
}

pub fn sample_sn(m: &BernoulliMatrix, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..m.n()).collect();
    sample_sn_with(m, &mut perm, &mut rng)
}

fn group_rng(seed: u64, group: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(group);
    rng
}

/// Histogram of `samples` draws, split into [`GROUPS`] reproducible groups.
pub fn sample_counts(m: &BernoulliMatrix, samples: u64, seed: u64) -> Vec<Vec<u64>> {
    let n = m.n();
    (0..GROUPS)
        .into_par_iter()
        .map(|g| {
            let size = samples * (g + 1) / GROUPS - samples * g / GROUPS;
            let mut rng = group_rng(seed, g);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut counts = vec![0u64; n + 1];
            for _ in 0..size {
                counts[sample_sn_with(m, &mut perm, &mut rng)] += 1;
            }
            counts
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub samples: u64,
    pub seed: u64,
    pub lambda: f64,
    pub counts: Vec<u64>,
    pub pmf_hat: SignedPmf,
    /// Binomial standard error `√(p̂(1 − p̂)/N)` of each point mass.
    pub pmf_std_err: Vec<f64>,
    /// Plug-in `d_TV(P̂, Po(λ))`.
    pub tv_hat: f64,
    /// Delete-one-group jackknife standard error of `tv_hat`.
    pub std_err: f64,
    /// `½ Σ √(p̂(1 − p̂)/N)`, an estimate of the upward bias of `tv_hat`.
    pub bias_bound: f64,
}

fn tv_from_counts(counts: &[u64], total: u64, po: &SignedPmf) -> f64 {
    let pmf = SignedPmf::new(0, counts.iter().map(|&c| c as f64 / total as f64).collect());
    tv_distance(&pmf, po).value
}

pub fn estimate(m: &BernoulliMatrix, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("at least {MIN_SAMPLES} samples are required, got {samples}")));
    }
    let lambda = m.lambda();
    let po = poisson_pmf(&PoissonParams::new(lambda))?;
    let groups = sample_counts(m, samples, seed);
    let mut counts = vec![0u64; m.n() + 1];
    for g in &groups {
        for (c, x) in counts.iter_mut().zip(g) {
            *c += x;
        }
    }
    let nf = samples as f64;
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let pmf_std_err: Vec<f64> = weights.iter().map(|&p| (p * (1.0 - p) / nf).sqrt()).collect();
    let bias_bound = 0.5 * pmf_std_err.iter().sum::<f64>();
    let tv_hat = tv_from_counts(&counts, samples, &po);

    let loo: Vec<f64> = groups
        .iter()
        .map(|g| {
            let rest: Vec<u64> = counts.iter().zip(g).map(|(c, x)| c - x).collect();
            tv_from_counts(&rest, rest.iter().sum(), &po)
        })
        .collect();
    let k = GROUPS as f64;
    let mean = loo.iter().sum::<f64>() / k;
    let std_err = ((k - 1.0) / k * loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>()).sqrt();

    Ok(MCEstimate {
        samples,
        seed,
        lambda,
        counts,
        pmf_hat: SignedPmf::new(0, weights),
        pmf_std_err,
        tv_hat,
        std_err,
        bias_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_always_n() {
        let m = BernoulliMatrix::constant(5, 1.0).unwrap();
        assert!((0..50).all(|s| sample_sn(&m, s) == 5));
        let e = estimate(&m, MIN_SAMPLES, 3).unwrap();
        assert_eq!(e.counts[5], MIN_SAMPLES);
        assert!(e.std_err < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let m = BernoulliMatrix::identity(3).unwrap();
        assert!(matches!(estimate(&m, 999, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn reproducible_and_normalised() {
        let m = BernoulliMatrix::random(5, 11, false).unwrap();
        let a = estimate(&m, 20_000, 8).unwrap();
        assert_eq!(a, estimate(&m, 20_000, 8).unwrap());
        assert_ne!(a.counts, estimate(&m, 20_000, 9).unwrap().counts);
        assert_eq!(a.counts.iter().sum::<u64>(), 20_000);
        assert!((a.pmf_hat.mass() - 1.0).abs() < 1e-12);
        assert!(a.pmf_hat.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn constant_mean_clt() {
        let (n, p, samples) = (6, 0.3, 1_000_000u64);
        let m = BernoulliMatrix::constant(n, p).unwrap();
        let e = estimate(&m, samples, 5).unwrap();
        let mean: f64 = e.pmf_hat.weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        let sd = (n as f64 * p * (1.0 - p) / samples as f64).sqrt();
        assert!((mean - n as f64 * p).abs() < 4.0 * sd, "{mean}");
    }
}
