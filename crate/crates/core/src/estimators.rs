//! Weighted and norm-free thermal estimators, sampling efficiency, and
//! bootstrap error bars over per-sample records.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{SiteIndex, StateVector};
use crate::imagtime::{Checkpoint, BETA_MATCH_TOL};

/// Everything kept from one sampled initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_index: u64,
    /// One entry per beta checkpoint, ascending in beta.
    pub checkpoints: Vec<Checkpoint>,
    /// Half-chain entanglement entropy of the initial state, in nats.
    pub init_entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub eta: f64,
    pub entropy_i: f64,
    pub samples: usize,
    pub bootstrap_sigma: f64,
    pub n_resamples: usize,
}

/// For unit-normalized sampling states `Tr O = 2^L * E[<psi|O|psi>]`.
/// The constant cancels from every ratio estimator.
pub fn trace_prefactor(num_sites: usize) -> f64 {
    2f64.powi(num_sites as i32)
}

/// `ln sum_i exp(x_i)`, shifted by the maximum.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Normalized weights `exp(x_m) / sum_l exp(x_l)`.
pub fn weights_from_log(log_norms: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(log_norms);
    log_norms.iter().map(|x| (x - lse).exp()).collect()
}

/// `(log_sq_norm, obs_value)` of every record at `beta`.
pub fn column(records: &[SampleRecord], beta: f64) -> Result<Vec<(f64, f64)>> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let pos = first
        .checkpoints
        .iter()
        .position(|c| (c.beta - beta).abs() <= BETA_MATCH_TOL)
        .ok_or(Error::BetaNotOnGrid(beta))?;
    records
        .iter()
        .map(|r| match r.checkpoints.get(pos) {
            Some(c) if (c.beta - beta).abs() <= BETA_MATCH_TOL => Ok((c.log_sq_norm, c.obs_value)),
            _ => Err(Error::GridMismatch),
        })
        .collect()
}

pub fn weights(records: &[SampleRecord], beta: f64) -> Result<Vec<f64>> {
    let col = column(records, beta)?;
    let logs: Vec<f64> = col.iter().map(|p| p.0).collect();
    Ok(weights_from_log(&logs))
}

/// `I = -sum w ln w` with `0 ln 0 = 0`.
pub fn information_entropy(weights: &[f64]) -> f64 {
    -weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| w * w.ln())
        .sum::<f64>()
}

/// `exp(I) / M` for weights summing to one.
pub fn eta(weights: &[f64]) -> f64 {
    information_entropy(weights).exp() / weights.len() as f64
}

/// Sampling efficiency with a bootstrap error bar. Each resample draws `M`
/// weights with replacement and renormalizes them, which is the same as
/// recomputing weights from the resampled log-norms. `n_resamples < 2`
/// skips the bootstrap and reports a zero sigma.
pub fn efficiency(weights: &[f64], n_resamples: usize, seed: u64) -> Result<EfficiencyReport> {
    if weights.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    let entropy_i = information_entropy(weights);
    let bootstrap_sigma = if n_resamples >= 2 {
        bootstrap_sigma(
            weights,
            |w| {
                let total: f64 = w.iter().sum();
                let renorm: Vec<f64> = w.iter().map(|x| x / total).collect();
                eta(&renorm)
            },
            n_resamples,
            seed,
        )?
    } else {
        0.0
    };
    Ok(EfficiencyReport {
        eta: entropy_i.exp() / weights.len() as f64,
        entropy_i,
        samples: weights.len(),
        bootstrap_sigma,
        n_resamples,
    })
}

/// Weighted estimate `sum_m w_m O_m` from `(log_sq_norm, obs_value)` pairs.
pub fn weighted_mean(pairs: &[(f64, f64)]) -> f64 {
    let logs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    weights_from_log(&logs)
        .iter()
        .zip(pairs)
        .map(|(w, p)| w * p.1)
        .sum()
}

pub fn plain_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Norm-weighted thermal expectation at `beta`.
pub fn weighted_expectation(records: &[SampleRecord], beta: f64) -> Result<f64> {
    Ok(weighted_mean(&column(records, beta)?))
}

/// Sample average of the normalized expectation values at `beta`; needs no
/// norm information.
pub fn simple_expectation(records: &[SampleRecord], beta: f64) -> Result<f64> {
    let obs: Vec<f64> = column(records, beta)?.iter().map(|p| p.1).collect();
    Ok(plain_mean(&obs))
}

/// Von Neumann entropy (nats) of the left half, sites `1..=floor(L/2)`.
pub fn entanglement_entropy(state: &StateVector) -> Result<f64> {
    let spectrum = state.schmidt_spectrum(SiteIndex(state.num_sites() / 2))?;
    Ok(-spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>())
}

/// Standard deviation of `statistic` over `n_resamples` with-replacement
/// resamples of `items`. Resample `r` draws from its own ChaCha stream, so
/// the result is a pure function of the inputs and `seed`.
pub fn bootstrap_sigma<T, F>(items: &[T], statistic: F, n_resamples: usize, seed: u64) -> Result<f64>
where
    T: Clone + Sync,
    F: Fn(&[T]) -> f64 + Sync,
{
    if items.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if n_resamples < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 2 resamples, got {n_resamples}"
        )));
    }
    let n = items.len();
    let stats: Vec<f64> = (0..n_resamples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r);
            let resample: Vec<T> = (0..n).map(|_| items[rng.random_range(0..n)].clone()).collect();
            statistic(&resample)
        })
        .collect();
    let mean = plain_mean(&stats);
    let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (stats.len() - 1) as f64;
    Ok(var.sqrt())
}
