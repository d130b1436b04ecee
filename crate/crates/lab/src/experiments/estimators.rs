//! Monte Carlo estimators for the height observables: variance at a
//! vertex, small-ball and tail probabilities, and the maximum height.
//! Every estimator runs its own chains from `McParams` and reports an
//! `EstimateWithError` that is a pure function of (inputs, seed).

use surface_shift_core::{Graph, Vertex};

use crate::potential::Potential;
use crate::sampler::{McParams, SurfaceSampler};
use crate::stats::{self, EstimateWithError};
use crate::{Error, Result};

/// Pooled empirical probability of 0/1 indicator samples with a binomial
/// stderr floored at 1/N, so a zero count still carries uncertainty.
pub fn probability_estimate(indicator_chains: &[Vec<f64>], seed: u64) -> EstimateWithError {
    let pooled = stats::pool(indicator_chains);
    let n = pooled.len();
    let p = stats::mean(&pooled);
    let stderr = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
    EstimateWithError { value: p, stderr, n_samples: n, seed }
}

/// Sample variance of the height at `v` (pooled over chains) with a
/// leave-one-chain-out jackknife stderr.
pub fn estimate_variance(
    g: &Graph,
    u: &Potential,
    v: Vertex,
    params: &McParams,
) -> Result<EstimateWithError> {
    if v >= g.vertex_count() {
        return Err(Error::config("variance.v", "vertex out of range"));
    }
    if v == g.origin() {
        return Err(Error::config("variance.v", "must differ from the pinned origin"));
    }
    let sampler = SurfaceSampler::new(g, u.clone());
    let chains = sampler.run_chains(params, |h| h[v])?;
    let value = stats::pooled_variance(&chains);
    let stderr = stats::jackknife_chain_stderr(&chains, stats::sample_variance);
    Ok(EstimateWithError { value, stderr, n_samples: params.total_samples(), seed: params.seed })
}

/// P(|phi_v| <= r) for r >= 1 (the probed regime).
pub fn estimate_small_ball(
    g: &Graph,
    u: &Potential,
    v: Vertex,
    radius: f64,
    params: &McParams,
) -> Result<EstimateWithError> {
    if !(radius >= 1.0) {
        return Err(Error::config("small_ball.radius", "must be >= 1"));
    }
    if v >= g.vertex_count() {
        return Err(Error::config("small_ball.v", "vertex out of range"));
    }
    let sampler = SurfaceSampler::new(g, u.clone());
    let chains = sampler.run_chains(params, |h| if h[v].abs() <= radius { 1.0 } else { 0.0 })?;
    Ok(probability_estimate(&chains, params.seed))
}

/// P(|phi_v| >= t sqrt(log(1 + |v|_1))) for t >= 1; torus only (the level
/// is tied to the l1 norm of the vertex).
pub fn estimate_tail(
    g: &Graph,
    u: &Potential,
    v: Vertex,
    t: f64,
    params: &McParams,
) -> Result<EstimateWithError> {
    if !(t >= 1.0) {
        return Err(Error::config("tail.t", "must be >= 1"));
    }
    if v >= g.vertex_count() {
        return Err(Error::config("tail.v", "vertex out of range"));
    }
    let norm = g.l1_norm(v)? as f64;
    let level = t * (1.0 + norm).ln().sqrt();
    let sampler = SurfaceSampler::new(g, u.clone());
    let chains = sampler.run_chains(params, |h| if h[v].abs() >= level { 1.0 } else { 0.0 })?;
    Ok(probability_estimate(&chains, params.seed))
}

/// Median of max_v |phi_v| with a bootstrap stderr (400 resamples).
pub fn estimate_max(g: &Graph, u: &Potential, params: &McParams) -> Result<EstimateWithError> {
    let sampler = SurfaceSampler::new(g, u.clone());
    let chains = sampler.run_chains(params, |h| {
        h.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
    })?;
    let pooled = stats::pool(&chains);
    let value = stats::median(&pooled);
    let stderr = stats::bootstrap_median_stderr(&pooled, params.seed, 400);
    Ok(EstimateWithError { value, stderr, n_samples: pooled.len(), seed: params.seed })
}
