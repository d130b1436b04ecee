//! Coupling from the past for the hammock potential. Two coupled chains
//! start from the pointwise extremal feasible states and run the same
//! heat-bath updates with shared uniforms from the past to time 0; when
//! they meet, the common state is an exact sample of the pinned measure.
//!
//! The uniforms for absolute sweep time t are a pure function of
//! (master seed, sample index, t), so every epoch replays the identical
//! randomness for times already visited, which is what the method needs.

use rand::Rng;
use rayon::prelude::*;

use surface_shift_core::{Configuration, Graph};

use crate::rng::{derive_rng, STREAM_CFTP};
use crate::sampler::conditional_interval;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CftpOutcome {
    pub config: Configuration,
    /// Number of doubling epochs used; the final window was 2^(epochs-1).
    pub epochs: u32,
    pub total_sweeps: u64,
}

fn uniforms_for(master: u64, sample_index: u64, t: u64, nv: usize) -> Vec<f64> {
    let mut rng = derive_rng(master, &[STREAM_CFTP, sample_index, t]);
    (0..nv).map(|_| rng.random()).collect()
}

/// One shared-uniform sweep of both extremal chains. Each site draw is
/// lo + u * (hi - lo) on the conditional interval, which is monotone in
/// the configuration, so the order lo <= hi is preserved.
fn coupled_sweep(g: &Graph, k: f64, lo: &mut [f64], hi: &mut [f64], us: &[f64]) -> Result<()> {
    let origin = g.origin();
    for v in 0..g.vertex_count() {
        if v == origin {
            continue;
        }
        let (a, b) = conditional_interval(g, k, lo, v)?;
        lo[v] = a + us[v] * (b - a);
        let (a, b) = conditional_interval(g, k, hi, v)?;
        hi[v] = a + us[v] * (b - a);
    }
    Ok(())
}

/// Exact sampler for the hammock measure pinned to 0 at the origin.
/// Windows double until the extremal chains coalesce (exact f64 equality);
/// `max_epoch` bounds the doubling and trips `Error::CftpBudget`.
pub fn cftp_hammock(
    g: &Graph,
    k: f64,
    master_seed: u64,
    sample_index: u64,
    max_epoch: u32,
) -> Result<CftpOutcome> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::config("potential.k", "must be finite and positive"));
    }
    let nv = g.vertex_count();
    let dist = g.distances_from(g.origin());
    let mut total_sweeps = 0u64;
    for epoch in 0..=max_epoch {
        let window = 1u64 << epoch;
        // Extremal feasible states: +-k * graph distance from the pin.
        let mut lo: Vec<f64> = dist.iter().map(|&d| -(d as f64) * k).collect();
        let mut hi: Vec<f64> = dist.iter().map(|&d| d as f64 * k).collect();
        for t in (1..=window).rev() {
            let us = uniforms_for(master_seed, sample_index, t, nv);
            coupled_sweep(g, k, &mut lo, &mut hi, &us)?;
        }
        total_sweeps += window;
        if lo == hi {
            let origin = g.origin();
            let pin = lo[origin];
            let config = Configuration::new(lo, vec![(origin, pin)])?;
            return Ok(CftpOutcome { config, epochs: epoch + 1, total_sweeps });
        }
    }
    Err(Error::CftpBudget { max_epoch })
}

/// `count` independent exact samples drawn in parallel; sample i uses the
/// stream family (seed, i, *), so the result set is scheduling-independent.
pub fn cftp_samples(
    g: &Graph,
    k: f64,
    master_seed: u64,
    count: usize,
    max_epoch: u32,
) -> Result<Vec<CftpOutcome>> {
    let runs: Vec<Result<CftpOutcome>> = (0..count)
        .into_par_iter()
        .map(|i| cftp_hammock(g, k, master_seed, i as u64, max_epoch))
        .collect();
    runs.into_iter().collect()
}
