//! Extremal-edge probe: estimates the probability that prescribed edge
//! tuples are simultaneously extremal at a level L and compares each
//! k-tuple against the product bound delta^k from the single-edge maximum.

use std::collections::HashMap;

use serde::Serialize;
use surface_shift_core::{Graph, Vertex};

use crate::potential::Potential;
use crate::sampler::{McParams, SurfaceSampler};
use crate::stats::EstimateWithError;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct TupleReport {
    pub edges: Vec<(Vertex, Vertex)>,
    pub p: EstimateWithError,
    /// delta_hat^k inflated by the combined relative MC error.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientsReport {
    pub level: f64,
    /// Largest single-edge extremal probability and the edge attaining it.
    pub delta_hat: EstimateWithError,
    pub delta_edge: (Vertex, Vertex),
    pub single_edge: Vec<((Vertex, Vertex), EstimateWithError)>,
    pub tuples: Vec<TupleReport>,
}

fn canonical(e: (Vertex, Vertex)) -> (Vertex, Vertex) {
    if e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

/// Binomial estimate from a hit count, stderr floored at 1/N so a zero
/// count still carries uncertainty.
fn count_estimate(hits: u64, n: usize, seed: u64) -> EstimateWithError {
    let p = hits as f64 / n as f64;
    let stderr = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
    EstimateWithError { value: p, stderr, n_samples: n, seed }
}

const MASK_WORDS: usize = 8;

/// Estimates, from one shared chain ensemble, the per-edge extremality
/// probabilities (|gradient| >= level, closed inequality) and the joint
/// probability for each requested tuple. The bound test inflates delta^k
/// by 1 + 3 (stderr(P)/P + k stderr(delta)/delta), treating a zero count
/// as trivially within bound.
pub fn controlled_gradients_probe(
    g: &Graph,
    u: &Potential,
    level: f64,
    tuples: &[Vec<(Vertex, Vertex)>],
    params: &McParams,
) -> Result<GradientsReport> {
    if !(level.is_finite() && level >= 0.0) {
        return Err(Error::config("gradients.level", "must be finite and >= 0"));
    }
    let edges = g.edges();
    if edges.len() > MASK_WORDS * 64 {
        return Err(Error::config("gradients", "graph has more than 512 edges"));
    }
    let mut index: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for (i, &e) in edges.iter().enumerate() {
        index.insert(canonical(e), i);
    }
    let mut tuple_indices: Vec<Vec<usize>> = Vec::with_capacity(tuples.len());
    for (ti, tuple) in tuples.iter().enumerate() {
        let mut ids = Vec::with_capacity(tuple.len());
        for &e in tuple {
            let id = *index.get(&canonical(e)).ok_or_else(|| {
                Error::config(
                    "gradients.tuples",
                    format!("tuple {ti}: ({}, {}) is not an edge", e.0, e.1),
                )
            })?;
            if ids.contains(&id) {
                return Err(Error::config(
                    "gradients.tuples",
                    format!("tuple {ti}: edges must be distinct"),
                ));
            }
            ids.push(id);
        }
        if ids.is_empty() {
            return Err(Error::config("gradients.tuples", format!("tuple {ti}: empty")));
        }
        tuple_indices.push(ids);
    }

    // One pass of sampling: each sample is reduced to an extremality
    // bitmask over the edge list, so the memory cost is flat in the
    // number of tracked probabilities.
    let sampler = SurfaceSampler::new(g, u.clone());
    let masks = sampler.run_chains(params, |h| {
        let mut bits = [0u64; MASK_WORDS];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if (h[a] - h[b]).abs() >= level {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    })?;
    let n = params.total_samples();

    let mut edge_hits = vec![0u64; edges.len()];
    let mut tuple_hits = vec![0u64; tuple_indices.len()];
    for chain in &masks {
        for bits in chain {
            for (w, &word) in bits.iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let i = w * 64 + rest.trailing_zeros() as usize;
                    edge_hits[i] += 1;
                    rest &= rest - 1;
                }
            }
            for (t, ids) in tuple_indices.iter().enumerate() {
                if ids.iter().all(|&i| (bits[i / 64] >> (i % 64)) & 1 == 1) {
                    tuple_hits[t] += 1;
                }
            }
        }
    }

    let single_edge: Vec<((Vertex, Vertex), EstimateWithError)> = edges
        .iter()
        .zip(&edge_hits)
        .map(|(&e, &hits)| (e, count_estimate(hits, n, params.seed)))
        .collect();
    let &(delta_edge, delta_hat) = single_edge
        .iter()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .expect("graphs have at least one edge");

    let mut reports = Vec::with_capacity(tuple_indices.len());
    for (tuple, &hits) in tuples.iter().zip(&tuple_hits) {
        let k = tuple.len() as i32;
        let p = count_estimate(hits, n, params.seed);
        let rel_p = if p.value > 0.0 { p.stderr / p.value } else { 0.0 };
        let rel_d = if delta_hat.value > 0.0 {
            delta_hat.stderr / delta_hat.value
        } else {
            0.0
        };
        let bound = delta_hat.value.powi(k) * (1.0 + 3.0 * (rel_p + k as f64 * rel_d));
        reports.push(TupleReport {
            edges: tuple.clone(),
            p,
            bound,
            within_bound: p.value <= bound,
        });
    }

    Ok(GradientsReport { level, delta_hat, delta_edge, single_edge, tuples: reports })
}
