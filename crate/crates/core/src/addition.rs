//! The height-addition sweep `T⁺`, its inverse, Jacobians, and locality
//! diagnostics.
//!
//! Each vertex `v` carries a tentative-shift function `τ_k(v, ·)`, initially
//! the constant `τ(v)`. The sweep repeatedly settles the unsettled vertex
//! whose tentative shift at its own height is smallest (ties broken by a
//! fixed total order), then lowers every unsettled neighbour's function by
//! taking the pointwise minimum with a plateau bump centred at the settled
//! height. `T⁺` adds the settled shifts to the heights; the inverse sweep
//! reconstructs the preimage by inverting `h ↦ h + τ_k(v, h)` before each
//! selection. Because every function is an explicit [`PwlFunction`], both
//! directions are closed-form and the round trip is exact up to float
//! rounding.
//!
//! The Jacobian products multiply `1 ± ∂₂τ_k(P_k, φ_{P_k})`, the right
//! derivative captured at selection time, before the neighbour updates of
//! step `k` are applied.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{component_metrics, Graph, Vertex};
use crate::math;
use crate::pwl::{make_m, BumpParams, PwlFunction};
use crate::Error;

/// Immutable inputs of the sweep: graph, shift ceilings `τ`, ramp width
/// `ε ∈ (0, 1/2]`, and the tie-breaking order.
#[derive(Clone, Debug)]
pub struct AdditionPlan<'g> {
    graph: &'g Graph,
    tau: Vec<f64>,
    eps: f64,
    /// rank[v] = position of v in the tie-breaking order.
    rank: Vec<usize>,
}

impl<'g> AdditionPlan<'g> {
    /// Plan with the default tie-breaking order (vertex id ascending).
    pub fn new(graph: &'g Graph, tau: Vec<f64>, eps: f64) -> Result<Self, Error> {
        let order: Vec<Vertex> = (0..graph.vertex_count()).collect();
        Self::with_order(graph, tau, eps, &order)
    }

    /// Plan with an explicit tie-breaking order: `order[i]` is the vertex
    /// preferred at rank `i`. Must be a permutation of all vertices.
    pub fn with_order(
        graph: &'g Graph,
        tau: Vec<f64>,
        eps: f64,
        order: &[Vertex],
    ) -> Result<Self, Error> {
        let nv = graph.vertex_count();
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::EpsOutOfRange { eps });
        }
        if tau.len() != nv {
            return Err(Error::LengthMismatch {
                what: "tau",
                expected: nv,
                got: tau.len(),
            });
        }
        for (v, &t) in tau.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::NonFinite { what: "tau" });
            }
            if t < 0.0 {
                return Err(Error::TauNegative { vertex: v });
            }
        }
        if order.len() != nv {
            return Err(Error::InvalidOrder);
        }
        let mut rank = vec![usize::MAX; nv];
        for (i, &v) in order.iter().enumerate() {
            if v >= nv || rank[v] != usize::MAX {
                return Err(Error::InvalidOrder);
            }
            rank[v] = i;
        }
        Ok(AdditionPlan { graph, tau, eps, rank })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// A height configuration with optional pinned vertices. Pinned vertices
/// participate in the sweep like any other; a pin is bookkeeping for the
/// samplers (never resampled) and must agree with the height vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    heights: Vec<f64>,
    pinned: Vec<(Vertex, f64)>,
}

impl Configuration {
    pub fn new(heights: Vec<f64>, mut pinned: Vec<(Vertex, f64)>) -> Result<Self, Error> {
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::NonFinite { what: "height" });
        }
        pinned.sort_unstable_by_key(|&(v, _)| v);
        for w in pinned.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::PinnedMismatch { vertex: w[0].0 });
            }
        }
        for &(v, h) in &pinned {
            if v >= heights.len() {
                return Err(Error::VertexOutOfRange { vertex: v, count: heights.len() });
            }
            if heights[v] != h {
                return Err(Error::PinnedMismatch { vertex: v });
            }
        }
        Ok(Configuration { heights, pinned })
    }

    /// Configuration with no pinned vertices.
    pub fn unpinned(heights: Vec<f64>) -> Result<Self, Error> {
        Configuration::new(heights, Vec::new())
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn pinned(&self) -> &[(Vertex, f64)] {
        &self.pinned
    }

    pub fn get(&self, v: Vertex) -> f64 {
        self.heights[v]
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }
}

/// Step-by-step record of one sweep: the settling order, the shift and the
/// right derivative captured at each selection, and the Jacobian products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditionTranscript {
    pub p_order: Vec<Vertex>,
    pub shifts: Vec<f64>,
    pub step_right_derivs: Vec<f64>,
    pub j_plus: f64,
    pub j_minus: f64,
}

impl AdditionTranscript {
    /// Recomputes the Jacobian products `∏(1 + d_k)` and `∏(1 - d_k)` from
    /// the recorded derivatives.
    pub fn jacobians(&self) -> (f64, f64) {
        let mut jp = 1.0;
        let mut jm = 1.0;
        for &d in &self.step_right_derivs {
            jp *= 1.0 + d;
            jm *= 1.0 - d;
        }
        (jp, jm)
    }

    /// Shift received by each vertex, indexed by vertex id.
    pub fn per_vertex_shifts(&self, vertex_count: usize) -> Vec<f64> {
        let mut s = vec![0.0; vertex_count];
        for (k, &v) in self.p_order.iter().enumerate() {
            s[v] = self.shifts[k];
        }
        s
    }
}

fn check_config(plan: &AdditionPlan<'_>, phi: &Configuration) -> Result<(), Error> {
    let nv = plan.graph().vertex_count();
    if phi.heights().len() != nv {
        return Err(Error::LengthMismatch {
            what: "heights",
            expected: nv,
            got: phi.heights().len(),
        });
    }
    Ok(())
}

/// Selects the unsettled vertex minimising `(delta, rank)` lexicographically.
fn select(processed: &[bool], delta: &[f64], rank: &[usize]) -> Vertex {
    let mut best: Option<Vertex> = None;
    for v in 0..processed.len() {
        if processed[v] {
            continue;
        }
        best = Some(match best {
            None => v,
            Some(b) => {
                if delta[v] < delta[b] || (delta[v] == delta[b] && rank[v] < rank[b]) {
                    v
                } else {
                    b
                }
            }
        });
    }
    best.expect("sweep selects exactly vertex_count times")
}

/// Runs the forward sweep on `phi`, returning the transcript.
///
/// # Example
/// ```
/// use surface_shift_core::{AdditionPlan, Configuration, Graph, run_addition};
/// let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
/// let plan = AdditionPlan::new(&g, vec![0.0, 10.0], 0.5).unwrap();
/// let phi = Configuration::unpinned(vec![0.0, 0.0]).unwrap();
/// let tr = run_addition(&plan, &phi).unwrap();
/// assert_eq!(tr.p_order, vec![0, 1]);
/// assert_eq!(tr.shifts, vec![0.0, 0.25]);
/// ```
pub fn run_addition(plan: &AdditionPlan<'_>, phi: &Configuration) -> Result<AdditionTranscript, Error> {
    check_config(plan, phi)?;
    let g = plan.graph();
    let nv = g.vertex_count();
    let heights = phi.heights();
    let mut funcs: Vec<PwlFunction> = Vec::with_capacity(nv);
    for &t in plan.tau() {
        funcs.push(PwlFunction::constant(t)?);
    }
    let mut delta: Vec<f64> = plan.tau().to_vec();
    let mut processed = vec![false; nv];
    let mut p_order = Vec::with_capacity(nv);
    let mut shifts = Vec::with_capacity(nv);
    let mut derivs = Vec::with_capacity(nv);
    for _ in 0..nv {
        let p = select(&processed, &delta, &plan.rank);
        let s = delta[p];
        derivs.push(funcs[p].right_deriv(heights[p]));
        shifts.push(s);
        p_order.push(p);
        processed[p] = true;
        for &w in g.neighbors(p) {
            if processed[w] {
                continue;
            }
            let bump = make_m(&BumpParams::new(plan.tau()[w], heights[p], s, plan.eps())?)?;
            funcs[w] = funcs[w].min_with(&bump);
            delta[w] = funcs[w].eval(heights[w]);
        }
    }
    let mut transcript = AdditionTranscript {
        p_order,
        shifts,
        step_right_derivs: derivs,
        j_plus: 1.0,
        j_minus: 1.0,
    };
    let (jp, jm) = transcript.jacobians();
    transcript.j_plus = jp;
    transcript.j_minus = jm;
    Ok(transcript)
}

fn apply_shifts(phi: &Configuration, tr: &AdditionTranscript, sign: f64) -> Result<Configuration, Error> {
    let mut heights = phi.heights().to_vec();
    for (k, &v) in tr.p_order.iter().enumerate() {
        heights[v] += sign * tr.shifts[k];
    }
    let pinned = phi.pinned().iter().map(|&(v, _)| (v, heights[v])).collect();
    Configuration::new(heights, pinned)
}

/// `T⁺(φ)`: the forward sweep applied to the heights.
pub fn t_plus(plan: &AdditionPlan<'_>, phi: &Configuration) -> Result<Configuration, Error> {
    let tr = run_addition(plan, phi)?;
    apply_shifts(phi, &tr, 1.0)
}

/// `T⁻(φ) = 2φ - T⁺(φ)`: the same shifts subtracted instead of added.
pub fn t_minus(plan: &AdditionPlan<'_>, phi: &Configuration) -> Result<Configuration, Error> {
    let tr = run_addition(plan, phi)?;
    apply_shifts(phi, &tr, -1.0)
}

/// Inverts the forward sweep: given `φ̃ = T⁺(φ)` reconstructs `φ` together
/// with the transcript of the forward run it undoes.
///
/// At each step the settled height is unknown, so the sweep first inverts
/// `h ↦ h + τ_k(v, h)` (strictly increasing, slopes in [1/2, 3/2]) at every
/// unsettled vertex and selects the vertex minimising the tentative shift
/// at its reconstructed height.
pub fn run_inverse(
    plan: &AdditionPlan<'_>,
    phi_tilde: &Configuration,
) -> Result<(Configuration, AdditionTranscript), Error> {
    check_config(plan, phi_tilde)?;
    let g = plan.graph();
    let nv = g.vertex_count();
    let heights = phi_tilde.heights();
    let mut funcs: Vec<PwlFunction> = Vec::with_capacity(nv);
    for &t in plan.tau() {
        funcs.push(PwlFunction::constant(t)?);
    }
    let mut preimage: Vec<f64> = Vec::with_capacity(nv);
    let mut delta: Vec<f64> = Vec::with_capacity(nv);
    for v in 0..nv {
        let x = funcs[v].invert_shifted(heights[v])?;
        delta.push(funcs[v].eval(x));
        preimage.push(x);
    }
    let mut out = heights.to_vec();
    let mut processed = vec![false; nv];
    let mut p_order = Vec::with_capacity(nv);
    let mut shifts = Vec::with_capacity(nv);
    let mut derivs = Vec::with_capacity(nv);
    for _ in 0..nv {
        let p = select(&processed, &delta, &plan.rank);
        let s = delta[p];
        derivs.push(funcs[p].right_deriv(preimage[p]));
        shifts.push(s);
        p_order.push(p);
        processed[p] = true;
        out[p] = heights[p] - s;
        for &w in g.neighbors(p) {
            if processed[w] {
                continue;
            }
            let bump = make_m(&BumpParams::new(plan.tau()[w], out[p], s, plan.eps())?)?;
            funcs[w] = funcs[w].min_with(&bump);
            let x = funcs[w].invert_shifted(heights[w])?;
            preimage[w] = x;
            delta[w] = funcs[w].eval(x);
        }
    }
    let mut transcript = AdditionTranscript {
        p_order,
        shifts,
        step_right_derivs: derivs,
        j_plus: 1.0,
        j_minus: 1.0,
    };
    let (jp, jm) = transcript.jacobians();
    transcript.j_plus = jp;
    transcript.j_minus = jm;
    let pinned = phi_tilde.pinned().iter().map(|&(v, _)| (v, out[v])).collect();
    Ok((Configuration::new(out, pinned)?, transcript))
}

/// `τ'(v, k) = max { τ(v) - τ(w) : d_G(v, w) ≤ k }`. Nonnegative (the ball
/// contains `v`) and nondecreasing in `k`.
pub fn tau_prime(plan: &AdditionPlan<'_>, v: Vertex, k: usize) -> f64 {
    let dist = plan.graph().distances_from(v);
    let mut min_tau = f64::INFINITY;
    for (w, &d) in dist.iter().enumerate() {
        if d <= k {
            min_tau = min_tau.min(plan.tau()[w]);
        }
    }
    plan.tau()[v] - min_tau
}

/// `L(τ, ε)`: one less than the largest `k ∈ [0, diam]` such that
/// `τ'(v, k) ≤ ε/2` for every vertex. Can be `-1` (fails already at
/// `k = 1`) and is `diam - 1` when the condition holds for all `k`.
pub fn capital_l(plan: &AdditionPlan<'_>) -> i64 {
    let g = plan.graph();
    let nv = g.vertex_count();
    let diam = g.diameter();
    let half_eps = plan.eps() / 2.0;
    let mut min_k = diam as i64;
    for v in 0..nv {
        let dist = g.distances_from(v);
        let mut min_by_dist = vec![f64::INFINITY; diam + 1];
        for (w, &d) in dist.iter().enumerate() {
            min_by_dist[d] = min_by_dist[d].min(plan.tau()[w]);
        }
        let mut running = f64::INFINITY;
        for k in 0..=diam {
            running = running.min(min_by_dist[k]);
            if plan.tau()[v] - running > half_eps {
                min_k = min_k.min(k as i64 - 1);
                break;
            }
        }
        if min_k == 0 {
            break;
        }
    }
    min_k - 1
}

/// Edges whose height gradient is at least `threshold` in absolute value
/// (closed inequality), in canonical order.
pub fn extremal_edges(g: &Graph, phi: &Configuration, threshold: f64) -> Vec<(Vertex, Vertex)> {
    g.edges()
        .iter()
        .copied()
        .filter(|&(a, b)| (phi.get(a) - phi.get(b)).abs() >= threshold)
        .collect()
}

/// Shift bounds diagnostic: when the extremal components are small enough
/// (`M(φ) ≤ L(τ, ε)`), every shift lies in
/// `[τ(v) - τ'(v, r(φ, v)), τ(v)]`. Margins are reported raw so callers can
/// apply their own slack; the upper bound holds unconditionally.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftBoundsReport {
    /// True when `M(φ) ≤ L(τ, ε)`, i.e. the lower bound is claimed.
    pub applicable: bool,
    pub big_m: usize,
    pub l: i64,
    /// `min_v [σ_v - (τ(v) - τ'(v, r(φ, v)))]`.
    pub lower_margin: f64,
    /// `min_v [τ(v) - σ_v]`.
    pub upper_margin: f64,
}

pub fn shift_bounds_check(
    plan: &AdditionPlan<'_>,
    phi: &Configuration,
    transcript: &AdditionTranscript,
) -> Result<ShiftBoundsReport, Error> {
    check_config(plan, phi)?;
    let g = plan.graph();
    let nv = g.vertex_count();
    let ee = extremal_edges(g, phi, 1.0 - plan.eps());
    let cm = component_metrics(g, &ee)?;
    let l = capital_l(plan);
    let sigma = transcript.per_vertex_shifts(nv);
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    for v in 0..nv {
        let tp = tau_prime(plan, v, cm.r[v]);
        lower_margin = lower_margin.min(sigma[v] - (plan.tau()[v] - tp));
        upper_margin = upper_margin.min(plan.tau()[v] - sigma[v]);
    }
    Ok(ShiftBoundsReport {
        applicable: (cm.big_m as i64) <= l,
        big_m: cm.big_m,
        l,
        lower_margin,
        upper_margin,
    })
}

/// Jacobian geometric-mean diagnostic: when `M(φ) ≤ L(τ, ε)`,
/// `√(J⁺J⁻) ≥ exp(-(1/ε²) Σ_v τ'(v, 1 + max_{w∼v} r(φ, w))²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianBoundReport {
    pub applicable: bool,
    pub big_m: usize,
    pub l: i64,
    /// `√(J⁺ J⁻)`.
    pub lhs: f64,
    /// The exponential lower bound.
    pub rhs: f64,
}

pub fn jacobian_bound_check(
    plan: &AdditionPlan<'_>,
    phi: &Configuration,
    transcript: &AdditionTranscript,
) -> Result<JacobianBoundReport, Error> {
    check_config(plan, phi)?;
    let g = plan.graph();
    let nv = g.vertex_count();
    let ee = extremal_edges(g, phi, 1.0 - plan.eps());
    let cm = component_metrics(g, &ee)?;
    let l = capital_l(plan);
    let mut exponent = 0.0;
    for v in 0..nv {
        let max_r = g.neighbors(v).iter().map(|&w| cm.r[w]).max().unwrap_or(0);
        let tp = tau_prime(plan, v, 1 + max_r);
        exponent += tp * tp;
    }
    let eps = plan.eps();
    let (jp, jm) = transcript.jacobians();
    Ok(JacobianBoundReport {
        applicable: (cm.big_m as i64) <= l,
        big_m: cm.big_m,
        l,
        lhs: math::sqrt(jp * jm),
        rhs: math::exp(-exponent / (eps * eps)),
    })
}
