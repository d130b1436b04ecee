//! Shifted-configuration inspection: sample pinned surfaces, push each
//! sample through the forward and mirrored sweeps, and record the
//! frequencies of the events the two-point delocalization argument is
//! built from, together with cross-checks that tie the sampled surfaces
//! back to the sweep's shift bounds.

use serde::Serialize;
use surface_shift_core::{
    capital_l, component_metrics, extremal_edges, run_addition, AdditionPlan, Configuration,
    Graph, Vertex,
};

use crate::experiments::estimators::probability_estimate;
use crate::potential::Potential;
use crate::sampler::{McParams, SurfaceSampler};
use crate::stats::EstimateWithError;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ShiftExperimentReport {
    pub u_vertex: Vertex,
    pub a: f64,
    pub s: f64,
    pub eps: f64,
    pub l: i64,
    /// P(|phi_u| <= a).
    pub p_center: EstimateWithError,
    /// P(|T+(phi)_u - tau(u)| <= a + eps/2).
    pub p_plus: EstimateWithError,
    /// P(|T-(phi)_u + tau(u)| <= a + eps/2).
    pub p_minus: EstimateWithError,
    /// P(J+ J- < s^2).
    pub p_small_jacobian: EstimateWithError,
    /// P(M > L).
    pub p_m_exceeds: EstimateWithError,
    /// Mean of #\{v : r(phi, v) >= max(L, 0)\} (union-bound majorant when
    /// L >= 0; the bound is vacuous for L < 0).
    pub union_bound_sum: f64,
    /// Samples where |phi_u| <= a and M <= L but the forward shift at u
    /// left [tau(u) - a - eps/2, tau(u) + a]: must stay 0.
    pub consistency_violations: usize,
    pub n_samples: usize,
    pub seed: u64,
}

struct SampleEvents {
    center: f64,
    plus: f64,
    minus: f64,
    small_jacobian: f64,
    m_exceeds: f64,
    r_at_least_l: usize,
    violation: bool,
}

/// Runs the event census. The plan's requested shift must vanish at the
/// pinned origin so the pinning and the sweep are compatible.
pub fn shifted_config_experiment(
    g: &Graph,
    u_pot: &Potential,
    tau: &[f64],
    eps: f64,
    u_vertex: Vertex,
    a: f64,
    s: f64,
    params: &McParams,
) -> Result<ShiftExperimentReport> {
    if u_vertex >= g.vertex_count() {
        return Err(Error::config("shift.u", "vertex out of range"));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::config("shift.a", "must be finite and >= 0"));
    }
    if !(s.is_finite() && s > 0.0 && s < 1.0) {
        return Err(Error::config("shift.s", "must lie in (0, 1)"));
    }
    let plan = AdditionPlan::new(g, tau.to_vec(), eps)?;
    if plan.tau()[g.origin()] != 0.0 {
        return Err(Error::config(
            "plan.tau",
            "requested shift at the pinned origin must be 0",
        ));
    }
    let l = capital_l(&plan);
    let threshold = 1.0 - eps;
    let tau_u = plan.tau()[u_vertex];
    let sampler = SurfaceSampler::new(g, u_pot.clone());

    let rows = sampler.run_chains(params, |h| {
        let phi = Configuration::unpinned(h.to_vec()).expect("sampled heights are finite");
        let tr = run_addition(&plan, &phi).expect("sweep accepts sampled heights");
        let sigma = tr.per_vertex_shifts(g.vertex_count());
        let jj = tr.j_plus * tr.j_minus;
        let cm = component_metrics(g, &extremal_edges(g, &phi, threshold))
            .expect("edge subset comes from the same graph");
        let m_exceeds = (cm.big_m as i64) > l;
        let plus_u = h[u_vertex] + sigma[u_vertex];
        let minus_u = h[u_vertex] - sigma[u_vertex];
        let center = h[u_vertex].abs() <= a;
        // Consistency: center event plus small components force the
        // forward shift at u into [tau - a - eps/2, tau + a].
        let violation = if center && !m_exceeds {
            let d = plus_u - tau_u;
            !(-a - eps / 2.0 - 1e-12 <= d && d <= a + 1e-12)
        } else {
            false
        };
        let l_floor = l.max(0) as usize;
        SampleEvents {
            center: center as u8 as f64,
            plus: ((plus_u - tau_u).abs() <= a + eps / 2.0) as u8 as f64,
            minus: ((minus_u + tau_u).abs() <= a + eps / 2.0) as u8 as f64,
            small_jacobian: (jj < s * s) as u8 as f64,
            m_exceeds: m_exceeds as u8 as f64,
            r_at_least_l: cm.r.iter().filter(|&&r| r >= l_floor).count(),
            violation,
        }
    })?;

    let chains_of = |pick: &dyn Fn(&SampleEvents) -> f64| -> Vec<Vec<f64>> {
        rows.iter().map(|c| c.iter().map(|e| pick(e)).collect()).collect()
    };
    let n_samples = params.total_samples();
    let union_sum: f64 = rows
        .iter()
        .flatten()
        .map(|e| e.r_at_least_l as f64)
        .sum::<f64>()
        / n_samples as f64;
    let violations = rows.iter().flatten().filter(|e| e.violation).count();

    Ok(ShiftExperimentReport {
        u_vertex,
        a,
        s,
        eps,
        l,
        p_center: probability_estimate(&chains_of(&|e| e.center), params.seed),
        p_plus: probability_estimate(&chains_of(&|e| e.plus), params.seed),
        p_minus: probability_estimate(&chains_of(&|e| e.minus), params.seed),
        p_small_jacobian: probability_estimate(&chains_of(&|e| e.small_jacobian), params.seed),
        p_m_exceeds: probability_estimate(&chains_of(&|e| e.m_exceeds), params.seed),
        union_bound_sum: union_sum,
        consistency_violations: violations,
        n_samples,
        seed: params.seed,
    })
}
