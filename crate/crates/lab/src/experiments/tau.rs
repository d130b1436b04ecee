//! Deterministic shift-profile constructions on the torus: the logarithmic
//! warm-up profile, the plateau/log/cap profile eta aimed at a target
//! vertex, its shifted variant, and the summability functional controlling
//! the scale bound for capital L.

use surface_shift_core::{Error as CoreError, Graph, Vertex};

use crate::{Error, Result};

fn require_torus(g: &Graph) -> Result<u32> {
    g.torus_n().ok_or(Error::Core(CoreError::NotATorus))
}

/// log(1 + |v|_1) / sqrt(log(2n + 1)): zero at the origin, sqrt(log(2n+1))
/// at the far corner.
pub fn tau_log(g: &Graph, v: Vertex) -> Result<f64> {
    let n = require_torus(g)?;
    let norm = g.l1_norm(v)? as f64;
    Ok((1.0 + norm).ln() / (2.0 * n as f64 + 1.0).ln().sqrt())
}

pub fn tau_log_field(g: &Graph) -> Result<Vec<f64>> {
    (0..g.vertex_count()).map(|v| tau_log(g, v)).collect()
}

/// Sum over edges of the squared profile gradient; stays bounded in n.
pub fn tau_log_gradient_square_sum(g: &Graph) -> Result<f64> {
    let field = tau_log_field(g)?;
    Ok(g.edges()
        .iter()
        .map(|&(a, b)| {
            let d = field[a] - field[b];
            d * d
        })
        .sum())
}

/// The radial shape of eta as a function of the l1 norm, for a target norm
/// `nv1`. Three cases: zero on the inner plateau |w| <= sqrt(nv1),
/// logarithmic growth in between, capped at |w| >= nv1.
fn eta_radial(norm_w: f64, nv1: f64) -> f64 {
    if nv1 <= 0.0 {
        return 0.0;
    }
    let root = nv1.sqrt();
    let denom = (1.0 + nv1).ln().sqrt();
    let h = |x: f64| (1.0 + x).ln() / denom;
    if norm_w <= root {
        0.0
    } else if norm_w >= nv1 {
        h(nv1) - h(root)
    } else {
        h(norm_w) - h(root)
    }
}

/// eta targeted at `v_target`, evaluated at `w`.
pub fn eta(g: &Graph, v_target: Vertex, w: Vertex) -> Result<f64> {
    require_torus(g)?;
    let nv1 = g.l1_norm(v_target)? as f64;
    Ok(eta_radial(g.l1_norm(w)? as f64, nv1))
}

pub fn eta_field(g: &Graph, v_target: Vertex) -> Result<Vec<f64>> {
    (0..g.vertex_count()).map(|w| eta(g, v_target, w)).collect()
}

/// eta_i(w) = eta(v0) - eta(w - u_i): the recentered profile whose peak
/// value eta(v0) is attained at u_i. The difference w - u_i is taken
/// coordinate-wise modulo the side and mapped back into representative
/// coordinates before the norm.
pub fn eta_shifted(g: &Graph, v0: Vertex, u_i: Vertex, w: Vertex) -> Result<f64> {
    require_torus(g)?;
    let peak = eta(g, v0, v0)?;
    let (wx, wy) = g.coords(w).ok_or(Error::Core(CoreError::NotATorus))?;
    let (ux, uy) = g.coords(u_i).ok_or(Error::Core(CoreError::NotATorus))?;
    let diff = g
        .vertex_at(wx as i64 - ux as i64, wy as i64 - uy as i64)
        .ok_or(Error::Core(CoreError::NotATorus))?;
    Ok(peak - eta(g, v0, diff)?)
}

/// eta'(w, k) = eta(w) - min over the distance-k ball of eta. Because eta
/// is a nondecreasing function of the l1 norm and one graph step changes
/// the norm by exactly 1, the ball minimum is the radial value at
/// max(|w|_1 - k, 0).
pub fn eta_prime(g: &Graph, v_target: Vertex, w: Vertex, k: usize) -> Result<f64> {
    require_torus(g)?;
    let nv1 = g.l1_norm(v_target)? as f64;
    let norm_w = g.l1_norm(w)? as f64;
    let reduced = (norm_w - k as f64).max(0.0);
    Ok(eta_radial(norm_w, nv1) - eta_radial(reduced, nv1))
}

/// The summability functional sum_w sum_{k>=0} 2^-k eta'(w, k+1)^2,
/// computed exactly: beyond the diameter the inner term is constant, so
/// the geometric tail is summed in closed form.
pub fn eta_sum_bound(g: &Graph, v_target: Vertex) -> Result<f64> {
    require_torus(g)?;
    let diam = g.diameter();
    let mut total = 0.0;
    for w in 0..g.vertex_count() {
        // k + 1 in 1..=diam-1 with weight 2^-k, then the constant tail.
        for k in 0..diam.saturating_sub(1) {
            let t = eta_prime(g, v_target, w, k + 1)?;
            total += 0.5f64.powi(k as i32) * t * t;
        }
        let t = eta_prime(g, v_target, w, diam)?;
        // sum_{k >= diam-1} 2^-k = 2^(2-diam).
        total += 2.0f64.powi(2 - diam as i32) * t * t;
    }
    Ok(total)
}

/// Brute-force oracle for the same functional: ball minima taken over
/// actual graph distances, no radial shortcut, same tail treatment.
pub fn eta_sum_bound_brute_force(g: &Graph, v_target: Vertex) -> Result<f64> {
    require_torus(g)?;
    let field = eta_field(g, v_target)?;
    let nv = g.vertex_count();
    let diam = g.diameter();
    let mut total = 0.0;
    for w in 0..nv {
        let dist = g.distances_from(w);
        // min_by_k[k] = min eta over the radius-k ball around w.
        let mut min_by_k = vec![f64::INFINITY; diam + 1];
        for u in 0..nv {
            let d = dist[u];
            if field[u] < min_by_k[d] {
                min_by_k[d] = field[u];
            }
        }
        for k in 1..=diam {
            if min_by_k[k - 1] < min_by_k[k] {
                min_by_k[k] = min_by_k[k - 1];
            }
        }
        for k in 0..diam.saturating_sub(1) {
            let t = field[w] - min_by_k[k + 1];
            total += 0.5f64.powi(k as i32) * t * t;
        }
        let t = field[w] - min_by_k[diam];
        total += 2.0f64.powi(2 - diam as i32) * t * t;
    }
    Ok(total)
}

/// Closed-form lower bound for capital L of the scaled profile alpha*eta:
/// floor((1 + sqrt(|v|_1)) (exp(eps sqrt(log(1+|v|_1)) / (2 alpha)) - 1)) - 1.
pub fn lemma_l_lower_bound(norm_v: f64, eps: f64, alpha: f64) -> i64 {
    let root = norm_v.sqrt();
    let growth = (eps * (1.0 + norm_v).ln().sqrt() / (2.0 * alpha)).exp();
    ((1.0 + root) * (growth - 1.0)).floor() as i64 - 1
}
