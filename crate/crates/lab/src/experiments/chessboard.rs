//! Reflection inequality check on the torus. A block function reads the
//! four corner heights of a unit cell (depending only on their
//! differences); the reflection operator for a translate t reorders the
//! corner arguments according to the parity of t's coordinates. The check
//! compares |E prod_i theta_{t_i} f_i|^{|V|} against the product over i of
//! E prod_{t in V} theta_t f_i, with Monte Carlo error bands.

use std::sync::Arc;

use surface_shift_core::Graph;

use crate::potential::Potential;
use crate::sampler::{McParams, SurfaceSampler};
use crate::stats::{self, EstimateWithError};
use crate::{Error, Result};

type CellFn = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// A bounded function of one unit cell's corner heights (h00, h10, h01,
/// h11) that depends only on height differences. Output is clamped to
/// [-bound, bound]; shift invariance is spot-checked at construction.
#[derive(Clone)]
pub struct BlockFunction {
    f0: CellFn,
    bound: f64,
}

impl std::fmt::Debug for BlockFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockFunction").field("bound", &self.bound).finish()
    }
}

impl BlockFunction {
    pub fn new(f0: CellFn, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::config("chessboard.block", "bound must be finite and positive"));
        }
        // Invariance under constant shifts, probed at fixed offsets.
        let probes = [
            (0.3, -0.7, 1.1, 0.2),
            (0.0, 0.5, -0.25, 0.8),
            (1.3, 1.3, -0.4, 0.6),
            (-0.9, 0.1, 0.45, -0.15),
        ];
        for &(a, b, c, d) in &probes {
            let base = f0(a, b, c, d);
            for off in [0.37, -1.2, 2.01] {
                let shifted = f0(a + off, b + off, c + off, d + off);
                if (base - shifted).abs() > 1e-9 {
                    return Err(Error::config(
                        "chessboard.block",
                        "not invariant under constant height shifts",
                    ));
                }
            }
        }
        Ok(BlockFunction { f0, bound })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::config("chessboard.block", "constant must be finite"));
        }
        Self::new(Arc::new(move |_, _, _, _| c), c.abs().max(1.0))
    }

    /// Indicator of |h10 - h00| >= threshold: the bottom-edge gradient.
    pub fn gradient_indicator_at_least(threshold: f64) -> Result<Self> {
        Self::new(
            Arc::new(move |a, b, _, _| if (b - a).abs() >= threshold { 1.0 } else { 0.0 }),
            1.0,
        )
    }

    /// Indicator of |h10 - h00| <= threshold.
    pub fn gradient_indicator_at_most(threshold: f64) -> Result<Self> {
        Self::new(
            Arc::new(move |a, b, _, _| if (b - a).abs() <= threshold { 1.0 } else { 0.0 }),
            1.0,
        )
    }

    /// exp(-(h10 - h00)^2): a smooth strictly positive block.
    pub fn smooth_gradient() -> Result<Self> {
        Self::new(Arc::new(move |a, b, _, _| (-(b - a) * (b - a)).exp()), 1.0)
    }

    pub fn eval(&self, h00: f64, h10: f64, h01: f64, h11: f64) -> f64 {
        (self.f0)(h00, h10, h01, h11).clamp(-self.bound, self.bound)
    }
}

/// The cell move induced by a translate: offset plus per-axis reflection
/// flags from the coordinate parities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reflection {
    pub offset: (i64, i64),
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Reflection {
    pub fn from_translate(t: (i64, i64)) -> Self {
        Reflection {
            offset: t,
            flip_x: t.0.rem_euclid(2) == 1,
            flip_y: t.1.rem_euclid(2) == 1,
        }
    }

    /// Composition: offsets add, reflection flags toggle. Parity of a sum
    /// is the XOR of parities, so this agrees with `from_translate` on
    /// composed translates.
    pub fn then(self, other: Reflection) -> Reflection {
        Reflection {
            offset: (self.offset.0 + other.offset.0, self.offset.1 + other.offset.1),
            flip_x: self.flip_x != other.flip_x,
            flip_y: self.flip_y != other.flip_y,
        }
    }
}

/// Evaluates a reflected block on the cell at the reflection's offset.
/// x-flip swaps the left/right corner pairs, y-flip the bottom/top pairs.
pub fn reflected_eval(g: &Graph, f: &BlockFunction, r: Reflection, heights: &[f64]) -> f64 {
    let (tx, ty) = r.offset;
    let at = |dx: i64, dy: i64| {
        heights[g.vertex_at(tx + dx, ty + dy).expect("torus cell corner")]
    };
    let (mut a, mut b, mut c, mut d) = (at(0, 0), at(1, 0), at(0, 1), at(1, 1));
    if r.flip_x {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut c, &mut d);
    }
    if r.flip_y {
        std::mem::swap(&mut a, &mut c);
        std::mem::swap(&mut b, &mut d);
    }
    f.eval(a, b, c, d)
}

pub fn theta_eval(g: &Graph, f: &BlockFunction, t: (i64, i64), heights: &[f64]) -> f64 {
    reflected_eval(g, f, Reflection::from_translate(t), heights)
}

#[derive(Clone, Debug)]
pub struct ChessboardReport {
    pub lhs: EstimateWithError,
    pub rhs: Vec<EstimateWithError>,
    /// |lhs|^|V| and the product of the rhs factors.
    pub lhs_power: f64,
    pub rhs_product: f64,
    /// Combined one-sigma band for lhs_power - rhs_product.
    pub sigma: f64,
    pub within_band: bool,
    pub vertex_count: usize,
    pub n_samples: usize,
    pub seed: u64,
}

/// Monte Carlo check of the reflection inequality for the given blocks and
/// translates. Per sample, the LHS integrand is the product of the
/// reflected blocks at their translates; each RHS factor's integrand is
/// the product of one block over all |V| translates. Error bands come from
/// a leave-one-chain-out jackknife (floored at 1/N) and are combined by
/// the delta method.
pub fn chessboard_check(
    g: &Graph,
    u: &Potential,
    blocks: &[(BlockFunction, (i64, i64))],
    params: &McParams,
) -> Result<ChessboardReport> {
    let n = g.torus_n().ok_or_else(|| Error::config("chessboard", "requires a torus"))? as i64;
    if blocks.is_empty() {
        return Err(Error::config("chessboard.blocks", "at least one block required"));
    }
    let side = 2 * n;
    let cells: Vec<(i64, i64)> = (0..side)
        .flat_map(|x| (0..side).map(move |y| (x, y)))
        .collect();
    let nv = g.vertex_count();
    debug_assert_eq!(cells.len(), nv);

    let sampler = SurfaceSampler::new(g, u.clone());
    let m = blocks.len();
    // Per sample: (lhs integrand, every rhs integrand).
    let rows = sampler.run_chains(params, |h| {
        let lhs = blocks
            .iter()
            .fold(1.0f64, |acc, (f, t)| acc * theta_eval(g, f, *t, h));
        let rhs: Vec<f64> = blocks
            .iter()
            .map(|(f, _)| cells.iter().fold(1.0f64, |acc, &t| acc * theta_eval(g, f, t, h)))
            .collect();
        (lhs, rhs)
    })?;

    let n_samples = params.total_samples();
    let floor = 1.0 / n_samples as f64;
    let lhs_chains: Vec<Vec<f64>> =
        rows.iter().map(|c| c.iter().map(|(l, _)| *l).collect()).collect();
    let lhs = EstimateWithError {
        value: stats::mean(&stats::pool(&lhs_chains)),
        stderr: stats::jackknife_chain_stderr(&lhs_chains, stats::mean).max(floor),
        n_samples,
        seed: params.seed,
    };
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let chains: Vec<Vec<f64>> =
            rows.iter().map(|c| c.iter().map(|(_, r)| r[i]).collect()).collect();
        rhs.push(EstimateWithError {
            value: stats::mean(&stats::pool(&chains)),
            stderr: stats::jackknife_chain_stderr(&chains, stats::mean).max(floor),
            n_samples,
            seed: params.seed,
        });
    }

    // |lhs|^|V| via repeated multiplication, matching the per-sample fold
    // association so constant blocks reproduce the identity exactly.
    let a = lhs.value.abs();
    let lhs_power = (0..nv).fold(1.0f64, |acc, _| acc * a);
    let rhs_product = rhs.iter().fold(1.0f64, |acc, e| acc * e.value);
    // Delta method: d(a^nv) = nv a^(nv-1) da; product errors add factor-wise.
    let a_pow_minus = (0..nv.saturating_sub(1)).fold(1.0f64, |acc, _| acc * a);
    let sigma_l = nv as f64 * a_pow_minus * lhs.stderr;
    let mut sigma_r = 0.0;
    for i in 0..m {
        let others: f64 = rhs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(1.0, |acc, (_, e)| acc * e.value.abs());
        sigma_r += (others * rhs[i].stderr).powi(2);
    }
    let sigma = (sigma_l * sigma_l + sigma_r).sqrt();
    let within_band = lhs_power <= rhs_product + 3.0 * sigma;

    Ok(ChessboardReport {
        lhs,
        rhs,
        lhs_power,
        rhs_product,
        sigma,
        within_band,
        vertex_count: nv,
        n_samples,
        seed: params.seed,
    })
}
