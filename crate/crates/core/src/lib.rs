//! Deterministic kernels for shifting Lipschitz surfaces on finite graphs.
//!
//! The crate has three layers:
//!
//! * [`graph`]: finite simple connected graphs, with the even-sided 2D torus
//!   as the primary instance, plus the distance and component queries the
//!   shift machinery needs.
//! * [`pwl`]: exact piecewise-linear calculus: evaluation, right
//!   derivatives, pointwise minima with crossing insertion, and inversion of
//!   `h ↦ h + f(h)` for slope-bounded `f`.
//! * [`addition`]: the height-addition map `T⁺` and its inverse: a sweep
//!   that settles vertices in increasing tentative-shift order, propagating
//!   plateau bumps to unsettled neighbours, together with the step-by-step
//!   transcript, Jacobian products, and locality diagnostics.
//!
//! Everything here is allocation-only (`no_std` + `alloc`): no RNG, no IO,
//! and no tolerances inside the algebra; equalities that hold exactly in
//! exact arithmetic (plateau levels, tail values) hold exactly in floats
//! too. Randomised drivers, samplers, and file formats live in the
//! companion `surface-shift` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod addition;
pub mod graph;
pub mod pwl;

mod math;

pub use addition::{
    capital_l, extremal_edges, jacobian_bound_check, run_addition, run_inverse,
    shift_bounds_check, t_minus, t_plus, tau_prime, AdditionPlan, AdditionTranscript,
    Configuration, JacobianBoundReport, ShiftBoundsReport,
};
pub use graph::{component_metrics, ComponentMetrics, Graph, GraphKind, Vertex};
pub use pwl::{bump_f, make_m, BumpParams, PwlFunction};

use core::fmt;

/// Validation and construction errors. Hot-path queries on valid inputs do
/// not allocate errors; everything fallible is funnelled through here.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Torus half-side must be at least 2 so the four neighbour offsets of a
    /// vertex stay pairwise distinct.
    TorusTooSmall { n: u32 },
    /// The operation needs representative torus coordinates.
    NotATorus,
    VertexOutOfRange { vertex: usize, count: usize },
    SelfLoop { vertex: usize },
    DuplicateEdge { a: usize, b: usize },
    NotAnEdge { a: usize, b: usize },
    Disconnected,
    EmptyGraph,
    /// A numeric argument was NaN or infinite where a finite value is required.
    NonFinite { what: &'static str },
    /// The bump half-width ε must lie in (0, 1/2].
    EpsOutOfRange { eps: f64 },
    TauNegative { vertex: usize },
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    EmptyBreakpoints,
    BreakpointsNotIncreasing,
    /// Inversion of `h ↦ h + f(h)` requires |slope| ≤ 1/2.
    SlopeBound { max_abs_slope: f64 },
    /// A pinned height does not match the stored height vector.
    PinnedMismatch { vertex: usize },
    /// The vertex order is not a permutation of 0..count.
    InvalidOrder,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TorusTooSmall { n } => write!(f, "torus half-side must be >= 2, got {n}"),
            Error::NotATorus => write!(f, "operation requires a torus graph"),
            Error::VertexOutOfRange { vertex, count } => {
                write!(f, "vertex {vertex} out of range for {count} vertices")
            }
            Error::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Error::DuplicateEdge { a, b } => write!(f, "duplicate edge ({a}, {b})"),
            Error::NotAnEdge { a, b } => write!(f, "({a}, {b}) is not an edge of the graph"),
            Error::Disconnected => write!(f, "graph is not connected"),
            Error::EmptyGraph => write!(f, "graph has no vertices"),
            Error::NonFinite { what } => write!(f, "{what} must be finite"),
            Error::EpsOutOfRange { eps } => write!(f, "eps must lie in (0, 1/2], got {eps}"),
            Error::TauNegative { vertex } => write!(f, "tau must be >= 0, negative at vertex {vertex}"),
            Error::LengthMismatch { what, expected, got } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            Error::EmptyBreakpoints => write!(f, "breakpoint list must be nonempty"),
            Error::BreakpointsNotIncreasing => {
                write!(f, "breakpoint abscissae must be strictly increasing")
            }
            Error::SlopeBound { max_abs_slope } => {
                write!(f, "slope bound 1/2 exceeded: max |slope| = {max_abs_slope}")
            }
            Error::PinnedMismatch { vertex } => {
                write!(f, "pinned height disagrees with height vector at vertex {vertex}")
            }
            Error::InvalidOrder => write!(f, "vertex order must be a permutation of 0..n"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
