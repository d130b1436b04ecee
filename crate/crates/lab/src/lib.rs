//! Monte Carlo laboratory around the `surface-shift-core` kernels.
//!
//! Samplers for the gradient Gibbs measure with a pinned origin, an exact
//! coupling-from-the-past sampler for the hard-core (hammock) potential,
//! the experiment drivers behind the `surface-shift` binary, and the file
//! formats they emit. All randomness flows from one master seed through
//! counter-based streams; no entropy is taken from the environment.

pub mod cftp;
pub mod config;
pub mod experiments;
pub mod output;
pub mod potential;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use potential::Potential;
pub use sampler::{McParams, SurfaceSampler};

/// Errors from sampling, experiments, and IO. Core algebra errors are
/// wrapped; configuration errors carry the offending field name.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("core: {0}")]
    Core(surface_shift_core::Error),
    #[error("hard-core constraint violated at vertex {vertex}: empty conditional support")]
    Infeasible { vertex: usize },
    #[error("vertex {vertex} is pinned and cannot be resampled")]
    Pinned { vertex: usize },
    #[error("no feasible initial configuration for this potential")]
    NoFeasibleInit,
    #[error("potential is not symmetric: U({x}) != U({minus_x})", minus_x = -x)]
    Asymmetric { x: f64 },
    #[error("coupling did not coalesce within {max_epoch} doubling epochs")]
    CftpBudget { max_epoch: u32 },
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<surface_shift_core::Error> for Error {
    fn from(e: surface_shift_core::Error) -> Self {
        Error::Core(e)
    }
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// Process exit code contract: validation errors exit 2, runtime
    /// failures exit 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
