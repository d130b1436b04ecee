//! Symmetric pair potentials U for the gradient Gibbs measure. A potential
//! is finite inside a (possibly infinite) radius K and +inf outside; the
//! hammock is the pure hard-core case U = 0 on [-K, K].

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Shared closure type for the user-supplied smooth kinds.
pub type PairFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Potential {
    /// U = 0 on [-k, k] (closed), +inf outside.
    Hammock { k: f64 },
    /// U(x) = a x^2 on the whole line.
    Quadratic { a: f64 },
    /// U(x) = a (x^2 - b^2)^2 on the whole line.
    DoubleWell { a: f64, b: f64 },
    /// Finite exactly on the open interval (-k, k); `endpoint_finite`
    /// decides |x| = k, where the density may be discontinuous.
    SmoothInterval { k: f64, endpoint_finite: bool, u: PairFn },
    /// Finite on the whole line.
    SmoothLine { u: PairFn },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Hammock { k } => write!(f, "Hammock {{ k: {k} }}"),
            Potential::Quadratic { a } => write!(f, "Quadratic {{ a: {a} }}"),
            Potential::DoubleWell { a, b } => write!(f, "DoubleWell {{ a: {a}, b: {b} }}"),
            Potential::SmoothInterval { k, endpoint_finite, .. } => {
                write!(f, "SmoothInterval {{ k: {k}, endpoint_finite: {endpoint_finite} }}")
            }
            Potential::SmoothLine { .. } => write!(f, "SmoothLine"),
        }
    }
}

/// Probe offsets for the symmetry spot-check of closure kinds.
const SYMMETRY_PROBES: [f64; 7] = [0.07, 0.19, 0.33, 0.52, 0.71, 0.86, 0.97];

impl Potential {
    pub fn hammock(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::config("potential.k", "must be finite and > 0"));
        }
        Ok(Potential::Hammock { k })
    }

    pub fn quadratic(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::config("potential.a", "must be finite and > 0"));
        }
        Ok(Potential::Quadratic { a })
    }

    pub fn double_well(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::config("potential.a", "must be finite and > 0"));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::config("potential.b", "must be finite and >= 0"));
        }
        Ok(Potential::DoubleWell { a, b })
    }

    /// Closure kinds are spot-checked for symmetry and a finite lower bound
    /// at construction; formulas cannot be inspected, samples can.
    pub fn smooth_interval(k: f64, endpoint_finite: bool, u: PairFn) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::config("potential.k", "must be finite and > 0"));
        }
        let p = Potential::SmoothInterval { k, endpoint_finite, u };
        p.check_symmetry(k)?;
        Ok(p)
    }

    pub fn smooth_line(u: PairFn) -> Result<Self> {
        let p = Potential::SmoothLine { u };
        p.check_symmetry(3.0)?;
        Ok(p)
    }

    fn check_symmetry(&self, scale: f64) -> Result<()> {
        for &p in &SYMMETRY_PROBES {
            let x = p * scale;
            let (a, b) = (self.eval(x), self.eval(-x));
            let same = (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-9;
            if !same {
                return Err(Error::Asymmetric { x });
            }
            if a.is_finite() && a < -1e12 {
                return Err(Error::config("potential.u", "unbounded below"));
            }
            if a.is_nan() {
                return Err(Error::config("potential.u", "returned NaN"));
            }
        }
        Ok(())
    }

    /// U(x), with +inf outside the finiteness region.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Hammock { k } => {
                if x.abs() <= *k {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Potential::Quadratic { a } => a * x * x,
            Potential::DoubleWell { a, b } => {
                let d = x * x - b * b;
                a * d * d
            }
            Potential::SmoothInterval { k, endpoint_finite, u } => {
                let ax = x.abs();
                if ax < *k || (ax == *k && *endpoint_finite) {
                    u(x)
                } else {
                    f64::INFINITY
                }
            }
            Potential::SmoothLine { u } => u(x),
        }
    }

    /// Largest |x| with U(x) < inf; +inf for whole-line kinds. The hammock
    /// is finite on the closed interval, open-interval kinds on the open
    /// one (unless their endpoint is declared finite).
    pub fn finiteness_radius(&self) -> f64 {
        match self {
            Potential::Hammock { k } | Potential::SmoothInterval { k, .. } => *k,
            _ => f64::INFINITY,
        }
    }

    pub fn is_hard_core(&self) -> bool {
        self.finiteness_radius().is_finite()
    }

    /// The rescaled potential Ũ(x) = U(k' x); a surface sampled under Ũ
    /// is distributed as φ/k' for φ sampled under U.
    pub fn rescale(&self, k_prime: f64) -> Result<Self> {
        if !(k_prime > 0.0) || !k_prime.is_finite() {
            return Err(Error::config("rescale.k_prime", "must be finite and > 0"));
        }
        Ok(match self {
            Potential::Hammock { k } => Potential::Hammock { k: k / k_prime },
            Potential::Quadratic { a } => Potential::Quadratic { a: a * k_prime * k_prime },
            Potential::DoubleWell { a, b } => Potential::DoubleWell {
                a: a * k_prime.powi(4),
                b: b / k_prime,
            },
            Potential::SmoothInterval { k, endpoint_finite, u } => {
                let inner = u.clone();
                Potential::SmoothInterval {
                    k: k / k_prime,
                    endpoint_finite: *endpoint_finite,
                    u: Arc::new(move |x| inner(k_prime * x)),
                }
            }
            Potential::SmoothLine { u } => {
                let inner = u.clone();
                Potential::SmoothLine { u: Arc::new(move |x| inner(k_prime * x)) }
            }
        })
    }

    /// (tag, p0, p1) triple for file headers.
    pub fn tag_params(&self) -> (u8, f64, f64) {
        match self {
            Potential::Hammock { k } => (1, *k, 0.0),
            Potential::Quadratic { a } => (2, *a, 0.0),
            Potential::DoubleWell { a, b } => (3, *a, *b),
            Potential::SmoothInterval { k, .. } => (4, *k, 0.0),
            Potential::SmoothLine { .. } => (5, 0.0, 0.0),
        }
    }
}
