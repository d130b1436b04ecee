//! Declarative experiment configuration: a single TOML document with
//! nested sections, unknown keys rejected, every validation error naming
//! the offending field. Flags on the command line override file values.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use surface_shift_core::{Graph, Vertex};

use crate::experiments::tau::{eta_field, tau_log_field};
use crate::potential::Potential;
use crate::sampler::McParams;
use crate::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional tag; when present it must match the experiment requested
    /// on the command line.
    pub experiment: Option<String>,
    /// Torus size parameter: the side is 2n.
    pub n: u32,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub seed: u64,
    /// Output directory; overridden by --out.
    pub out: Option<PathBuf>,
    pub potential: PotentialConfig,
    pub plan: Option<PlanConfig>,
    #[serde(default)]
    pub mc: McConfig,
    pub variance: Option<VertexSection>,
    pub small_ball: Option<SmallBallSection>,
    pub tail: Option<TailSection>,
    pub max: Option<MaxSection>,
    pub gradients: Option<GradientsSection>,
    pub chessboard: Option<ChessboardSection>,
    pub shift: Option<ShiftSection>,
    pub verify_addition: Option<VerifySection>,
    pub sample: Option<SampleSection>,
}

fn default_eps() -> f64 {
    0.25
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: String,
    pub k: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

impl PotentialConfig {
    pub fn build(&self) -> Result<Potential> {
        let used = |name: &str, value: Option<f64>| -> Result<f64> {
            value.ok_or_else(|| {
                Error::config(
                    format!("potential.{name}"),
                    format!("required for kind \"{}\"", self.kind),
                )
            })
        };
        let unused = |name: &str, value: Option<f64>| -> Result<()> {
            if value.is_some() {
                return Err(Error::config(
                    format!("potential.{name}"),
                    format!("not used by kind \"{}\"", self.kind),
                ));
            }
            Ok(())
        };
        match self.kind.as_str() {
            "hammock" => {
                unused("a", self.a)?;
                unused("b", self.b)?;
                Potential::hammock(used("k", self.k)?)
            }
            "quadratic" => {
                unused("k", self.k)?;
                unused("b", self.b)?;
                Potential::quadratic(used("a", self.a)?)
            }
            "double_well" => {
                unused("k", self.k)?;
                Potential::double_well(used("a", self.a)?, used("b", self.b)?)
            }
            other => Err(Error::config(
                "potential.kind",
                format!("unknown kind \"{other}\" (expected hammock, quadratic, or double_well)"),
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    /// tau_log | eta | constant | file
    pub tau: String,
    /// Target vertex for the eta profile.
    pub target: Option<[i64; 2]>,
    /// Value for the constant profile.
    pub c: Option<f64>,
    /// JSON file holding one height per vertex for tau = "file".
    pub path: Option<PathBuf>,
    /// Scale multiplier applied to the built profile.
    pub alpha: Option<f64>,
}

impl PlanConfig {
    pub fn build(&self, g: &Graph) -> Result<Vec<f64>> {
        let alpha = self.alpha.unwrap_or(1.0);
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::config("plan.alpha", "must be finite and positive"));
        }
        let mut tau = match self.tau.as_str() {
            "tau_log" => tau_log_field(g)?,
            "eta" => {
                let t = self
                    .target
                    .ok_or_else(|| Error::config("plan.target", "required for tau = \"eta\""))?;
                let target = resolve_vertex_field(g, t, "plan.target")?;
                eta_field(g, target)?
            }
            "constant" => {
                let c = self
                    .c
                    .ok_or_else(|| Error::config("plan.c", "required for tau = \"constant\""))?;
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::config("plan.c", "must be finite and >= 0"));
                }
                vec![c; g.vertex_count()]
            }
            "file" => {
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::config("plan.path", "required for tau = \"file\""))?;
                let text = std::fs::read_to_string(path)?;
                let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
                    Error::config("plan.path", format!("not a JSON array of numbers: {e}"))
                })?;
                if values.len() != g.vertex_count() {
                    return Err(Error::config(
                        "plan.path",
                        format!("expected {} values, found {}", g.vertex_count(), values.len()),
                    ));
                }
                values
            }
            other => {
                return Err(Error::config(
                    "plan.tau",
                    format!("unknown profile \"{other}\" (expected tau_log, eta, constant, or file)"),
                ))
            }
        };
        for t in &mut tau {
            *t *= alpha;
        }
        if let Some(bad) = tau.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::config("plan.tau", format!("profile value {bad} is not a finite nonnegative number")));
        }
        Ok(tau)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_chains")]
    pub chains: usize,
    /// Defaults to 200 * (2n)^2 (the documented variance-experiment
    /// default) when omitted.
    pub burn_sweeps: Option<usize>,
    #[serde(default = "default_samples")]
    pub samples_per_chain: usize,
    #[serde(default = "default_spacing")]
    pub spacing_sweeps: usize,
    #[serde(default)]
    pub random_scan: bool,
}

fn default_chains() -> usize {
    8
}
fn default_samples() -> usize {
    1000
}
fn default_spacing() -> usize {
    1
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            chains: default_chains(),
            burn_sweeps: None,
            samples_per_chain: default_samples(),
            spacing_sweeps: default_spacing(),
            random_scan: false,
        }
    }
}

impl McConfig {
    pub fn resolve(&self, n: u32, seed: u64) -> Result<McParams> {
        if self.chains < 2 {
            return Err(Error::config("mc.chains", "must be >= 2 (chain-level error bars)"));
        }
        if self.samples_per_chain < 1 {
            return Err(Error::config("mc.samples_per_chain", "must be >= 1"));
        }
        if self.spacing_sweeps < 1 {
            return Err(Error::config("mc.spacing_sweeps", "must be >= 1"));
        }
        let side = 2 * n as usize;
        let burn = self.burn_sweeps.unwrap_or(200 * side * side);
        let mut params = McParams::new(self.chains, burn, self.samples_per_chain, self.spacing_sweeps, seed);
        params.random_scan = self.random_scan;
        Ok(params)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSection {
    pub v: [i64; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallBallSection {
    pub v: [i64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSection {
    pub v: [i64; 2],
    pub t: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxSection {}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientsSection {
    pub level: f64,
    #[serde(default = "default_tuple_max_k")]
    pub tuple_max_k: usize,
}

fn default_tuple_max_k() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChessboardSection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// indicator_ge | indicator_le | smooth | one
    #[serde(default = "default_block")]
    pub block: String,
}

fn default_threshold() -> f64 {
    0.9
}
fn default_block() -> String {
    "indicator_ge".to_string()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSection {
    pub u: [i64; 2],
    pub a: f64,
    pub s: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_max_vertices")]
    pub max_vertices: usize,
}

fn default_instances() -> usize {
    1000
}
fn default_max_vertices() -> usize {
    40
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { instances: default_instances(), max_vertices: default_max_vertices() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    /// Sweeps before emitting the sample; defaults to 200 * (2n)^2.
    pub sweeps: Option<usize>,
    /// mcmc | cftp (cftp requires the hammock potential).
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_max_epoch")]
    pub max_epoch: u32,
}

fn default_method() -> String {
    "mcmc".to_string()
}
fn default_max_epoch() -> u32 {
    24
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection { sweeps: None, method: default_method(), max_epoch: default_max_epoch() }
    }
}

pub fn resolve_vertex(g: &Graph, coords: [i64; 2]) -> Result<Vertex> {
    resolve_vertex_field(g, coords, "v")
}

pub fn resolve_vertex_field(g: &Graph, coords: [i64; 2], field: &str) -> Result<Vertex> {
    g.vertex_at(coords[0], coords[1])
        .ok_or_else(|| Error::config(field, "graph is not a torus; coordinates unavailable"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{path:?}: {e}")))?;
        let config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::config("config", format!("{path:?}: {e}")))?;
        Ok(config)
    }

    /// Structural validation shared by every experiment; the dispatcher
    /// checks per-experiment sections on top of this.
    pub fn validate(&self, experiment: &str) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("n", "torus size must be >= 2"));
        }
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Error::config("eps", "must lie in (0, 0.5]"));
        }
        if let Some(tag) = &self.experiment {
            if tag != experiment {
                return Err(Error::config(
                    "experiment",
                    format!("file names \"{tag}\" but \"{experiment}\" was requested"),
                ));
            }
        }
        self.potential.build()?;
        Ok(())
    }

    pub fn graph(&self) -> Result<Graph> {
        Ok(Graph::torus(self.n)?)
    }
}
