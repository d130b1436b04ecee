//! Command line driver: `surface-shift <experiment> --config <file>`.
//!
//! Exit codes: 0 on success, 2 for configuration problems (the message
//! names the offending field), 3 for runtime failures such as an
//! infeasible sampler state, a coupling budget overrun, or verification
//! violations.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use surface_shift::config::{resolve_vertex_field, ExperimentConfig};
use surface_shift::experiments::{
    chessboard_check, controlled_gradients_probe, estimate_max, estimate_small_ball,
    estimate_tail, estimate_variance, run_addition_campaign, shifted_config_experiment,
    BlockFunction, CampaignConfig,
};
use surface_shift::output::{write_csv, write_grid, write_jsonl, CsvRow, RunRecord};
use surface_shift::{cftp, sampler, Error, Potential, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ExperimentTag {
    #[value(name = "shift")]
    Shift,
    #[value(name = "sample")]
    Sample,
    #[value(name = "variance")]
    Variance,
    #[value(name = "small_ball")]
    SmallBall,
    #[value(name = "tail")]
    Tail,
    #[value(name = "max")]
    Max,
    #[value(name = "gradients")]
    Gradients,
    #[value(name = "chessboard")]
    Chessboard,
    #[value(name = "verify_addition")]
    VerifyAddition,
}

impl ExperimentTag {
    fn as_str(self) -> &'static str {
        match self {
            ExperimentTag::Shift => "shift",
            ExperimentTag::Sample => "sample",
            ExperimentTag::Variance => "variance",
            ExperimentTag::SmallBall => "small_ball",
            ExperimentTag::Tail => "tail",
            ExperimentTag::Max => "max",
            ExperimentTag::Gradients => "gradients",
            ExperimentTag::Chessboard => "chessboard",
            ExperimentTag::VerifyAddition => "verify_addition",
        }
    }
}

/// Random-surface experiments on the torus: sampling, estimation, and
/// verification of the height-shift transformation.
#[derive(Parser, Debug)]
#[command(name = "surface-shift", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: ExperimentTag,
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel chains (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(violations) if violations > 0 => {
            eprintln!("error: {violations} verification violations");
            ExitCode::from(3)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Returns the number of verification violations (0 for estimators).
fn run(cli: &Cli) -> Result<usize> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::config("threads", "must be >= 1"));
        }
        // Ignore the error when a pool already exists: only reachable in
        // tests that call run() twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let mut cfg = ExperimentConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    let tag = cli.experiment.as_str();
    cfg.validate(tag)?;
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&out_dir)?;

    let g = cfg.graph()?;
    let potential = cfg.potential.build()?;
    let seed = cfg.seed;
    let start = Instant::now();

    let mut records: Vec<RunRecord> = Vec::new();
    let mut rows: Vec<CsvRow> = Vec::new();
    let mut violations = 0usize;

    // Each arm pushes (estimator, vertex, value, stderr, n_samples) pairs
    // into both output formats through these helpers.
    macro_rules! push {
        ($estimator:expr, $v:expr, $params:expr, $value:expr, $stderr:expr, $ns:expr) => {{
            records.push(RunRecord {
                experiment: tag.to_string(),
                params: $params,
                value: $value,
                stderr: $stderr,
                n: cfg.n,
                seed,
                wall_time: 0.0,
            });
            rows.push(CsvRow {
                experiment: tag.to_string(),
                n: cfg.n,
                v: $v,
                estimator: $estimator.to_string(),
                value: $value,
                stderr: $stderr,
                n_samples: $ns as u64,
                seed,
            });
        }};
    }

    match cli.experiment {
        ExperimentTag::Variance => {
            let sec = cfg
                .variance
                .as_ref()
                .ok_or_else(|| Error::config("variance", "section missing"))?;
            let v = resolve_vertex_field(&g, sec.v, "variance.v")?;
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let est = estimate_variance(&g, &potential, v, &params)?;
            let meta = serde_json::json!({
                "v": sec.v,
                "chains": params.chains,
                "burn_sweeps": params.burn_sweeps,
                "samples_per_chain": params.samples_per_chain,
                "spacing_sweeps": params.spacing_sweeps,
            });
            push!("variance", Some((sec.v[0], sec.v[1])), meta, est.value, est.stderr, est.n_samples);
        }
        ExperimentTag::SmallBall => {
            let sec = cfg
                .small_ball
                .as_ref()
                .ok_or_else(|| Error::config("small_ball", "section missing"))?;
            let v = resolve_vertex_field(&g, sec.v, "small_ball.v")?;
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let est = estimate_small_ball(&g, &potential, v, sec.radius, &params)?;
            let meta = serde_json::json!({"v": sec.v, "radius": sec.radius});
            push!("small_ball", Some((sec.v[0], sec.v[1])), meta, est.value, est.stderr, est.n_samples);
        }
        ExperimentTag::Tail => {
            let sec =
                cfg.tail.as_ref().ok_or_else(|| Error::config("tail", "section missing"))?;
            let v = resolve_vertex_field(&g, sec.v, "tail.v")?;
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let est = estimate_tail(&g, &potential, v, sec.t, &params)?;
            let meta = serde_json::json!({"v": sec.v, "t": sec.t});
            push!("tail", Some((sec.v[0], sec.v[1])), meta, est.value, est.stderr, est.n_samples);
        }
        ExperimentTag::Max => {
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let est = estimate_max(&g, &potential, &params)?;
            let meta = serde_json::json!({"chains": params.chains});
            push!("median_max", None, meta, est.value, est.stderr, est.n_samples);
        }
        ExperimentTag::Gradients => {
            let sec = cfg
                .gradients
                .as_ref()
                .ok_or_else(|| Error::config("gradients", "section missing"))?;
            if sec.tuple_max_k < 1 {
                return Err(Error::config("gradients.tuple_max_k", "must be >= 1"));
            }
            let tuples = horizontal_chain_tuples(&g, sec.tuple_max_k)?;
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let report = controlled_gradients_probe(&g, &potential, sec.level, &tuples, &params)?;
            let meta = serde_json::json!({
                "level": sec.level,
                "edge": [report.delta_edge.0, report.delta_edge.1],
            });
            push!(
                "delta_hat",
                None,
                meta,
                report.delta_hat.value,
                report.delta_hat.stderr,
                report.delta_hat.n_samples
            );
            for tuple in &report.tuples {
                let meta = serde_json::json!({
                    "level": sec.level,
                    "edges": tuple.edges,
                    "bound": tuple.bound,
                    "within_bound": tuple.within_bound,
                });
                push!(
                    format!("tuple_{}", tuple.edges.len()),
                    None,
                    meta,
                    tuple.p.value,
                    tuple.p.stderr,
                    tuple.p.n_samples
                );
            }
        }
        ExperimentTag::Chessboard => {
            let sec = cfg
                .chessboard
                .as_ref()
                .ok_or_else(|| Error::config("chessboard", "section missing"))?;
            let block = match sec.block.as_str() {
                "indicator_ge" => BlockFunction::gradient_indicator_at_least(sec.threshold)?,
                "indicator_le" => BlockFunction::gradient_indicator_at_most(sec.threshold)?,
                "smooth" => BlockFunction::smooth_gradient()?,
                "one" => BlockFunction::constant(1.0)?,
                other => {
                    return Err(Error::config(
                        "chessboard.block",
                        format!("unknown block \"{other}\" (expected indicator_ge, indicator_le, smooth, or one)"),
                    ))
                }
            };
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let report = chessboard_check(&g, &potential, &[(block, (0, 0))], &params)?;
            let meta = serde_json::json!({
                "block": sec.block,
                "threshold": sec.threshold,
                "lhs_power": report.lhs_power,
                "rhs_product": report.rhs_product,
                "sigma": report.sigma,
                "within_band": report.within_band,
            });
            push!("lhs", None, meta.clone(), report.lhs.value, report.lhs.stderr, report.n_samples);
            push!("rhs", None, meta, report.rhs[0].value, report.rhs[0].stderr, report.n_samples);
            println!(
                "chessboard: lhs^|V| = {:.6e}, rhs product = {:.6e}, within 3 sigma band: {}",
                report.lhs_power, report.rhs_product, report.within_band
            );
        }
        ExperimentTag::Shift => {
            let sec =
                cfg.shift.as_ref().ok_or_else(|| Error::config("shift", "section missing"))?;
            let plan = cfg
                .plan
                .as_ref()
                .ok_or_else(|| Error::config("plan", "section required for shift"))?;
            let tau = plan.build(&g)?;
            let u_vertex = resolve_vertex_field(&g, sec.u, "shift.u")?;
            let params = cfg.mc.resolve(cfg.n, seed)?;
            let report = shifted_config_experiment(
                &g, &potential, &tau, cfg.eps, u_vertex, sec.a, sec.s, &params,
            )?;
            violations += report.consistency_violations;
            let meta = serde_json::json!({
                "u": sec.u,
                "a": sec.a,
                "s": sec.s,
                "eps": cfg.eps,
                "l": report.l,
                "union_bound_sum": report.union_bound_sum,
                "consistency_violations": report.consistency_violations,
            });
            let pairs = [
                ("p_center", &report.p_center),
                ("p_plus", &report.p_plus),
                ("p_minus", &report.p_minus),
                ("p_small_jacobian", &report.p_small_jacobian),
                ("p_m_exceeds", &report.p_m_exceeds),
            ];
            for (name, est) in pairs {
                push!(
                    name,
                    Some((sec.u[0], sec.u[1])),
                    meta.clone(),
                    est.value,
                    est.stderr,
                    est.n_samples
                );
            }
        }
        ExperimentTag::Sample => {
            let sec = cfg.sample.clone().unwrap_or_default();
            let side = 2 * cfg.n as usize;
            let sweeps = sec.sweeps.unwrap_or(200 * side * side);
            let heights: Vec<f64> = match sec.method.as_str() {
                "mcmc" => sampler::sample_surface(&g, &potential, sweeps, seed)?
                    .heights()
                    .to_vec(),
                "cftp" => {
                    let k = match &potential {
                        Potential::Hammock { k } => *k,
                        _ => {
                            return Err(Error::config(
                                "sample.method",
                                "cftp requires the hammock potential",
                            ))
                        }
                    };
                    let outcome = cftp::cftp_hammock(&g, k, seed, 0, sec.max_epoch)?;
                    println!(
                        "cftp: coalesced after {} epochs, {} sweeps",
                        outcome.epochs, outcome.total_sweeps
                    );
                    outcome.config.heights().to_vec()
                }
                other => {
                    return Err(Error::config(
                        "sample.method",
                        format!("unknown method \"{other}\" (expected mcmc or cftp)"),
                    ))
                }
            };
            let grid_path = out_dir.join("surface.srfg");
            write_grid(&grid_path, &g, seed, &potential, &heights)?;
            println!("wrote {}", grid_path.display());
            let sup = heights.iter().fold(0.0f64, |acc, &h| acc.max(h.abs()));
            let meta = serde_json::json!({"method": sec.method, "sweeps": sweeps});
            push!("sup_height", None, meta, sup, 0.0, 1);
        }
        ExperimentTag::VerifyAddition => {
            let sec = cfg.verify_addition.clone().unwrap_or_default();
            if sec.instances < 1 {
                return Err(Error::config("verify_addition.instances", "must be >= 1"));
            }
            let campaign = CampaignConfig {
                instances: sec.instances,
                seed,
                max_vertices: sec.max_vertices,
            };
            let report = run_addition_campaign(&campaign)?;
            violations += report.violations;
            for failure in &report.failures {
                eprintln!("violation: {failure}");
            }
            let meta = serde_json::json!({
                "instances": report.instances_run,
                "torus_instances": report.torus_instances,
                "random_graph_instances": report.random_graph_instances,
            });
            push!(
                "violations",
                None,
                meta,
                report.violations as f64,
                0.0,
                report.instances_run
            );
            println!(
                "verify_addition: {} instances, {} violations",
                report.instances_run, report.violations
            );
        }
    }

    let wall = start.elapsed().as_secs_f64();
    for record in &mut records {
        record.wall_time = wall;
    }
    let jsonl_path = out_dir.join(format!("{tag}.jsonl"));
    let csv_path = out_dir.join(format!("{tag}.csv"));
    write_jsonl(&jsonl_path, &records)?;
    write_csv(&csv_path, &rows)?;
    for row in &rows {
        println!(
            "{} {}: {} = {:.6} +/- {:.6} (n = {})",
            row.experiment,
            row.v.map(|(x, y)| format!("({x}, {y})")).unwrap_or_default(),
            row.estimator,
            row.value,
            row.stderr,
            row.n_samples
        );
    }
    println!("wrote {} and {}", jsonl_path.display(), csv_path.display());
    Ok(violations)
}

/// Nested edge tuples along the first coordinate axis away from the
/// origin: tuple k holds the first k edges of that lattice path. Joint
/// extremality probabilities along a fixed path are exactly what the
/// product bound controls.
fn horizontal_chain_tuples(
    g: &surface_shift_core::Graph,
    max_k: usize,
) -> Result<Vec<Vec<(usize, usize)>>> {
    let n = g
        .torus_n()
        .ok_or_else(|| Error::config("gradients", "requires a torus"))? as i64;
    let cap = (max_k as i64).min(2 * n - 1) as usize;
    let mut chain = Vec::with_capacity(cap);
    for i in 0..cap as i64 {
        let a = g.vertex_at(i, 0).expect("torus coordinate");
        let b = g.vertex_at(i + 1, 0).expect("torus coordinate");
        chain.push((a, b));
    }
    Ok((1..=cap).map(|k| chain[..k].to_vec()).collect())
}
