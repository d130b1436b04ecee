//! Result files: JSON-lines run records, a flat CSV for spreadsheet
//! import, and a binary grid format for full surface snapshots.
//!
//! Every writer is a pure function of its inputs, so a rerun with the
//! same seed produces byte-identical files except for the wall_time
//! field of the JSON records.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use surface_shift_core::Graph;

use crate::potential::Potential;
use crate::{Error, Result};

/// One line of the JSONL output. `params` carries the experiment-specific
/// knobs verbatim so records are self-describing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub params: serde_json::Value,
    pub value: f64,
    pub stderr: f64,
    pub n: u32,
    pub seed: u64,
    pub wall_time: f64,
}

pub fn write_jsonl(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::config("output", format!("serialize record: {e}")))?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// One CSV row. The vertex columns stay empty for experiments without a
/// distinguished vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub experiment: String,
    pub n: u32,
    pub v: Option<(i64, i64)>,
    pub estimator: String,
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "experiment,n,v_x,v_y,estimator,value,stderr,n_samples,seed";

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        let (vx, vy) = match row.v {
            Some((x, y)) => (x.to_string(), y.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            row.experiment, row.n, vx, vy, row.estimator, row.value, row.stderr, row.n_samples, row.seed
        )?;
    }
    w.flush()?;
    Ok(())
}

const GRID_MAGIC: &[u8; 4] = b"SRFG";
const GRID_VERSION: u32 = 1;

/// Full surface snapshot parsed back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFile {
    pub side: u32,
    pub seed: u64,
    pub potential_tag: u8,
    pub p1: f64,
    pub p2: f64,
    /// Row-major over coordinates: y sweeps the slow axis from -n+1 to n,
    /// x the fast axis over the same range.
    pub heights: Vec<f64>,
}

/// Heights reordered row-major over torus coordinates, independent of the
/// graph's internal vertex numbering.
pub fn row_major_heights(g: &Graph, heights: &[f64]) -> Result<Vec<f64>> {
    let n = g
        .torus_n()
        .ok_or_else(|| Error::config("output", "grid serialization needs a torus"))? as i64;
    if heights.len() != g.vertex_count() {
        return Err(Error::config(
            "output",
            format!("expected {} heights, found {}", g.vertex_count(), heights.len()),
        ));
    }
    let mut out = Vec::with_capacity(heights.len());
    for y in (-n + 1)..=n {
        for x in (-n + 1)..=n {
            let v = g.vertex_at(x, y).expect("torus coordinate in range");
            out.push(heights[v]);
        }
    }
    Ok(out)
}

pub fn write_grid(
    path: &Path,
    g: &Graph,
    seed: u64,
    potential: &Potential,
    heights: &[f64],
) -> Result<()> {
    let ordered = row_major_heights(g, heights)?;
    let side = 2 * g.torus_n().expect("row_major_heights checked torus");
    let (tag, p1, p2) = potential.tag_params();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(GRID_MAGIC)?;
    w.write_all(&GRID_VERSION.to_le_bytes())?;
    w.write_all(&side.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&[tag])?;
    w.write_all(&p1.to_le_bytes())?;
    w.write_all(&p2.to_le_bytes())?;
    for h in &ordered {
        w.write_all(&h.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridFile> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |msg: &str| Error::config("grid", format!("{path:?}: {msg}"));
    if bytes.len() < 4 + 4 + 4 + 8 + 1 + 16 {
        return Err(bad("truncated header"));
    }
    if &bytes[0..4] != GRID_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != GRID_VERSION {
        return Err(bad("unsupported version"));
    }
    let side = u32_at(8);
    let seed = u64_at(12);
    let potential_tag = bytes[20];
    let p1 = f64_at(21);
    let p2 = f64_at(29);
    let body = &bytes[37..];
    let expected = side as usize * side as usize * 8;
    if body.len() != expected {
        return Err(bad("payload length does not match side^2"));
    }
    let heights = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(GridFile { side, seed, potential_tag, p1, p2, heights })
}
