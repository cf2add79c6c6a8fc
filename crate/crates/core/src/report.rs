//! CSV and JSON output of simulation results.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{PointStats, SimConfig, Variant};

pub const SUMMARY_FILE: &str = "results.csv";
pub const POSITIONS_FILE: &str = "positions.csv";
pub const SIDECAR_FILE: &str = "run.json";

/// How per-position errors are attributed.
pub const POSITION_ACCOUNTING: &str =
    "window decision z_t at time t, split by complete/incomplete class in that window";

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: SimConfig,
    pub variants: Vec<Variant>,
    pub n: usize,
    pub m: usize,
    pub rate: f64,
    pub position_accounting: String,
    pub version: String,
}

impl RunManifest {
    pub fn new(config: SimConfig, variants: Vec<Variant>, n: usize, m: usize, rate: f64) -> Self {
        RunManifest {
            config,
            variants,
            n,
            m,
            rate,
            position_accounting: POSITION_ACCOUNTING.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SummaryRow {
    pub variant: String,
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub i_avg: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PositionRow {
    pub variant: String,
    pub ebno_db: f64,
    pub t: usize,
    pub complete_ber: f64,
    pub incomplete_ber: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultFiles {
    pub summary: PathBuf,
    pub positions: PathBuf,
    pub sidecar: PathBuf,
}

pub fn summary_rows(stats: &[PointStats]) -> Vec<SummaryRow> {
    stats
        .iter()
        .map(|s| SummaryRow {
            variant: s.variant.name().to_string(),
            ebno_db: s.ebno_db,
            frames: s.frames,
            bit_errors: s.bit_errors,
            frame_errors: s.frame_errors,
            ber: s.ber(),
            fer: s.fer(),
            i_avg: s.i_avg(),
        })
        .collect()
}

/// Rows for window positions that were decoded at least once.
pub fn position_rows(stats: &[PointStats]) -> Vec<PositionRow> {
    stats
        .iter()
        .flat_map(|s| {
            s.positions
                .iter()
                .enumerate()
                .filter(|(_, p)| p.complete_bits + p.incomplete_bits > 0)
                .map(move |(i, p)| PositionRow {
                    variant: s.variant.name().to_string(),
                    ebno_db: s.ebno_db,
                    t: i + 1,
                    complete_ber: p.complete_ber(),
                    incomplete_ber: p.incomplete_ber(),
                })
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, headers: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(headers)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the summary CSV, the per-position CSV and the JSON sidecar into `dir`.
pub fn write_results(stats: &[PointStats], manifest: &RunManifest, dir: &Path) -> Result<ResultFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ResultFiles {
        summary: dir.join(SUMMARY_FILE),
        positions: dir.join(POSITIONS_FILE),
        sidecar: dir.join(SIDECAR_FILE),
    };
    write_csv(
        &files.summary,
        &["variant", "ebno_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "i_avg"],
        &summary_rows(stats),
    )?;
    write_csv(
        &files.positions,
        &["variant", "ebno_db", "t", "complete_ber", "incomplete_ber"],
        &position_rows(stats),
    )?;
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(&files.sidecar, json).map_err(|e| Error::io(&files.sidecar, e))?;
    Ok(files)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
