//! CSV, metadata and trace writers.
//!
//! CSV layout (schema 1): a `# schema=1` comment line, a header, then one
//! line per row. Reals are written in scientific notation with 9 significant
//! digits; `b` is the bit count or `cont`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::runner::{ResultRow, ScenarioOutput};
use crate::error::{Error, Result};
use crate::optimizer::AoTrace;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 17] = [
    "scenario",
    "N",
    "b",
    "P_dBm",
    "d_T",
    "seed",
    "start",
    "start_x",
    "start_y",
    "snr_db_proposed_ma",
    "snr_db_fixed",
    "snr_db_upper_bound",
    "snr_db_baseline_M1",
    "snr_db_baseline_M10",
    "iterations",
    "near_field",
    "wall_ms",
];

/// Nine significant digits, scientific notation.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn record(row: &ResultRow) -> [String; 17] {
    [
        row.scenario.to_string(),
        row.n.to_string(),
        row.resolution.to_string(),
        format_real(row.power_dbm),
        format_real(row.d_t),
        row.seed.to_string(),
        row.start.to_string(),
        format_real(row.start_position.x),
        format_real(row.start_position.y),
        format_real(row.snr_db_proposed_ma),
        format_real(row.snr_db_fixed),
        format_real(row.snr_db_upper_bound),
        format_real(row.snr_db_baseline_m1),
        format_real(row.snr_db_baseline_m10),
        row.iterations.to_string(),
        row.near_field.to_string(),
        row.wall_ms.map(format_real).unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "# schema={SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.write_record(record(row)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    schema: u32,
    scenario: String,
    rows: usize,
    wall_ms: f64,
    /// Rayleigh distance in meters keyed by TRIS element count.
    rayleigh_distance_m: BTreeMap<String, f64>,
    config: &'a ExperimentConfig,
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub trace: Option<PathBuf>,
}

pub fn write_trace(path: &Path, trace: &AoTrace) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let json = serde_json::to_string_pretty(trace).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

/// Writes `<scenario>.csv`, `<scenario>.meta.json` and, for single runs,
/// `trace.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    output: &ScenarioOutput,
    wall_ms: f64,
) -> Result<WrittenFiles> {
    fs::create_dir_all(dir)?;
    let name = output.scenario.as_str();
    let csv = dir.join(format!("{name}.csv"));
    write_csv(fs::File::create(&csv)?, &output.rows)?;

    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        schema: SCHEMA_VERSION,
        scenario: name.to_string(),
        rows: output.rows.len(),
        wall_ms,
        rayleigh_distance_m: output
            .rayleigh_distances
            .iter()
            .map(|(n, d)| (n.to_string(), *d))
            .collect(),
        config,
    };
    let meta_path = dir.join(format!("{name}.meta.json"));
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(&meta_path, json)?;

    let trace = match (output.scenario, output.traces.first()) {
        (super::Scenario::SingleRun, Some(t)) => {
            let p = dir.join("trace.json");
            write_trace(&p, t)?;
            Some(p)
        }
        _ => None,
    };
    Ok(WrittenFiles {
        csv,
        meta: meta_path,
        trace,
    })
}
