use std::fs::File;
use std::io::Write;
use std::path::Path;

use mclm_core::flows::{DiagnosticRow, Termination};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::HarnessError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SERIES_FILE: &str = "series.csv";

pub const COLUMNS: [&str; 7] = ["t", "h_half_sq", "h1_sq", "h2_sq", "sup_ux", "omega_mean", "linf_omega"];
pub const LAGRANGIAN_COLUMN: &str = "energy_lagrangian";

/// One line of `series.csv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub h_half_sq: f64,
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub sup_ux: f64,
    pub omega_mean: f64,
    pub linf_omega: f64,
    #[serde(default)]
    pub energy_lagrangian: Option<f64>,
}

impl From<&DiagnosticRow> for SeriesRow {
    fn from(r: &DiagnosticRow) -> Self {
        Self {
            t: r.t,
            h_half_sq: r.h_half_sq,
            h1_sq: r.h1_sq,
            h2_sq: r.h2_sq,
            sup_ux: r.sup_ux,
            omega_mean: r.omega_mean,
            linf_omega: r.linf_omega,
            energy_lagrangian: r.energy_lagrangian,
        }
    }
}

impl SeriesRow {
    fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.h_half_sq,
            self.h1_sq,
            self.h2_sq,
            self.sup_ux,
            self.omega_mean,
            self.linf_omega,
        ];
        v.extend(self.energy_lagrangian);
        v
    }
}

fn relative_range(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let first = values.clone().next().unwrap_or(0.0);
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    if first == 0.0 {
        if hi == lo { 0.0 } else { f64::INFINITY }
    } else {
        (hi - lo) / first.abs()
    }
}

/// Aggregates recomputable from the series file alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub t_final: f64,
    pub h_half_sq_initial: f64,
    pub h_half_sq_final: f64,
    pub h_half_sq_rel_range: f64,
    pub max_sup_ux: f64,
    pub max_abs_omega_mean: f64,
    pub max_linf_omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_lagrangian_rel_range: Option<f64>,
}

impl Summary {
    pub fn from_series(rows: &[SeriesRow]) -> Self {
        let max = |f: fn(&SeriesRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let lagrangian = rows.first().and_then(|r| r.energy_lagrangian).is_some();
        Self {
            rows: rows.len(),
            t_final: rows.last().map_or(0.0, |r| r.t),
            h_half_sq_initial: rows.first().map_or(0.0, |r| r.h_half_sq),
            h_half_sq_final: rows.last().map_or(0.0, |r| r.h_half_sq),
            h_half_sq_rel_range: relative_range(rows.iter().map(|r| r.h_half_sq)),
            max_sup_ux: max(|r| r.sup_ux),
            max_abs_omega_mean: max(|r| r.omega_mean.abs()),
            max_linf_omega: max(|r| r.linf_omega),
            energy_lagrangian_rel_range: lagrangian
                .then(|| relative_range(rows.iter().map(|r| r.energy_lagrangian.unwrap_or(f64::NAN)))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub code_version: String,
    /// Unix time in seconds.
    pub started_at: f64,
    pub finished_at: f64,
    pub termination: Termination,
    pub steps: usize,
    pub columns: Vec<String>,
    pub series_file: String,
    pub summary: Summary,
}

impl RunManifest {
    pub fn cause(&self) -> &'static str {
        self.termination.cause()
    }
}

pub fn columns(lagrangian: bool) -> Vec<String> {
    let mut c: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    if lagrangian {
        c.push(LAGRANGIAN_COLUMN.to_string());
    }
    c
}

/// Writes the series with 17 significant digits per value; `-0` is written as `0`.
pub fn write_series(path: &Path, rows: &[SeriesRow], lagrangian: bool) -> Result<(), HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(columns(lagrangian)).map_err(io)?;
    for r in rows {
        w.write_record(r.values().iter().map(|v| format!("{:.16e}", v + 0.0))).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>, HarnessError> {
    let io = |e: csv::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    r.deserialize().collect::<Result<Vec<SeriesRow>, _>>().map_err(io)
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| HarnessError::Io(e.to_string()))?;
    let mut f = File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    writeln!(f, "{text}").map_err(|e| HarnessError::Io(e.to_string()))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}
