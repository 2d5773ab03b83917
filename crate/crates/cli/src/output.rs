//! CSV files and the run summary.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which is
//! locale independent and round-trips exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use ghostdiff_core::{
    Comparison, DensityProfile, DerivedParams, FringeMetrics, PhysicalConfig, RegimeFlags, Result,
};
use serde::Serialize;
use serde_json::Value;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to `path` via a temp file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn profile_csv(profile: &DensityProfile) -> String {
    let mut out = String::from("position_m,value\n");
    for (x, y) in profile.positions.iter().zip(&profile.values) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*y));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub width_measured_m: f64,
    pub width_formula_m: f64,
    pub rel_err: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,width_measured_m,width_formula_m,rel_err\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.param,
            fmt_f64(r.width_measured_m),
            fmt_f64(r.width_formula_m),
            fmt_f64(r.rel_err)
        );
    }
    out
}

/// Outcome of fringe extraction on one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeReport {
    /// `resolved` or `pattern-not-resolved`.
    pub status: &'static str,
    pub width_formula_m: f64,
    pub rel_err: Option<f64>,
    pub metrics: Option<FringeMetrics>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub config: PhysicalConfig,
    pub derived: DerivedParams,
    pub regime: RegimeFlags,
    pub fringe: Option<FringeReport>,
    pub comparison: Option<Comparison>,
    /// Scenario-specific observables.
    pub details: BTreeMap<String, Value>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is always serializable")
    }

    /// Two-column table for people.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("scenario".into(), self.scenario.clone()),
            ("wavelength_m".into(), fmt_short(self.config.wavelength)),
            ("slit_width_m".into(), fmt_short(self.config.slit_width)),
            ("sigma_per_m".into(), fmt_short(self.config.sigma)),
            ("omega_m".into(), fmt_short(self.config.omega)),
            ("l1_m".into(), fmt_short(self.config.l1)),
            ("l2_m".into(), fmt_short(self.config.l2)),
            (
                "ghost_distance_m".into(),
                fmt_short(self.derived.ghost_distance),
            ),
            ("entangled".into(), self.derived.is_entangled.to_string()),
        ];
        if let Some(f) = &self.fringe {
            rows.push(("fringe".into(), f.status.into()));
            rows.push(("width_formula_m".into(), fmt_short(f.width_formula_m)));
            if let Some(m) = &f.metrics {
                rows.push(("width_measured_m".into(), fmt_short(m.measured_width_min)));
            }
        }
        if let Some(c) = &self.comparison {
            rows.push(("l_inf_rel".into(), fmt_short(c.l_inf_rel)));
            rows.push(("l2_rel".into(), fmt_short(c.l2_rel)));
        }
        for (k, v) in &self.details {
            let text = match v {
                Value::Number(n) if n.is_f64() => fmt_short(n.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            rows.push((k.clone(), text));
        }
        for o in &self.outputs {
            rows.push(("output".into(), o.display().to_string()));
        }
        rows.push(("wall_time_s".into(), format!("{:.3}", self.wall_time_s)));

        let key_width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<key_width$}  {v}\n"))
            .collect()
    }
}

fn fmt_short(v: f64) -> String {
    format!("{v:.6e}")
}
