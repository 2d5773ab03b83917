//! JSON config files and command-line overrides.
//!
//! Physical quantities are unit-suffixed strings (`"702.2 nm"`, `"5/mm"`).
//! Every field is optional; missing ones fall back to the reference setup.

use std::path::Path;

use ghostdiff_core::oracle::{GridSpec, QuadratureSpec};
use ghostdiff_core::units::{parse_inverse_length, parse_length};
use ghostdiff_core::{Error, PhysicalConfig, Result, ScanSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub wavelength: Option<String>,
    pub slit_width: Option<String>,
    pub sigma: Option<String>,
    pub omega: Option<String>,
    pub l1: Option<String>,
    pub l2: Option<String>,
    pub scan: Option<ScanFile>,
    pub z0: Option<String>,
    pub peak_scale: Option<f64>,
    pub sweep: Option<SweepFile>,
    pub grid: Option<GridFile>,
    pub quadrature: Option<QuadratureFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFile {
    pub start: String,
    pub stop: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub slit_widths: Option<Vec<String>>,
    /// Ghost distances D = L1 + 2 L2. L1 and L2 are scaled together.
    pub distances: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub count: Option<usize>,
    pub half_extent: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureFile {
    pub start_order: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_order: Option<usize>,
    /// Number of z2 points compared at z1 = 0.
    pub points: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            input: "config".into(),
            reason: e.to_string(),
        })
    }
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// `start,stop,count`, e.g. `-10mm,10mm,401`.
    pub scan: Option<String>,
    pub z0: Option<String>,
    pub peak_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub slit_widths: Vec<f64>,
    pub distances: Vec<f64>,
}

/// Fully resolved run settings, SI throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub config: PhysicalConfig,
    pub scan: ScanSpec,
    pub z0: Option<f64>,
    pub peak_scale: Option<f64>,
    pub sweep: Sweep,
    pub grid: GridSpec,
    pub quadrature: QuadratureSpec,
    pub quadrature_points: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let config = PhysicalConfig::reference();
        Settings {
            config,
            scan: default_scan(),
            z0: None,
            peak_scale: None,
            sweep: Sweep {
                slit_widths: vec![0.2e-3, 0.4e-3, 0.8e-3],
                distances: vec![0.9, 1.8, 3.6],
            },
            grid: GridSpec::reference(&config),
            quadrature: QuadratureSpec::default(),
            quadrature_points: 21,
        }
    }
}

fn default_scan() -> ScanSpec {
    ScanSpec::symmetric(10e-3, 401).expect("static scan")
}

fn length(field: &Option<String>, default: f64) -> Result<f64> {
    field.as_deref().map_or(Ok(default), parse_length)
}

pub fn parse_scan(text: &str) -> Result<ScanSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(Error::Parse {
            input: text.into(),
            reason: "expected start,stop,count".into(),
        });
    };
    let count = count.parse().map_err(|_| Error::Parse {
        input: count.into(),
        reason: "count must be a positive integer".into(),
    })?;
    ScanSpec::new(parse_length(start)?, parse_length(stop)?, count)
}

impl Settings {
    pub fn resolve(file: &ConfigFile, overrides: &Overrides) -> Result<Self> {
        let mut s = Settings::default();
        let r = s.config;
        s.config = PhysicalConfig {
            wavelength: length(&file.wavelength, r.wavelength)?,
            slit_width: length(&file.slit_width, r.slit_width)?,
            sigma: file
                .sigma
                .as_deref()
                .map_or(Ok(r.sigma), parse_inverse_length)?,
            omega: length(&file.omega, r.omega)?,
            l1: length(&file.l1, r.l1)?,
            l2: length(&file.l2, r.l2)?,
        };
        s.config.validate()?;

        if let Some(scan) = &file.scan {
            s.scan = ScanSpec::new(
                parse_length(&scan.start)?,
                parse_length(&scan.stop)?,
                scan.count,
            )?;
        }
        if let Some(text) = &overrides.scan {
            s.scan = parse_scan(text)?;
        }

        s.z0 = match (&overrides.z0, &file.z0) {
            (Some(z), _) | (None, Some(z)) => Some(parse_length(z)?),
            _ => None,
        };
        s.peak_scale = overrides.peak_scale.or(file.peak_scale);
        if let Some(p) = s.peak_scale {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::validation(
                    "peak_scale",
                    "must be positive and finite",
                ));
            }
        }

        if let Some(sweep) = &file.sweep {
            if let Some(list) = &sweep.slit_widths {
                s.sweep.slit_widths = list
                    .iter()
                    .map(|v| parse_length(v))
                    .collect::<Result<_>>()?;
            }
            if let Some(list) = &sweep.distances {
                s.sweep.distances = list
                    .iter()
                    .map(|v| parse_length(v))
                    .collect::<Result<_>>()?;
            }
        }
        if s.sweep.slit_widths.is_empty() || s.sweep.distances.is_empty() {
            return Err(Error::validation("sweep", "lists must not be empty"));
        }
        if s.sweep
            .slit_widths
            .iter()
            .chain(&s.sweep.distances)
            .any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::validation("sweep", "entries must be positive"));
        }

        let grid = file.grid.clone().unwrap_or_default();
        s.grid = match (grid.count, &grid.half_extent) {
            (None, None) => GridSpec::reference(&s.config),
            (count, half) => {
                let count = count.unwrap_or(2048);
                let half = length(half, 25e-3)?;
                if count < 16 || half.is_nan() || half <= 0.0 {
                    return Err(Error::validation(
                        "grid",
                        "need count >= 16 and a positive half extent",
                    ));
                }
                GridSpec::aligned(&s.config, count, half)
            }
        };

        let q = file.quadrature.clone().unwrap_or_default();
        let d = QuadratureSpec::default();
        s.quadrature = QuadratureSpec {
            start_order: q.start_order.unwrap_or(d.start_order),
            tolerance: q.tolerance.unwrap_or(d.tolerance),
            max_order: q.max_order.unwrap_or(d.max_order),
        };
        s.quadrature_points = q.points.unwrap_or(21);
        if s.quadrature_points < 2 {
            return Err(Error::validation("quadrature.points", "need at least 2"));
        }
        Ok(s)
    }
}
