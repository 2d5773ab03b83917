use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Axis, WaveGrid};
use crate::error::{Error, Result};

/// JSON description written next to a raw grid dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub z1: Axis,
    pub z2: Axis,
    pub layout: String,
    pub dtype: String,
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut p = base.as_os_str().to_owned();
    p.push(ext);
    PathBuf::from(p)
}

/// Writes `<base>.bin` (little-endian f64 re/im pairs, z1-major rows) and
/// `<base>.json`.
pub fn write_grid(base: &Path, grid: &WaveGrid) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(with_ext(base, ".bin"))?);
    for a in &grid.amplitudes {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    out.flush()?;
    let sidecar = GridSidecar {
        z1: grid.z1,
        z2: grid.z2,
        layout: "row-major, z1 rows of z2 samples".into(),
        dtype: "complex128 as little-endian f64 (re, im) pairs".into(),
    };
    fs::write(
        with_ext(base, ".json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

pub fn read_grid(base: &Path) -> Result<WaveGrid> {
    let sidecar: GridSidecar = serde_json::from_slice(&fs::read(with_ext(base, ".json"))?)?;
    let raw = fs::read(with_ext(base, ".bin"))?;
    let expected = sidecar.z1.count * sidecar.z2.count * 16;
    if raw.len() != expected {
        return Err(Error::validation(
            "grid dump",
            format!("expected {expected} bytes, found {}", raw.len()),
        ));
    }
    let amplitudes = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(WaveGrid {
        z1: sidecar.z1,
        z2: sidecar.z2,
        amplitudes,
    })
}
