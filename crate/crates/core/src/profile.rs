use serde::{Deserialize, Serialize};

use crate::config::ScanSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    Raw,
    UnitArea,
    PeakScaled(f64),
}

/// Sampled 1D density: strictly increasing positions, non-negative values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub normalization: Normalization,
}

impl DensityProfile {
    pub fn new(positions: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if positions.len() != values.len() {
            return Err(Error::validation("profile", "length mismatch"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("profile", "positions not increasing"));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::validation("profile", "negative or NaN value"));
        }
        Ok(DensityProfile {
            positions,
            values,
            normalization: Normalization::Raw,
        })
    }

    /// Samples `f` on every point of `scan`.
    pub fn sample(scan: &ScanSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        scan.validate()?;
        let positions: Vec<f64> = scan.points().collect();
        let values = positions.iter().map(|&z| f(z)).collect();
        Self::new(positions, values)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.positions, &self.values)
    }

    /// Position and value of the largest sample.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.positions
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&z, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((z, v)),
            })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation, `None` outside the sampled range.
    pub fn interpolate(&self, z: f64) -> Option<f64> {
        let n = self.positions.len();
        if n == 0 || z < self.positions[0] || z > self.positions[n - 1] {
            return None;
        }
        let i = self.positions.partition_point(|&p| p <= z);
        if i == n {
            return Some(self.values[n - 1]);
        }
        let (z0, z1) = (self.positions[i - 1], self.positions[i]);
        let t = (z - z0) / (z1 - z0);
        Some(self.values[i - 1] * (1.0 - t) + self.values[i] * t)
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}
