//! Physical configuration of the two-photon slit experiment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters, all in SI units.
///
/// `l2` is the source-to-slit distance (photon 2 covers the same distance on
/// its own arm before the slit event), `l1` the slit-to-detector distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Wavelength (m).
    pub wavelength: f64,
    /// Slit width (m).
    pub slit_width: f64,
    /// Momentum-spread parameter (1/m).
    pub sigma: f64,
    /// Position-spread parameter (m).
    pub omega: f64,
    /// Slit to D1 distance, and post-slit distance for photon 2 (m).
    pub l1: f64,
    /// Source to slit distance (m).
    pub l2: f64,
}

/// Soft regime indicators. None of these are errors, they only say how much
/// trust the closed-form approximations deserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub entangled: bool,
    pub fresnel: bool,
    pub approximation: bool,
}

impl PhysicalConfig {
    /// The desk-scale reference setup: 702.2 nm, 0.4 mm slit, σ = 5/mm,
    /// Ω = 5 mm and L1 = L2 = 0.6 m (so D = 1.8 m).
    pub fn reference() -> Self {
        PhysicalConfig {
            wavelength: 702.2e-9,
            slit_width: 0.4e-3,
            sigma: 5.0e3,
            omega: 5.0e-3,
            l1: 0.6,
            l2: 0.6,
        }
    }

    /// Same setup with Ω = 1/(2σ), where the source state factorizes.
    pub fn disentangled(self) -> Self {
        PhysicalConfig {
            omega: 1.0 / (2.0 * self.sigma),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("wavelength", self.wavelength),
            ("slit_width", self.slit_width),
            ("sigma", self.sigma),
            ("omega", self.omega),
            ("l1", self.l1),
            ("l2", self.l2),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::validation(name, format!("{v} is not finite")));
            }
            if v <= 0.0 {
                return Err(Error::validation(name, format!("{v} is not positive")));
            }
        }
        Ok(())
    }

    /// Effective ghost distance D = 2 L2 + L1.
    pub fn ghost_distance(&self) -> f64 {
        2.0 * self.l2 + self.l1
    }

    pub fn regime(&self) -> RegimeFlags {
        let spread = 2.0 * self.wavelength * self.l2 / std::f64::consts::PI;
        RegimeFlags {
            entangled: self.omega * self.sigma > 5.0,
            fresnel: self.slit_width / self.l1 < 1e-2 && self.slit_width / self.l2 < 1e-2,
            approximation: spread > 100.0 / (self.sigma * self.sigma),
        }
    }
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// A uniform 1D scan, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ScanSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let scan = ScanSpec { start, stop, count };
        scan.validate()?;
        Ok(scan)
    }

    /// Symmetric scan over `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::validation("scan", "endpoints must be finite"));
        }
        if self.start >= self.stop {
            return Err(Error::validation("scan", "start must be below stop"));
        }
        if self.count < 2 {
            return Err(Error::validation("scan", "need at least two points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}
