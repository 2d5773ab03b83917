//! Two-photon single-slit ghost diffraction.
//!
//! An entangled photon pair leaves a source with Gaussian position
//! correlations. Photon 1 crosses a slit, photon 2 does not, and both evolve
//! freely in the paraxial regime. This crate evaluates the closed-form
//! amplitudes for that setup ([`analytic`]), checks them against brute-force
//! quadrature and grid propagation ([`oracle`]), and extracts diffraction
//! observables such as fringe widths from sampled profiles ([`analysis`]).
//!
//! All quantities are SI. Use [`units`] to parse strings like `"702.2nm"`.

pub mod analysis;
pub mod analytic;
pub mod config;
pub mod error;
pub mod oracle;
pub mod params;
pub mod profile;
pub mod units;

pub use analysis::{
    compare, find_extrema, measure_fringe, normalize, Comparison, FringeMetrics, NormalizeMode,
};
pub use analytic::{fringe_width, Marginal, SincConvention, TwoPhotonModel};
pub use config::{PhysicalConfig, RegimeFlags, ScanSpec};
pub use error::{Error, Result};
pub use params::{derive_params, uncertainties, DerivedParams};
pub use profile::{DensityProfile, Normalization};

pub use num_complex::Complex64;
