//! Brute-force checks that bypass the narrow-slit closed forms.
//!
//! Two independent routes: [`slit_integral`] integrates the exact post-slit
//! integrand by Gauss–Legendre quadrature, and [`end_to_end_density`] pushes
//! the sampled source state through spectral Fresnel propagation on a grid.

mod dump;
mod grid;
mod quadrature;

use log::warn;

use crate::config::PhysicalConfig;

pub use dump::{read_grid, write_grid, GridSidecar};
pub use grid::{
    end_to_end_density, propagate, propagate_1d, sample_initial_state, translate_z1, truncate_slit,
    Axis, DensityGrid, GridSpec, PipelineOptions, WaveGrid,
};
pub use quadrature::{
    adjudicate_sinc_convention, slit_integral, slit_integrand, ConventionReport, GaussLegendre,
    QuadratureSpec,
};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Paraxial dispersion c k0 + c kz² / 2k0 (rad/s).
pub fn dispersion(kz: f64, config: &PhysicalConfig) -> f64 {
    let k0 = 2.0 * std::f64::consts::PI / config.wavelength;
    if kz.abs() > 0.1 * k0 {
        warn!("transverse wavenumber {kz:e} is not small against k0 = {k0:e}");
    }
    SPEED_OF_LIGHT * k0 + SPEED_OF_LIGHT * kz * kz / (2.0 * k0)
}
