//! Complex propagation constants derived from a [`PhysicalConfig`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PhysicalConfig;
use crate::error::Result;

/// Relative |Γ−γ|/|Γ+γ| above which the pair counts as entangled.
pub const ENTANGLEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Wavenumber 2π/λ (1/m).
    pub k0: f64,
    /// Ghost distance 2 L2 + L1 (m).
    pub ghost_distance: f64,
    /// Γ = 4Ω² + i 2λL2/π (m²).
    pub big_gamma: Complex64,
    /// γ = 1/σ² + i 2λL2/π (m²).
    pub small_gamma: Complex64,
    /// (Γ−γ)/(Γ+γ), dimensionless.
    pub coupling: Complex64,
    /// α = Γγ/(Γ+γ) + iλL1/π (m²).
    pub alpha: Complex64,
    /// β = (Γ−γ)/((Γ+γ) α) (1/m²).
    pub beta: Complex64,
    /// Prefactor of the two-photon state at the slit (1/m).
    pub c_slit: Complex64,
    /// Prefactor of the post-slit amplitude.
    pub c_r: Complex64,
    pub is_entangled: bool,
}

/// Computes Γ, γ, α, β and the amplitude prefactors.
///
/// Γ − γ is formed as (2Ωσ−1)(2Ωσ+1)/σ² so that it is exactly zero whenever
/// 2Ωσ rounds to 1, which keeps β exactly zero in the product-state case.
pub fn derive_params(config: &PhysicalConfig) -> Result<DerivedParams> {
    config.validate()?;
    let PhysicalConfig {
        wavelength: lambda,
        sigma,
        omega,
        l1,
        l2,
        ..
    } = *config;

    let spread = 2.0 * lambda * l2 / PI;
    let product = 2.0 * omega * sigma;
    let diff_re = (product - 1.0) * (product + 1.0) / (sigma * sigma);
    let big_re = 4.0 * omega * omega;

    let big_gamma = Complex64::new(big_re, spread);
    let small_gamma = if diff_re == 0.0 {
        big_gamma
    } else {
        Complex64::new(1.0 / (sigma * sigma), spread)
    };
    let diff = Complex64::new(diff_re, 0.0);
    let sum = big_gamma + small_gamma;
    let coupling = diff / sum;

    let post = Complex64::new(0.0, lambda * l1 / PI);
    let alpha = big_gamma * small_gamma / sum + post;
    let beta = coupling / alpha;

    let quartic = (omega * omega + (lambda * l2 / (2.0 * PI * omega)).powi(2))
        * (1.0 / (sigma * sigma) + (2.0 * sigma * lambda * l2 / PI).powi(2));
    let c_slit = Complex64::new((2.0 / PI).sqrt() * quartic.powf(-0.25), 0.0);

    let i_lambda_l1 = Complex64::new(0.0, lambda * l1);
    let inner = sum / (PI * big_gamma * small_gamma) + i_lambda_l1.inv();
    let c_r = c_slit / i_lambda_l1 * inner.sqrt().inv();

    Ok(DerivedParams {
        k0: 2.0 * PI / lambda,
        ghost_distance: config.ghost_distance(),
        big_gamma,
        small_gamma,
        coupling,
        alpha,
        beta,
        c_slit,
        c_r,
        is_entangled: coupling.norm() > ENTANGLEMENT_TOLERANCE,
    })
}

/// Position and wave-vector uncertainties (Δz, Δk) of either photon.
pub fn uncertainties(config: &PhysicalConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let (s, o) = (config.sigma, config.omega);
    let dz = (o * o + 1.0 / (4.0 * s * s)).sqrt();
    let dk = 0.5 * (s * s + 1.0 / (4.0 * o * o)).sqrt();
    Ok((dz, dk))
}
