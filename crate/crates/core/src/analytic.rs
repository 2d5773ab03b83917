//! Closed-form amplitudes and densities of the two-photon slit problem.
//!
//! Every function here evaluates a formula directly in complex arithmetic.
//! Brute-force cross-checks live in [`crate::oracle`].

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::config::{PhysicalConfig, ScanSpec};
use crate::error::Result;
use crate::params::{derive_params, DerivedParams};
use crate::profile::{trapezoid, DensityProfile};

/// Below this |ε u / 2| the sinc factor is replaced by its Taylor series.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-8;
/// Below this |z2| (m) the ghost profile is evaluated by its limit.
pub const GHOST_SERIES_THRESHOLD: f64 = 1e-9;
/// Integrand fraction at the scan edges above which a marginal is flagged.
pub const MARGINAL_EDGE_FRACTION: f64 = 1e-6;

/// Which z1 scale enters the sinc argument of the post-slit amplitude.
///
/// `AsPublished` uses π z1 / (2 λ L1), the form that is usually quoted.
/// `Linearized` uses π z1 / (λ L1), which is what a direct linearization of
/// the slit integral produces. Both coincide at z1 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum SincConvention {
    #[default]
    AsPublished,
    Linearized,
}

impl SincConvention {
    fn z1_scale(self, wavelength: f64, l1: f64) -> f64 {
        match self {
            SincConvention::AsPublished => PI / (2.0 * wavelength * l1),
            SincConvention::Linearized => PI / (wavelength * l1),
        }
    }
}

/// A single marginal value together with its span diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub value: f64,
    /// Largest integrand value at the two scan endpoints, relative to the
    /// integrand maximum.
    pub edge_fraction: f64,
}

impl Marginal {
    pub fn span_ok(&self) -> bool {
        self.edge_fraction <= MARGINAL_EDGE_FRACTION
    }
}

/// A validated configuration together with its derived constants.
#[derive(Debug, Clone)]
pub struct TwoPhotonModel {
    config: PhysicalConfig,
    params: DerivedParams,
}

impl TwoPhotonModel {
    pub fn new(config: PhysicalConfig) -> Result<Self> {
        let params = derive_params(&config)?;
        Ok(TwoPhotonModel { config, params })
    }

    pub fn config(&self) -> &PhysicalConfig {
        &self.config
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    /// Source state: √(2σ/πΩ) e^{−(z1−z2)²σ²} e^{−(z1+z2)²/4Ω²}.
    pub fn initial_state(&self, z1: f64, z2: f64) -> Complex64 {
        let PhysicalConfig { sigma, omega, .. } = self.config;
        let d = z1 - z2;
        let s = z1 + z2;
        let amp = (2.0 * sigma / (PI * omega)).sqrt()
            * (-(d * d) * sigma * sigma).exp()
            * (-(s * s) / (4.0 * omega * omega)).exp();
        Complex64::new(amp, 0.0)
    }

    /// Two-photon state after both photons travelled L2, just before the slit.
    pub fn state_at_slit(&self, z1: f64, z2: f64) -> Complex64 {
        let p = &self.params;
        let s = z1 + z2;
        let d = z1 - z2;
        p.c_slit * (-(s * s) / p.big_gamma - (d * d) / p.small_gamma).exp()
    }

    /// Post-slit amplitude in the narrow-slit approximation.
    pub fn final_amplitude(&self, z1: f64, z2: f64) -> Complex64 {
        self.final_amplitude_with(z1, z2, SincConvention::AsPublished)
    }

    pub fn final_amplitude_with(&self, z1: f64, z2: f64, convention: SincConvention) -> Complex64 {
        let PhysicalConfig { wavelength, l1, .. } = self.config;
        let p = &self.params;
        let phase = Complex64::new(0.0, PI * z1 * z1 / (wavelength * l1)) - z2 * z2 / p.alpha;
        p.c_r * phase.exp() * self.sinc_factor(z1, z2, convention)
    }

    /// sin(ε u)/u with u = s z1 − i z2 β.
    fn sinc_factor(&self, z1: f64, z2: f64, convention: SincConvention) -> Complex64 {
        let eps = self.config.slit_width;
        let scale = convention.z1_scale(self.config.wavelength, self.config.l1);
        let u = Complex64::new(scale * z1, 0.0) - Complex64::i() * z2 * self.params.beta;
        let x = u * eps;
        if 0.5 * x.norm() < SINC_SERIES_THRESHOLD {
            eps * (1.0 - x * x / 6.0)
        } else {
            x.sin() / u
        }
    }

    /// Joint detection density |ψ(z1, z2)|², expanded factor by factor.
    pub fn joint_density(&self, z1: f64, z2: f64) -> f64 {
        self.joint_density_with(z1, z2, SincConvention::AsPublished)
    }

    pub fn joint_density_with(&self, z1: f64, z2: f64, convention: SincConvention) -> f64 {
        let p = &self.params;
        let envelope = (-2.0 * z2 * z2 * p.alpha.inv().re).exp();
        p.c_r.norm_sqr() * envelope * self.sinc_factor(z1, z2, convention).norm_sqr()
    }

    /// The Gaussian-times-prefactor envelope A(z2) of the approximate ghost profile.
    pub fn ghost_envelope(&self, z2: f64) -> f64 {
        let PhysicalConfig {
            wavelength: lambda,
            sigma,
            omega,
            l1,
            l2,
            ..
        } = self.config;
        let d = self.params.ghost_distance;
        let g = PI * z2 / (sigma * lambda * d);
        (omega * omega + (lambda * l2 / (2.0 * PI * omega)).powi(2))
            .sqrt()
            .recip()
            * (d / (2.0 * PI * PI * sigma * l1))
            * (-2.0 * g * g).exp()
    }

    /// Approximate ghost profile (coincidences with D1 held at z1 = 0),
    /// valid for Ω ≫ 1/σ and 2λL2/π ≫ 1/σ².
    pub fn ghost_profile(&self, z2: f64) -> f64 {
        let (a, b) = self.ghost_rates();
        let env = self.ghost_envelope(z2);
        if z2.abs() < GHOST_SERIES_THRESHOLD {
            return env * (a * a + b * b);
        }
        let (x, y) = (a * z2, b * z2);
        let (sx, cx) = x.sin_cos();
        env * (sx * sx * y.cosh().powi(2) + cx * cx * y.sinh().powi(2)) / (z2 * z2)
    }

    /// Phase rate πε/λD and damping rate ε(π/σλD)² of the ghost profile (1/m).
    pub fn ghost_rates(&self) -> (f64, f64) {
        let PhysicalConfig {
            wavelength: lambda,
            slit_width: eps,
            sigma,
            ..
        } = self.config;
        let d = self.params.ghost_distance;
        let a = PI * eps / (lambda * d);
        let b = eps * (PI / (sigma * lambda * d)).powi(2);
        (a, b)
    }

    pub fn ghost_scan(&self, scan: &ScanSpec) -> Result<DensityProfile> {
        if !self.config.regime().approximation {
            warn!("configuration is outside the regime 2λL2/π ≫ 1/σ² assumed by the ghost profile");
        }
        DensityProfile::sample(scan, |z2| self.ghost_profile(z2))
    }

    /// z2 scan of the joint density with D1 fixed at `z0`.
    pub fn conditional_profile(&self, z0: f64, scan: &ScanSpec) -> Result<DensityProfile> {
        DensityProfile::sample(scan, |z2| self.joint_density(z0, z2))
    }

    /// Photon 1 singles density at `z1`: the joint density integrated over z2.
    pub fn marginal_z2(&self, z1: f64, scan_z2: &ScanSpec) -> Result<Marginal> {
        scan_z2.validate()?;
        let m = integrate_scan(scan_z2, |z2| self.joint_density(z1, z2));
        if !m.span_ok() {
            warn!(
                "z2 span too narrow at z1 = {z1:e}: edge fraction {:e}",
                m.edge_fraction
            );
        }
        Ok(m)
    }

    /// Photon 2 singles density at `z2`: the joint density integrated over z1.
    pub fn marginal_z1(&self, z2: f64, scan_z1: &ScanSpec) -> Result<Marginal> {
        scan_z1.validate()?;
        let m = integrate_scan(scan_z1, |z1| self.joint_density(z1, z2));
        if !m.span_ok() {
            warn!(
                "z1 span too narrow at z2 = {z2:e}: edge fraction {:e}",
                m.edge_fraction
            );
        }
        Ok(m)
    }

    /// Singles profile of photon 1 over `scan_z1`, integrating z2 over `scan_z2`.
    pub fn singles_z1(&self, scan_z1: &ScanSpec, scan_z2: &ScanSpec) -> Result<DensityProfile> {
        let values = scan_z1
            .points()
            .map(|z1| self.marginal_z2(z1, scan_z2).map(|m| m.value))
            .collect::<Result<Vec<_>>>()?;
        DensityProfile::new(scan_z1.points().collect(), values)
    }

    /// Singles profile of photon 2 over `scan_z2`, integrating z1 over `scan_z1`.
    pub fn singles_z2(&self, scan_z2: &ScanSpec, scan_z1: &ScanSpec) -> Result<DensityProfile> {
        let values = scan_z2
            .points()
            .map(|z2| self.marginal_z1(z2, scan_z1).map(|m| m.value))
            .collect::<Result<Vec<_>>>()?;
        DensityProfile::new(scan_z2.points().collect(), values)
    }

    /// Ghost fringe scale λD/ε.
    pub fn fringe_width(&self) -> f64 {
        fringe_width(&self.config)
    }
}

pub fn fringe_width(config: &PhysicalConfig) -> f64 {
    config.wavelength * config.ghost_distance() / config.slit_width
}

fn integrate_scan(scan: &ScanSpec, f: impl Fn(f64) -> f64) -> Marginal {
    let xs: Vec<f64> = scan.points().collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let peak = ys.iter().copied().fold(0.0, f64::max);
    let edge = ys[0].max(ys[ys.len() - 1]);
    Marginal {
        value: trapezoid(&xs, &ys),
        edge_fraction: if peak > 0.0 { edge / peak } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn omega2mm() -> PhysicalConfig {
        PhysicalConfig {
            omega: 2.0e-3,
            ..PhysicalConfig::reference()
        }
    }

    fn model() -> TwoPhotonModel {
        TwoPhotonModel::new(PhysicalConfig::reference()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn trapz_2d(half: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        let scan = ScanSpec::symmetric(half, n).unwrap();
        let h = scan.step();
        let mut total = 0.0;
        for (i, z1) in scan.points().enumerate() {
            let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            for (j, z2) in scan.points().enumerate() {
                let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                total += wi * wj * f(z1, z2);
            }
        }
        total * h * h
    }

    #[test]
    fn initial_state_prefactor() {
        let m = TwoPhotonModel::new(omega2mm()).unwrap();
        let v = m.initial_state(0.0, 0.0);
        assert!(rel(v.re, 1.2616e3) < 1e-4);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn initial_state_is_normalized() {
        let m = TwoPhotonModel::new(omega2mm()).unwrap();
        let cfg = m.config();
        let half = 6.0 * cfg.omega.max(1.0 / cfg.sigma);
        let norm = trapz_2d(half, 1601, |a, b| m.initial_state(a, b).norm_sqr());
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
    }

    #[test]
    fn state_at_slit_is_normalized() {
        let m = TwoPhotonModel::new(omega2mm()).unwrap();
        let norm = trapz_2d(14e-3, 1601, |a, b| m.state_at_slit(a, b).norm_sqr());
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
    }

    #[test]
    fn state_at_slit_reduces_to_source_state() {
        let cfg = PhysicalConfig {
            l2: 1e-15,
            ..omega2mm()
        };
        let m = TwoPhotonModel::new(cfg).unwrap();
        for &(a, b) in &[
            (0.0, 0.0),
            (1e-3, 0.8e-3),
            (-2e-3, -2.1e-3),
            (0.5e-3, -0.4e-3),
        ] {
            let want = m.initial_state(a, b);
            let got = m.state_at_slit(a, b);
            assert!(
                (got - want).norm() <= 1e-10 * want.norm(),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn state_at_slit_origin_is_prefactor() {
        let m = model();
        assert!(rel(m.state_at_slit(0.0, 0.0).norm(), m.params().c_slit.norm()) < 1e-15);
    }

    #[test]
    fn final_amplitude_at_origin() {
        let m = model();
        let want = m.params().c_r * m.config().slit_width;
        let got = m.final_amplitude(0.0, 0.0);
        assert!((got - want).norm() <= 1e-15 * want.norm());
    }

    #[test]
    fn sinc_series_is_continuous() {
        let m = model();
        let below = m.final_amplitude(0.0, 1e-12);
        let above = m.final_amplitude(0.0, 1e-9);
        assert!((below - above).norm() / above.norm() < 1e-9);
    }

    #[test]
    fn product_state_factorizes() {
        let m = TwoPhotonModel::new(PhysicalConfig::reference().disentangled()).unwrap();
        let pts = [
            (0.3e-3, -1.1e-3),
            (2.5e-3, 0.7e-3),
            (-4e-3, 2e-3),
            (1e-3, 1e-3),
        ];
        for &(a, b) in &pts {
            for &(c, d) in &pts {
                let lhs = m.joint_density(a, b) * m.joint_density(c, d);
                let rhs = m.joint_density(a, d) * m.joint_density(c, b);
                assert!(rel(lhs, rhs) < 1e-9);
            }
        }
        // and the z1 part is exactly the published sinc²
        let cfg = m.config();
        let scale = PI / (2.0 * cfg.wavelength * cfg.l1);
        let z1 = 0.7e-3;
        let sinc2 = ((cfg.slit_width * scale * z1).sin() / (scale * z1)).powi(2);
        let want =
            m.params().c_r.norm_sqr() * (-2.0 * 1e-6 * m.params().alpha.inv().re).exp() * sinc2;
        assert!(rel(m.joint_density(z1, 1e-3), want) < 1e-12);
    }

    #[test]
    fn density_nonnegative_on_grid() {
        let m = model();
        let scan = ScanSpec::symmetric(10e-3, 201).unwrap();
        for a in scan.points() {
            for b in scan.points() {
                assert!(m.joint_density(a, b) >= 0.0);
            }
        }
    }

    #[test]
    fn prefactor_branch_is_irrelevant() {
        let m = model();
        let mut flipped = m.clone();
        flipped.params.c_r = -flipped.params.c_r;
        for &(a, b) in &[(0.0, 1e-3), (1e-3, -2e-3), (3e-3, 3e-3)] {
            assert_eq!(m.joint_density(a, b), flipped.joint_density(a, b));
        }
    }

    #[test]
    fn ghost_profile_at_first_zero() {
        let m = model();
        let w = m.fringe_width();
        assert!(rel(w, 3.1599e-3) < 1e-4);
        let (a, b) = m.ghost_rates();
        assert!(rel(b * w, 0.3123) < 1e-3);
        let cx = (a * w).cos();
        let want = m.ghost_envelope(w) * cx * cx * (b * w).sinh().powi(2) / (w * w);
        assert!(rel(m.ghost_profile(w), want) < 1e-9);
        assert!(rel(m.ghost_profile(-w), want) < 1e-9);
    }

    #[test]
    fn ghost_profile_sharp_momentum_limit() {
        let cfg = PhysicalConfig {
            sigma: 1e12,
            ..PhysicalConfig::reference()
        };
        let m = TwoPhotonModel::new(cfg).unwrap();
        let (a, _) = m.ghost_rates();
        for z in [0.5e-3, 1.7e-3, 4e-3] {
            let want = m.ghost_envelope(z) * (a * z).sin().powi(2) / (z * z);
            assert!(rel(m.ghost_profile(z), want) < 1e-9);
        }
    }

    #[test]
    fn ghost_profile_series_matches_neighbourhood() {
        let m = model();
        let at0 = m.ghost_profile(0.0);
        let near = m.ghost_profile(1e-7);
        assert!(rel(near, at0) < 1e-6);
    }

    #[test]
    fn fringe_width_scaling() {
        let cfg = PhysicalConfig::reference();
        let w = fringe_width(&cfg);
        let wide = PhysicalConfig {
            slit_width: 2.0 * cfg.slit_width,
            ..cfg
        };
        assert!(rel(fringe_width(&wide), 0.5 * w) < 1e-15);
        let far = PhysicalConfig {
            l1: 2.0 * cfg.l1,
            ..cfg
        };
        let factor = (2.0 * cfg.l2 + 2.0 * cfg.l1) / (2.0 * cfg.l2 + cfg.l1);
        assert!(rel(fringe_width(&far), factor * w) < 1e-15);
    }

    #[test]
    fn conditional_profile_at_origin_is_joint_slice() {
        let m = model();
        let scan = ScanSpec::symmetric(10e-3, 101).unwrap();
        let p = m.conditional_profile(0.0, &scan).unwrap();
        for (z, v) in p.positions.iter().zip(&p.values) {
            assert_eq!(*v, m.joint_density(0.0, *z));
        }
    }

    #[test]
    fn conditional_profile_product_state_is_gaussian() {
        let m = TwoPhotonModel::new(PhysicalConfig::reference().disentangled()).unwrap();
        let scan = ScanSpec::symmetric(3e-3, 61).unwrap();
        let p0 = m.conditional_profile(0.0, &scan).unwrap();
        let p1 = m.conditional_profile(1.3e-3, &scan).unwrap();
        let ratio0 = p1.values[0] / p0.values[0];
        for (a, b) in p0.values.iter().zip(&p1.values) {
            assert!(rel(b / a, ratio0) < 1e-9);
        }
        // log density is exactly quadratic
        let c = -2.0 * m.params().alpha.inv().re;
        for (z, v) in p0.positions.iter().zip(&p0.values) {
            assert!(rel(*v, p0.values[30] * (c * z * z).exp()) < 1e-9);
        }
    }

    #[test]
    fn marginal_parity_and_span() {
        let m = model();
        let scan_z1 = ScanSpec::symmetric(0.3, 20001).unwrap();
        let a = m.marginal_z1(1.3e-3, &scan_z1).unwrap();
        let b = m.marginal_z1(-1.3e-3, &scan_z1).unwrap();
        assert!(rel(a.value, b.value) < 1e-12);

        let narrow = ScanSpec::symmetric(1e-3, 101).unwrap();
        assert!(!m.marginal_z2(0.0, &narrow).unwrap().span_ok());
        let wide = ScanSpec::symmetric(30e-3, 3001).unwrap();
        assert!(m.marginal_z2(0.0, &wide).unwrap().span_ok());
    }

    proptest! {
        #[test]
        fn joint_density_parity(a in -10e-3..10e-3f64, b in -10e-3..10e-3f64) {
            let m = model();
            let lhs = m.joint_density(a, b);
            let rhs = m.joint_density(-a, -b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn initial_state_symmetry(a in -5e-3..5e-3f64, b in -5e-3..5e-3f64) {
            let m = model();
            let v = m.initial_state(a, b);
            prop_assert_eq!(v, m.initial_state(b, a));
            prop_assert_eq!(v, m.initial_state(-a, -b));
            prop_assert!(v.re >= 0.0);
        }

        #[test]
        fn state_at_slit_modulus_symmetry(a in -5e-3..5e-3f64, b in -5e-3..5e-3f64) {
            let m = model();
            let v = m.state_at_slit(a, b).norm();
            prop_assert!((v - m.state_at_slit(-a, -b).norm()).abs() <= 1e-12 * v.max(1e-300));
            prop_assert!((v - m.state_at_slit(b, a).norm()).abs() <= 1e-12 * v.max(1e-300));
        }

        #[test]
        fn ghost_profile_below_trigonometric_bound(z in 1e-6..15e-3f64) {
            let m = model();
            let (_, b) = m.ghost_rates();
            let bound = m.ghost_envelope(z) * (b * z).cosh().powi(2) / (z * z);
            prop_assert!(m.ghost_profile(z) <= bound * (1.0 + 1e-12));
        }
    }
}
