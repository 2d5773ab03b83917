use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{SincConvention, TwoPhotonModel};
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess for the i-th largest root
            let mut x = ((4 * i + 3) as f64 * PI / (4 * n + 2) as f64).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let dp = legendre(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum();
        sum * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Order-doubling Gauss–Legendre settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub start_order: usize,
    /// Relative change between successive orders that counts as converged.
    pub tolerance: f64,
    pub max_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            start_order: 16,
            tolerance: 1e-10,
            max_order: 1024,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::validation(
                "quadrature.tolerance",
                "must be positive",
            ));
        }
        if self.start_order < 2 || self.max_order < self.start_order {
            return Err(Error::validation(
                "quadrature.order",
                "need 2 <= start_order <= max_order",
            ));
        }
        Ok(())
    }
}

/// The exact integrand over the slit coordinate, without the amplitude prefactor:
/// exp[−π(z1−x)²/(iλL1)] · exp[−(z2 − x r)²/α] · exp[−4x²/(Γ+γ)].
pub fn slit_integrand(model: &TwoPhotonModel, z1: f64, z2: f64, x: f64) -> Complex64 {
    let cfg = model.config();
    let p = model.params();
    let lambda_l1 = cfg.wavelength * cfg.l1;
    let d1 = z1 - x;
    let kernel = Complex64::new(0.0, PI * d1 * d1 / lambda_l1);
    let shifted = z2 - x * p.coupling;
    let sum = p.big_gamma + p.small_gamma;
    (kernel - shifted * shifted / p.alpha - 4.0 * x * x / sum).exp()
}

/// Post-slit amplitude from direct quadrature of the slit integral.
pub fn slit_integral(
    model: &TwoPhotonModel,
    z1: f64,
    z2: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    spec.validate()?;
    let half = 0.5 * model.config().slit_width;
    let f = |x: f64| slit_integrand(model, z1, z2, x);
    let mut order = spec.start_order;
    let mut previous = GaussLegendre::new(order).integrate(-half, half, f);
    while order < spec.max_order {
        order = (2 * order).min(spec.max_order);
        let current = GaussLegendre::new(order).integrate(-half, half, f);
        if (current - previous).norm() <= spec.tolerance * current.norm() {
            return Ok(model.params().c_r * current);
        }
        if order == spec.max_order {
            return Err(Error::NonConvergence {
                order,
                last: model.params().c_r * current,
                previous: model.params().c_r * previous,
            });
        }
        previous = current;
    }
    Err(Error::NonConvergence {
        order,
        last: model.params().c_r * previous,
        previous: model.params().c_r * previous,
    })
}

/// Which sinc-argument convention the quadrature supports away from z1 = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub points: Vec<(f64, f64)>,
    /// Max relative |quadrature − closed form| for each convention.
    pub as_published_err: f64,
    pub linearized_err: f64,
    pub supported: SincConvention,
}

pub fn adjudicate_sinc_convention(
    model: &TwoPhotonModel,
    points: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<ConventionReport> {
    let mut published = 0.0f64;
    let mut linearized = 0.0f64;
    for &(z1, z2) in points {
        let exact = slit_integral(model, z1, z2, spec)?;
        let a = model.final_amplitude_with(z1, z2, SincConvention::AsPublished);
        let b = model.final_amplitude_with(z1, z2, SincConvention::Linearized);
        published = published.max((a - exact).norm() / exact.norm());
        linearized = linearized.max((b - exact).norm() / exact.norm());
    }
    Ok(ConventionReport {
        points: points.to_vec(),
        as_published_err: published,
        linearized_err: linearized,
        supported: if linearized < published {
            SincConvention::Linearized
        } else {
            SincConvention::AsPublished
        },
    })
}
