//! Observables extracted from sampled profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{DensityProfile, Normalization};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormalizeMode {
    UnitArea,
    PeakScaled(f64),
}

pub fn normalize(profile: &DensityProfile, mode: NormalizeMode) -> Result<DensityProfile> {
    if !profile.values.iter().any(|&v| v > 0.0) {
        return Err(Error::EmptyProfile);
    }
    let (divisor, tag) = match mode {
        NormalizeMode::UnitArea => (profile.trapezoid(), Normalization::UnitArea),
        NormalizeMode::PeakScaled(scale) => (
            profile.max_value() / scale,
            Normalization::PeakScaled(scale),
        ),
    };
    let values = profile.values.iter().map(|v| v / divisor).collect();
    Ok(DensityProfile {
        positions: profile.positions.clone(),
        values,
        normalization: tag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub position: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Index of the sample the extremum was bracketed around.
    pub index: usize,
}

/// Interior local extrema by three-point comparison, refined with a parabola
/// through the bracketing triple. Returned in position order.
pub fn find_extrema(profile: &DensityProfile) -> Vec<Extremum> {
    let (x, y) = (&profile.positions, &profile.values);
    if x.len() < 5 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 1..x.len() - 1 {
        let kind = if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            ExtremumKind::Maximum
        } else if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        let (position, value) =
            parabolic_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
        out.push(Extremum {
            position,
            value,
            kind,
            index: i,
        });
    }
    out
}

fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (d0, d1) = (x[1] - x[0], x[2] - x[1]);
    let s0 = (y[1] - y[0]) / d0;
    let s1 = (y[2] - y[1]) / d1;
    let curvature = (s1 - s0) / (x[2] - x[0]);
    if curvature == 0.0 || !curvature.is_finite() {
        return (x[1], y[1]);
    }
    // y = y1 + b (x - x1) + c (x - x1)², with b the centred slope
    let b = s0 + curvature * d0;
    let offset = (-b / (2.0 * curvature)).clamp(-d0, d1);
    let value = y[1] + b * offset + curvature * offset * offset;
    ((x[1] + offset).clamp(x[0], x[2]), value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeMetrics {
    pub central_max_position: f64,
    pub first_min_positions: (f64, f64),
    pub first_secondary_max_positions: Option<(f64, f64)>,
    /// Mean distance from the central maximum to the two first minima.
    pub measured_width_min: f64,
    /// Mean distance from the central maximum to the two first side maxima.
    pub measured_width_max: Option<f64>,
    pub peak_value: f64,
    pub secondary_to_central_ratio: Option<f64>,
}

pub fn measure_fringe(profile: &DensityProfile) -> Result<FringeMetrics> {
    let extrema = find_extrema(profile);
    let central = extrema
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == ExtremumKind::Maximum)
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(i, e)| (i, *e))
        .ok_or_else(|| Error::PatternNotResolved("no interior maximum".into()))?;
    let (ci, cmax) = central;

    let left = extrema[..ci].iter().rev();
    let right = extrema[ci + 1..].iter();
    let (lmin, lmax) = side_extrema(left);
    let (rmin, rmax) = side_extrema(right);
    let (lmin, rmin) = match (lmin, rmin) {
        (Some(l), Some(r)) => (l, r),
        _ => {
            return Err(Error::PatternNotResolved(
                "no minimum on both sides of the central maximum".into(),
            ))
        }
    };
    let c = cmax.position;
    let width_min = 0.5 * ((c - lmin.position) + (rmin.position - c));
    let secondary = match (lmax, rmax) {
        (Some(l), Some(r)) => Some((l, r)),
        _ => None,
    };
    Ok(FringeMetrics {
        central_max_position: c,
        first_min_positions: (lmin.position, rmin.position),
        first_secondary_max_positions: secondary.map(|(l, r)| (l.position, r.position)),
        measured_width_min: width_min,
        measured_width_max: secondary.map(|(l, r)| 0.5 * ((c - l.position) + (r.position - c))),
        peak_value: cmax.value,
        secondary_to_central_ratio: secondary
            .map(|(l, r)| (0.5 * (l.value + r.value) / cmax.value).clamp(0.0, 1.0)),
    })
}

/// First minimum walking away from the centre, then the first maximum beyond it.
fn side_extrema<'a>(
    mut walk: impl Iterator<Item = &'a Extremum>,
) -> (Option<Extremum>, Option<Extremum>) {
    let min = walk.find(|e| e.kind == ExtremumKind::Minimum).copied();
    let max = min.and_then(|_| walk.find(|e| e.kind == ExtremumKind::Maximum).copied());
    (min, max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub l_inf_rel: f64,
    pub l2_rel: f64,
    /// Whether `b` had to be resampled onto the axis of `a`.
    pub resampled: bool,
}

/// Relative L∞ and L2 distance between unit-area normalized profiles.
///
/// Both norms are taken relative to the larger of the two profiles, which
/// keeps the metric symmetric. Profiles on different axes are compared on the
/// overlap of their ranges, with `b` linearly interpolated onto `a`'s points.
pub fn compare(a: &DensityProfile, b: &DensityProfile) -> Result<Comparison> {
    let same_axis = a.positions == b.positions;
    let (a, b) = if same_axis {
        (a.clone(), b.clone())
    } else {
        let (lo, hi) = (
            a.positions[0].max(b.positions[0]),
            a.positions[a.len() - 1].min(b.positions[b.len() - 1]),
        );
        let keep: Vec<usize> = (0..a.len())
            .filter(|&i| a.positions[i] >= lo && a.positions[i] <= hi)
            .collect();
        if keep.len() < 2 {
            return Err(Error::DisjointSupport);
        }
        let positions: Vec<f64> = keep.iter().map(|&i| a.positions[i]).collect();
        let av = keep.iter().map(|&i| a.values[i]).collect();
        let bv = positions
            .iter()
            .map(|&z| b.interpolate(z).unwrap_or(0.0))
            .collect();
        (
            DensityProfile::new(positions.clone(), av)?,
            DensityProfile::new(positions, bv)?,
        )
    };
    let a = normalize(&a, NormalizeMode::UnitArea)?;
    let b = normalize(&b, NormalizeMode::UnitArea)?;

    let scale_inf = a.max_value().max(b.max_value());
    let l_inf = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let l2_norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    let scale_2 = l2_norm(&a.values).max(l2_norm(&b.values));
    Ok(Comparison {
        l_inf_rel: l_inf / scale_inf,
        l2_rel: l2_norm(&diff) / scale_2,
        resampled: !same_axis,
    })
}

/// Number of interior local maxima.
pub fn count_maxima(profile: &DensityProfile) -> usize {
    find_extrema(profile)
        .iter()
        .filter(|e| e.kind == ExtremumKind::Maximum)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScanSpec;
    use proptest::prelude::*;

    fn sinc2(w: f64) -> impl Fn(f64) -> f64 {
        move |z: f64| {
            let x = std::f64::consts::PI * z / w;
            if x == 0.0 {
                1.0
            } else {
                (x.sin() / x).powi(2)
            }
        }
    }

    /// Root of tan x = x in (π, 3π/2), by bisection.
    fn first_tan_root() -> f64 {
        let (mut lo, mut hi) = (
            std::f64::consts::PI + 1e-9,
            1.5 * std::f64::consts::PI - 1e-9,
        );
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.tan() - mid > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn sinc_squared_extrema() {
        let w = 3.16e-3;
        let scan = ScanSpec::symmetric(3.0 * w, 401).unwrap();
        let p = DensityProfile::sample(&scan, sinc2(w)).unwrap();
        let secondary = first_tan_root() / std::f64::consts::PI;
        assert!((secondary - 1.4303).abs() < 1e-4);
        let maxima: Vec<f64> = find_extrema(&p)
            .iter()
            .filter(|e| e.kind == ExtremumKind::Maximum)
            .map(|e| e.position / w)
            .collect();
        assert_eq!(maxima.len(), 5);
        assert!(maxima[2].abs() < 1e-6);
        assert!((maxima[3] - secondary).abs() < 0.005 * secondary);
        assert!((maxima[1] + secondary).abs() < 0.005 * secondary);

        let m = measure_fringe(&p).unwrap();
        assert!((m.measured_width_min / w - 1.0).abs() < 1e-3);
        assert!((m.measured_width_max.unwrap() / w - secondary).abs() < 0.005 * secondary);
        let ratio = m.secondary_to_central_ratio.unwrap();
        assert!((ratio - 0.0472).abs() < 1e-3);
    }

    #[test]
    fn monotone_profile_has_no_extrema() {
        let scan = ScanSpec::new(0.0, 1.0, 50).unwrap();
        let p = DensityProfile::sample(&scan, |z| z * z + 1.0).unwrap();
        assert!(find_extrema(&p).is_empty());
        assert!(matches!(
            measure_fringe(&p),
            Err(Error::PatternNotResolved(_))
        ));
    }

    #[test]
    fn gaussian_is_not_a_fringe_pattern() {
        let scan = ScanSpec::symmetric(5.0, 101).unwrap();
        let p = DensityProfile::sample(&scan, |z| (-z * z).exp()).unwrap();
        assert!(matches!(
            measure_fringe(&p),
            Err(Error::PatternNotResolved(_))
        ));
    }

    #[test]
    fn normalize_modes() {
        let scan = ScanSpec::symmetric(4.0, 201).unwrap();
        let p = DensityProfile::sample(&scan, |z| 3.0 * (-z * z).exp()).unwrap();
        let u = normalize(&p, NormalizeMode::UnitArea).unwrap();
        assert!((u.trapezoid() - 1.0).abs() < 1e-12);
        let s = normalize(&p, NormalizeMode::PeakScaled(500.0)).unwrap();
        assert_eq!(s.max_value(), 500.0);
        let uu = normalize(&u, NormalizeMode::UnitArea).unwrap();
        let ss = normalize(&s, NormalizeMode::PeakScaled(500.0)).unwrap();
        for (a, b) in u.values.iter().zip(&uu.values) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300) + 1e-300);
        }
        assert_eq!(ss.values, s.values);

        let zero = DensityProfile::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            normalize(&zero, NormalizeMode::UnitArea),
            Err(Error::EmptyProfile)
        ));
    }

    #[test]
    fn compare_basics() {
        let scan = ScanSpec::symmetric(4.0, 201).unwrap();
        let p = DensityProfile::sample(&scan, |z| (-z * z).exp()).unwrap();
        let c = compare(&p, &p).unwrap();
        assert_eq!((c.l_inf_rel, c.l2_rel), (0.0, 0.0));
        let scaled = DensityProfile::sample(&scan, |z| 7.5 * (-z * z).exp()).unwrap();
        let c = compare(&p, &scaled).unwrap();
        assert!(c.l_inf_rel < 1e-14 && c.l2_rel < 1e-14);

        let other = ScanSpec::new(10.0, 20.0, 11).unwrap();
        let far = DensityProfile::sample(&other, |_| 1.0).unwrap();
        assert!(matches!(compare(&p, &far), Err(Error::DisjointSupport)));

        let fine = ScanSpec::symmetric(3.0, 601).unwrap();
        let q = DensityProfile::sample(&fine, |z| (-z * z).exp()).unwrap();
        let c = compare(&p, &q).unwrap();
        assert!(c.resampled);
        assert!(c.l_inf_rel < 1e-3);
    }

    proptest! {
        #[test]
        fn parabolic_refinement_stays_in_bracket(
            y0 in 0.0..1.0f64, y1 in 0.0..1.0f64, y2 in 0.0..1.0f64,
            x0 in -1.0..0.0f64, d0 in 0.01..1.0f64, d1 in 0.01..1.0f64,
        ) {
            let x = [x0, x0 + d0, x0 + d0 + d1];
            let (pos, _) = parabolic_vertex(x, [y0, y1, y2]);
            prop_assert!(pos >= x[0] && pos <= x[2]);
        }

        #[test]
        fn measure_fringe_shift_equivariance(delta in -2e-3..2e-3f64) {
            let w = 1e-3;
            let scan = ScanSpec::symmetric(3.0 * w, 301).unwrap();
            let base = DensityProfile::sample(&scan, sinc2(w)).unwrap();
            let shifted = DensityProfile {
                positions: base.positions.iter().map(|z| z + delta).collect(),
                ..base.clone()
            };
            let a = measure_fringe(&base).unwrap();
            let b = measure_fringe(&shifted).unwrap();
            let tol = 1e-12;
            prop_assert!((b.central_max_position - a.central_max_position - delta).abs() < tol);
            prop_assert!((b.first_min_positions.0 - a.first_min_positions.0 - delta).abs() < tol);
            prop_assert!((b.first_min_positions.1 - a.first_min_positions.1 - delta).abs() < tol);
            prop_assert!((b.measured_width_min - a.measured_width_min).abs() < tol);
        }

        #[test]
        fn compare_is_symmetric(c in 0.1..3.0f64, s in 0.5..2.0f64) {
            let scan = ScanSpec::symmetric(4.0, 201).unwrap();
            let a = DensityProfile::sample(&scan, |z| (-z * z).exp()).unwrap();
            let b = DensityProfile::sample(&scan, |z| s * (-(z - 0.3) * (z - 0.3) * c).exp()).unwrap();
            let ab = compare(&a, &b).unwrap();
            let ba = compare(&b, &a).unwrap();
            prop_assert!((ab.l_inf_rel - ba.l_inf_rel).abs() < 1e-12);
            prop_assert!((ab.l2_rel - ba.l2_rel).abs() < 1e-12);
        }
    }
}
