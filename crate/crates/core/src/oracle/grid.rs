use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::analytic::{fringe_width, TwoPhotonModel};
use crate::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::profile::DensityProfile;

/// Uniform sample axis: positions `origin + i * spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub count: usize,
    pub spacing: f64,
    pub origin: f64,
}

impl Axis {
    /// Cell-centred axis symmetric about zero (no sample at the origin for even counts).
    pub fn centred(count: usize, spacing: f64) -> Self {
        Axis {
            count,
            spacing,
            origin: -0.5 * count as f64 * spacing + 0.5 * spacing,
        }
    }

    pub fn position(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.position(i))
    }

    /// Length of the periodic window.
    pub fn extent(&self) -> f64 {
        self.count as f64 * self.spacing
    }

    /// Index of the sample sitting at `z`, if any.
    pub fn index_of(&self, z: f64) -> Option<usize> {
        let t = (z - self.origin) / self.spacing;
        let i = t.round();
        ((t - i).abs() < 1e-6 && i >= 0.0 && (i as usize) < self.count).then_some(i as usize)
    }

    /// Transverse frequencies (1/m) in FFT order.
    fn frequencies(&self) -> Vec<f64> {
        let n = self.count as i64;
        let df = 1.0 / self.extent();
        (0..n)
            .map(|k| if k < (n + 1) / 2 { k } else { k - n } as f64 * df)
            .collect()
    }
}

/// Square cell-centred grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub spacing: f64,
}

impl GridSpec {
    /// Picks a spacing close to `2 half_extent / count` that puts an even
    /// number of cells across the slit, so the slit edges fall exactly on
    /// cell boundaries at this and every doubled resolution.
    pub fn aligned(config: &PhysicalConfig, count: usize, half_extent: f64) -> Self {
        let target = 2.0 * half_extent / count as f64;
        let cells = (2.0 * (config.slit_width / (2.0 * target)).round()).max(2.0);
        GridSpec {
            count,
            spacing: config.slit_width / cells,
        }
    }

    /// 2048 × 2048 over roughly ±25 mm.
    pub fn reference(config: &PhysicalConfig) -> Self {
        Self::aligned(config, 2048, 25e-3)
    }

    /// Twice the samples over the same window.
    pub fn refined(&self) -> Self {
        GridSpec {
            count: 2 * self.count,
            spacing: 0.5 * self.spacing,
        }
    }

    pub fn axis(&self) -> Axis {
        Axis::centred(self.count, self.spacing)
    }
}

/// Complex two-photon amplitude sampled on a z1 × z2 lattice, row-major with
/// z1 as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveGrid {
    pub z1: Axis,
    pub z2: Axis,
    pub amplitudes: Vec<Complex64>,
}

impl WaveGrid {
    pub fn from_fn(z1: Axis, z2: Axis, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); z1.count * z2.count];
        amplitudes
            .par_chunks_mut(z2.count)
            .enumerate()
            .for_each(|(i, row)| {
                let a = z1.position(i);
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(a, z2.position(j));
                }
            });
        WaveGrid { z1, z2, amplitudes }
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.amplitudes[i1 * self.z2.count + i2]
    }

    /// Discrete squared L2 norm Σ|ψ|² Δz1 Δz2.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .par_iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * self.z1.spacing
            * self.z2.spacing
    }

    pub fn density(&self) -> DensityGrid {
        DensityGrid {
            z1: self.z1,
            z2: self.z2,
            values: self.amplitudes.par_iter().map(|a| a.norm_sqr()).collect(),
        }
    }
}

/// Real-valued |ψ|² on the same lattice layout as [`WaveGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub z1: Axis,
    pub z2: Axis,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.z2.count + i2]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.z1.spacing * self.z2.spacing
    }

    /// z2 profile of the row sitting exactly at `z1`, restricted to |z2| ≤ `half_width`.
    pub fn slice_at_z1(&self, z1: f64, half_width: f64) -> Result<DensityProfile> {
        let i = self
            .z1
            .index_of(z1)
            .ok_or_else(|| Error::Sampling(format!("z1 = {z1:e} is not a grid row")))?;
        let row = &self.values[i * self.z2.count..(i + 1) * self.z2.count];
        let (pos, val): (Vec<f64>, Vec<f64>) = self
            .z2
            .positions()
            .zip(row.iter().copied())
            .filter(|(z, _)| z.abs() <= half_width)
            .unzip();
        DensityProfile::new(pos, val)
    }

    /// Photon 1 singles: sum over z2 for every z1 row.
    pub fn singles_z1(&self) -> Result<DensityProfile> {
        let values = self
            .values
            .chunks(self.z2.count)
            .map(|row| row.iter().sum::<f64>() * self.z2.spacing)
            .collect();
        DensityProfile::new(self.z1.positions().collect(), values)
    }

    /// Photon 2 singles: sum over z1 for every z2 column.
    pub fn singles_z2(&self) -> Result<DensityProfile> {
        let mut values = vec![0.0; self.z2.count];
        for row in self.values.chunks(self.z2.count) {
            for (acc, v) in values.iter_mut().zip(row) {
                *acc += v;
            }
        }
        values.iter_mut().for_each(|v| *v *= self.z1.spacing);
        DensityProfile::new(self.z2.positions().collect(), values)
    }
}

/// Samples the source state on a square grid.
pub fn sample_initial_state(model: &TwoPhotonModel, spec: &GridSpec) -> WaveGrid {
    let axis = spec.axis();
    WaveGrid::from_fn(axis, axis, |a, b| model.initial_state(a, b))
}

fn check_sampling(axis: &Axis, wavelength: f64, distance: f64) -> Result<()> {
    // The highest represented frequency walks λ d / 2Δz sideways; keeping that
    // within half the window keeps the chirp phase step between neighbouring
    // frequency bins below π.
    let required = wavelength * distance / axis.extent();
    if axis.spacing < required {
        return Err(Error::Sampling(format!(
            "spacing {:e} m is below λd/extent = {required:e} m",
            axis.spacing
        )));
    }
    Ok(())
}

fn transfer(axis: &Axis, wavelength: f64, distance: f64) -> Vec<Complex64> {
    axis.frequencies()
        .into_iter()
        .map(|f| Complex64::from_polar(1.0, -PI * wavelength * distance * f * f))
        .collect()
}

fn shift(axis: &Axis, delta: f64) -> Vec<Complex64> {
    axis.frequencies()
        .into_iter()
        .map(|f| Complex64::from_polar(1.0, 2.0 * PI * f * delta))
        .collect()
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }
}

/// Multiplies the spectrum of every contiguous row of length `mult.len()`.
fn filter_rows(data: &mut [Complex64], mult: &[Complex64]) {
    let n = mult.len();
    let plans = Plans::new(n);
    let scale = 1.0 / n as f64;
    let scratch_len = plans
        .forward
        .get_inplace_scratch_len()
        .max(plans.inverse.get_inplace_scratch_len());
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| {
            plans.forward.process_with_scratch(row, scratch);
            for (v, m) in row.iter_mut().zip(mult) {
                *v *= m * scale;
            }
            plans.inverse.process_with_scratch(row, scratch);
        },
    );
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    const TILE: usize = 32;
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    dst.par_chunks_mut(TILE * rows)
        .enumerate()
        .for_each(|(tc, block)| {
            let c0 = tc * TILE;
            let c1 = (c0 + TILE).min(cols);
            for r0 in (0..rows).step_by(TILE) {
                for r in r0..(r0 + TILE).min(rows) {
                    for c in c0..c1 {
                        block[(c - c0) * rows + r] = src[r * cols + c];
                    }
                }
            }
        });
    dst
}

/// Applies optional spectral multipliers along z1 and z2.
fn spectral_step(
    grid: &WaveGrid,
    along_z1: Option<&[Complex64]>,
    along_z2: Option<&[Complex64]>,
) -> WaveGrid {
    let (n1, n2) = (grid.z1.count, grid.z2.count);
    let mut data = grid.amplitudes.clone();
    if let Some(m) = along_z2 {
        filter_rows(&mut data, m);
    }
    if let Some(m) = along_z1 {
        let mut t = transpose(&data, n1, n2);
        filter_rows(&mut t, m);
        data = transpose(&t, n2, n1);
    }
    WaveGrid {
        z1: grid.z1,
        z2: grid.z2,
        amplitudes: data,
    }
}

/// Free Fresnel propagation of both photons over `distance`, as the
/// frequency-domain multiplier exp(−iπλ d f²) on each coordinate. The global
/// phase is dropped.
pub fn propagate(grid: &WaveGrid, distance: f64, config: &PhysicalConfig) -> Result<WaveGrid> {
    if !(distance >= 0.0 && distance.is_finite()) {
        return Err(Error::validation(
            "distance",
            "must be finite and non-negative",
        ));
    }
    if distance == 0.0 {
        return Ok(grid.clone());
    }
    check_sampling(&grid.z1, config.wavelength, distance)?;
    check_sampling(&grid.z2, config.wavelength, distance)?;
    let h1 = transfer(&grid.z1, config.wavelength, distance);
    let h2 = transfer(&grid.z2, config.wavelength, distance);
    Ok(spectral_step(grid, Some(&h1), Some(&h2)))
}

/// Band-limited resampling along z1: the returned grid holds ψ(z + delta) at
/// the old positions, relabelled as an axis shifted by `delta`.
pub fn translate_z1(grid: &WaveGrid, delta: f64) -> WaveGrid {
    let m = shift(&grid.z1, delta);
    let mut out = spectral_step(grid, Some(&m), None);
    out.z1.origin += delta;
    out
}

/// Keeps only |z1| ≤ ε/2.
pub fn truncate_slit(grid: &WaveGrid, slit_width: f64) -> Result<WaveGrid> {
    if slit_width < 8.0 * grid.z1.spacing {
        return Err(Error::Sampling(format!(
            "slit of {slit_width:e} m spans fewer than 8 cells of {:e} m",
            grid.z1.spacing
        )));
    }
    let half = 0.5 * slit_width;
    let mut out = grid.clone();
    out.amplitudes
        .par_chunks_mut(grid.z2.count)
        .enumerate()
        .filter(|(i, _)| grid.z1.position(*i).abs() > half)
        .for_each(|(_, row)| row.fill(Complex64::new(0.0, 0.0)));
    Ok(out)
}

/// 1D spectral propagation of a sampled field.
pub fn propagate_1d(
    samples: &[Complex64],
    spacing: f64,
    distance: f64,
    wavelength: f64,
) -> Vec<Complex64> {
    let axis = Axis::centred(samples.len(), spacing);
    let mut data = samples.to_vec();
    filter_rows(&mut data, &transfer(&axis, wavelength, distance));
    data
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Apply the slit in z1 between the two legs.
    pub truncate: bool,
    /// Resample the output z1 axis so that it contains z1 = 0.
    pub centre_z1: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            truncate: true,
            centre_z1: true,
        }
    }
}

/// Source state → propagate L2 → slit → propagate L1 → |ψ|².
pub fn end_to_end_density(
    spec: &GridSpec,
    config: &PhysicalConfig,
    options: PipelineOptions,
) -> Result<DensityGrid> {
    let model = TwoPhotonModel::new(*config)?;
    let axis = spec.axis();
    let pattern = fringe_width(config);
    if axis.extent() < 8.0 * pattern {
        return Err(Error::Sampling(format!(
            "window {:e} m is narrower than 8 fringe widths ({pattern:e} m)",
            axis.extent()
        )));
    }
    check_sampling(&axis, config.wavelength, config.l1)?;

    let source = sample_initial_state(&model, spec);
    let mut state = propagate(&source, config.l2, config)?;
    drop(source);
    if options.truncate {
        state = truncate_slit(&state, config.slit_width)?;
    }
    let h = transfer(&axis, config.wavelength, config.l1);
    let state = if options.centre_z1 {
        let delta = 0.5 * axis.spacing;
        let along_z1: Vec<Complex64> = h
            .iter()
            .zip(shift(&axis, delta))
            .map(|(a, b)| a * b)
            .collect();
        let mut out = spectral_step(&state, Some(&along_z1), Some(&h));
        out.z1.origin += delta;
        out
    } else {
        spectral_step(&state, Some(&h), Some(&h))
    };
    Ok(state.density())
}
