//! Named experiments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ghostdiff_core::analysis::{count_maxima, ExtremumKind};
use ghostdiff_core::oracle::{
    adjudicate_sinc_convention, end_to_end_density, slit_integral, PipelineOptions,
};
use ghostdiff_core::{
    compare, find_extrema, fringe_width, measure_fringe, normalize, DensityProfile, Error,
    NormalizeMode, PhysicalConfig, Result, ScanSpec, TwoPhotonModel,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{
    fmt_f64, profile_csv, sweep_csv, write_atomic, FringeReport, RunSummary, SweepRow,
};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioKind {
    Ghost,
    Shifted,
    MarginalZ1,
    MarginalZ2,
    Disentangled,
    FirstOrder,
    FringeSweep,
    ValidateQuadrature,
    ValidateGrid,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Ghost => "ghost",
            ScenarioKind::Shifted => "shifted",
            ScenarioKind::MarginalZ1 => "marginal-z1",
            ScenarioKind::MarginalZ2 => "marginal-z2",
            ScenarioKind::Disentangled => "disentangled",
            ScenarioKind::FirstOrder => "first-order",
            ScenarioKind::FringeSweep => "fringe-sweep",
            ScenarioKind::ValidateQuadrature => "validate-quadrature",
            ScenarioKind::ValidateGrid => "validate-grid",
        }
    }
}

/// A scenario with everything it needs to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub settings: Settings,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, settings: Settings) -> Result<Self> {
        if kind == ScenarioKind::Shifted && settings.z0.is_none() {
            return Err(Error::validation(
                "z0",
                "the shifted scenario needs a D1 offset",
            ));
        }
        Ok(Scenario { kind, settings })
    }
}

/// z2 range integrated over for photon 1 singles. Wide enough for the
/// conditional envelope at any z1 in a ±15 mm scan.
fn z2_integration() -> ScanSpec {
    ScanSpec::symmetric(40e-3, 8001).expect("static scan")
}

/// z1 range integrated over for photon 2 singles. The sinc² tails decay
/// slowly, so this one is long.
fn z1_integration() -> ScanSpec {
    ScanSpec::symmetric(0.3, 60001).expect("static scan")
}

struct Run<'a> {
    out_dir: &'a Path,
    peak_scale: Option<f64>,
    outputs: Vec<PathBuf>,
    details: BTreeMap<String, Value>,
}

impl Run<'_> {
    fn write_profile(&mut self, name: &str, profile: &DensityProfile) -> Result<()> {
        let scaled = match self.peak_scale {
            Some(s) => normalize(profile, NormalizeMode::PeakScaled(s))?,
            None => profile.clone(),
        };
        self.write(name, &profile_csv(&scaled))
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        write_atomic(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }
}

pub fn fringe_report(profile: &DensityProfile, config: &PhysicalConfig) -> Result<FringeReport> {
    let formula = fringe_width(config);
    match measure_fringe(profile) {
        Ok(m) => Ok(FringeReport {
            status: "resolved",
            width_formula_m: formula,
            rel_err: Some(m.measured_width_min / formula - 1.0),
            metrics: Some(m),
            reason: None,
        }),
        Err(Error::PatternNotResolved(reason)) => Ok(FringeReport {
            status: "pattern-not-resolved",
            width_formula_m: formula,
            rel_err: None,
            metrics: None,
            reason: Some(reason),
        }),
        Err(e) => Err(e),
    }
}

/// Largest local maximum away from the global one, relative to the peak.
fn strongest_side_feature(profile: &DensityProfile) -> f64 {
    let extrema = find_extrema(profile);
    let maxima = extrema.iter().filter(|e| e.kind == ExtremumKind::Maximum);
    let Some(centre) = maxima.clone().max_by(|a, b| a.value.total_cmp(&b.value)) else {
        return 0.0;
    };
    maxima
        .filter(|e| e.index != centre.index)
        .map(|e| e.value / centre.value)
        .fold(0.0, f64::max)
}

fn minima_positions(profile: &DensityProfile) -> Vec<f64> {
    find_extrema(profile)
        .iter()
        .filter(|e| e.kind == ExtremumKind::Minimum)
        .map(|e| e.position)
        .collect()
}

pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    let started = Instant::now();
    let s = &scenario.settings;
    let cfg = match scenario.kind {
        ScenarioKind::Disentangled => s.config.disentangled(),
        _ => s.config,
    };
    let model = TwoPhotonModel::new(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let mut run = Run {
        out_dir,
        peak_scale: s.peak_scale,
        outputs: Vec::new(),
        details: BTreeMap::new(),
    };
    let mut fringe = None;
    let mut comparison = None;

    match scenario.kind {
        ScenarioKind::Ghost => {
            let exact = model.conditional_profile(0.0, &s.scan)?;
            let approx = model.ghost_scan(&s.scan)?;
            comparison = Some(compare(&approx, &exact)?);
            fringe = Some(fringe_report(&exact, &cfg)?);
            run.detail("maxima", count_maxima(&exact));
            run.detail("minima_m", minima_positions(&exact));
            run.write_profile("ghost.csv", &exact)?;
        }
        ScenarioKind::Shifted => {
            let z0 = s.z0.expect("checked in Scenario::new");
            let profile = model.conditional_profile(z0, &s.scan)?;
            fringe = Some(fringe_report(&profile, &cfg)?);
            run.detail("z0_m", z0);
            run.detail("argmax_m", profile.argmax().map(|(x, _)| x));
            run.write_profile("shifted.csv", &profile)?;
        }
        ScenarioKind::MarginalZ1 => {
            let singles = model.singles_z1(&s.scan, &z2_integration())?;
            fringe = Some(fringe_report(&singles, &cfg)?);
            marginal_details(&mut run, &singles);
            run.write_profile("marginal_z1.csv", &singles)?;
        }
        ScenarioKind::MarginalZ2 => {
            let singles = model.singles_z2(&s.scan, &z1_integration())?;
            fringe = Some(fringe_report(&singles, &cfg)?);
            marginal_details(&mut run, &singles);
            run.write_profile("marginal_z2.csv", &singles)?;
        }
        ScenarioKind::Disentangled => {
            let conditional = model.conditional_profile(0.0, &s.scan)?;
            fringe = Some(fringe_report(&conditional, &cfg)?);
            let singles = model.singles_z1(&s.scan, &z2_integration())?;
            let zero = 2.0 * cfg.wavelength * cfg.l1 / cfg.slit_width;
            let zeros: Vec<Value> = minima_positions(&singles)
                .into_iter()
                .filter(|&z| z > 0.0)
                .enumerate()
                .map(|(n, z)| {
                    let expected = (n + 1) as f64 * zero;
                    json!({"n": n + 1, "position_m": z, "expected_m": expected, "rel_err": z / expected - 1.0})
                })
                .collect();
            run.detail("beta_abs", model.params().beta.norm());
            run.detail("z2_interior_minima", minima_positions(&conditional).len());
            run.detail("z1_sinc_zeros", zeros);
            run.write_profile("disentangled_z2.csv", &conditional)?;
            run.write_profile("disentangled_z1.csv", &singles)?;
        }
        ScenarioKind::FirstOrder => {
            let entangled = model.singles_z1(&s.scan, &z2_integration())?;
            let product = TwoPhotonModel::new(cfg.disentangled())?;
            let product = product.singles_z1(&s.scan, &z2_integration())?;
            run.detail("entangled_maxima", count_maxima(&entangled));
            run.detail(
                "entangled_strongest_side",
                strongest_side_feature(&entangled),
            );
            run.detail("disentangled_maxima", count_maxima(&product));
            run.detail(
                "disentangled_strongest_side",
                strongest_side_feature(&product),
            );
            run.write_profile("first_order_entangled.csv", &entangled)?;
            run.write_profile("first_order_disentangled.csv", &product)?;
        }
        ScenarioKind::FringeSweep => {
            let rows = fringe_sweep(s)?;
            let resolved = rows
                .iter()
                .filter(|r| r.width_measured_m.is_finite())
                .count();
            let worst = rows
                .iter()
                .filter(|r| r.rel_err.is_finite())
                .map(|r| r.rel_err.abs())
                .fold(0.0, f64::max);
            run.detail("points", rows.len());
            run.detail("resolved_points", resolved);
            run.detail("max_abs_rel_err", worst);
            run.write("fringe_sweep.csv", &sweep_csv(&rows))?;
        }
        ScenarioKind::ValidateQuadrature => validate_quadrature(&mut run, &model, s)?,
        ScenarioKind::ValidateGrid => {
            comparison = Some(validate_grid(&mut run, &model, s)?);
        }
    }

    Ok(RunSummary {
        scenario: scenario.kind.name().to_string(),
        config: cfg,
        derived: *model.params(),
        regime: cfg.regime(),
        fringe,
        comparison,
        details: run.details,
        outputs: run.outputs,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

fn marginal_details(run: &mut Run, singles: &DensityProfile) {
    let maxima = count_maxima(singles);
    run.detail("maxima", maxima);
    run.detail("unimodal", maxima == 1);
    run.detail("strongest_side", strongest_side_feature(singles));
}

/// One configuration per (ε, D) pair. L1 and L2 are scaled by D / D_ref so
/// their ratio is kept; each point scans ±3.5 formula widths.
pub fn fringe_sweep(s: &Settings) -> Result<Vec<SweepRow>> {
    let base = s.config;
    let d_ref = base.ghost_distance();
    let points: Vec<(f64, f64)> = s
        .sweep
        .slit_widths
        .iter()
        .flat_map(|&eps| s.sweep.distances.iter().map(move |&d| (eps, d)))
        .collect();
    points
        .par_iter()
        .map(|&(eps, d)| {
            let ratio = d / d_ref;
            let cfg = PhysicalConfig {
                slit_width: eps,
                l1: base.l1 * ratio,
                l2: base.l2 * ratio,
                ..base
            };
            let model = TwoPhotonModel::new(cfg)?;
            let formula = fringe_width(&cfg);
            let scan = ScanSpec::symmetric(3.5 * formula, s.scan.count)?;
            let profile = model.conditional_profile(0.0, &scan)?;
            let measured = match measure_fringe(&profile) {
                Ok(m) => m.measured_width_min,
                Err(Error::PatternNotResolved(_)) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                param: format!("eps={};D={}", fmt_f64(eps), fmt_f64(d)),
                width_measured_m: measured,
                width_formula_m: formula,
                rel_err: measured / formula - 1.0,
            })
        })
        .collect()
}

fn validate_quadrature(run: &mut Run, model: &TwoPhotonModel, s: &Settings) -> Result<()> {
    let scan = ScanSpec::new(s.scan.start, s.scan.stop, s.quadrature_points)?;
    let errors = scan
        .points()
        .map(|z2| {
            let exact = slit_integral(model, 0.0, z2, &s.quadrature)?;
            Ok((model.final_amplitude(0.0, z2) - exact).norm() / exact.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    run.detail("max_rel_err_z1_0", worst);
    run.detail("within_1e-3", worst <= 1e-3);

    // error at z2 = 0 as the slit is halved repeatedly
    let cfg = *model.config();
    let ladder = (0..5)
        .map(|k| {
            let narrow = TwoPhotonModel::new(PhysicalConfig {
                slit_width: cfg.slit_width / f64::from(1 << k),
                ..cfg
            })?;
            let exact = slit_integral(&narrow, 0.0, 0.0, &s.quadrature)?;
            Ok((narrow.final_amplitude(0.0, 0.0) - exact).norm() / exact.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let ratios: Vec<f64> = ladder.windows(2).map(|w| w[0] / w[1]).collect();
    run.detail("halving_rel_err", ladder);
    run.detail("halving_ratios", ratios);

    // Away from z1 = 0 the closed form is only meaningful for a narrow slit.
    // With β = 0 the sinc factor is isolated from the z2 coupling.
    let narrow = PhysicalConfig {
        slit_width: cfg.slit_width / 8.0,
        ..cfg
    }
    .disentangled();
    let points = [(2e-3, 0.0), (5e-3, 0.0), (8e-3, 1e-3)];
    let report = adjudicate_sinc_convention(&TwoPhotonModel::new(narrow)?, &points, &s.quadrature)?;
    run.detail("sinc_slit_width_m", narrow.slit_width);
    run.detail("sinc_as_published_err", report.as_published_err);
    run.detail("sinc_linearized_err", report.linearized_err);
    run.detail("sinc_supported", format!("{:?}", report.supported));

    let profile = DensityProfile::new(scan.points().collect(), errors)?;
    run.write("quadrature_rel_err.csv", &profile_csv(&profile))
}

fn validate_grid(
    run: &mut Run,
    model: &TwoPhotonModel,
    s: &Settings,
) -> Result<ghostdiff_core::Comparison> {
    let half = s.scan.start.abs().max(s.scan.stop.abs());
    let density = end_to_end_density(&s.grid, model.config(), PipelineOptions::default())?;
    let slice = density.slice_at_z1(0.0, half)?;
    drop(density);
    let closed = DensityProfile::new(
        slice.positions.clone(),
        slice
            .positions
            .iter()
            .map(|&z2| model.joint_density(0.0, z2))
            .collect(),
    )?;
    let comparison = compare(&slice, &closed)?;
    let quadrature = slice
        .positions
        .iter()
        .map(|&z2| Ok(slit_integral(model, 0.0, z2, &s.quadrature)?.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let quadrature = DensityProfile::new(slice.positions.clone(), quadrature)?;
    run.detail("grid_count", s.grid.count);
    run.detail("grid_spacing_m", s.grid.spacing);
    run.detail("within_1e-2", comparison.l_inf_rel <= 1e-2);
    run.detail(
        "l_inf_rel_vs_quadrature",
        compare(&slice, &quadrature)?.l_inf_rel,
    );
    run.write_profile("grid_slice.csv", &slice)?;
    Ok(comparison)
}
