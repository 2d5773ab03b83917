use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ghostdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghostdiff"))
        .args(args)
        .env("GHOSTDIFF_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("summary is JSON")
}

fn read_values(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("position_m,value"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn ghost_profile_is_peak_scaled_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = summary(&ghostdiff(&[
        "run",
        "ghost",
        "--out",
        out,
        "--peak-scale",
        "500",
    ]));
    assert_eq!(s["scenario"], "ghost");
    assert!(s["comparison"]["l_inf_rel"].as_f64().unwrap() <= 0.02);
    let csv = dir.path().join("ghost.csv");
    let rows = read_values(&csv);
    assert_eq!(rows.len(), 401);
    let peak = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    assert_eq!(peak, 500.0);

    let first = std::fs::read(&csv).unwrap();
    summary(&ghostdiff(&[
        "run",
        "ghost",
        "--out",
        out,
        "--peak-scale",
        "500",
    ]));
    assert_eq!(std::fs::read(&csv).unwrap(), first);
}

#[test]
fn config_file_and_scan_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"sigma": "50/mm", "scan": {"start": "-1mm", "stop": "1mm", "count": 5}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let s = summary(&ghostdiff(&[
        "run",
        "ghost",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--scan",
        "-10mm,10mm,401",
    ]));
    assert_eq!(s["config"]["sigma"].as_f64().unwrap(), 5.0e4);
    assert_eq!(s["fringe"]["status"], "resolved");
    assert!(s["fringe"]["rel_err"].as_f64().unwrap().abs() < 0.05);
    assert_eq!(read_values(&out.join("ghost.csv")).len(), 401);
}

#[test]
fn disentangled_reports_sinc_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&ghostdiff(&[
        "run",
        "disentangled",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(s["derived"]["is_entangled"], false);
    assert_eq!(s["fringe"]["status"], "pattern-not-resolved");
    assert_eq!(s["details"]["z2_interior_minima"], 0);
    let zeros = s["details"]["z1_sinc_zeros"].as_array().unwrap();
    assert!(zeros.len() >= 3);
    for z in zeros.iter().take(3) {
        assert!(z["rel_err"].as_f64().unwrap().abs() < 0.02, "{z}");
    }
}

#[test]
fn shifted_needs_z0() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        ghostdiff(&["run", "shifted", "--out", out]).status.code(),
        Some(2)
    );
    let s = summary(&ghostdiff(&["run", "shifted", "--out", out, "--z0", "1mm"]));
    let argmax = s["details"]["argmax_m"].as_f64().unwrap();
    assert!(argmax > 0.0 && argmax < 1e-3);
}

#[test]
fn fringe_sweep_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"sigma": "50/mm", "sweep": {"slit_widths": ["0.8mm", "0.2mm", "0.4mm"], "distances": ["1.8m"]}}"#,
    )
    .unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "run",
        "fringe-sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out,
    ];
    let s = summary(&ghostdiff(&args));
    assert_eq!(s["details"]["resolved_points"], 3);
    let csv_path = dir.path().join("fringe_sweep.csv");
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,width_measured_m,width_formula_m,rel_err");
    assert!(lines[1].starts_with("eps=8.0000000000000004e-4;"));
    assert!(lines[2].starts_with("eps=2.0000000000000001e-4;"));
    for line in &lines[1..] {
        let rel: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel.abs() < 0.05, "{line}");
    }

    let threaded = Command::new(env!("CARGO_BIN_EXE_ghostdiff"))
        .args(args)
        .env("GHOSTDIFF_THREADS", "3")
        .output()
        .unwrap();
    assert!(threaded.status.success());
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), text);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"wavelength": "-1 nm"}"#).unwrap();
    let out = dir.path().to_str().unwrap();
    let code = |args: &[&str]| ghostdiff(args).status.code();
    assert_eq!(
        code(&[
            "run",
            "ghost",
            "--config",
            bad.to_str().unwrap(),
            "--out",
            out
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["run", "ghost", "--out", out, "--scan", "1mm,0mm,3"]),
        Some(2)
    );

    let strict = dir.path().join("strict.json");
    std::fs::write(
        &strict,
        r#"{"quadrature": {"start_order": 2, "max_order": 4, "tolerance": 1e-15}}"#,
    )
    .unwrap();
    assert_eq!(
        code(&[
            "validate",
            "quadrature",
            "--config",
            strict.to_str().unwrap(),
            "--out",
            out
        ]),
        Some(3)
    );

    let file = dir.path().join("not_a_dir");
    std::fs::write(&file, "").unwrap();
    assert_eq!(
        code(&["run", "ghost", "--out", file.to_str().unwrap()]),
        Some(4)
    );
    assert_eq!(
        code(&[
            "run",
            "ghost",
            "--config",
            "/nonexistent/cfg.json",
            "--out",
            out
        ]),
        Some(4)
    );
}

#[test]
fn validate_quadrature_records_adjudication() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&ghostdiff(&[
        "validate",
        "quadrature",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(s["details"]["sinc_supported"], "Linearized");
    assert_eq!(s["details"]["halving_ratios"].as_array().unwrap().len(), 4);
    assert_eq!(
        read_values(&dir.path().join("quadrature_rel_err.csv")).len(),
        21
    );
}

#[test]
fn validate_grid_small_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"grid": {"count": 1024, "half_extent": "25.6mm"}}"#,
    )
    .unwrap();
    let s = summary(&ghostdiff(&[
        "validate",
        "grid",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(s["details"]["grid_count"], 1024);
    assert!(s["comparison"]["l_inf_rel"].as_f64().unwrap() < 0.05);
}

#[test]
fn marginals_and_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let s = summary(&ghostdiff(&["run", "marginal-z2", "--out", out]));
    assert_eq!(s["details"]["unimodal"], true);
    let s = summary(&ghostdiff(&[
        "run",
        "first-order",
        "--out",
        out,
        "--scan",
        "-15mm,15mm,401",
    ]));
    assert!(s["details"]["entangled_strongest_side"].as_f64().unwrap() < 0.01);
    assert!(s["details"]["disentangled_maxima"].as_u64().unwrap() >= 5);
    let s = summary(&ghostdiff(&["run", "marginal-z1", "--out", out]));
    assert!(s["details"]["maxima"].as_u64().unwrap() >= 1);
}
