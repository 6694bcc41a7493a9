//! End-to-end checks of the binary: exit codes, JSON shapes, CSV traces
//! and byte-identical reruns.

use std::path::PathBuf;
use std::process::{Command, Output};

use garland_lab::harmonic::{self, EdgeCocycle};
use garland_lab::io as gio;
use garland_lab::models;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_garland-lab"))
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("garland-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn spectra_cycle_six() {
    let out = bin().args(["spectra", "cycle", "--k", "6"]).output().unwrap();
    let json = stdout_json(&out);
    assert!((json["lambda"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(json["method"], "dense");
    assert_eq!(json["connected"], true);
}

#[test]
fn spectra_closed_form() {
    let out = bin().args(["spectra", "--closed-form", "6"]).output().unwrap();
    let json = stdout_json(&out);
    assert!((json["lambda"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn spectra_from_file() {
    let dir = workdir();
    let path = dir.join("c4.graph");
    std::fs::write(&path, gio::graph_to_text(&models::cycle_graph(4))).unwrap();
    let out = bin().arg("spectra").arg(&path).output().unwrap();
    let json = stdout_json(&out);
    assert!((json["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn malformed_file_reports_line() {
    let dir = workdir();
    let path = dir.join("broken.graph");
    std::fs::write(&path, "graph\nv 3\ne 0 9 1.0\n").unwrap();
    let out = bin().arg("spectra").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn certify_exit_codes() {
    let dir = workdir();
    let torus_path = dir.join("torus.complex");
    std::fs::write(&torus_path, gio::complex_to_text(&models::torus_3x3())).unwrap();
    let out = bin()
        .args(["garland", "certify"])
        .arg(&torus_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "torus certificate must be refused");
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["report"]["min_link_gap"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(json["report"]["granted"], false);

    let ico_path = dir.join("ico.complex");
    std::fs::write(&ico_path, gio::complex_to_text(&models::icosahedron())).unwrap();
    let out = bin()
        .args(["garland", "certify"])
        .arg(&ico_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["report"]["granted"], true);
    assert_eq!(json["report"]["property_t_certified"], true);

    // Refused against a bounded-invariant class.
    let out = bin()
        .args(["garland", "certify"])
        .arg(&ico_path)
        .args(["--delta", "0.4122"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn garland_identity_on_torus_files() {
    let dir = workdir();
    let torus = models::torus_3x3();
    let cocycle = EdgeCocycle::new(2, models::torus_lattice_cocycle(&torus)).unwrap();
    let map = harmonic::solve_twisted_harmonic(&torus, &cocycle).unwrap();

    let cx_path = dir.join("torus-id.complex");
    std::fs::write(&cx_path, gio::complex_to_text(&torus)).unwrap();
    let map_path = dir.join("map.json");
    std::fs::write(&map_path, serde_json::to_string(&map).unwrap()).unwrap();
    let coc_path = dir.join("cocycle.json");
    std::fs::write(&coc_path, serde_json::to_string(&cocycle).unwrap()).unwrap();

    let out = bin()
        .args(["garland", "identity"])
        .arg(&cx_path)
        .arg("--map")
        .arg(&map_path)
        .arg("--cocycle")
        .arg(&coc_path)
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert_eq!(json["report"]["harmonic"], true);
    assert!(json["report"]["unconditional_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn flow_emits_csv_trace() {
    let dir = workdir();
    let cx_path = dir.join("flow.complex");
    std::fs::write(&cx_path, gio::complex_to_text(&models::icosahedron())).unwrap();
    let map = garland_lab::harmonic::VertexMap::euclidean(
        2,
        (0..12).map(|i| vec![(i as f64).sin(), (i as f64).cos()]).collect(),
    );
    let map_path = dir.join("flow-map.json");
    std::fs::write(&map_path, serde_json::to_string(&map).unwrap()).unwrap();
    let out = bin()
        .arg("flow")
        .arg(&cx_path)
        .arg("--map")
        .arg(&map_path)
        .args(["--steps", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,energy,laplacian_norm"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert!(first[1].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn incidence_census_values() {
    let out = bin()
        .args(["incidence", "--p", "2", "--census", "--feit-higman"])
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert!(
        (json["census"]["rq_gromov"].as_f64().unwrap() - 14.0 / 37.0).abs() < 1e-9
    );
    assert!((json["census"]["rq_standard"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(json["feit_higman"]["eigensolved"].as_f64().unwrap() > 0.5);
}

#[test]
fn wirtinger_check_table() {
    let out = bin().args(["wirtinger", "check", "--k", "6"]).output().unwrap();
    let json = stdout_json(&out);
    let constants = json["constants"].as_array().unwrap();
    assert!((constants[0].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!((constants[2].as_f64().unwrap() - 24.0).abs() < 1e-9);
    assert_eq!(json["report"]["affine_circle"], true);
    assert_eq!(json["report"]["all_pass"], true);
}

#[test]
fn wirtinger_loop_certificate() {
    let dir = workdir();
    let graph_path = dir.join("c6.graph");
    std::fs::write(&graph_path, gio::graph_to_text(&models::cycle_graph(6))).unwrap();
    let family_path = dir.join("family.json");
    std::fs::write(&family_path, r#"{"k": 6, "loops": [[0, 1, 2, 3, 4, 5]]}"#).unwrap();
    let out = bin()
        .args(["wirtinger", "certificate"])
        .arg("--graph")
        .arg(&graph_path)
        .arg("--family")
        .arg(&family_path)
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert!((json["report"]["bound"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    // Distance-regular averaging on the same family.
    let out = bin()
        .args(["wirtinger", "certificate"])
        .arg("--graph")
        .arg(&graph_path)
        .arg("--family")
        .arg(&family_path)
        .args(["--counts", "1,1,1"])
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert!((json["report"]["bound"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn in_bounds_arithmetic() {
    let out = bin()
        .args(["in-bounds", "--lambda", "0.8", "--delta", "0.4122", "--p", "4"])
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert!((json["degraded_gap"].as_f64().unwrap() - 0.47024).abs() < 1e-9);
    assert_eq!(json["threshold_exceeded"], false);
    assert!((json["building_lower_bound"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let run = || {
        bin()
            .args([
                "random-group",
                "--m",
                "8",
                "--density",
                "0.4",
                "--samples",
                "10",
                "--seed",
                "99",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");

    // Seed falls back to the environment variable.
    let c = bin()
        .args([
            "random-group",
            "--m",
            "8",
            "--density",
            "0.4",
            "--samples",
            "10",
        ])
        .env("GARLAND_LAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout, "env seed must match the flag");
}

#[test]
fn random_graph_summary_and_csv() {
    let dir = workdir();
    let csv_path = dir.join("gaps.csv");
    let out = bin()
        .args([
            "random-graph",
            "--n",
            "60",
            "--d",
            "2",
            "--samples",
            "4",
            "--seed",
            "5",
        ])
        .arg("--csv")
        .arg(&csv_path)
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert_eq!(json["config"]["seed"], 5);
    assert_eq!(json["report"]["lambdas"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("sample,lambda\n"));
    assert_eq!(csv.lines().count(), 5);
}
