mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dband_ris::channel::{evaluate, Evaluator};
use dband_ris::cli::config::{parse_file, parse_str, AbsorptionChoice, Param, Scenario};
use dband_ris::cli::presets::figure_preset;
use dband_ris::cli::sweep::{run_config_sweep, Axis};
use dband_ris::cli::{run_point, run_sweep, CliError, SweepSpec};

use common::rel;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dband-ris"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const BORESIGHT: &str = r#"
[ris]
rows = 110
pitch_x_m = 0.00027
[link]
kind = "specular"
distance_m = 2.5
theta_deg = 0.0
"#;

#[test]
fn point_pathgain_matches_library() {
    let file = parse_file(&config("boresight.toml")).unwrap();
    let s = Scenario::resolve(&file, None).unwrap();
    let expected = evaluate(
        &s.channel_config().unwrap(),
        &s.link.geometry().unwrap(),
        Evaluator::Specular,
    )
    .unwrap()
    .path_gain_db()
    .unwrap();

    let table = run_point(&s).unwrap();
    let pg = table.numbers("pathgain_db").unwrap()[0].unwrap();
    assert_eq!(pg, expected);

    let out = run(&["point", "--config", config("boresight.toml").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|c| *c == "pathgain_db").unwrap();
    let printed: f64 = row[i].parse().unwrap();
    assert!(rel(printed, expected) < 1e-8);
}

#[test]
fn point_notes_echo_resolved_defaults() {
    let out = run(&["point", "--config", config("boresight.toml").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in [
        "q=499.000000",
        "q=4.000000",
        "W=60",
        "far_field:",
        "transceivers_aimed=true",
        "surface_pattern=transceiver",
        "N_o=1",
        "20*log10|h|",
        "T=296 K",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
}

#[test]
fn elevation_beyond_ninety_degrees_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "bad.toml",
        &BORESIGHT.replace("theta_deg = 0.0", "theta_deg = 100.0"),
    );
    let out = run(&["point", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("link.theta_deg"));
}

#[test]
fn frequency_outside_table_names_the_domain() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "f.toml", &format!("{BORESIGHT}[channel]\nfrequency_hz = 200e9\n"));
    let out = run(&["point", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[110.000, 170.000] GHz"));
}

#[test]
fn unknown_keys_and_bad_values_are_rejected_with_paths() {
    let e = parse_str(&BORESIGHT.replace("rows = 110", "rows = 110\nrow_count = 3")).unwrap_err();
    assert!(e.to_string().contains("row_count"), "{e}");

    let s = |text: &str| {
        Scenario::resolve(&parse_str(text).unwrap(), None)
            .unwrap_err()
            .to_string()
    };
    assert!(s(&BORESIGHT.replace("rows = 110", "rows = 11")).starts_with("ris:"));
    assert!(s(&format!("{BORESIGHT}[antennas]\ntx_gain_db = 1.0\n")).starts_with("antennas.tx_gain_db:"));
    assert!(s(&format!("{BORESIGHT}[capacity]\nsubbands = 0\n")).starts_with("capacity.subbands:"));
    assert!(s(&BORESIGHT.replace("distance_m = 2.5", "distance_m = -1.0")).starts_with("link.distance_m:"));
}

#[test]
fn zero_gain_exits_with_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "dark.toml",
        &BORESIGHT.replace("pitch_x_m = 0.00027", "pitch_x_m = 0.00027\namplitude = 0.0"),
    );
    let out = run(&["point", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_step_axis_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{BORESIGHT}[sweep]\naxes = [{{ name = \"theta_deg\", start = 0.0, stop = 5.0, steps = 1 }}]\n");
    let path = write_config(&dir, "s.toml", &body);
    let out = run(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.axes[0].steps"));
}

#[test]
fn axis_ranges_are_checked() {
    let body =
        format!("{BORESIGHT}[sweep]\naxes = [{{ name = \"theta_deg\", start = 0.0, stop = 95.0, steps = 3 }}]\n");
    let file = parse_str(&body).unwrap();
    let s = Scenario::resolve(&file, None).unwrap();
    let e = run_config_sweep(&s, file.sweep.as_ref().unwrap(), 1).unwrap_err();
    assert!(
        matches!(e, CliError::Validation(ref m) if m.starts_with("sweep.axes[0].stop")),
        "{e}"
    );
}

#[test]
fn pattern_sweep_gives_eleven_rows_of_the_30_db_curve() {
    let body = format!(
        "{BORESIGHT}[sweep]\naxes = [{{ name = \"theta_deg\", start = 0.0, stop = 5.0, steps = 11 }}]\nmetrics = [\"pattern\"]\n"
    );
    let file = parse_str(&body).unwrap();
    let s = Scenario::resolve(&file, None).unwrap();
    let table = run_config_sweep(&s, file.sweep.as_ref().unwrap(), 2).unwrap();
    assert_eq!(table.rows.len(), 11);
    let theta = table.numbers("theta_deg").unwrap();
    let f = table.numbers("pattern").unwrap();
    for (t, f) in theta.iter().zip(&f) {
        let expected = t.unwrap().to_radians().cos().powf(499.0);
        assert!(rel(f.unwrap(), expected) < 1e-12);
    }
    assert!((f[2].unwrap() - 0.9).abs() < 0.03); // 1°
}

#[test]
fn sweep_errors_stay_in_their_rows() {
    let body = format!(
        "{BORESIGHT}[sweep]\naxes = [{{ name = \"frequency_hz\", start = 100e9, stop = 180e9, steps = 5 }}]\nmetrics = [\"pathgain_db\"]\n"
    );
    let file = parse_str(&body).unwrap();
    let s = Scenario::resolve(&file, None).unwrap();
    let table = run_config_sweep(&s, file.sweep.as_ref().unwrap(), 2).unwrap();
    let err = table.column("error").unwrap();
    let pg = table.numbers("pathgain_db").unwrap();
    let failed: Vec<bool> = table
        .rows
        .iter()
        .map(|r| r[err] != dband_ris::cli::Cell::Empty)
        .collect();
    assert_eq!(failed, [true, false, false, false, true]);
    assert!(pg[1].is_some() && pg[0].is_none());
}

#[test]
fn every_sweep_row_equals_the_point_run() {
    let file = parse_file(&config("theta_gain_sweep.toml")).unwrap();
    let base = Scenario::resolve(&file, None).unwrap();
    let spec = SweepSpec::from_section(file.sweep.as_ref().unwrap()).unwrap();
    let points = run_sweep(&base, &spec, 3).unwrap();
    assert_eq!(points.len(), 27);
    // outer axis major
    assert_eq!(points[0].setting(Param::GainDb), Some(30.0));
    assert_eq!(points[8].setting(Param::ThetaDeg), Some(2.0));
    assert_eq!(points[9].setting(Param::GainDb), Some(33.5));
    for p in &points {
        let mut s = base.clone();
        for &(param, v) in &p.settings {
            s.apply(param, v);
        }
        let single = run_point(&s).unwrap();
        let values = p.outcome.values.as_ref().unwrap();
        assert_eq!(single.numbers("pathgain_db").unwrap()[0], values.pathgain_db);
        assert_eq!(single.numbers("capacity_bps").unwrap()[0], values.capacity_bps);
    }
}

#[test]
fn job_count_does_not_change_output() {
    let path = config("theta_gain_sweep.toml");
    let one = run(&["sweep", "--config", path.to_str().unwrap(), "--jobs", "1"]);
    let many = run(&["sweep", "--config", path.to_str().unwrap(), "--jobs", "6"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn exact_config_runs_and_json_parses() {
    let out = run(&[
        "point",
        "--config",
        config("exact_offset.toml").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let columns = v["columns"].as_array().unwrap();
    let i = columns.iter().position(|c| c == "capacity_bps").unwrap();
    assert!(v["rows"][0][i].as_f64().unwrap() > 0.0);
    assert!(v["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n.as_str().unwrap().contains("evaluator=exact")));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("fig2.csv");
    let out = run(&["preset", "--name", "fig2", "--output", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("# fig2"));
    assert!(text
        .lines()
        .any(|l| l == "absorption,gain_db,theta_deg,pattern,far_field_warning,error"));
}

#[test]
fn absorption_table_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("flat.csv");
    std::fs::write(
        &table,
        "# flat test table\nfrequency_hz,kappa_per_m\n100e9,0.1\n200e9,0.1\n",
    )
    .unwrap();
    let cfg = config("boresight.toml");
    let get = |absorption: &str| {
        let out = run(&[
            "point",
            "--config",
            cfg.to_str().unwrap(),
            "--absorption",
            absorption,
            "--format",
            "json",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let i = v["columns"]
            .as_array()
            .unwrap()
            .iter()
            .position(|c| c == "h_abs")
            .unwrap();
        v["rows"][0][i].as_f64().unwrap()
    };
    let vacuum = get("vacuum");
    let flat = get(table.to_str().unwrap());
    // sqrt(τ(d1 + d2)) with κ = 0.1 /m over 5 m
    assert!(rel(flat, vacuum * (-0.25f64).exp()) < 1e-8);

    let out = run(&[
        "point",
        "--config",
        cfg.to_str().unwrap(),
        "--absorption",
        "/no/such/table.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_preset_is_rejected() {
    let out = run(&["preset", "--name", "fig9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(figure_preset("fig1", None, 1).is_err());
}

#[test]
fn presets_state_their_conventions() {
    for name in ["fig2", "fig3", "fig4", "fig5"] {
        let t = figure_preset(name, Some(&AbsorptionChoice::Default), 2).unwrap();
        assert!(t.notes.iter().any(|n| n.contains("20*log10|h|")), "{name}");
        assert!(!t.rows.is_empty());
    }
    let fig3 = figure_preset("fig3", None, 2).unwrap();
    assert!(fig3.notes.iter().any(|n| n.starts_with("irreproducible:")));
    let absorption = fig3.column("absorption").unwrap();
    let labels: std::collections::BTreeSet<_> = fig3.rows.iter().map(|r| format!("{:?}", r[absorption])).collect();
    assert_eq!(labels.len(), 2);
}

#[test]
fn paired_axis_moves_pitch_and_cells_together() {
    let base = Scenario::resolve(&parse_str(BORESIGHT).unwrap(), None).unwrap();
    let spec = SweepSpec {
        axes: vec![Axis::paired(
            vec![Param::PitchM, Param::CellsPerSide],
            vec![vec![0.00027, 76.0], vec![0.0002, 118.0]],
        )],
        metrics: vec![dband_ris::cli::config::Metric::CapacityBps],
        absorptions: vec![],
    };
    let points = run_sweep(&base, &spec, 1).unwrap();
    let c: Vec<f64> = points
        .iter()
        .map(|p| p.outcome.values.as_ref().unwrap().capacity_bps.unwrap())
        .collect();
    assert!(c[1] > c[0]);
}
