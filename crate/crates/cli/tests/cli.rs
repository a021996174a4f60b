//! End-to-end checks of the `hyperflow` binary: outputs and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hyperflow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperflow")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BEAM: &str = "
[time]
dt = 1e-4
horizon = 0.002

[gravity]
g = 0, 9.81

[solid.beam]
material = stvk
density = 945
young = 2.5e6
poisson = 0.3
size = 0.4, 0.2
spacing = 0.1, 0.1
fixed = a == 0
";

#[test]
fn run_writes_frames_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hyperflow(
        &["run", &golden("2d_cantilever.ini"), "--horizon", "0.001", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("20 steps"));
    assert!(out.join("frames/frame_000000.csv").exists());
    assert!(out.join("frames/frame_000020.csv").exists());
    let diag = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(diag.lines().next().unwrap().contains("J1,J2,J3"));
}

#[test]
fn runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = hyperflow(
            &["run", &golden("2d_container.ini"), "--horizon", "0.002", "--out", out.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["frames/frame_000020.csv", "frames/container_000000.vtk", "frames/water_000020.vtk", "diagnostics.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn malformed_scenario_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    std::fs::write(&path, "[time]\ndt = 1e-4\nsteps 10\n").unwrap();
    let o = hyperflow(&["run", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    std::fs::write(&path, "[time]\nsteps = 10\n").unwrap();
    let o = hyperflow(&["run", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("time.dt"), "{}", stderr(&o));

    let o = hyperflow(&["run", "does-not-exist.ini"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hyperflow(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(hyperflow(&["verify", "bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(
        hyperflow(&["converge-time", &golden("2d_cantilever.ini"), "--dts", "1e-4"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn inverted_cell_exits_with_1_and_names_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("crush.ini");
    std::fs::write(&path, format!("{BEAM}velocity = -400, 0\n")).unwrap();
    let o = hyperflow(&["run", path.to_str().unwrap(), "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("inverted cell") && stderr(&o).contains("at step"), "{}", stderr(&o));
}

#[test]
fn studies_validate_their_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.ini");
    std::fs::write(&path, BEAM).unwrap();
    let p = path.to_str().unwrap();
    let o = hyperflow(&["converge-time", p, "--dts", "1e-4,1e-4", "--ref", "2e-5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = hyperflow(&["converge-space", p, "--ds", "0.1", "--ref", "0.05"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = hyperflow(&["converge-space", p, "--ds", "0.1,0.05", "--ref", "0.03"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn time_study_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.ini");
    std::fs::write(&path, BEAM).unwrap();
    let o = hyperflow(
        &["converge-time", path.to_str().unwrap(), "--dts", "4e-4,2e-4,1e-4", "--ref", "2.5e-5", "--out", "t.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("dt,l2_error,rate,failure"));
    assert_eq!(csv.lines().count(), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("time study"));
}

#[test]
fn failed_study_run_saves_partial_report_and_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.ini");
    // Stable at the small steps only.
    std::fs::write(
        &path,
        BEAM.replace("young = 2.5e6", "young = 2.5e9").replace("horizon = 0.002", "horizon = 0.0016"),
    )
    .unwrap();
    let o = hyperflow(
        &["converge-time", path.to_str().unwrap(), "--dts", "4e-4,2e-4", "--ref", "1e-6", "--out", "t.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn verify_reports_each_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperflow(&["verify", "mesh"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().next(), Some("suite,property,status,measured,tolerance"));
    assert!(out.lines().skip(1).all(|l| l.starts_with("mesh,") && l.contains(",PASS,")));
}

#[test]
fn golden_scenarios_run_ten_steps() {
    let dir = tempfile::tempdir().unwrap();
    for name in
        ["2d_cantilever.ini", "2d_container.ini", "2d_container_symmetric.ini", "3d_mooney.ini", "3d_mooney_block.ini"]
    {
        let text = std::fs::read_to_string(golden(name)).unwrap();
        let dt: f64 = text.lines().find_map(|l| l.strip_prefix("dt = ")).unwrap().trim().parse().unwrap();
        let out = dir.path().join(name);
        let o = hyperflow(
            &["run", &golden(name), "--horizon", &format!("{:?}", 10.0 * dt), "--out", out.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}
