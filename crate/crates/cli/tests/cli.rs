use std::fs;
use std::process::{Command, Output};

fn surfgm(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_surfgm"));
    cmd.args(args).env_remove("SURFGM_OUTPUT_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn preset_text(extra: &[&str]) -> String {
    let mut args = vec!["preset"];
    args.extend_from_slice(extra);
    let out = surfgm(&args, &[]);
    assert!(out.status.success());
    stdout(&out)
}

#[test]
fn mesh_report_and_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.vtk");
    let out = surfgm(&["mesh", "--level", "2", "--vtk", path.to_str().unwrap()], &[]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("vertices                   98"), "{text}");
    assert!(text.contains("euler characteristic       2"));
    assert!(text.contains("positive stiffness entries 0"));
    let vtk = fs::read_to_string(path).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("POINTS 98 double"));
}

#[test]
fn run_writes_output_to_the_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("case.toml");
    let text = preset_text(&["--ic", "spike2_180", "--k", "0.002", "--order", "1"])
        .replace("t_end = 100.0", "t_end = 0.01")
        .replace("csv_every = 1000", "csv_every = 10")
        .replace("snapshots = [0.0, 10.0, 20.0, 70.0, 100.0]", "snapshots = [0.0, 0.01]")
        .replace("level = 3", "level = 2");
    fs::write(&config, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = surfgm(&["run", config.to_str().unwrap()], &[("SURFGM_OUTPUT_DIR", out_dir.to_str().unwrap())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&out);
    assert!(report.contains("steps       100"), "{report}");
    let csv = fs::read_to_string(out_dir.join("spike2_180_k0.002_o1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 11);
    assert!(csv.starts_with("step,t,min_u,max_u"));
    assert!(out_dir.join("spike2_180_k0.002_o1_00000000.vtk").exists());
    assert!(out_dir.join("spike2_180_k0.002_o1_00000100.vtk").exists());
}

#[test]
fn bad_configuration_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "k = 1.0\nsigma = 0.01\nbogus = 3\n").unwrap();
    let out = surfgm(&["run", config.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    fs::write(&config, "k = 1.0\n").unwrap();
    let out = surfgm(&["run", config.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn positivity_loss_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("stiff.toml");
    fs::write(&config, preset_text(&["--ic", "spike2_180", "--k", "200000", "--order", "2"])).unwrap();
    let out = surfgm(&["run", config.to_str().unwrap(), "--t-end", "0.001"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("positivity") || err.contains("invariant"), "{err}");
}

#[test]
fn cases_prints_a_summary_row() {
    let out = surfgm(&["cases", "--order", "1", "--t-end", "0.01", "--filter", "spike2_180_k0.002"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("spike2_180")).collect();
    assert_eq!(rows.len(), 1, "{text}");
    assert!(rows[0].contains("2-spike symmetric"));
}

#[test]
fn unknown_study_is_rejected() {
    let out = surfgm(&["converge", "weekly"], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn preset_round_trips_through_the_parser() {
    let text = preset_text(&["--ic", "random", "--k", "200000", "--scale", "full", "--order", "1"]);
    assert!(text.contains("level = 5"));
    assert!(text.contains("t_end = 1000.0"));
    assert!(text.contains("ic = \"random\""));
    let out = surfgm(&["preset", "--k", "3.0"], &[]);
    assert_eq!(out.status.code(), Some(1));
}
