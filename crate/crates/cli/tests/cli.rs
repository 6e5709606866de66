use std::path::Path;
use std::process::{Command, Output};

use bolab_core::io::{parse_config, read_file, trace_from_csv, trajectory_from_text, Summary};

fn bolab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bolab"));
    cmd.args(args).env_remove("BOLAB_OUT");
    if let Some(dir) = env_out {
        cmd.env("BOLAB_OUT", dir);
    }
    cmd.output().expect("bolab runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const SMALL: [&str; 6] = [
    "--max-mode",
    "16",
    "--horizon",
    "0.01",
    "--set",
    "solver.stride=10",
];

fn with_small<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(SMALL).collect()
}

#[test]
fn simulate_writes_readable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = bolab(&with_small(&["simulate", "-o", out]), None);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));

    let summary_path = dir.path().join("simulate.json");
    let summary = Summary::from_json(&read_file(&summary_path).unwrap(), &summary_path).unwrap();
    assert!(summary.passed);
    assert_eq!(summary.experiment, "simulate");

    let trace_path = dir.path().join("simulate.csv");
    let trace = trace_from_csv(&read_file(&trace_path).unwrap(), &trace_path).unwrap();
    let traj_path = dir.path().join("trajectory.txt");
    let traj = trajectory_from_text(&read_file(&traj_path).unwrap(), &traj_path).unwrap();
    assert_eq!(trace.times(), traj.times);
    assert_eq!(traj.snapshots[0].max_mode(), 16);

    let cfg = parse_config(&read_file(&dir.path().join("config.toml")).unwrap()).unwrap();
    assert_eq!(
        (cfg.solver.max_mode, cfg.solver.horizon, cfg.solver.stride),
        (16, 0.01, 10)
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let run = bolab(
            &with_small(&["energy-monitor", "-o", dir.path().to_str().unwrap()]),
            None,
        );
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    }
    for name in ["config.toml", "energy-monitor.csv", "energy-monitor.json"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[equation]\ngamma = 1.5\n").unwrap();
    let run = bolab(&["simulate", "-c", config.to_str().unwrap()], None);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 2"));

    assert_eq!(
        code(&bolab(&["simulate", "--set", "solver.dt=-1"], None)),
        2
    );
    assert_eq!(code(&bolab(&["plot"], None)), 2);
    assert_eq!(
        code(&bolab(
            &["simulate", "-c", "/nonexistent/config.toml"],
            None
        )),
        2
    );
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    assert_eq!(
        code(&bolab(
            &with_small(&["simulate", "-o", out.to_str().unwrap()]),
            None
        )),
        3
    );
}

#[test]
fn failed_check_exits_with_four() {
    // at 16 modes most mollifier scales leave the data untouched, so no
    // rate can be measured and the slope checks fail
    let dir = tempfile::tempdir().unwrap();
    let run = bolab(
        &with_small(&["bona-smith", "-o", dir.path().to_str().unwrap()]),
        None,
    );
    assert_eq!(code(&run), 4);
    assert!(String::from_utf8_lossy(&run.stdout).contains("FAIL"));
    let path = dir.path().join("bona-smith.json");
    assert!(
        !Summary::from_json(&read_file(&path).unwrap(), &path)
            .unwrap()
            .passed
    );
}

#[test]
fn output_directory_precedence() {
    let (env_dir, flag_dir, file_dir) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let run = bolab(&with_small(&["simulate"]), Some(env_dir.path()));
    assert_eq!(code(&run), 0);
    assert!(env_dir.path().join("simulate.json").exists());

    let config = file_dir.path().join("run.toml");
    let target = file_dir.path().join("from-file");
    std::fs::write(
        &config,
        format!("[run]\nout = {:?}\n", target.to_str().unwrap()),
    )
    .unwrap();
    let run = bolab(
        &with_small(&["simulate", "-c", config.to_str().unwrap()]),
        Some(env_dir.path()),
    );
    assert_eq!(code(&run), 0);
    assert!(target.join("simulate.json").exists());

    let run = bolab(
        &with_small(&[
            "simulate",
            "-c",
            config.to_str().unwrap(),
            "-o",
            flag_dir.path().to_str().unwrap(),
        ]),
        None,
    );
    assert_eq!(code(&run), 0);
    assert!(flag_dir.path().join("simulate.json").exists());
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[solver]\ndt = 1e-3\nmax_mode = 64\n").unwrap();
    let run = bolab(
        &[
            "simulate",
            "-c",
            config.to_str().unwrap(),
            "--dt",
            "5e-4",
            "--dry-run",
        ],
        None,
    );
    assert_eq!(code(&run), 0);
    let cfg = parse_config(&String::from_utf8(run.stdout).unwrap()).unwrap();
    assert_eq!((cfg.solver.dt, cfg.solver.max_mode), (5e-4, 64));
}
