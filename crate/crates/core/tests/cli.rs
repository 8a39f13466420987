use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_weakdecay");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const MINUS_X: &str = "\
# evolved -x post-selection, half a turn
omega = 1
phase = 3.141592653589793
post = x_minus
observable = p_x_minus
reference = printed
n_points = 41
";

#[test]
fn spin_scenario_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "spin.cfg", MINUS_X);
    let out = dir.path().join("spin.csv");
    let o = run(&["spin", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,value_re,value_im,reference_re,reference_im,abs_error")
    );
    assert_eq!(csv.lines().count(), 42);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    let summary: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(summary["pass"], true);
    assert!(summary["max_abs_error"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.cfg",
        "n_half = 150\npost = asymptotic\nn_points = 25\n",
    );
    let mut outputs = Vec::new();
    for threads in ["1", "1", "3"] {
        let o = run(&["decay", "--config", &cfg, "--threads", threads]);
        assert_eq!(code(&o), 1, "small bath misses the 1e-2 tolerance");
        outputs.push(o.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn grid_outside_window_is_invalid_input() {
    let o = run(&["spin", "--set", "t_f=1", "--set", "t_end=2"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("t_end"), "{err}");
}

#[test]
fn unknown_key_is_invalid_input() {
    let o = run(&["sums", "--set", "gama=1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("gama"));
}

#[test]
fn missing_config_file_is_invalid_input() {
    let o = run(&["spin", "--config", "/nonexistent/spin.cfg"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn subcommand_and_model_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", "model = spin\n");
    assert_eq!(code(&run(&["decay", "--config", &cfg])), 2);
}

#[test]
fn tolerance_breach_exits_one() {
    let o = run(&[
        "sums",
        "--set",
        "delta_e=0.5",
        "--set",
        "k_max=100",
        "--set",
        "tolerance=1e-9",
    ]);
    assert_eq!(code(&o), 1);
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(summary["pass"], false);
}

#[test]
fn default_decay_scenario_passes() {
    let o = run(&["decay", "--set", "n_points=21"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_marks_levels_past_recurrence() {
    let o = run(&[
        "sweep",
        "--set",
        "model=decay",
        "--set",
        "bandwidth=100",
        "--set",
        "levels=20,250,500",
        "--set",
        "n_points=11",
    ]);
    let csv = String::from_utf8(o.stdout.clone()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n_half,delta_e,max_abs_error,status");
    assert!(
        lines[1].starts_with("20,") && lines[1].contains("BeyondRecurrence"),
        "{csv}"
    );
    assert!(
        lines[2].ends_with(",ok") && lines[3].ends_with(",ok"),
        "{csv}"
    );
    assert!(code(&o) <= 1);
}

#[test]
fn single_level_sweep_has_no_trend() {
    let o = run(&[
        "sweep",
        "--set",
        "model=decay",
        "--set",
        "levels=300",
        "--set",
        "n_points=11",
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(summary["trend"], "n/a");
}
