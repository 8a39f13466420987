//! One line per criterion: `PASS criterion N: ...` or `FAIL criterion N: ...`.
//! Each criterion also fails its test when red, so `cargo test` reports it.

use std::process::Command;
use std::time::Instant;

use weakdecay::harness::check::{self, PropertyReport};

const BIN: &str = env!("CARGO_BIN_EXE_weakdecay");

fn report(criterion: u8, extra: Option<(bool, String)>) {
    let reports = check::run_criterion(criterion);
    assert!(!reports.is_empty());
    let mut parts: Vec<String> = reports.iter().map(describe).collect();
    let mut pass = reports.iter().all(|r| r.pass);
    if let Some((ok, detail)) = extra {
        pass &= ok;
        parts.push(detail);
    }
    let line = format!(
        "{} criterion {criterion}: {}",
        if pass { "PASS" } else { "FAIL" },
        parts.join("; ")
    );
    println!("{line}");
    assert!(pass, "{line}");
}

fn describe(r: &PropertyReport) -> String {
    format!(
        "{} {} [{}] ({:.2} s)",
        r.id,
        if r.pass { "ok" } else { "FAILED" },
        r.detail,
        r.seconds
    )
}

fn seconds_within(criterion: u8, limit: f64) -> (bool, String) {
    let start = Instant::now();
    let ok = check::run_criterion(criterion).iter().all(|r| r.pass);
    let s = start.elapsed().as_secs_f64();
    (
        ok && s < limit,
        format!("runtime {s:.2} s (limit {limit} s)"),
    )
}

#[test]
fn criterion_01_spin_closed_forms() {
    report(1, Some(seconds_within(1, 1.0)));
}

#[test]
fn criterion_02_reduction_identities() {
    report(2, None);
}

#[test]
fn criterion_03_weak_equals_strong() {
    report(3, None);
}

#[test]
fn criterion_04_exponential_law() {
    report(4, Some(seconds_within(4, 60.0)));
}

#[test]
fn criterion_05_decay_laws() {
    report(5, None);
}

#[test]
fn criterion_06_long_window() {
    report(6, None);
}

#[test]
fn criterion_07_sum_rules() {
    report(7, None);
}

#[test]
fn criterion_08_lattice_sums() {
    report(8, None);
}

#[test]
fn criterion_09_decomposition() {
    report(9, None);
}

#[test]
fn criterion_10_harness() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(BIN)
            .args([
                "decay",
                "--set",
                "post=asymptotic",
                "--set",
                "n_points=51",
                "--threads",
                threads,
            ])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.code().is_some());
        csvs.push(std::fs::read(&out).unwrap());
    }
    let identical = csvs[0] == csvs[1];

    let check = Command::new(BIN).arg("check").output().unwrap();
    let stdout = String::from_utf8_lossy(&check.stdout);
    let listed = check::properties()
        .iter()
        .all(|p| stdout.contains(&format!(" {}:", p.id)));
    let exit = check.status.code();
    let ok = identical && listed && exit == Some(0);
    report(
        10,
        Some((ok, format!("cli csv identical {identical}; check lists every property {listed}; check exit {exit:?}"))),
    );
}
