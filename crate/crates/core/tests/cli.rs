use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iontrap-unruh")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn ratio_value() {
    let out = bin(&["ratio", "--kappa", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "nu,kappa,nu_over_kappa,z,ratio,unruh_temp,prefactor");
    assert!(lines[1].contains(",4.32139182638e-2,"), "{}", lines[1]);
}

#[test]
fn modes_for_three_ions() {
    let out = bin(&["modes", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(3).unwrap().starts_with("3,5.80000000000e0,"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["scan", "--y-t", "100", "--n", "2", "--rabi-hz", "0.01"];
    let (a, b) = (bin(&args), bin(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 34);
}

#[test]
fn two_point_sweep_hits_both_ends() {
    let out = bin(&["scan", "--y-t", "10", "--delta-min", "0.5", "--delta-max", "2", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("5.00000000000e-1,"));
    assert!(rows[1].starts_with("2.00000000000e0,"));
}

#[test]
fn pole_row_is_nan() {
    let out = bin(&["scan", "--y-t", "10", "--delta-min", "-1", "--delta-max", "1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(2).unwrap().ends_with("nan,nan,pole"));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["scan", "--y-t", "10", "--kappa", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["scan", "--y-t", "10", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["scan"]).status.code(), Some(2));
    assert_eq!(bin(&["scan", "--y-t", "10", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["scan", "--y-t", "10", "--kappa", "1e-300"]).status.code(), Some(3));
    assert_eq!(bin(&["modes", "--config", "/nonexistent/dir/run.cfg"]).status.code(), Some(2));
    assert_eq!(bin(&["modes", "--out", "/nonexistent/dir/out.csv"]).status.code(), Some(1));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# comment\nkappa = 2\n\nnu_hz = 0.15915494309189535  # 1 rad/s\n").unwrap();
    let path = cfg.to_str().unwrap();
    let out = bin(&["ratio", "--config", path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(",4.32139182638e-2,"));
    let out = bin(&["ratio", "--config", path, "--kappa", "1"]);
    assert!(stdout(&out).contains(",1.00000000000e0,6.28318530718e0,"));

    let target = dir.path().join("out.csv");
    let out = bin(&["ratio", "--config", path, "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&target).unwrap().starts_with("nu,kappa"));
}

#[test]
fn bad_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.cfg", "kappa = 1\ncolour = blue\n", "colour"),
        ("malformed.cfg", "kappa = fast\n", "kappa"),
        ("noeq.cfg", "kappa 1\n", "line 1"),
    ];
    for (name, body, needle) in cases {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        let out = bin(&["ratio", "--config", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{name}");
    }
    let p = dir.path().join("missing.cfg");
    fs::write(&p, "kappa = 1\n").unwrap();
    let out = bin(&["scan", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_stop"));
}

#[test]
fn oracle_check_agrees_on_double_integral() {
    let out = bin(&[
        "oracle-check", "--y-t", "10", "--rabi-hz", "1.5915494309189535e-3",
        "--delta-min", "0.5", "--delta-max", "1", "--steps", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        let rel_double: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(rel_double < 1e-6, "{line}");
    }
}
