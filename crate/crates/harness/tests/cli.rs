use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn translab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_translab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn fourier_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.conf", "[fourier]\nmeasure = atoms(0.5:1; -1:0.5+0.5i)\n");
    let a = translab(&["fourier", "--config", &cfg, "--seed", "7"]);
    let b = translab(&["fourier", "--config", &cfg, "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("xi,re,im,abs"));
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn kfunctional_columns_and_min_form_bound() {
    let out = translab(&["kfunctional", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,K,upper_bound_min_form"));
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= v[2] * (1.0 + 1e-9), "{l}");
    }
}

#[test]
fn suite_output_is_deterministic_and_exit_codes_follow_failures() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.conf", "seed = 5\n[partition]\n[pv-convergence]\n");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let r1 = translab(&["suite", "--config", &ok, "--out", a.to_str().unwrap(), "--summary"]);
    let r2 = translab(&["suite", "--config", &ok, "--out", b.to_str().unwrap()]);
    assert!(r1.status.success() && r2.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let table = stdout(&r1);
    assert!(table.contains("partition") && table.contains("PASS"), "{table}");

    let failing = write(dir.path(), "bad.conf", "[partition]\ntol.unity = -1\n");
    let r = translab(&["suite", "--config", &failing]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn corrupted_calibration_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cal = write(dir.path(), "cal.conf", "[mikhlin-bound]\ntheta = 0.5\nq = 2\np = 2\ngrid = matrix4\nc_cal = -3\n");
    let cfg = write(dir.path(), "s.conf", "[partition]\n");
    let r = translab(&["suite", "--config", &cfg, "--calibration", &cal]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("config error"));

    let garbage = write(dir.path(), "garbage.conf", "c_cal 3\n");
    let r = translab(&["transfer-check", "--calibration", &garbage]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn transfer_check_freezes_its_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.conf");
    let cal = cal.to_str().unwrap();
    let args = ["transfer-check", "--mode", "bounded", "--theta", "0.4", "--q", "2", "--p", "2", "--probes", "3", "--seed", "11", "--calibration", cal];
    let first = translab(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let text = stdout(&first);
    assert_eq!(text.lines().next(), Some("probe_id,lhs,rhs,ratio"));
    // three random states plus three single frequencies at the symbol peaks
    assert_eq!(text.lines().count(), 7);
    let frozen = fs::read_to_string(cal).unwrap();
    assert!(frozen.contains("[transfer-check]") && frozen.contains("c_cal"));
    let second = translab(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(fs::read_to_string(cal).unwrap(), frozen);
}

#[test]
fn config_diagnostics_name_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "[besov-norm]\np = 2\ntheta = 3\n");
    let r = translab(&["besov-norm", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line 3") && err.contains("theta"), "{err}");
}

#[test]
fn refine_accepts_only_zero_or_one() {
    assert!(!translab(&["fourier", "--refine", "2"]).status.success());
    assert!(translab(&["fourier", "--refine", "1"]).status.success());
}

#[test]
fn remaining_subcommands_produce_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.conf",
        "[besov-norm]\nfunction = gauss\n[mikhlin-norm]\nmeasure = gaussian(1, 8, 0.0625)\n[gw-bound]\nmeasure = dirac(0)\nhalf_length = 8\nsamples = 128\n[pv-check]\ngroup = mult\nsymbol = sine(1, 0.5)\nfunction = const(1)\n[calculus-bound]\ngroup = matrix\nmatrix = jordan(3, 0.5)\nfunction = inv_shift(2i)\nprobes = 2\n",
    );
    for (cmd, header) in [
        ("besov-norm", "function,r,p,q,norm"),
        ("mikhlin-norm", "mikhlin_norm,sup_abs"),
        ("gw-bound", "k,log2_a,block_norm,bound"),
        ("pv-check", "experiment,case,check,lhs,rhs,ratio,tolerance,pass,refine"),
        ("calculus-bound", "experiment,case,check,lhs,rhs,ratio,tolerance,pass,refine"),
    ] {
        let r = translab(&[cmd, "--config", &cfg, "--summary"]);
        assert!(r.status.success(), "{cmd}: {}", String::from_utf8_lossy(&r.stderr));
        assert_eq!(stdout(&r).lines().next(), Some(header), "{cmd}");
    }
}
