//! End-to-end runs of the `gammasum` binary.

use std::process::{Command, Output};

fn gammasum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammasum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn hfun_exponential() {
    let o = gammasum(&["hfun", "--kind", "g", "--m", "1", "--n", "0", "--p", "0", "--q", "1", "--lower", "0,1,1", "--z", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("z,value,est_abs_error\n"));
    let rows = csv_rows(&text);
    assert!((rows[0][1] - 0.3678794412).abs() < 1e-10);
}

#[test]
fn pdf_grid_has_one_row_per_point() {
    let o = gammasum(&["pdf", "--m", "0.6,1.1,2", "--omega", "1,1,1", "--grid", "0.1:15:200"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0][0], 0.1);
    assert_eq!(rows[199][0], 15.0);
    let (peak, at) = rows.iter().fold((0.0, 0.0), |acc, r| if r[1] > acc.0 { (r[1], r[0]) } else { acc });
    assert!(peak > 0.25 && (1.5..2.5).contains(&at), "{peak} at {at}");
    // tail governed by the slowest rate m/Ω = 0.6
    assert!(rows[199][1] < 2e-4 && rows.iter().all(|r| r[1] >= 0.0));
}

#[test]
fn ber_family() {
    let o = gammasum(&["ber", "--m", "0.6,1.1,2,3.4,4.5", "--mod", "cbpsk,dbpsk,cbfsk,nbfsk", "--snr", "0:20:41"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("snr_db,ber_cbpsk,ber_dbpsk,ber_cbfsk,ber_nbfsk\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41);
    for r in &rows {
        assert!(r[1] < r[2] && r[2] < r[3] && r[3] < r[4], "{r:?}");
    }
}

#[test]
fn omega_profile_scales_with_snr() {
    let a = gammasum(&["ber", "--m", "1,2", "--omega", "1,0.5", "--mod", "dbpsk", "--snr", "0:10:2"]);
    let b = gammasum(&["ber", "--m", "1,2", "--omega", "10,5", "--mod", "dbpsk", "--snr", "1:10:2", "--linear"]);
    let (a, b) = (csv_rows(&stdout(&a)), csv_rows(&stdout(&b)));
    assert!((a[1][1] - b[0][1]).abs() < 1e-12 * a[1][1]);
}

#[test]
fn exit_codes() {
    assert_eq!(gammasum(&["pdf", "--m", "-1", "--grid", "0:1:3"]).status.code(), Some(3));
    assert_eq!(gammasum(&["pdf", "--m", "1", "--grid", "0:1"]).status.code(), Some(3));
    assert_eq!(gammasum(&["pdf", "--m", "1", "--grid", "1:0:3"]).status.code(), Some(3));
    assert_eq!(gammasum(&["ber", "--m", "1", "--mod", "qpsk", "--snr", "0:1:2"]).status.code(), Some(3));
    assert_eq!(gammasum(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(gammasum(&["--help"]).status.code(), Some(0));
    // one refinement at a tolerance below double precision cannot converge
    let o = gammasum(&["pdf", "--m", "0.6,1.1", "--grid", "1:2:2", "--rel-tol", "1e-17", "--abs-tol", "1e-300", "--max-refinements", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let e = gammasum(&["pdf", "--m", "1,2", "--omega", "1", "--grid", "0:1:3"]);
    assert!(String::from_utf8_lossy(&e.stderr).contains("branches.omega"));
}

#[test]
fn threads_do_not_change_output() {
    let args = ["cdf", "--m", "0.6,1.1,2", "--grid", "0:12:64"];
    let one = Command::new(env!("CARGO_BIN_EXE_gammasum")).args(args).env("GAMMASUM_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_gammasum")).args(args).env("GAMMASUM_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_gammasum")).args(args).env("GAMMASUM_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn validate_is_byte_stable() {
    let args = ["validate", "--m", "0.6,1.1", "--seed", "5", "--samples", "50000", "--grid", "0:8:9"];
    let a = gammasum(&args);
    let b = gammasum(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("y,empirical,analytic,abs_diff\n"));
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("# ks="), "{summary}");
    assert_eq!(csv_rows(&text).len(), 9);
    assert_eq!(gammasum(&["validate", "--m", "1", "--grid", "0:1:3"]).status.code(), Some(3));
}

#[test]
fn json_output() {
    let o = gammasum(&["outage", "--m", "1", "--grid", "0.5:1.5:3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["command"], "outage");
    assert_eq!(v["meta"]["columns"][0], "y_th");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!((rows[1][1].as_f64().unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-10);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "command = \"cdf\"\ngrid = { start = 0.5, stop = 1.5, points = 3 }\n[branches]\nm = [1.0]\n").unwrap();
    let o = gammasum(&["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert!((rows[0][1] - (1.0 - (-0.5f64).exp())).abs() < 1e-10);

    std::fs::write(&cfg, "command = \"cdf\"\ngrid = { start = 0.5, stop = 1.5, points = 3 }\n[branches]\nm = [-1.0]\n").unwrap();
    let o = gammasum(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("branches.m[0]"));
}

#[test]
fn emitted_config_runs_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.toml");
    let args = ["ber", "--m", "0.6,2", "--mod", "cbfsk,custom(1,0.25)", "--snr", "-5:5:3"];
    let emitted = gammasum(&[&args[..], &["--emit-config"]].concat());
    assert!(emitted.status.success(), "{}", String::from_utf8_lossy(&emitted.stderr));
    std::fs::write(&cfg, &emitted.stdout).unwrap();
    let direct = gammasum(&args);
    let via = gammasum(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(direct.status.success());
    assert_eq!(direct.stdout, via.stdout);
    assert!(stdout(&direct).starts_with("snr_db,ber_cbfsk,ber_custom_1_0.25\n"));
}
