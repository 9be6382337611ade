use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tractlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tractlab"))
        .args(args)
        .env_remove("TRACTLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn eval_exponential_case() {
    let out = tractlab(&["eval", "--spec", "ml:1.0", "--z", "1+0i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let re = v["result"]["value"][0].as_f64().unwrap();
    assert!((re - std::f64::consts::E).abs() < 1e-12);
    assert_eq!(v["tool"], "tractlab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["spec"], "ml:1");
}

#[test]
fn sine_has_two_tracts() {
    let out = tractlab(&["tracts", "--spec", "sin", "--R", "10", "--annulus", "5:100", "--ntheta", "1024"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["n_components"], 2);
    let out = tractlab(&["tracts", "--spec", "sin", "--R", "10", "--expect", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schroeder_table() {
    let out = tractlab(&["schroeder", "--beta", "0.2", "--x", "1e6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["xi"].as_f64().unwrap() - 12.713).abs() < 1e-3);
    assert!(v["result"]["at"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(tractlab(&["hypothesis", "--spec", "exp"]).status.code(), Some(2));
    assert_eq!(tractlab(&["eval", "--spec", "nope", "--z", "1"]).status.code(), Some(1));
    assert_eq!(tractlab(&["eval", "--spec", "exp"]).status.code(), Some(1));
    assert_eq!(tractlab(&["eval", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(tractlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tractlab(&["--help"]).status.code(), Some(0));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["escape", "--spec", "sin", "--plane", "z", "--resolution", "96"];
    let run = |dir: &Path, threads: &str| {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--threads", threads, "--out-dir", dir.to_str().unwrap()]);
        let out = tractlab(&v);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let sa = run(a.path(), "1");
    let sb = run(b.path(), "4");
    assert_eq!(sa, sb);
    let (fa, fb) = (read_all(a.path()), read_all(b.path()));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["escape.csv", "escape.json", "escape.pgm", "escape.ppm"]);
    assert_eq!(fa, fb);
}

#[test]
fn file_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = tractlab(&[
        "escape", "--spec", "exp", "--resolution", "64", "--n-max", "4", "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let pgm = fs::read(dir.path().join("escape.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n# tractlab "));
    assert!(pgm.ends_with(&[]) && pgm.len() > 64 * 64);
    let header_end = pgm.windows(8).position(|w| w == b"64 64\n25").unwrap();
    assert_eq!(pgm.len(), header_end + "64 64\n255\n".len() + 64 * 64);
    let ppm = fs::read(dir.path().join("escape.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n"));
    let csv = fs::read_to_string(dir.path().join("escape.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,density");
    assert_eq!(rows.len(), 6);
    assert!(rows[1].starts_with("0,") && rows[1].split(',').nth(1).unwrap().parse::<f64>().is_ok());
    // the header carries the resolved config
    assert!(csv.lines().any(|l| l.starts_with("# config {") && l.contains("\"resolution\":64")));

    let out = tractlab(&["maxmod", "--spec", "exp", "--radii", "10:100:3", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("maxmod.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,value");
    let last: Vec<f64> = rows[3].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 100.0).abs() < 1e-9 && (last[1] - 100f64.ln()).abs() < 1e-9);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "spec = \"sin\"\nR = 10.0\nannulus = \"5:100\"\nout_dir = \"unused\"\n").unwrap();
    let env_dir = dir.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_tractlab"))
        .args(["tracts", "--config", cfg.to_str().unwrap(), "--ntheta", "512"])
        .env("TRACTLAB_OUT_DIR", &env_dir)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["result"]["n_components"], 2);
    assert_eq!(v["config"]["ntheta"], 512);
    assert_eq!(v["config"]["R"], 10.0);
    assert!(v["config"].get("out_dir").is_none());
    let saved = fs::read(env_dir.join("tracts.json")).unwrap();
    assert_eq!(saved, out.stdout);
    assert!(!dir.path().join("unused").exists());

    fs::write(&cfg, "spec = \"sin\"\nthreshold = 10.0\n").unwrap();
    assert_eq!(tractlab(&["tracts", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}
