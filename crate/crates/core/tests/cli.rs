use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use drbgdisc::points::load_points;
use drbgdisc::stardisc::{star_discrepancy_exact, Budget};

const SEED: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f202122232425262728292a2b2c2d2e2f";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drbgdisc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_then_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    stdout(&run(&["generate", "--d", "3", "--n", "25", "--p", "12", "--seed", SEED, "--out", p(&pts)]));
    let ps = load_points(&pts).unwrap();
    assert_eq!((ps.dim(), ps.len(), ps.precision().bits()), (3, 25, 12));
    let expect = star_discrepancy_exact(&ps, Budget::unlimited()).unwrap();

    let out = stdout(&run(&["discrepancy", "--in", p(&pts)]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "value,witness,kind,open_count,closed_count,certified,elapsed_ms");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), expect.value);
    assert_eq!(row[2], expect.kind.as_str());
    assert_eq!(row[5], "true");
    assert!(lines.next().unwrap().starts_with("D* = "));

    let oracle = stdout(&run(&["discrepancy", "--in", p(&pts), "--oracle", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&oracle).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), expect.value);
}

#[test]
fn generate_to_stdout_is_reproducible() {
    let a = stdout(&run(&["generate", "--d", "2", "--n", "5", "--seed", SEED]));
    let b = stdout(&run(&["generate", "--d", "2", "--n", "5", "--seed", SEED, "--decimal"]));
    assert!(a.starts_with("# drbgdisc point set\n# d=2 N=5 p=52\n"));
    let strip = |s: &str| s.lines().map(|l| l.split(" #").next().unwrap().to_string()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    assert!(b.contains(" # 0."));
}

#[test]
fn entropy_seed_is_echoed() {
    let o = run(&["generate", "--d", "1", "--n", "2", "--entropy"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed (from entropy): "));
}

#[test]
fn bound_reports() {
    let out = stdout(&run(&["bound", "--formula", "hnww", "--d", "5", "--epsilon", "0.25", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bound_value"].as_f64().unwrap(), 512.0);
    let out = stdout(&run(&["bound", "--formula", "corollary1", "--c", "16", "--d", "10", "--n", "1024"]));
    assert!(out.contains("= 58"), "{out}");
    let out = stdout(&run(&["bound", "--formula", "theorem1", "--d", "5", "--n", "100", "--c", "13"]));
    assert!(out.contains("security"));
}

#[test]
fn inverse_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = stdout(&run(&[
        "inverse", "--d", "2", "--epsilon", "0.3", "--cap", "80", "--seed", SEED, "--trace", p(&trace),
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("N,dstar\n"));
    assert_eq!(csv.lines().count() - 1, v["trace"].as_array().unwrap().len());
    if v["outcome"] == "found" {
        assert!(v["achieved"].as_f64().unwrap() <= 0.3);
    }
}

#[test]
fn sweep_from_config_is_byte_reproducible_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        format!("# small sweep\nd = 2, 3\nN = 8, 16\nseeds_per_cell = 2\nseed = {SEED}\n"),
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("svg");
    stdout(&run(&["sweep", "--config", p(&cfg), "--csv", p(&a), "--svg-dir", p(&svg)]));
    stdout(&run(&["sweep", "--config", p(&cfg), "--csv", p(&b)]));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(svg.join("sweep_d2.svg").exists() && svg.join("sweep_d3.svg").exists());

    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 2 * 2);

    let replot = dir.path().join("replot");
    let listed = stdout(&run(&["plot", "sweep", "--csv", p(&a), "--out-dir", p(&replot)]));
    assert_eq!(listed.lines().count(), 2);
    assert_eq!(
        fs::read(replot.join("sweep_d2.svg")).unwrap(),
        fs::read(svg.join("sweep_d2.svg")).unwrap()
    );
}

#[test]
fn plot_points_draws_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    let svg = dir.path().join("pts.svg");
    stdout(&run(&["generate", "--d", "2", "--n", "13", "--seed", SEED, "--out", p(&pts)]));
    stdout(&run(&["plot", "points", "--in", p(&pts), "--out", p(&svg)]));
    let s = fs::read_to_string(&svg).unwrap();
    assert_eq!(s.matches("class=\"point\"").count(), 13);
    assert_eq!(s.matches("class=\"witness\"").count(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--formula", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "--d", "2", "--n", "2", "--seed", "abcd"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("big.txt");
    stdout(&run(&["generate", "--d", "7", "--n", "30", "--seed", SEED, "--out", p(&pts)]));
    let o = run(&["discrepancy", "--in", p(&pts), "--oracle"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["discrepancy", "--in", p(&missing)]).status.code(), Some(3));
}
