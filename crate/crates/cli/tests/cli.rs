use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrsteer"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn analyze_maximal_werner() {
    let out = run(&["analyze", "werner:1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let j = json(&out);
    assert!((num(&j["sigma"]["value"]) - 0.5).abs() < 1e-12);
    assert!((num(&j["S3"]) - 1.0).abs() < 1e-12);
    assert_eq!(j["classification"]["nonclassical"], "yes");
    assert_eq!(j["classification"]["bell_nonlocal"], true);
    assert_eq!(j["physical"], true);
    for key in ["r", "s", "T", "canonical", "s2", "s3", "S2", "chsh_max", "sigma_lower", "sigma_upper"] {
        assert!(!j[key].is_null(), "missing {key}");
    }
}

#[test]
fn analyze_product_state() {
    let out = run(&["analyze", "pure:1:phi+"]);
    assert!(out.status.success());
    let j = json(&out);
    assert!((num(&j["sigma"]["value"]) - 0.25).abs() < 1e-12);
    assert!((num(&j["s3"]) - 1.0).abs() < 1e-12);
    assert_eq!(num(&j["S3"]), 0.0);
}

#[test]
fn analyze_unphysical_warns_but_reports() {
    let out = run(&["analyze", "belldiag:0.8,1,1"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
    assert!(!stderr(&out).contains('\x1b'));
    let j = json(&out);
    assert_eq!(j["physical"], false);
    assert!((num(&j["min_eigenvalue"]) + 0.45).abs() < 1e-12);
    assert!(num(&j["sigma"]["value"]) > 0.25);
}

#[test]
fn analyze_methods_agree() {
    let get = |m: &str| num(&json(&run(&["analyze", "mems:0.8", "--method", m]))["sigma"]["value"]);
    let auto = get("auto");
    assert!((get("single") - auto).abs() < 1e-10);
    assert!((get("double") - auto).abs() < 1e-8);
    let mc = json(&run(&["analyze", "mems:0.8", "--method", "mc", "--mc-samples", "200000", "--seed", "3"]));
    assert_eq!(mc["sigma"]["method"], "mc");
    assert!((num(&mc["sigma"]["value"]) - auto).abs() < 4.0 * num(&mc["sigma"]["error"]));
}

#[test]
fn analyze_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let bloch = dir.path().join("bloch.json");
    std::fs::write(&bloch, r#"{"bloch": {"r": [0,0,0], "s": [0,0,0], "T": [[-0.6,0,0],[0,-0.6,0],[0,0,-0.6]]}}"#).unwrap();
    let j = json(&run(&["analyze", bloch.to_str().unwrap()]));
    assert!((num(&j["sigma"]["value"]) - 0.3).abs() < 1e-12);

    let matrix = dir.path().join("matrix.json");
    let q = "[0.25,0]";
    let z = "[0,0]";
    let row = |k: usize| {
        let cells: Vec<&str> = (0..4).map(|i| if i == k { q } else { z }).collect();
        format!("[{}]", cells.join(","))
    };
    let rows: Vec<String> = (0..4).map(row).collect();
    std::fs::write(&matrix, format!(r#"{{"matrix": [{}]}}"#, rows.join(","))).unwrap();
    let j = json(&run(&["analyze", matrix.to_str().unwrap()]));
    assert_eq!(num(&j["sigma"]["value"]), 0.0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"matrix": [[[1,0]]], "extra": 1}"#).unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["analyze", "nonsense"][..],
        &["analyze", "werner:1.5"],
        &["evolve", "--c", "1,2", "--channel", "gad"],
        &["evolve", "--c", "0.5,0.5,0.5", "--channel", "nope"],
        &["evolve", "--c", "0.5,0.5,0.5", "--channel", "gad", "--kappa-over-gamma", "0.1"],
        &["bounds", "--samples", "0"],
        &["deathtimes", "--c", "0.8", "--channel", "gad"],
        &["scan", "belldiag"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    assert!(run(&["--help"]).status.success());
}

#[test]
fn evolve_unital_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    let out = run(&[
        "evolve", "--c", "0.8,1,1", "--channel", "phaseflip", "--gamma", "1", "--tmax", "5", "--steps", "500", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("unphysical"));
    let (header, rows) = read_csv(&path);
    assert_eq!(
        header.join(","),
        "t,p,c1,c2,c3,alpha,beta,gamma,sigma,two_sigma,s2,s3,S2,S3,physical"
    );
    assert_eq!(rows.len(), 500);
    for name in ["sigma", "s2", "s3"] {
        let v = column(&header, &rows, name);
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{name}");
    }
}

#[test]
fn evolve_gad_shows_revival() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = run(&[
        "evolve", "--c", "1,1,0.8", "--channel", "gad", "--kappa-over-gamma", "200", "--tmax", "5", "--steps", "2000",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&path);
    let sigma = column(&header, &rows, "sigma");
    let first_drop = sigma.iter().position(|&s| s <= 0.25).expect("sigma decays below 1/4");
    assert!(sigma[first_drop..].iter().any(|&s| s > 0.25), "sigma revives");
}

#[test]
fn evolve_first_row_matches_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    let out = run(&[
        "evolve", "--c", "0.3,-0.2,0.5", "--channel", "bitflip", "--tmax", "1", "--steps", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&path);
    assert_eq!(rows.len(), 2);
    let j = json(&run(&["analyze", "belldiag:0.3,-0.2,0.5"]));
    let sigma = column(&header, &rows, "sigma")[0];
    assert!((sigma - num(&j["sigma"]["value"])).abs() < 1e-15);
    assert_eq!(column(&header, &rows, "s3")[0], num(&j["s3"]));
}

#[test]
fn outputs_are_reproducible_and_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("b{k}.csv"));
        let summary = dir.path().join(format!("s{k}.json"));
        let out = run(&[
            "bounds", "--samples", "500", "--seed", "9", "--out", csv.to_str().unwrap(), "--summary",
            summary.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        files.push((std::fs::read(&csv).unwrap(), std::fs::read(&summary).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    let (header, rows) = read_csv(&dir.path().join("b0.csv"));
    assert_eq!(header.join(","), "s3,sigma,lower,upper,physical");
    assert_eq!(rows.len(), 500);
    for r in &rows {
        assert_eq!(r.len(), 5);
        for x in &r[..4] {
            x.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn bounds_summary_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let curves = dir.path().join("c.csv");
    let summary = dir.path().join("s.json");
    let out = run(&[
        "bounds", "--samples", "2000", "--seed", "42", "--out", csv.to_str().unwrap(), "--curves",
        curves.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["n3"]["violations"], 0);
    assert_eq!(s["n2"]["violations"], 0);
    assert!(num(&s["n3"]["max_excess"]) <= 1e-7);
    let (header, rows) = read_csv(&curves);
    assert_eq!(header[0], "s");
    assert_eq!(rows.len(), 301);
}

#[test]
fn bounds_single_sample() {
    let out = run(&["bounds", "--samples", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bounds_pure_states_follow_lower_branch() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = run(&["bounds", "--sampler", "pure", "--samples", "1000", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&csv);
    let s3 = column(&header, &rows, "s3");
    let sigma = column(&header, &rows, "sigma");
    let lower = column(&header, &rows, "lower");
    let upper = column(&header, &rows, "upper");
    for i in 0..rows.len() {
        assert!(s3[i] >= 1.0 - 1e-12);
        assert!(sigma[i] <= upper[i] + 1e-7);
        assert!(sigma[i] >= lower[i] - 1e-7);
    }
}

#[test]
fn deathtimes_report() {
    let out = run(&["deathtimes", "--c", "0.8", "--gamma", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let j = json(&out);
    let t = &j["times"];
    assert!((num(&t["t_s2"]["analytic"]) - 0.14384).abs() < 1e-5);
    assert!((num(&t["t_s3"]["analytic"]) - 0.31713).abs() < 1e-5);
    assert!((num(&t["t_sigma"]["analytic"]) - 0.488_14).abs() < 1e-5);
    for k in ["t_s2", "t_s3", "t_sigma"] {
        assert!(num(&t[k]["rel_diff"]) < 1e-5);
    }

    let j = json(&run(&["deathtimes", "--c", "0.5"]));
    assert_eq!(j["times"]["t_s2"]["analytic"], "inf");
    assert_eq!(j["times"]["t_s3"]["analytic"], "inf");
    assert_eq!(j["times"]["t_s3"]["numeric"], "inf");
}

#[test]
fn deathtimes_scale_with_gamma() {
    let t1 = num(&json(&run(&["deathtimes", "--c", "0.9"]))["times"]["t_sigma"]["numeric"]);
    let t2 = num(&json(&run(&["deathtimes", "--c", "0.9", "--gamma", "2"]))["times"]["t_sigma"]["numeric"]);
    assert!((t1 / t2 - 2.0).abs() < 1e-9);
}

#[test]
fn verify_passes() {
    let out = run(&["verify", "--samples", "1000", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn scan_werner() {
    let out = run(&["scan", "werner", "--points", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    let last: Vec<f64> = lines[11].split(',').take(11).map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[4] - 0.5).abs() < 1e-12);
}
