use std::process::Command;

use eisenzero_cli::{exit, run};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("eisenzero").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn eval_at_the_cusp() {
    let v = json(&["eval", "--kind", "E", "--k", "23", "--tau", "inf"]);
    assert_eq!(v["re"], 1.0);
    assert_eq!(v["im"], 0.0);
}

#[test]
fn eval_sign_at_first_vertical_point() {
    let v = json(&["eval", "--kind", "GG", "--k", "23", "--tau", "0.5+3.63271i"]);
    assert!(v["re"].as_f64().unwrap() < 0.0);
    assert!(v["im"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn eval_g_is_zeta_times_e() {
    let g = json(&["eval", "--kind", "G", "--k", "5", "--tau", "0+2i"]);
    let e = json(&["eval", "--kind", "E", "--k", "5", "--tau", "0+2i"]);
    let zeta5 = 1.036_927_755_143_37;
    for part in ["re", "im"] {
        let (a, b) = (g[part].as_f64().unwrap(), e[part].as_f64().unwrap());
        assert!((a - zeta5 * b).abs() < 1e-12, "{part}: {a} vs {b}");
    }
}

#[test]
fn eval_errors() {
    assert_eq!(call(&["eval", "--kind", "E", "--k", "5", "--tau", "0.5-2i"]).0, exit::PARSE);
    assert_eq!(call(&["eval", "--kind", "E", "--k", "5", "--tau", "banana"]).0, exit::PARSE);
    assert_eq!(call(&["eval", "--kind", "X", "--k", "5", "--tau", "i"]).0, exit::PARSE);
    let (code, _, err) = call(&["eval", "--kind", "E", "--k", "3", "--tau", "0.5+1.2i", "--lambda", "1/2"]);
    assert_eq!(code, exit::ACCURACY, "{err}");
}

#[test]
fn count_examples() {
    let v = json(&["count", "--kind", "E", "--k", "23", "--lambda", "inf"]);
    assert_eq!(v["count"], "2");
    let v = json(&["count", "--kind", "GG", "--k", "23", "--lambda", "inf"]);
    assert_eq!(v["count"], "4");
    assert_eq!(v["method"], "sign_change");
    let v = json(&["count", "--kind", "E", "--k", "4", "--lambda", "7/3"]);
    assert_eq!(v["count"], "1/3");
    let v = json(&["count", "--kind", "E", "--k", "11", "--lambda", "-0.4"]);
    assert_eq!(v["lambda"], "-2/5");
    assert_eq!(v["count"], "1");
}

#[test]
fn unreliable_snap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.conf");
    // rounding alone keeps every raw count further than this from k/12
    std::fs::write(&p, "snap_tol = 1e-30\n").unwrap();
    let (code, _, err) = call(&["--config", p.to_str().unwrap(), "count", "--kind", "E", "--k", "4", "--lambda", "7/3"]);
    assert_eq!(code, exit::UNRELIABLE_SNAP, "{err}");
    assert_eq!(call(&["count", "--kind", "E", "--k", "2", "--lambda", "inf"]).0, exit::PARSE);
}

#[test]
fn zeros_csv_and_json() {
    let (code, out, _) = call(&["zeros", "--kind", "E", "--k", "23", "--lambda", "inf"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "kind,k,lambda,re,im,residual,is_cusp,domain_tag");
    assert_eq!(lines.len(), 3);
    let v = json(&["--json", "zeros", "--kind", "GG", "--k", "23", "--lambda", "inf"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r["is_cusp"] == true).count(), 1);
}

#[test]
fn figure_rows() {
    let (code, out, _) = call(&["figure", "--kind", "E", "--k", "23", "--lambdas", "0,1/2,-1/2,1,-1,inf", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 12);
    let (_, out, _) = call(&["figure", "--kind", "GG", "--k", "23", "--lambdas", "inf"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r.contains(",true,")).count(), 1);
    let (_, out, _) = call(&["figure", "--kind", "E", "--k", "23", "--lambdas", ""]);
    assert_eq!(out, "kind,k,lambda,re,im,residual,is_cusp,domain_tag\n");
}

#[test]
fn figure_is_deterministic() {
    let args = ["figure", "--kind", "E", "--k", "17", "--lambdas", "1/3,inf", "--shifts", "0,1"];
    let a = call(&args).1;
    let b = call(&args).1;
    assert_eq!(a, b);
    // two zeros at λ = 1/3, one at ∞, each at two shifts
    assert_eq!(a.lines().count(), 1 + 3 * 2);
    for row in a.lines().skip(1) {
        let re = row.split(',').nth(3).unwrap();
        let digits: String = re.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
        assert_eq!(digits.len(), 17, "{re}");
    }
}

#[test]
fn figure_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e23.svg");
    let (code, _, _) = call(&[
        "figure",
        "--kind",
        "E",
        "--k",
        "23",
        "--lambdas",
        "0,1/2,-1/2,inf",
        "--format",
        "svg",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let s = std::fs::read_to_string(&p).unwrap();
    assert!(s.starts_with("<svg") && s.contains(r#"viewBox="0 0 800 550""#));
    assert_eq!(s.matches("<circle").count(), 8);
}

#[test]
fn figure_io_error() {
    let (code, _, err) = call(&["figure", "--kind", "E", "--k", "23", "--lambdas", "inf", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code, exit::IO, "{err}");
}

#[test]
fn verify_small_suites() {
    let (code, out, _) = call(&["verify", "thm4", "--k-max", "15"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("thm4: 14/14 cells pass, PASS\n"), "{out}");
    let v = json(&["--json", "--workers", "2", "verify", "thm4", "--k-max", "9"]);
    assert_eq!(v["suite"], "thm4");
    assert_eq!(v["passed"], true);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4 + 2);
    assert!(cells.iter().all(|c| c["provenance"] == "THEOREM" && c["deviation"].is_null()));
    assert_eq!(call(&["verify", "thm4", "--k-max", "8"]).0, exit::PARSE);
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("ok.conf");
    std::fs::write(&good, "top_height = 6\nworkers = 1\n").unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "top_height = -6\n").unwrap();
    let args = ["count", "--kind", "E", "--k", "13", "--lambda", "3/2"];
    let mut with = vec!["--config", good.to_str().unwrap()];
    with.extend(args);
    assert_eq!(call(&with).0, 0);
    let mut with = vec!["--config", bad.to_str().unwrap()];
    with.extend(args);
    assert_eq!(call(&with).0, exit::PARSE);
    let mut with = vec!["--config", "/nonexistent.conf"];
    with.extend(args);
    assert_eq!(call(&with).0, exit::IO);

    let bin = env!("CARGO_BIN_EXE_eisenzero");
    let out = Command::new(bin).args(args).env("EISENZERO_CONFIG", &bad).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::PARSE));
    let out = Command::new(bin).args(args).env("EISENZERO_CONFIG", &good).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], "1");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    for cmd in ["eval", "count", "zeros", "verify", "figure"] {
        assert!(out.contains(cmd));
    }
}
