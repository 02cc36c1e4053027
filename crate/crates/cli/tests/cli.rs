use std::process::{Command, Output};

use loewner::traces::thm1_trace_residual;
use loewner::{ComplexPoint, Scenario64};
use serde_json::Value;

fn loewner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn first_g2(csv: &str) -> (f64, f64, f64) {
    let row = csv.lines().find(|l| l.ends_with(",G2")).unwrap();
    let f: Vec<f64> = row.split(',').take(3).map(|v| v.parse().unwrap()).collect();
    (f[0], f[1], f[2])
}

#[test]
fn trace_first_rows() {
    let base = ["trace", "--t0", "1", "--T", "3", "--samples", "50"];
    let cases = [(["--theorem", "1", "--A", "2.5"], (1.5, 0.0)), (["--theorem", "2", "--A", "3"], (0.0, 2.0)), (["--theorem", "1", "--A", "2"], (0.0, 0.0))];
    for (flags, (re, im)) in cases {
        let out = loewner(&[&base[..], &flags[..]].concat());
        assert!(out.status.success());
        let csv = stdout(&out);
        assert!(csv.starts_with("t,re,im,curve\n"));
        assert!(!csv.contains('\r'));
        assert_eq!(first_g2(&csv), (1.0, re, im));
        for tag in ["G0", "G1", "G2"] {
            assert!(csv.lines().any(|l| l.ends_with(tag)));
        }
    }
}

#[test]
fn trace_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let args = ["trace", "--A", "2.5", "--samples", "100", "--out", path.to_str().unwrap()];
    assert!(loewner(&args).status.success());
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(loewner(&args).status.success());
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());

    let sc = Scenario64::theorem_one(2.5, 1.0, 3.0).unwrap();
    for row in first.lines().skip(1).filter(|l| l.ends_with(",G2")) {
        let f: Vec<f64> = row.split(',').take(3).map(|v| v.parse().unwrap()).collect();
        let r = thm1_trace_residual(ComplexPoint::new(f[1], f[2]), f[0], &sc).unwrap();
        assert!(r.norm() <= 1e-8, "{row}: {}", r.norm());
    }
}

#[test]
fn numeric_trace_flag() {
    let out = loewner(&["trace", "--A", "2.5", "--samples", "5", "--numeric"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let row = csv.lines().filter(|l| l.ends_with(",G2")).nth(1).unwrap();
    let f: Vec<f64> = row.split(',').take(3).map(|v| v.parse().unwrap()).collect();
    assert_eq!(f[0], 1.5);
    assert!((ComplexPoint::new(f[1], f[2]) - ComplexPoint::new(1.7178144262243726, 1.4296126337594346)).norm() < 1e-5);
}

fn solve(extra: &[&str]) -> Value {
    let out = loewner(&[&["solve"][..], extra].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn solve_at_t0_is_the_slit_map() {
    let v = solve(&["--theorem", "1", "--z", "1+1i", "--t", "1"]);
    let g = (ComplexPoint::new(1.0, 1.0).powi(2) + 4.0).sqrt();
    assert!((v["w_re"].as_f64().unwrap() - g.re).abs() < 1e-15);
    assert!((v["w_im"].as_f64().unwrap() - g.im).abs() < 1e-15);
    assert!(v["residual"].as_f64().unwrap() <= 1e-15);
    assert_eq!(v["method"], "implicit");
}

#[test]
fn solve_methods_agree() {
    for flags in [["--theorem", "1", "--A", "1.5"], ["--theorem", "2", "--A", "3"]] {
        let a = solve(&[&flags[..], &["--z", "-0.5+2i", "--t", "2.5"]].concat());
        let b = solve(&[&flags[..], &["--z", "-0.5+2i", "--t", "2.5", "--method", "ode"]].concat());
        let dw = ComplexPoint::new(a["w_re"].as_f64().unwrap() - b["w_re"].as_f64().unwrap(), a["w_im"].as_f64().unwrap() - b["w_im"].as_f64().unwrap());
        assert!(dw.norm() <= 1e-7);
        assert_eq!(b["method"], "ode");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(loewner(&["solve", "--z", "1+i", "--t", "2"]).status.code(), Some(2));
    assert_eq!(loewner(&["solve", "--z", "one", "--t", "2"]).status.code(), Some(2));
    assert_eq!(loewner(&["trace", "--theorem", "3"]).status.code(), Some(2));
    assert_eq!(loewner(&["trace", "--t0", "4", "--T", "3"]).status.code(), Some(2));
    assert_eq!(loewner(&["solve", "--z", "0+1i", "--t", "2"]).status.code(), Some(4));
    assert_eq!(loewner(&["solve", "--z", "1-1i", "--t", "2"]).status.code(), Some(4));
    assert_eq!(loewner(&["verify", "--suite", "asymptotics", "--theorem", "2", "--A", "3"]).status.code(), Some(4));
    assert_eq!(loewner(&["figure", "--preset", "fig1", "--out", "/nonexistent/dir/f.svg"]).status.code(), Some(5));
}

fn verify(extra: &[&str]) -> (Option<i32>, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = loewner(&[&["verify", "--json", path.to_str().unwrap()][..], extra].concat());
    let v = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (out.status.code(), v)
}

fn ids(v: &Value) -> Vec<String> {
    v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap().to_string()).collect()
}

#[test]
fn verify_all_theorem_two() {
    let (code, v) = verify(&["--suite", "all", "--theorem", "2", "--A", "3", "--t0", "1", "--T", "3"]);
    assert_eq!(code, Some(0));
    assert_eq!(v["suite"], "all");
    for c in v["checks"].as_array().unwrap() {
        assert!(["PAPER", "TRIVIAL", "DERIVED"].contains(&c["provenance"].as_str().unwrap()));
        assert_eq!(c["pass"], true, "{c}");
    }
    assert!(v["runtime_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_case3_reports_both_forms() {
    let (code, v) = verify(&["--suite", "case3", "--t0", "2.25", "--T", "4"]);
    assert_eq!(code, Some(0));
    let ids = ids(&v);
    assert!(ids.iter().any(|i| i == "case3.t0=2.25.corrected_form_residual"));
    assert!(ids.iter().any(|i| i == "case3.t0=2.25.unit_log_form_residual"));
}

#[test]
fn verify_geometry_case3_has_quarter_angle() {
    let (code, v) = verify(&["--suite", "geometry", "--theorem", "1", "--A", "2", "--t0", "1", "--T", "3"]);
    assert_eq!(code, Some(0));
    assert!(ids(&v).iter().any(|i| i.contains("pi_over_4")));
}

#[test]
fn figure_is_deterministic_svg() {
    let a = loewner(&["figure", "--preset", "fig3"]);
    let b = loewner(&["figure", "--preset", "fig3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert!(svg.contains("stroke-width=\"2\""));
    assert!(svg.contains("id=\"baseline\""));
    assert!(svg.contains("case (iii)"));
    // Γ₂ leaves the origin, mapped to (400, 400), heading up and to the right
    let g2 = svg.split("id=\"G2\" points=\"").nth(1).unwrap();
    assert!(g2.starts_with("400,400 "));
}

#[test]
fn figure_explicit_flags() {
    let out = loewner(&["figure", "--theorem", "1", "--A", "2.5", "--t0", "1", "--T", "6", "--samples", "40"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("T=6"));
}
