use std::process::Command;

use clap::Parser;
use kohn_sphere_cli::{run, RunConfig};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["kohn-sphere"];
    argv.extend_from_slice(args);
    let cfg = RunConfig::try_parse_from(argv).expect("arguments parse");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&cfg, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn spectrum_first_shell() {
    let (code, out, _) = invoke(&["spectrum", "--n", "3", "--j", "1", "--imax", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.remove(0), "kind,p,q,lambda_sq,dim");
    lines.sort();
    assert_eq!(lines, vec!["Phi,0,1,4,3", "Psi,0,1,4,3"]);
}

#[test]
fn coefficient_rows() {
    let (code, out, _) = invoke(&["coeffs", "--n", "3", "--j", "1", "--p", "0", "--q", "1", "--kind", "Phi"]);
    assert_eq!(code, 0);
    assert!(out.contains("delta,\"Phi[n=3,j=1,p=0,q=1]\",Phi,1,1,1/4"));
    assert!(out.contains("delta,\"Phi[n=3,j=1,p=0,q=1]\",Psi,0,1,1/2"));
    assert!(out.contains("epsilon,\"Phi[n=3,j=1,p=0,q=1]\",Phi,0,1,3/8"));
}

#[test]
fn coefficient_suite_passes() {
    let (code, out, _) = invoke(&["verify", "coefficients", "--n", "3", "--j", "1", "--pmax", "2", "--qmax", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains(",0,pass"));
}

#[test]
fn kernel_json_has_exact_values() {
    let (code, out, _) = invoke(&["kernel", "--n", "3", "--j", "1", "--p", "0", "--q", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows[0]["quantity"], "hs_integral");
    assert_eq!(rows[0]["rational"], "3/1");
    assert_eq!(rows[0]["pi_power"], -3);
    assert_eq!(rows[2]["rational"], "15/8");
}

#[test]
fn monte_carlo_requires_seed() {
    let (code, _, err) = invoke(&["riesz", "--n", "3", "--j", "1", "--samples", "100"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"));
}

#[test]
fn invalid_index_is_a_usage_error() {
    let (code, _, _) = invoke(&["coeffs", "--n", "3", "--j", "1", "--p", "0", "--q", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = invoke(&["spectrum", "--n", "1", "--j", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn seeded_output_is_deterministic() {
    let args = [
        "geometry", "--n", "3", "--r", "0.3,1.2", "--samples", "4000", "--seed", "7",
    ];
    let a = invoke(&args);
    let b = invoke(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let args = ["riesz", "--n", "3", "--j", "1", "--t", "0.1,0.2", "--samples", "2000", "--seed", "3"];
    let a = invoke(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, invoke(&args).1);
    assert_eq!(a.1.lines().count(), 3);
}

#[test]
fn tables_for_estimates() {
    let (code, out, _) = invoke(&["shells", "--n", "3", "--j", "1", "--imax", "3"]);
    assert_eq!(code, 0);
    let second = out.lines().nth(1).unwrap();
    assert!(second.starts_with("3,1,2,0.0,5.0,3,2.5,6.0,"), "{second}");
    let (code, out, _) = invoke(&["sobolev", "--n", "3", "--j", "1", "--r", "0.5,1", "--ell", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let (code, _, err) = invoke(&["sobolev", "--n", "3", "--j", "1", "--ell", "1"]);
    assert_eq!(code, 2, "{err}");
    let (code, out, _) = invoke(&[
        "plancherel", "--n", "3", "--j", "1", "--N", "4,8", "--theta", "0", "--exact", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v[0]["exact_lhs"].is_string());
}

#[test]
fn output_file_flag() {
    let path = std::env::temp_dir().join(format!("kohn-sphere-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = invoke(&["spectrum", "--n", "2", "--j", "0", "--imax", "3", "--output", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.starts_with("kind,p,q,lambda_sq,dim\n"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_kohn-sphere");
    let ok = Command::new(bin)
        .args(["verify", "eigenvalues", "--n", "2", "--pmax", "1", "--qmax", "1"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["spectrum", "--bogus"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
