use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use dunkl_core::{parse_expr, FieldCtx};
use serde_json::Value;

fn dunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl")).args(args).env_remove("DUNKL_MAX_K").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn zero_elapsed(mut v: Value) -> Value {
    for r in v.as_array_mut().unwrap() {
        r["elapsed_ms"] = Value::from(0);
    }
    v
}

#[test]
fn verify_json_matches_golden() {
    let o = dunkl(&["verify", "--k", "3..4", "--suite", "trig,s_props", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let got = zero_elapsed(serde_json::from_str(&stdout(&o)).unwrap());
    let want: Value = serde_json::from_str(&golden("verify_trig_k3_k4.json")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn json_schema_fields() {
    let o = dunkl(&["verify", "--k", "1,2", "--suite", "group", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for r in v.as_array().unwrap() {
        let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["check_id", "elapsed_ms", "k", "residual_sample", "residual_term_count", "status"]);
    }
}

#[test]
fn odd_only_check_at_even_k_is_skipped() {
    let o = dunkl(&["verify", "--k", "2", "--suite", "trig_tan_tan", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["status"], "skipped");
}

#[test]
fn mutation_fails_with_exit_1() {
    let o = dunkl(&["verify", "--k", "3", "--suite", "dphi_squared", "--mutate", "b-shift", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["status"], "fail");
    assert!(v[0]["residual_term_count"].as_u64().unwrap() > 0);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    for args in [
        vec!["verify", "--k", "0"],
        vec!["verify", "--k", "1..x"],
        vec!["verify", "--suite", "nope"],
        vec!["verify", "--mutate", "nope"],
        vec!["verify", "--trials", "0"],
        vec!["verify", "--tol", "-1"],
        vec!["norm", "--k", "3", "a + (b"],
        vec!["frobnicate"],
    ] {
        assert_eq!(dunkl(&args).status.code(), Some(2), "{args:?}");
    }
    let o = dunkl(&["norm", "--k", "3", "a + (b"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("at 6"), "{err}");
}

#[test]
fn max_k_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_dunkl"))
        .args(["verify", "--k", "13", "--suite", "group_relations"])
        .env("DUNKL_MAX_K", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dunkl(&["verify", "--k", "13", "--suite", "group_relations"]).status.code(), Some(2));
}

#[test]
fn show_dphi_k2() {
    let o = dunkl(&["show", "--op", "Dphi", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let c = Arc::new(FieldCtx::new(2).unwrap());
    let shown = parse_expr(stdout(&o).trim(), &c).unwrap();
    let display = "dphi + a*((tank(phi) + seck(phi))*R^2 + tank(phi) - seck(phi))*R*I + b*(tan(phi)*R^2 - cot(phi))*I";
    assert_eq!(shown, parse_expr(display, &c).unwrap());
}

#[test]
fn commutator_k3_golden() {
    let o = dunkl(&["commute", "--k", "3", "Dr", "Dphi"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out, golden("commute_dr_dphi_k3.txt"));
    let c = Arc::new(FieldCtx::new(3).unwrap());
    let rhs = parse_expr("-2*r^-1*(a*R + b)*(1 + R^2 + R^4)*I*Dphi", &c).unwrap();
    assert_eq!(parse_expr(out.trim(), &c).unwrap(), rhs);
}

#[test]
fn projection_has_no_group_elements() {
    let o = dunkl(&["project", "--k", "4", "HkExt"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.contains('R') && !out.contains('I'), "{out}");
    assert!(out.contains("dphi^2"));
}

#[test]
fn adjoint_and_norm() {
    assert_eq!(stdout(&dunkl(&["adjoint", "--k", "3", "dphi"])).trim(), "-dphi");
    assert_eq!(stdout(&dunkl(&["norm", "--k", "3", "I*R"])).trim(), "R^5*I");
    assert_eq!(stdout(&dunkl(&["norm", "--k", "2", "-a + a"])).trim(), "0");
}

#[test]
fn oracle_command() {
    let rhs = "-2*r^-1*(a*R + b)*(1 + R^2 + R^4 + R^6)*I*Dphi";
    let o = dunkl(&["oracle", "--k", "4", "Dr*Dphi - Dphi*Dr", rhs]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(dunkl(&["oracle", "--k", "4", "Dr*Dphi", "Dphi*Dr"]).status.code(), Some(1));
    assert_eq!(dunkl(&["oracle", "--k", "3", "--project", "HkExt", "Hk"]).status.code(), Some(0));
}

#[test]
fn verify_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = dunkl(&["verify", "--k", "1..2", "--suite", "dr_props", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn oracle_flag_adds_numeric_rows() {
    let o = dunkl(&["verify", "--k", "3", "--suite", "dphi_props", "--json", "--oracle", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["oracle"][0]["status"], "pass");
    assert_eq!(v["oracle"][0]["trials"], 20);
    assert_eq!(v["reports"][0]["status"], "pass");
}
