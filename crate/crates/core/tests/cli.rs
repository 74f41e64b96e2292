use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linefib"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn examples_lists_the_gallery() {
    let out = run(&["examples"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v["examples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "constant",
            "theta-linear",
            "theta-cubic",
            "theta-sine",
            "skew-hopf",
            "helix-not-straight"
        ]
    );
    assert_eq!(v["tool"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn standardize_inline_theta_field() {
    let out = run(&["standardize", "--field", "cos(z),-sin(z),0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let s = &v["standardization"];
    assert_eq!(s["verdict"], "CONTACT_RANK1_STANDARDIZED");
    assert!(s["pullback_defect"].as_f64().unwrap() < 1e-8);
    assert!(s["theta_z"].as_array().unwrap().len() >= 3);
    assert_eq!(
        s["theta_z"].as_array().unwrap().len(),
        s["theta_values"].as_array().unwrap().len()
    );
    assert!((s["theta_prime_min"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    for key in [
        "unit_defect_max",
        "straightness_defect_max",
        "intersections",
        "parallel_pairs_count",
        "rank_histogram",
    ] {
        assert!(v["audit"].get(key).is_some(), "audit.{key}");
    }
    for key in ["defect_min", "defect_max", "zero_set_detected"] {
        assert!(v["contact"].get(key).is_some(), "contact.{key}");
    }
    assert!(v["lemma_checks"]["winding"].is_array());
    assert!(v["lemma_checks"]["flow"].is_array());
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["grid"], 5);
    assert_eq!(v["config"]["field"]["components"][1], "-sin(z)");
}

#[test]
fn standardize_keys_are_stable_without_rank_one() {
    let v = json(&run(&["standardize", "--example", "skew-hopf"]));
    let s = &v["standardization"];
    assert_eq!(s["verdict"], "CONTACT_RANK2_SKEW");
    assert!(s["citation"].as_str().unwrap().contains("Theorem 2"));
    assert_eq!(s["theta_z"], Value::Array(vec![]));
    assert_eq!(s["theta_values"], Value::Array(vec![]));
    assert!(s["theta_prime_min"].is_null());
    assert!(s["pullback_defect"].is_null());
    assert_eq!(v["lemma_checks"]["winding"][0]["winding"], 1);
}

#[test]
fn audit_of_skew_hopf() {
    let out = run(&[
        "audit",
        "--example",
        "skew-hopf",
        "--box",
        "-1,1",
        "--grid",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["audit"]["is_fibration_on_box"], true);
    assert_eq!(v["audit"]["rank_profile"], "constant2");
    assert_eq!(v["config"]["box"]["min"][0], -1.0);
}

#[test]
fn contact_of_constant_field_is_zero() {
    let v = json(&run(&["contact", "--field", "1,0,0"]));
    assert_eq!(v["contact"]["defect_min"], 0.0);
    assert_eq!(v["contact"]["defect_max"], 0.0);
    assert_eq!(v["contact"]["zero_set_detected"], true);
}

#[test]
fn rank_and_skew_subcommands() {
    let v = json(&run(&[
        "rank",
        "--example",
        "theta-cubic",
        "--box",
        "-1,1,-1,1,-0.5,0.5",
    ]));
    assert_eq!(v["rank"]["profile"], "constant1");
    assert_eq!(v["config"]["box"]["max"][2], 0.5);
    let v = json(&run(&["skew", "--example", "skew-hopf", "--grid", "4"]));
    assert_eq!(v["skew"]["parallel_pairs_count"], 0);
    let v = json(&run(&["skew", "--example", "constant", "--grid", "3"]));
    assert!(v["skew"]["parallel_pairs_count"].as_u64().unwrap() > 0);
}

#[test]
fn winding_and_flow_subcommands() {
    let out = run(&[
        "winding",
        "--example",
        "skew-hopf",
        "--at",
        "0.1,-0.2,0.3",
        "--eps",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let w = &json(&out)["lemma_checks"]["winding"][0];
    assert_eq!(w["winding"], 1);
    assert_eq!(w["epsilon"], 0.05);
    let out = run(&["flow", "--example", "theta-linear", "--at", "0.1,0.2,-0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let f = &json(&out)["lemma_checks"]["flow"][0];
    assert!(f["constancy"].as_f64().unwrap() < 1e-7);
    assert!(f["projected_straightness"].as_f64().unwrap() < 1e-7);
}

#[test]
fn negative_verdicts_exit_zero() {
    let out = run(&["standardize", "--example", "helix-not-straight"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["standardization"]["verdict"],
        "NOT_A_FIBRATION_ON_BOX"
    );
    let out = run(&["standardize", "--example", "constant"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["standardization"]["verdict"],
        "FIBRATION_NOT_CONTACT"
    );
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        &["audit", "--field", "x,y"][..],
        &["audit", "--field", "x,y,w"],
        &["audit", "--example", "nope"],
        &["audit"],
        &["audit", "--example", "constant", "--box", "1,0"],
        &["audit", "--example", "constant", "--grid", "1"],
        &["audit", "--example", "constant", "--field", "1,0,0"],
        &["winding", "--example", "skew-hopf", "--at", "0,0"],
        &["standardize", "--example", "theta-linear", "--theta", "z+"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_two() {
    let out = run(&["winding", "--example", "constant"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["lemma_checks"]["winding"][0]["degenerate"], true);
    let out = run(&["flow", "--example", "skew-hopf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["lemma_checks"]["flow"][0]["error"].is_string());
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("standardize"));
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("linefib-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let p = path.to_str().unwrap();
    let out = run(&[
        "audit",
        "--example",
        "theta-linear",
        "--grid",
        "3",
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["out"], p);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn closed_form_theta_is_used_when_given() {
    let v = json(&run(&[
        "standardize",
        "--example",
        "theta-cubic",
        "--theta",
        "z+z^3/3",
    ]));
    let s = &v["standardization"];
    assert_eq!(s["theta_source"], "closed_form");
    assert!(s["field_pullback_defect"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["config"]["standardize"]["theta"], "z+z^3/3");
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["audit", "--example", "skew-hopf"][..],
        &["standardize", "--example", "theta-sine", "--box", "-2,2"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
