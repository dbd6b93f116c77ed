use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use avmod::module::{differential_forms, export_module, jet_module, tangent_adjoint, trivial_dmodule, twist, ZooParams};
use avmod::rational::Rational;
use avmod_cli::load_module_spec;

fn avmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avmod")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_passes_and_echoes_config() {
    let out = avmod(&["verify", "--suite", "lemma3-commutator", "--dims", "1,2", "--degree", "3", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["total"], 200);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["exit_status"], 0);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config"]["dims"], serde_json::json!([1, 2]));
}

#[test]
fn smoke_runs_every_identity() {
    let out = avmod(&["verify", "--suite", "all", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ids: std::collections::BTreeSet<String> =
        v["results"].as_array().unwrap().iter().map(|r| r["identity"].as_str().unwrap().to_string()).collect();
    for id in avmod::smash::IdentityId::ALL {
        assert!(ids.contains(id.name()), "{id} missing");
    }
    assert!(ids.contains("localize-bracket"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &Path| {
        vec!["verify", "--suite", "identities,localize", "--dims", "1,2", "--trials", "2", "--degree", "2", "--seed", "99", "--out"]
            .into_iter()
            .map(String::from)
            .chain([p.to_str().unwrap().to_string()])
            .collect::<Vec<_>>()
    };
    for p in [&a, &b] {
        let args = args(p);
        let out = Command::new(env!("CARGO_BIN_EXE_avmod")).args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = avmod(&["verify", "--suite", "identities,localize", "--dims", "1,2", "--trials", "2", "--degree", "2", "--seed", "100"]);
    assert_ne!(std::fs::read(&a).unwrap(), other.stdout);
}

#[test]
fn corrupted_identities_exit_one_with_witness() {
    let out = avmod(&["verify", "--suite", "identities", "--dims", "1", "--trials", "1", "--corrupt"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["exit_status"], 1);
    assert_eq!(v["summary"]["passed"], 0);
    for r in v["results"].as_array().unwrap() {
        assert_eq!(r["status"], "fail");
        assert!(r["witness"].is_object());
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--trials", "0"][..],
        &["verify", "--degree", "0"],
        &["verify", "--suite", "nope"],
        &["verify", "--dims", ""],
        &["order", "--module", "zoo:nope"],
        &["order", "--module", "/definitely/not/here.json"],
        &["annihilator", "--module", "zoo:forms", "--f", "x1 +", "--eta", "d1"],
        &["annihilator", "--module", "zoo:forms", "--f", "x2", "--eta", "d1"],
        &["frobnicate"],
    ] {
        let out = avmod(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn order_examples() {
    let v = json(&avmod(&["order", "--module", "zoo:jets", "--dim", "1", "--n", "2"]));
    let o = &v["order"];
    assert_eq!((o["rank"].as_u64(), o["order"].as_u64(), o["oracle"].as_u64()), (Some(3), Some(2), Some(2)));
    assert_eq!((o["bound"].as_u64(), o["bound_ok"].as_bool()), (Some(9), Some(true)));
    let out = avmod(&["order", "--module", "zoo:dmodule"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["order"]["order"], 0);
    let text = String::from_utf8(avmod(&["order", "--module", "zoo:jets", "--n", "2", "--format", "text"]).stdout).unwrap();
    assert!(text.contains("rank 3, order 2, oracle 2, bound 9: ok"), "{text}");
}

#[test]
fn annihilator_examples() {
    let n = |args: &[&str]| json(&avmod(args))["annihilator"]["min_annihilating_order"].as_u64().unwrap();
    assert_eq!(n(&["annihilator", "--module", "zoo:forms", "--dim", "1", "--f", "x1", "--eta", "d1"]), 2);
    assert_eq!(n(&["annihilator", "--module", "zoo:jets", "--n", "3", "--f", "x1", "--eta", "d1"]), 4);
    let v = json(&avmod(&["annihilator", "--module", "zoo:jets", "--n", "3", "--f", "-2/3", "--eta", "d1"]));
    assert_eq!(v["annihilator"]["min_annihilating_order"], 1);
    assert_eq!(v["annihilator"]["note"], "Ω_p(const,·)=0");
    assert_eq!(v["exit_status"], 0);
}

#[test]
fn module_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad_rank = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 1, "rank": 2, "order": 1, "terms": [{"i": 1, "alpha": [1], "matrix": [["1"]]}]}"#,
    );
    let out = avmod(&["order", "--module", &bad_rank]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));

    let over = write(
        dir.path(),
        "over.json",
        r#"{"dim": 1, "rank": 1, "order": 1, "terms": [{"i": 1, "alpha": [2], "matrix": [["1"]]}]}"#,
    );
    let out = avmod(&["order", "--module", &over]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));

    // a connection with nonzero curvature is not a module
    let curved = write(
        dir.path(),
        "curved.json",
        r#"{"dim": 2, "rank": 1, "order": 0, "terms": [{"i": 1, "alpha": [0, 0], "matrix": [["x2"]]}]}"#,
    );
    let out = avmod(&["order", "--module", &curved]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation"));

    let by_hand = write(
        dir.path(),
        "forms2.json",
        r#"{"name": "hand-forms", "dim": 2, "rank": 2, "order": 1, "terms": [
            {"i": 1, "alpha": [1, 0], "matrix": [["1", "0"], ["0", "0"]]},
            {"i": 1, "alpha": [0, 1], "matrix": [["0", "0"], ["1", "0"]]},
            {"i": 2, "alpha": [1, 0], "matrix": [["0", "1"], ["0", "0"]]},
            {"i": 2, "alpha": [0, 1], "matrix": [["0", "0"], ["0", "1"]]}]}"#,
    );
    let out = avmod(&["order", "--module", &by_hand]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["order"]["order"], 1);
    let loaded = load_module_spec(&by_hand, &ZooParams::default()).unwrap();
    assert_eq!(loaded, differential_forms(2).unwrap());
}

#[test]
fn zoo_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let zoo = [
        trivial_dmodule(2, 2).unwrap(),
        differential_forms(3).unwrap(),
        tangent_adjoint(2).unwrap(),
        jet_module(2, 2).unwrap(),
        twist(2, Rational::new(3, 2)).unwrap(),
    ];
    for (n, m) in zoo.iter().enumerate() {
        let path = write(dir.path(), &format!("m{n}.json"), &export_module(m));
        let back = load_module_spec(&path, &ZooParams::default()).unwrap();
        assert_eq!(&back, m);
        assert_eq!(back.name(), m.name());
    }
}
