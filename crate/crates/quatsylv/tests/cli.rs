//! End-to-end runs of the `quatsylv` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quatsylv::instances::{generate_consistent, perturb_inconsistent, spec_from_json, spec_to_json, ShapeProfile};
use quatsylv::sylvester::Variant;
use quatsylv::EtaAxis;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatsylv")).args(args).env_remove("QUATSYLV_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn eta_flags(variant: Variant) -> Vec<&'static str> {
    if variant == Variant::Eta {
        vec!["--eta", "j"]
    } else {
        vec![]
    }
}

#[test]
fn generate_solve_verify_closes_for_every_variant() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, sol) = (dir.path().join("spec.json"), dir.path().join("sol.json"));
    for variant in Variant::ALL {
        for seed in 1..=20 {
            let mut g = vec!["generate", "--variant", variant.as_str(), "--seed"];
            let s = seed.to_string();
            g.push(&s);
            g.extend(eta_flags(variant));
            g.extend(["-o", path(&spec)]);
            assert_eq!(code(&bin(&g)), 0, "generate {variant} {seed}");
            let free = format!("random:{seed}");
            let o = bin(&["solve", path(&spec), "--free", &free, "-o", path(&sol)]);
            assert_eq!(code(&o), 0, "solve {variant} {seed}: {}", String::from_utf8_lossy(&o.stderr));
            let o = bin(&["verify", path(&spec), path(&sol)]);
            assert_eq!(code(&o), 0, "verify {variant} {seed}: {}", String::from_utf8_lossy(&o.stdout));
        }
    }
}

#[test]
fn solve_full_with_zero_free_parameters_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, truth, sol) = (dir.path().join("s.json"), dir.path().join("t.json"), dir.path().join("x.json"));
    let o = bin(&["generate", "--variant", "full", "--seed", "4", "-o", path(&spec), "--solution-out", path(&truth)]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&bin(&["verify", path(&spec), path(&truth)])), 0);
    let o = bin(&["solve", path(&spec), "--variant", "full", "--free", "zero", "-o", path(&sol)]);
    assert_eq!(code(&o), 0);
    let o = bin(&["verify", path(&spec), path(&sol), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["overall"], true);
    assert_eq!(report["conditions"].as_array().unwrap().len(), 5);
}

#[test]
fn perturbed_spec_is_rejected_with_its_condition() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    let bad = (1..)
        .find_map(|seed| {
            let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(Variant::Full), None, seed).unwrap();
            perturb_inconsistent(&spec, "E4", seed).ok()
        })
        .unwrap();
    fs::write(&file, spec_to_json(&bad)).unwrap();
    let o = bin(&["check", path(&file), "--format", "text"]);
    assert_eq!(code(&o), 2);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("condition 3.6"), "{stderr}");
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL  3.6"));

    let report = dir.path().join("report.json");
    let o = bin(&["solve", path(&file), "--report", path(&report), "-o", path(&dir.path().join("never.json"))]);
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("never.json").exists());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["overall"], false);
}

#[test]
fn solution_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.json");
    assert_eq!(code(&bin(&["generate", "--variant", "eta", "--eta", "k", "--seed", "8", "-o", path(&spec)])), 0);
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let p = dir.path().join(format!("x{k}.json"));
            assert_eq!(code(&bin(&["solve", path(&spec), "--free", "random:3", "-o", path(&p)])), 0);
            fs::read(p).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_quatsylv"));
        c.args(["generate", "--variant", "single"]);
        match env {
            Some(v) => c.env("QUATSYLV_SEED", v),
            None => c.env_remove("QUATSYLV_SEED"),
        };
        c.output().unwrap()
    };
    let a = run(Some("5"));
    assert_eq!(code(&a), 0);
    let b = bin(&["generate", "--variant", "single", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run(None)), 3);
    assert_eq!(code(&run(Some("five"))), 3);
}

#[test]
fn input_errors_exit_three_and_name_the_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(Variant::Single), None, 1).unwrap();
    let text = spec_to_json(&spec);
    // corrupt one entry of B
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["B"]["data"][5] = serde_json::json!([1.0, "x", 0.0, 0.0]);
    let file = dir.path().join("bad.json");
    fs::write(&file, value.to_string()).unwrap();
    let o = bin(&["check", path(&file)]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("B") && err.contains("row [0, 1]") && err.contains("col [0, 1]"), "{err}");

    let good = dir.path().join("good.json");
    fs::write(&good, &text).unwrap();
    assert_eq!(code(&bin(&["check", path(&good), "--variant", "full"])), 3);
    assert_eq!(code(&bin(&["check", path(&dir.path().join("missing.json"))])), 3);
    assert_eq!(code(&bin(&["check", path(&good), "--tol-cond", "-1"])), 3);
    assert_eq!(code(&bin(&["solve", path(&good), "--free", "sometimes"])), 3);
    assert_eq!(code(&bin(&["frobnicate"])), 3);
    assert_eq!(code(&bin(&["example", "--id", "example-9.9"])), 3);
    assert_eq!(code(&bin(&["--help"])), 0);
    assert_eq!(spec_from_json(&text).unwrap(), spec);
}

#[test]
fn eta_flag_must_match_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    let (spec, _) = generate_consistent(&ShapeProfile::all_dims_two(Variant::Eta), Some(EtaAxis::I), 2).unwrap();
    fs::write(&file, spec_to_json(&spec)).unwrap();
    assert_eq!(code(&bin(&["check", path(&file), "--eta", "i"])), 0);
    assert_eq!(code(&bin(&["check", path(&file), "--eta", "k"])), 3);
    assert_eq!(code(&bin(&["generate", "--variant", "eta", "--seed", "1"])), 3);
}

#[test]
fn example_materializes_the_fixture_and_reports_every_equation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex");
    let o = bin(&["example", "--id", "example-3.3", "--out-dir", path(&out), "--format", "text"]);
    assert!(out.join("spec.json").exists() && out.join("solution.json").exists());
    let text = String::from_utf8_lossy(&o.stdout);
    for rhs in ["E1", "E2", "E3", "E4", "E5"] {
        assert!(text.lines().any(|l| l.contains(&format!(" {rhs} "))), "{rhs} missing:\n{text}");
    }
    // the listed solution does not satisfy the listed data; see README
    assert_eq!(code(&o), 2);
    let o = bin(&["verify", path(&out.join("spec.json")), path(&out.join("solution.json"))]);
    assert_eq!(code(&o), 2);
}
