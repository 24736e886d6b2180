use std::process::Command;

use bootperc_cli::{main_with, EXIT_CERT_FAIL, EXIT_GUARD, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    main_with(std::iter::once("bootperc").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn k8_file() -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("bootperc-k8-{}.txt", std::process::id()));
    let mut text = String::from("# complete graph on 8 vertices\n");
    for a in 0..8 {
        for b in a + 1..8 {
            text.push_str(&format!("{a} {b}\n"));
        }
    }
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn random_runs_report_every_trial() {
    let doc = json(&[
        "run",
        "--family",
        "hypercube",
        "--n",
        "12",
        "--process",
        "majority",
        "--p",
        "0.5",
        "--trials",
        "10",
        "--seed",
        "7",
    ]);
    let traces = doc["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 10);
    for (i, t) in traces.iter().enumerate() {
        assert_eq!(t["trial"], i as u64);
        assert!(t["percolated"].is_boolean());
        assert!(t["rounds_to_stabilize"].is_u64());
    }
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["config"]["process"]["variant"], "majority");
    assert_eq!(doc["config"]["process"]["m"], 0);
}

#[test]
fn explicit_initial_sets() {
    let doc = json(&[
        "run",
        "--family",
        "folded",
        "--n",
        "3",
        "--process",
        "majority",
        "--initial",
        "00,11",
    ]);
    assert_eq!(doc["traces"][0]["percolated"], true);
    assert_eq!(doc["traces"][0]["rounds_to_stabilize"], 1);
    assert_eq!(doc["final_set"].as_array().unwrap().len(), 4);
    let doc = json(&[
        "run",
        "--family",
        "hypercube",
        "--n",
        "1",
        "--process",
        "majority",
        "--initial",
        "",
    ]);
    assert_eq!(doc["traces"][0]["percolated"], false);
    assert_eq!(doc["traces"][0]["final_size"], 0);
}

#[test]
fn scan_is_monotone_and_carries_reference_curves() {
    let doc = json(&[
        "scan",
        "--family",
        "hypercube",
        "--n",
        "10",
        "--grid",
        "0.20:0.40:0.01",
        "--trials",
        "60",
    ]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 21);
    let phi: Vec<f64> = rows
        .iter()
        .map(|r| r["phi_hat"].as_f64().unwrap())
        .collect();
    assert!(phi.windows(2).all(|w| w[0] <= w[1]));
    for r in rows {
        let (lo, hat, hi) = (
            r["ci_low"].as_f64().unwrap(),
            r["phi_hat"].as_f64().unwrap(),
            r["ci_high"].as_f64().unwrap(),
        );
        assert!(lo <= hat && hat <= hi);
    }
    assert!(doc["theory"]["p_tilde"].is_f64());
    assert_eq!(doc["config"]["grid"].as_array().unwrap().len(), 21);
    assert_eq!(doc["config"]["grid"][1], 0.21);
}

#[test]
fn pc_reports_reference_value() {
    let doc = json(&["pc", "--family", "hypercube", "--n", "20", "--trials", "1"]);
    let p_tilde = doc["theory"]["p_tilde"].as_f64().unwrap();
    let reference = 0.5 - (20f64.ln() / 20.0).sqrt() / 2.0;
    assert!((p_tilde - reference).abs() < 1e-12);
    assert!((p_tilde - 0.3064886).abs() < 1e-6);
    assert_eq!(doc["estimate"]["p_stars"].as_array().unwrap().len(), 1);
}

#[test]
fn pc_on_a_single_edge() {
    let doc = json(&[
        "pc",
        "--family",
        "hypercube",
        "--n",
        "1",
        "--trials",
        "100000",
        "--seed",
        "1",
    ]);
    let median = doc["estimate"]["median"].as_f64().unwrap();
    assert!((median - (1.0 - 0.5f64.sqrt())).abs() < 0.01, "{median}");
    assert!(doc["theory"].is_null());
}

#[test]
fn certify_exit_codes() {
    let (code, out, _) = call(&[
        "certify",
        "--family",
        "middle-layer",
        "--n",
        "4",
        "--K",
        "4",
        "--ell-max",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["passed"], true);
    let (code, _, _) = call(&[
        "certify",
        "--family",
        "hypercube",
        "--n",
        "6",
        "--K",
        "2",
        "--ell-max",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let k8 = k8_file();
    let (code, out, _) = call(&[
        "certify",
        "--edge-list",
        k8.to_str().unwrap(),
        "--K",
        "1",
        "--ell-max",
        "1",
    ]);
    assert_eq!(code, EXIT_CERT_FAIL);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let p2 = doc["certificate"]["properties"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["property"] == "P2")
        .unwrap()
        .clone();
    assert_eq!(p2["verdict"]["status"], "fail");
    assert_eq!(p2["verdict"]["witness"]["measured"], 7.0);
    assert_eq!(p2["verdict"]["witness"]["replayed"], true);
    std::fs::remove_file(k8).ok();
}

#[test]
fn usage_and_guard_exit_codes() {
    assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["run", "--family", "hypercube"]).0, EXIT_USAGE);
    assert_eq!(
        call(&["run", "--family", "hypercube", "--n", "3"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        call(&[
            "scan",
            "--family",
            "hypercube",
            "--n",
            "3",
            "--grid",
            "0.5:0.1:0.1"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        call(&["run", "--family", "hypercube", "--n", "3", "--p", "1.5"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        call(&["run", "--family", "odd", "--n", "3", "--initial", "xyz"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        call(&["exact", "--family", "hypercube", "--n", "5"]).0,
        EXIT_GUARD
    );
    assert_eq!(
        call(&[
            "certify",
            "--family",
            "hypercube",
            "--n",
            "13",
            "--centers",
            "exhaustive",
            "--ell-max",
            "1"
        ])
        .0,
        EXIT_GUARD
    );
    assert_eq!(
        call(&[
            "run",
            "--family",
            "hypercube",
            "--n",
            "8",
            "--initial",
            "00000011",
            "--max-rounds",
            "0"
        ])
        .0,
        EXIT_GUARD
    );
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn exact_values() {
    let doc = json(&["exact", "--family", "hypercube", "--n", "2", "--p", "0.5"]);
    assert_eq!(doc["rows"][0]["phi"], 0.9375);
    let pc = doc["pc"].as_f64().unwrap();
    assert!((pc - (1.0 - 2f64.powf(-0.25))).abs() < 1e-8);
    let doc = json(&[
        "exact",
        "--family",
        "hypercube",
        "--n",
        "1",
        "--grid",
        "0:1:0.25",
    ]);
    let phi: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["phi"].as_f64().unwrap())
        .collect();
    assert_eq!(phi, vec![0.0, 0.4375, 0.75, 0.9375, 1.0]);
}

#[test]
fn families_listing_and_description() {
    let doc = json(&["families"]);
    assert_eq!(doc["kinds"].as_array().unwrap().len(), 9);
    let doc = json(&["families", "--family", "odd", "--n", "3"]);
    assert_eq!(doc["graph"]["order"], 10);
    assert_eq!(doc["graph"]["canonical_K"], 4);
    let doc = json(&[
        "families",
        "--family",
        "product",
        "--bases",
        "cycle:3,path:4",
    ]);
    assert_eq!(doc["graph"]["order"], 12);
}

#[test]
fn csv_output_and_output_file() {
    let (code, out, _) = call(&[
        "scan",
        "--family",
        "hypercube",
        "--n",
        "6",
        "--grid",
        "0.1:0.3:0.1",
        "--trials",
        "20",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "p,phi_hat,ci_low,ci_high,successes,trials,p_tilde,lower,upper,window_point"
    );
    assert_eq!(lines.len(), 4);
    let path = std::env::temp_dir().join(format!("bootperc-out-{}.json", std::process::id()));
    let (code, out, _) = call(&[
        "families",
        "--family",
        "hypercube",
        "--n",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["graph"]["order"], 16);
    std::fs::remove_file(path).ok();
}

#[test]
fn output_does_not_depend_on_workers() {
    let base = [
        "run",
        "--family",
        "middle-layer",
        "--n",
        "4",
        "--p",
        "0.3",
        "--trials",
        "40",
        "--seed",
        "9",
    ];
    let with = |w: &str| {
        let mut args = base.to_vec();
        args.extend(["--workers", w]);
        call(&args).1
    };
    assert_eq!(with("1"), with("8"));
}

#[test]
fn binary_exit_codes_and_env_workers() {
    let bin = env!("CARGO_BIN_EXE_bootperc");
    let status = Command::new(bin)
        .args([
            "run",
            "--family",
            "folded",
            "--n",
            "3",
            "--initial",
            "00,11",
        ])
        .env("BOOTPERC_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let doc: Value = serde_json::from_slice(&status.stdout).unwrap();
    assert!(doc["config"].get("workers").is_none());
    let status = Command::new(bin)
        .args(["exact", "--family", "hypercube", "--n", "6"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_GUARD));
    assert!(!status.stderr.is_empty());
    let status = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
}
