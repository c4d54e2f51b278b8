// Copyright 2026 The rio-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line behaviour.

use std::path::Path;
use std::process::Command;

use rio_core::cli::{run, EXIT_NOT_RESTRICTED, EXIT_OK, EXIT_USAGE};
use rio_core::protocol::{y_labels, ProtocolTranscript};
use rio_core::statevec::{DenseOperator, StateVector};

fn rio(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rio").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let state = dir.path().join(format!("state{k}.json"));
        let transcript = dir.path().join(format!("tr{k}.json"));
        let (code, out, _) = rio(&[
            "run",
            "--n",
            "2",
            "--x",
            "17",
            "--phases",
            "0.1,0.2,0.3,0.4",
            "--seed",
            "9",
            "--out-state",
            path_str(&state),
            "--out-transcript",
            path_str(&transcript),
        ]);
        assert_eq!(code, EXIT_OK);
        let files = (
            std::fs::read_to_string(&state).unwrap(),
            std::fs::read_to_string(&transcript).unwrap(),
        );
        outputs.push((out, files));
    }
    assert_eq!(outputs[0], outputs[1]);
    let report = json(&outputs[0].0);
    assert_eq!(report["x"], "17");
    assert_eq!(report["passed"], true);
    assert!(report["fidelity"].as_f64().unwrap() > 1.0 - 1e-12);

    // output files parse back
    let st = StateVector::from_json_str(&outputs[0].1 .0).unwrap();
    assert_eq!(st.num_qubits(), 6);
    let tr = ProtocolTranscript::from_json_str(&outputs[0].1 .1).unwrap();
    assert_eq!(tr.n, 2);
    assert!((tr.branch_prob - 1.0 / 16.0).abs() < 1e-12);
}

#[test]
fn run_reads_input_state_and_forced_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let xi_path = dir.path().join("xi.json");
    let xi = StateVector::basis_state(&y_labels(1), &[0]).unwrap();
    xi.write_json(&xi_path).unwrap();
    let (code, out, err) = rio(&[
        "run",
        "--n",
        "1",
        "--x",
        "2",
        "--phases",
        "0.6+0.8i,-i",
        "--state",
        path_str(&xi_path),
        "--b",
        "1",
        "--a",
        "0",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let r = json(&out);
    assert_eq!(r["a"], "0");
    assert_eq!(r["b"], "1");
    assert!((r["branch_prob"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn run_text_format() {
    let (code, out, _) = rio(&["run", "--n", "1", "--x", "1", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.trim_end().ends_with("PASS"));
}

#[test]
fn bad_inputs_exit_with_usage() {
    assert_eq!(rio(&["run", "--n", "2", "--x", "25"]).0, EXIT_USAGE);
    assert_eq!(rio(&["run", "--n", "2", "--x", "0"]).0, EXIT_USAGE);
    assert_eq!(
        rio(&["run", "--n", "2", "--x", "3", "--phases", "0,0"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        rio(&["run", "--n", "1", "--x", "1", "--b", "2"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        rio(&["route", "--kind", "forward", "--n", "4"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        rio(&["resources", "--n", "2", "--encoding", "nope"]).0,
        EXIT_USAGE
    );
    assert_eq!(rio(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(rio(&["--version"]).0, EXIT_OK);
}

#[test]
fn verify_reports_pass() {
    let (code, out, _) = rio(&["verify", "--n", "2", "--exhaustive", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    assert_eq!(r["trials"], 24 * 16);
    assert_eq!(r["passed"], true);
    let (code, out, _) = rio(&[
        "verify",
        "--n",
        "3",
        "--trials",
        "20",
        "--unforced",
        "--sequential",
        "--format",
        "text",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("PASS"));
}

#[test]
fn enumerate_rows() {
    let (code, out, _) = rio(&["enumerate", "--n", "2"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 24);
    assert_eq!(rows[0], "1,2,3,4");
    assert_eq!(rows[1], "1,2,4,3");
    assert_eq!(rows[6], "2,1,3,4");
    assert_eq!(rows[23], "4,3,2,1");
}

#[test]
fn classify_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    std::fs::write(&h, DenseOperator::hadamard().to_json_string()).unwrap();
    let (code, _, err) = rio(&["classify", "--matrix", path_str(&h)]);
    assert_eq!(code, EXIT_NOT_RESTRICTED);
    assert!(!err.is_empty());

    // CNOT with the first qubit as control is p = (1,2,4,3), rank 2
    let cnot = DenseOperator::from_real(&[
        &[1., 0., 0., 0.],
        &[0., 1., 0., 0.],
        &[0., 0., 0., 1.],
        &[0., 0., 1., 0.],
    ])
    .unwrap();
    let m = dir.path().join("cnot.json");
    std::fs::write(&m, cnot.to_json_string()).unwrap();
    let (code, out, _) = rio(&["classify", "--matrix", path_str(&m)]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    assert_eq!(r["x"], "2");
    assert_eq!(r["permutation"], serde_json::json!([1, 2, 4, 3]));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        rio(&["classify", "--matrix", path_str(&missing)]).0,
        EXIT_USAGE
    );
}

#[test]
fn resources_totals() {
    let (code, out, _) = rio(&["resources", "--n", "2"]);
    assert_eq!(code, EXIT_OK);
    let r = json(&out);
    assert_eq!(r["ebits"], 2);
    assert_eq!(r["cbits"]["total"], 9);
    let r = json(&rio(&["resources", "--n", "1", "--encoding", "tight"]).1);
    assert_eq!(r["cbits"]["total"], 3);
    let r = json(&rio(&["resources", "--n", "2", "--bob-fixed-b"]).1);
    assert_eq!(r["cbits"]["b_to_a"], 0);
}

#[test]
fn route_prints_destinations() {
    let (code, out, _) = rio(&[
        "route", "--kind", "forward", "--n", "6", "--i", "3", "--j", "5", "--format", "text",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "1 2 4 5 3 6");
    let r = json(&rio(&["route", "--kind", "gamma", "--n", "2"]).1);
    assert_eq!(r["qubits"], 6);
    assert_eq!(r["dest"].as_array().unwrap().len(), 6);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rio");
    let st = Command::new(bin)
        .args(["enumerate", "--n", "1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&st.stdout), "1,2\n2,1\n");
    let st = Command::new(bin)
        .args(["run", "--n", "1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_USAGE));
}
