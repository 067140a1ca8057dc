//! Black-box tests of the `jetsym` binary: exit codes, the bracket
//! expansion surface, JSON determinism and the export round trip.

use std::process::{Command, Output};

fn jetsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetsym"))
        .args(args)
        .env_remove("JETSYM_SEED")
        .output()
        .expect("spawn jetsym")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn models_lists_builtins() {
    let out = jetsym(&["models"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["susy_oscillator", "pauli_2d", "jc", "jc_generalized", "jc_standard_susy"] {
        assert!(text.lines().any(|l| l == name), "missing {name} in {text}");
    }
}

#[test]
fn unknown_model_exits_2() {
    let out = jetsym(&["verify", "missing_model", "algebra"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("missing_model"), "stderr: {err}");
}

#[test]
fn bracket_expands_supercharge_anticommutator() {
    let out = jetsym(&["bracket", "susy_oscillator", "Q+", "Q-"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "anticommutator = H0 - w*Y");
}

#[test]
fn derive_json_is_an_equation_array() {
    let out = jetsym(&["derive", "susy_oscillator", "--json"]);
    assert!(out.status.success());
    let eqs: Vec<String> = serde_json::from_str(&stdout(&out)).expect("JSON array");
    assert!(!eqs.is_empty());
}

#[test]
fn verify_json_is_deterministic() {
    let args = ["verify", "susy_oscillator", "supercharges", "--json", "--seed", "7"];
    let a = jetsym(&args);
    let b = jetsym(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "JSON report must be byte-identical per configuration");
}

#[test]
fn shift_flag_controls_the_closure_identity() {
    // without the flag the closure onto H is an expected failure (exit 0)
    let out = jetsym(&["verify", "jc_generalized", "supercharges"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("expected_failure"), "{text}");
    assert!(text.contains("--alpha-beta-shift"), "{text}");
    // with the flag it must pass outright
    let out = jetsym(&["verify", "jc_generalized", "supercharges", "--alpha-beta-shift"]);
    assert!(out.status.success());
    assert!(!stdout(&out).contains("expected_failure"));
}

#[test]
fn export_round_trips_through_verify() {
    let dir = std::env::temp_dir().join("jetsym-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("osc.json");
    let out = jetsym(&["export", "susy_oscillator", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let out = jetsym(&["verify", path.to_str().unwrap(), "algebra"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
