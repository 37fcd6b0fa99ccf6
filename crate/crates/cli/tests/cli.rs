//! Golden runs of the binary: exit codes, formats and configuration.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dynsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynsym")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn coulomb_verify_confirms_the_ladder() {
    let o = dynsym(&["verify", "--system", "coulomb", "--dim", "2", "--lambda", "sym"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["ladder"]["step"], 1);
    assert_eq!(v["ladder"]["F"], "(-1/2)*lam*L12 + (-4)*lam*Lsq*L12 + (-4)*H*L12");
    let tags: Vec<&str> = v["ladder"]["discrepancies"].as_array().unwrap().iter().map(|d| d["tag"].as_str().unwrap()).collect();
    assert!(tags.contains(&"coulomb.commutator"), "{tags:?}");
    assert!(tags.contains(&"ladder.product"), "{tags:?}");
    let ids = v["identities"].as_array().unwrap();
    assert!(ids.iter().any(|c| c["tag"] == "ladder.weight_shift" && c["holds"] == true));
}

#[test]
fn oscillator_verify_in_three_dimensions() {
    let o = dynsym(&["verify", "--system", "oscillator", "--dim", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["ladder"]["step"], Value::Null);
    let tags: Vec<&str> = v["ladder"]["discrepancies"].as_array().unwrap().iter().map(|d| d["tag"].as_str().unwrap()).collect();
    assert!(tags.contains(&"oscillator.tensor.commutator"), "{tags:?}");
    let ids = v["identities"].as_array().unwrap();
    assert!(ids.iter().any(|c| c["tag"] == "oscillator.tensor.conserved" && c["holds"] == true));
}

#[test]
fn unsupported_dimension_is_an_input_error() {
    let o = dynsym(&["verify", "--dim", "1"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn decimals_need_approx() {
    assert_eq!(code(&dynsym(&["spectrum", "--lambda", "0.05", "--levels", "1"])), 2);
    let o = dynsym(&["spectrum", "--lambda", "0.05", "--approx", "--levels", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["meta"]["lambda"], "1/20");
}

#[test]
fn symbolic_lambda_cannot_be_validated() {
    assert_eq!(code(&dynsym(&["validate", "--lambda", "sym"])), 2);
}

#[test]
fn spectrum_matches_golden_json() {
    let o = dynsym(&["spectrum", "--system", "coulomb", "--lambda", "1/10", "--levels", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden("spectrum_coulomb_tenth.json"));
}

#[test]
fn spectrum_matches_golden_csv() {
    let o = dynsym(&["spectrum", "--system", "oscillator", "--lambda", "1/20", "--levels", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), golden("spectrum_oscillator_twentieth.csv"));
}

#[test]
fn empty_validation() {
    let o = dynsym(&["validate", "--levels", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["spectrum"], Value::Array(vec![]));
    let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["ladder", "meta", "numerics", "spectrum"]);
    // Top-level keys are written in a fixed order.
    let s = String::from_utf8(o.stdout).unwrap();
    let at: Vec<usize> = ["\"meta\"", "\"ladder\"", "\"spectrum\"", "\"numerics\""].iter().map(|k| s.find(k).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{at:?}");
}

#[test]
fn printed_first_excited_level_at_one_tenth() {
    // Radial numerics only; the level fails against the algebraic value
    // on this box, so the exit code is 1.
    let o = dynsym(&["validate", "--system", "coulomb", "--dim", "2", "--lambda", "1/10", "--levels", "2", "--cartesian-grid", "0"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["spectrum"][1]["E_paper"], "-1/2");
    assert_eq!(v["spectrum"][0]["pass"], true);
}

#[test]
fn undeformed_oscillator_validates() {
    let o = dynsym(&["validate", "--system", "oscillator", "--dim", "2", "--lambda", "0", "--levels", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for (n, row) in v["spectrum"].as_array().unwrap().iter().enumerate() {
        let want = (n + 1) as f64;
        for key in ["E_radial", "E_cartesian"] {
            let e = row[key].as_f64().unwrap();
            assert!((e - want).abs() < 5e-3, "n={n} {key} {e}");
        }
        assert_eq!(row["pass"], true);
    }
    assert_eq!(v["numerics"]["grid"]["radial_points"], 4000);
    assert_eq!(v["numerics"]["box"].as_array().unwrap().len(), 4);
}

#[test]
fn config_file_under_flags() {
    let cfg = scratch("spectrum.cfg");
    std::fs::write(&cfg, "# oscillator run\nsystem = oscillator\nlambda = 1/20\nlevels = 2\nformat = text\n").unwrap();
    let out = scratch("spectrum.json");
    let cfg_s = cfg.to_str().unwrap();
    let o = dynsym(&["spectrum", "--config", cfg_s, "--levels", "3", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["meta"]["system"], "oscillator");
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 3);

    std::fs::write(&cfg, "system = oscillator\nmystery = 3\n").unwrap();
    assert_eq!(code(&dynsym(&["spectrum", "--config", cfg_s])), 2);
    assert_eq!(code(&dynsym(&["spectrum", "--config", scratch("missing.cfg").to_str().unwrap()])), 2);
}

#[test]
fn text_report() {
    let o = dynsym(&["spectrum", "--system", "coulomb", "--lambda", "0", "--levels", "2", "--format", "text"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("coulomb N=2 lambda=0 convention=half"), "{s}");
    assert!(s.contains("spectrum:") && s.contains("-2/9"), "{s}");
}

#[test]
fn explicit_full_convention_is_reported() {
    let o = dynsym(&["spectrum", "--system", "oscillator", "--lambda", "0", "--levels", "1", "--convention", "full"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["meta"]["convention"], "full");
}
