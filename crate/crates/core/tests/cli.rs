use std::process::{Command, Output};

fn hgp(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hgp"));
    c.args(args).env_remove("HGP_OUT_DIR");
    c
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("an error line");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{e}: {stderr}"))
}

#[test]
fn oracle_prints_estimate() {
    let out = hgp(&["oracle", "--benchmark", "tjunction", "--n", "100000", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["benchmark"], "tjunction");
    assert_eq!(v["n"], 100_000);
    let pf = v["pf"].as_f64().unwrap();
    assert!((pf - v["exact"].as_f64().unwrap()).abs() < 4.0 * v["stderr"].as_f64().unwrap());
    assert_eq!(v["reference"], 0.0382);
}

#[test]
fn masked_without_alpha_fails_with_a_record() {
    let out = hgp(&["run", "--benchmark", "toy", "--method", "masked"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"]["kind"], "invalid_argument");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = hgp(&["run", "--benchmark", "moon", "--method", "hgp"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["kind"], "usage");
}

#[test]
fn invalid_loop_settings_are_rejected() {
    let out = hgp(&["run", "--benchmark", "toy", "--method", "hgp", "--eta", "0.7"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"]["kind"], "invalid_argument");
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(&[
        "run", "--benchmark", "toy", "--method", "gpc", "--repeats", "2", "--max-iter", "3",
        "--n-mc", "300", "--test-size", "2000", "--seed", "5",
    ])
    .env("HGP_OUT_DIR", dir.path())
    .output()
    .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for f in ["repeat_0.json", "repeat_1.csv", "convergence.csv", "table.json"] {
        assert!(dir.path().join("toy/gpc").join(f).exists(), "{f} missing");
    }

    let out = hgp(&["table"]).env("HGP_OUT_DIR", dir.path()).output().unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0], run["row"]);
    assert_eq!(rows[0]["method"], "gpc");
    assert_eq!(rows[0]["dnt"], true);
}

#[test]
fn table_of_an_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = hgp(&["table", "--out", dir.path().to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    assert_eq!(error_record(&out)["error"]["kind"], "precondition");
}
