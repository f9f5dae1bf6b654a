use std::process::{Command, Output};

fn tautseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautseries"))
        .args(args)
        .env_remove("TAUTSERIES_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn y_branch_table() {
    let o = tautseries(&["series", "--family", "y", "--order", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let coeffs: Vec<&str> = text.lines().skip(2).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(coeffs, ["0/1", "1/1", "-6/1", "41/1", "-314/1", "2630/1"]);
    assert!(text.starts_with("# config {"));
}

#[test]
fn series_json_is_exact() {
    let o = tautseries(&["series", "--family", "segreA", "--rank", "2", "--index", "3", "--order", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["status"], "proven");
    assert_eq!(v["result"]["series"]["variable"], "z");
    assert_eq!(v["result"]["series"]["coefficients"], serde_json::json!(["1", "0", "-7", "187", "-4588"]));
    assert_eq!(v["config"]["order"], 4);
}

#[test]
fn order_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_tautseries"))
        .args(["series", "--family", "verlindeB", "--rank", "2", "--index", "1", "--format", "csv"])
        .env("TAUTSERIES_ORDER", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2 + 4);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tautseries(&["series", "--family", "y", "--bogus"]).status.code(), Some(2));
    assert_eq!(tautseries(&["series", "--family", "segreA", "--rank", "5", "--index", "3"]).status.code(), Some(2));
    assert_eq!(tautseries(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(tautseries(&["oracle", "--surface", "p2", "--class", "O(1,2)", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn verify_single_check() {
    let o = tautseries(&["verify", "--suite", "theta_constant", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["checks"][0]["status"], "pass");
}

#[test]
fn oracle_chern_binomial() {
    let o = tautseries(&["oracle", "--surface", "p2", "--class", "O(2)+O(3)", "--n", "3", "--kind", "chern", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["value"], "20");
    assert_eq!(v["config"]["seed"], 0x5eed_2024);
}

#[test]
fn extract_writes_json_and_is_reproducible() {
    let dir = std::env::temp_dir().join(format!("tautseries-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let args = ["extract", "--rank", "1", "--order", "3", "--json", path.to_str().unwrap()];
    let a = tautseries(&args);
    let b = tautseries(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["exponent_matrix"].as_array().unwrap()[0].as_array().unwrap().len(), 5);
    assert_eq!(v["result"]["comparisons"].as_array().unwrap().len(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn extract_verlinde_reports_conjectures() {
    let o = tautseries(&["extract", "--kind", "verlinde", "--rank", "2", "--order", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("B3,conjectural,3,")));
}
