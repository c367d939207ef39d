use hironaka_cli::run;
use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str]) -> (i32, Value) {
    run(std::iter::once("hironaka").chain(args.iter().copied()))
}

#[test]
fn example82_claims_pass() {
    let (code, v) = cli(&["example82", "--mu", "8", "--h", "z"]);
    assert_eq!(code, 0, "{v}");
    let claims = v["result"]["report"]["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 4);
    assert!(claims.iter().all(|c| c["pass"] == true));
}

#[test]
fn hs_table_of_monomial_ideal() {
    let (code, v) = cli(&["hs", &data("x2y3.ideal"), "--eta", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["hs"], serde_json::json!([1, 3, 5, 6, 6]));
    let (_, o) = cli(&["oracle", "hs", &data("x2y3.ideal"), "--eta", "4"]);
    assert_eq!(o["result"]["hs"], v["result"]["hs"]);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["divide", &data("empty_divisors.ideal"), "--f", "x"]).0, 1);
    assert_eq!(cli(&["divide", &data("x2y3.ideal"), "--f", "x +* y"]).0, 1);
    assert_eq!(cli(&["no-such-command"]).0, 1);
    assert_eq!(cli(&["hs", &data("missing.ideal"), "--eta", "2"]).0, 1);
    let (code, v) = cli(&["example82", "--mu", "8", "--h", "exp(1+z)"]);
    assert_eq!(code, 1, "{v}");
}

#[test]
fn division_report_is_verified() {
    let (code, v) = cli(&["divide", &data("x2y3.ideal"), "--f", "x^3 + x*y + y^4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verified"], true);
    assert_eq!(v["result"]["remainder"]["expr"], "x*y");
}

#[test]
fn becker_check_verdicts() {
    let (code, v) = cli(&["sbasis", "check", &data("ex82.ideal")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verified"], true);
    let (code, v) = cli(&["sbasis", "check", &data("ex82_perturbed_mu8.ideal"), "--mu", "13"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "claims-fail");
}

#[test]
fn towers() {
    let (code, v) = cli(&["tower", "validate", &data("cusp.ideal")]);
    assert_eq!(code, 0, "{v}");
    let levels = v["result"]["tower"]["levels"].as_array().unwrap();
    let shape: Vec<(u64, u64)> = levels.iter().map(|l| (l["i"].as_u64().unwrap(), l["p"].as_u64().unwrap())).collect();
    assert_eq!(shape, vec![(2, 2), (1, 3)]);
    assert_eq!(v["result"]["tower"]["seed"], 0);
    assert!(v["result"]["tower"]["matrix"].is_array());
    let (code, _) = cli(&["tower", "validate", &data("node.ideal")]);
    assert_eq!(code, 0);
}

#[test]
fn reports_are_reproducible() {
    let args = ["ci-experiment", &data("x2y3.ideal"), "--mu", "6", "--seed", "7"];
    let (c1, a) = cli(&args);
    let (c2, b) = cli(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a["seed"], 7);
    assert_eq!(a["result"]["report"]["hs_equal"], true);
}

#[test]
fn flatness_verdicts() {
    let (_, v) = cli(&["flat", &data("ex82.ideal"), "--k", "2", "--mu", "8"]);
    assert_eq!(v["result"]["flatness"]["verdict"], "FLAT");
    let (_, v) = cli(&["flat", &data("ex82_perturbed_mu8.ideal"), "--k", "2", "--mu", "8"]);
    assert_eq!(v["result"]["flatness"]["verdict"], "NOT-FLAT-AT-MU");
}
