use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nc")).args(args).env_remove("NC_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn enumerate_families() {
    let o = nc(&["enumerate", "--family", "nc", "--k", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 5);

    let o = nc(&["enumerate", "--family", "nc2", "--k", "3"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());

    let o = nc(&["enumerate", "--family", "nch", "--k", "4", "--format", "json"]);
    let parts: Vec<String> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(parts, ["{{1,2,3,4}}", "{{1,2},{3,4}}", "{{1,4},{2,3}}"]);

    let o = nc(&["enumerate", "--family", "all", "--k", "4", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 16);
}

#[test]
fn bounds_and_usage_errors() {
    assert_eq!(code(&nc(&["enumerate", "--family", "nc", "--k", "7"])), 2);
    let o = nc(&["enumerate", "--family", "nc", "--k", "7", "--bound", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 429);
    assert_eq!(code(&nc(&["weingarten", "--group", "s+", "--k", "9", "--n", "4"])), 2);
    assert_eq!(code(&nc(&["verify", "no-such-suite"])), 2);
    assert_eq!(code(&nc(&["enumerate", "--family", "xyz", "--k", "2"])), 2);
    assert_eq!(code(&nc(&["integrate", "--group", "o+", "--n", "3", "--i", "1,4", "--j", "1,1"])), 2);
}

fn weingarten_json(group: &str, k: &str, n: &str) -> Value {
    let o = nc(&["weingarten", "--group", group, "--k", k, "--n", n, "--format", "json"]);
    assert_eq!(code(&o), 0);
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn weingarten_tables() {
    // G = [[n, n], [n, n²]] in canonical order, inverse 1/(n²−n)·[[n, −1], [−1, 1]]
    let v = weingarten_json("s+", "2", "5");
    assert_eq!(v["partitions"], serde_json::json!(["{{1,2}}", "{{1},{2}}"]));
    assert_eq!(v["gram"], serde_json::json!([["5", "5"], ["5", "25"]]));
    assert_eq!(v["weingarten"], serde_json::json!([["1/4", "-1/20"], ["-1/20", "1/20"]]));

    let v = weingarten_json("o+", "2", "4");
    assert_eq!(v["weingarten"], serde_json::json!([["1/4"]]));

    let v = weingarten_json("o+", "3", "4");
    assert_eq!(v["weingarten"], serde_json::json!([]));

    let text = stdout(&nc(&["weingarten", "--group", "s+", "--k", "2", "--n", "5"]));
    for entry in ["1/20", "-1/20", "1/4"] {
        assert!(text.contains(entry), "{text}");
    }

    let o = nc(&["weingarten", "--group", "s+", "--k", "2", "--n", "1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn haar_integrals() {
    let o = nc(&["integrate", "--group", "o+", "--n", "4", "--i", "1,1", "--j", "2,2"]);
    assert_eq!(stdout(&o), "1/4\n");
    // ∫ u_{11} over S⁺_n is 1/n
    let o = nc(&["integrate", "--group", "s+", "--n", "5", "--i", "1", "--j", "1"]);
    assert_eq!(stdout(&o), "1/5\n");
}

fn fixture(dir: &Path, name: &str, args: &[&str]) -> String {
    let o = nc(&[&["fixture"], args].concat());
    assert_eq!(code(&o), 0);
    let path = dir.join(name);
    std::fs::write(&path, &o.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn invariance_of_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let symmetric = fixture(dir.path(), "symmetric.json", &["symmetric-semicircular", "--n", "4", "--k", "2"]);
    let uniform = fixture(dir.path(), "uniform.json", &["uniform-semicircular", "--n", "4", "--k", "3"]);
    let constant = fixture(dir.path(), "constant.json", &["constant", "--n", "4", "--k", "2"]);

    let o = nc(&["invariance", &symmetric, "--group", "s+"]);
    assert_eq!(code(&o), 1);
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["consistent"], false);
    assert!(cert["words"].as_array().unwrap().iter().any(|w| w["word"] == serde_json::json!([0, 0]) && w["witness"].is_array()));

    let o = nc(&["invariance", &uniform, "--group", "o+"]);
    assert_eq!(code(&o), 0);
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["consistent"], true);

    // the constant matrix is the sum over 0_{2k} with coefficient 1
    let o = nc(&["invariance", &constant, "--group", "b+"]);
    assert_eq!(code(&o), 0);
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    for w in cert["words"].as_array().unwrap() {
        let coeffs = w["coefficients"].as_array().unwrap();
        let k = w["word"].as_array().unwrap().len();
        let zero = format!("{{{}}}", (1..=2 * k).map(|p| format!("{{{p}}}")).collect::<Vec<_>>().join(","));
        for c in coeffs {
            let expect = if c["partition"] == zero.as_str() { "1" } else { "0" };
            assert_eq!(c["value"], expect, "{c}");
        }
    }

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"s\": 1}").unwrap();
    assert_eq!(code(&nc(&["invariance", bad.to_str().unwrap(), "--group", "o+"])), 2);
    assert_eq!(code(&nc(&["invariance", "/no/such/file.json", "--group", "o+"])), 2);
}

#[test]
fn verify_suites() {
    let o = nc(&["verify", "fatfacts", "--k", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().last().unwrap().starts_with("pass"));

    let o = nc(&["verify", "splus-counterexample", "--n", "4", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suite"], "splus-counterexample");

    let o = nc(&["verify", "limit-convergence", "--n", "4,8,16,32"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1/4, 1/8, 1/16, 1/32"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["enumerate", "--family", "ncb", "--k", "6", "--format", "json"][..],
        &["weingarten", "--group", "h+", "--k", "6", "--n", "5", "--format", "csv"],
        &["fixture", "uniform-free-poisson", "--n", "3", "--k", "3"],
        &["verify", "mobius", "--k", "5", "--format", "json"],
    ] {
        assert_eq!(nc(args).stdout, nc(args).stdout, "{args:?}");
    }
}

#[test]
fn weingarten_cache() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_nc"))
            .args(["weingarten", "--group", "b+", "--k", "4", "--n", "6", "--format", "json"])
            .env("NC_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let file = dir.path().join("weingarten-bplus-4-6.json");
    assert!(file.exists());
    assert_eq!(run().stdout, first.stdout);
    assert_eq!(first.stdout, nc(&["weingarten", "--group", "b+", "--k", "4", "--n", "6", "--format", "json"]).stdout);

    // a stored table is read back rather than recomputed
    let mut stored: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    stored["weingarten"][0][0] = "7/3".into();
    std::fs::write(&file, stored.to_string()).unwrap();
    let v: Value = serde_json::from_slice(&run().stdout).unwrap();
    assert_eq!(v["weingarten"][0][0], "7/3");

    // tables for other partitions are ignored
    stored["partitions"][0] = "{{1},{2},{3},{4}}".into();
    std::fs::write(&file, stored.to_string()).unwrap();
    assert_eq!(run().stdout, first.stdout);
}
