//! End-to-end runs of the `tsl` binary: exit codes, files written and the
//! shape of every report against the published schemas.

use std::fs::{self, File};
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tsl_core::groups::{growth_series, FreeProductSpec};
use tsl_core::sequence::write_coeffs_csv;

struct Run {
    code: i32,
    json: Value,
    stderr: String,
}

fn tsl(args: &[&str]) -> Run {
    tsl_env(args, &[])
}

fn tsl_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tsl"));
    cmd.args(args).env_remove("TSL_PRECISION_BITS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("tsl runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = if stdout.trim().is_empty() { Value::Null } else { serde_json::from_str(&stdout).expect("stdout is JSON") };
    Run { code: out.status.code().expect("exit code"), json, stderr: String::from_utf8(out.stderr).unwrap() }
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    serde_json::from_reader(File::open(path).unwrap()).unwrap()
}

fn assert_valid(doc: &Value) {
    let report = jsonschema::validator_for(&schema("report.schema.json")).unwrap();
    let errors: Vec<String> = report.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    if let Some(input) = doc.get("input") {
        let spec = jsonschema::validator_for(&schema("series-spec.schema.json")).unwrap();
        let errors: Vec<String> = spec.iter_errors(input).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{errors:#?}");
    }
}

fn machi_csv(dir: &Path) -> std::path::PathBuf {
    let coeffs = growth_series(&FreeProductSpec::new(vec![2, 3]).unwrap()).taylor(513);
    let path = dir.join("machi.csv");
    write_coeffs_csv(File::create(&path).unwrap(), &coeffs).unwrap();
    path
}

fn q(v: &Value) -> (String, String) {
    (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
}

fn pair(n: &str, d: &str) -> (String, String) {
    (n.to_string(), d.to_string())
}

#[test]
fn schemas_compile_under_draft_2020_12() {
    for name in ["report.schema.json", "series-spec.schema.json"] {
        jsonschema::draft202012::new(&schema(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn duality_on_machi_passes() {
    let r = tsl(&["duality", "--group", "2,3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    assert_eq!(r.json["status"], "pass");
    let rep = &r.json["report"];
    assert_eq!(rep["h_p"], 2);
    assert_eq!(rep["d_p"], 2);
    assert_eq!(rep["delta_op_display"], "1 - 1/2*s^2");
    assert!(rep["reversal_residual"].as_f64().unwrap() < 1e-30);
    let initials: Vec<_> = rep["accumulation"]["initials"].as_array().unwrap().iter().map(|l| q(&l["exact"])).collect();
    assert_eq!(initials, vec![pair("5", "7"), pair("7", "10")]);
}

#[test]
fn analyze_reads_inline_and_csv_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = machi_csv(dir.path());
    for args in [vec!["analyze", "--group", "2,3"], vec!["analyze", "--coeffs", csv.to_str().unwrap()]] {
        let r = tsl(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        assert_valid(&r.json);
        let rep = &r.json["report"];
        assert_eq!(rep["verdict"], "finite_rational");
        assert_eq!(rep["h_p"], 2);
        assert_eq!(q(&rep["a_p"]["exact"]), pair("1", "2"), "{args:?}");
        assert_eq!(rep["opposite_forms"].as_array().unwrap().len(), 2);
    }
    let r = tsl(&["analyze", "--rational", "1;1,-1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["report"]["h_p"], 1);
}

#[test]
fn analyze_reads_a_json_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let spec = r#"{"kind":"derivative","order":1,"inner":{"kind":"free_product","orders":[2,3]}}"#;
    fs::write(&path, spec).unwrap();
    let r = tsl(&["analyze", "--spec", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    let initials: Vec<_> = r.json["report"]["initials"].as_array().unwrap().iter().map(|l| q(&l["exact"])).collect();
    assert_eq!(initials, vec![pair("7", "10"), pair("5", "7")]);
}

#[test]
fn emit_ratios_and_out_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let ratios = dir.path().join("ratios.csv");
    let out = dir.path().join("report.json");
    let r = tsl(&[
        "analyze",
        "--group",
        "2,3",
        "--horizon",
        "128",
        "--tolerance",
        "1e-10",
        "--emit-ratios",
        ratios.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json, Value::Null, "stdout stays empty with --out");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid(&doc);
    let text = fs::read_to_string(&ratios).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,class,ratio_re,ratio_im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 128);
    assert!(rows[0].starts_with("1,1,"));
}

#[test]
fn precision_comes_from_the_environment() {
    let r = tsl_env(&["analyze", "--group", "2,3"], &[("TSL_PRECISION_BITS", "512")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["config"]["precision"], 512);
    let r = tsl_env(&["analyze", "--group", "2,3", "--precision", "128"], &[("TSL_PRECISION_BITS", "512")]);
    assert_eq!(r.json["config"]["precision"], 128);
    let r = tsl(&["analyze", "--group", "2,3", "--precision", "32"]);
    assert_eq!(r.code, 2);
    assert_valid(&r.json);
}

#[test]
fn strict_mode_rechecks() {
    let r = tsl(&["duality", "--group", "2,3", "--strict"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["report"]["strict_recheck"], true);
    let r = tsl(&["analyze", "--group", "2,3", "--strict"]);
    assert_eq!(r.json["report"]["strict_recheck"], true);
}

#[test]
fn sqrt_fixture_is_refused_by_duality() {
    let r = tsl(&["duality", "--fixture", "sqrt"]);
    assert_eq!(r.code, 2);
    assert_valid(&r.json);
    assert_eq!(r.json["status"], "error");
    assert_eq!(r.json["error"]["kind"], "non_meromorphic");
    assert!(r.stderr.contains("non-meromorphic"));

    let r = tsl(&["analyze", "--fixture", "sqrt"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["report"]["h_p"], 1);
    assert_eq!(r.json["report"]["omega1"]["count"], 1);
    assert_eq!(q(&r.json["report"]["omega1"]["values"][0]["exact"]), pair("1", "1"));
}

#[test]
fn squares_model_is_inconclusive() {
    let r = tsl(&["analyze", "--model", "set=squares;a=1/2;b=2"]);
    assert_eq!(r.code, 3);
    assert_valid(&r.json);
    assert_eq!(r.json["status"], "inconclusive");
    assert_eq!(r.json["report"]["verdict"], "inconclusive");
    assert!(r.json["report"]["h_p"].is_null());
}

#[test]
fn rational_models_accumulate() {
    let r = tsl(&["analyze", "--model", "set=mod:3:0;a=1/2;b=2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    assert_eq!(r.json["report"]["h_p"], 3);
}

#[test]
fn bad_inputs_exit_two() {
    for args in [
        vec!["analyze", "--rational", "1;0,1"],
        vec!["analyze", "--rational", "garbage"],
        vec!["analyze", "--group", "1,3"],
        vec!["analyze", "--model", "set=cubes;a=1;b=2"],
        vec!["analyze", "--coeffs", "/nonexistent/coeffs.csv"],
        vec!["stratify", "--h", "9"],
        vec!["stratify", "--h", "2", "--radius", "-1"],
        vec!["sections", "--group", "2,3", "--modulus", "0"],
    ] {
        let r = tsl(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert_valid(&r.json);
        assert_eq!(r.json["status"], "error", "{args:?}");
    }
    // argument errors come from the parser and print usage instead of JSON
    assert_eq!(tsl(&["analyze"]).code, 2);
    assert_eq!(tsl(&["analyze", "--group", "2,3", "--rational", "1;1,-1"]).code, 2);
}

#[test]
fn stratify_lists_labels() {
    let r = tsl(&["stratify", "--h", "4", "--radius", "2/3", "--seed", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    let rep = &r.json["report"];
    assert_eq!(rep["count"], 4);
    assert_eq!(rep["period_product"], "16/81");
    let polys: Vec<&str> = rep["strata"].as_array().unwrap().iter().map(|s| s["label"]["polynomial"].as_str().unwrap()).collect();
    assert_eq!(polys, ["1 - s", "1 - s^2", "1 - s + s^2 - s^3", "1 - s^4"]);
    assert!(rep["strata"].as_array().unwrap().iter().all(|s| s["sample"]["verified"] == true));
}

#[test]
fn sections_of_machi() {
    let r = tsl(&["sections", "--group", "2,3", "--modulus", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    let rep = &r.json["report"];
    assert_eq!(rep["all_hold"], true);
    let shown: Vec<&str> = rep["sections"].as_array().unwrap().iter().map(|s| s["display"].as_str().unwrap()).collect();
    assert_eq!(shown, ["(1 + 5*t^2) / (1 - 3*t^2 + 2*t^4)", "(4*t + 2*t^3) / (1 - 3*t^2 + 2*t^4)"]);
}

#[test]
fn oracle_agrees() {
    let r = tsl(&["oracle", "--group", "2,3,4", "--length", "8"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_valid(&r.json);
    assert_eq!(r.json["report"]["agree"], true);
    assert_eq!(r.json["report"]["counts"].as_array().unwrap().len(), 9);
}
