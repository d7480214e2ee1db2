use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_forcing-lab");

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(name: &str, text: &str) -> PathBuf {
    let path = tmp(name);
    fs::write(&path, text).unwrap();
    path
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Run a subcommand on a file, returning the exit code and the parsed,
/// schema-checked report.
fn report(sub: &str, input: &Path, extra: &[&str]) -> (i32, Value) {
    let out = tmp(&format!("{}.report.json", input.file_stem().unwrap().to_string_lossy()));
    let _ = fs::remove_file(&out);
    let mut args = vec![sub, "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = run(&args);
    let code = output.status.code().unwrap();
    let value: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let errors: Vec<String> = validator().iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{} report breaks the schema: {errors:?}", input.display());
    (code, value)
}

#[test]
fn bundled_scenarios_match_the_schema() {
    let expected = [
        ("slalom.json", 0),
        ("refine.json", 0),
        ("extend.json", 0),
        ("generic_run.json", 0),
        ("smz.json", 0),
        ("rapid.json", 0),
        ("diagram_pair.json", 0),
        ("diagram_violation.json", 1),
    ];
    let on_disk = fs::read_dir(scenario("")).unwrap().count();
    assert_eq!(on_disk, expected.len());
    for (file, code) in expected {
        let (got, value) = report("run", &scenario(file), &[]);
        assert_eq!(got, code, "{file}");
        assert_eq!(value["passed"], code == 0);
    }
}

#[test]
fn slalom_report_lists_the_heavy_value() {
    let (code, value) = report("slalom", &scenario("slalom.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(value["outputs"]["slalom"]["slots"][1], serde_json::json!([0]));
    assert_eq!(value["outputs"]["slalom"]["slots"][0], serde_json::json!([]));
}

#[test]
fn empty_schedule_gives_depth_three() {
    let input = write("steps3.json", r#"{"schedule": [], "steps": 3}"#);
    let (code, value) = report("generic-run", &input, &["--seed", "4"]);
    assert_eq!(code, 0);
    assert_eq!(value["outputs"]["final_depth"], 3);
    assert_eq!(value["seed"], 4);
}

#[test]
fn violating_assignment_exits_one_with_edge_list() {
    let input = scenario("diagram_violation.json");
    let output = run(&["diagram", "--input", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let value: Value = serde_json::from_slice(&output.stdout).unwrap();
    let violations = value["outputs"]["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert_eq!(violations[0]["lower"], "add(N)");
    assert_eq!(violations[0]["upper"], "cov(N)");
    let table = String::from_utf8(output.stderr).unwrap();
    assert!(table.contains("add(N) <= cov(N)"), "{table}");
}

#[test]
fn same_seed_same_body() {
    let input = scenario("extend.json");
    let (_, a) = report("extend", &input, &[]);
    let (_, b) = report("extend", &input, &[]);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(a), strip(b));

    let (_, c) = report("extend", &input, &["--seed", "12"]);
    assert_eq!(c["seed"], 12);
}

#[test]
fn caps_are_echoed() {
    let (_, value) = report("extend", &scenario("extend.json"), &["--retry-cap", "3", "--exhaustive-cap", "16"]);
    assert_eq!(value["inputs"]["config"]["retry_cap"], 3);
    assert_eq!(value["inputs"]["config"]["exhaustive_cap"], 16);
}

#[test]
fn schema_errors_exit_two() {
    let no_seed = write(
        "noseed.json",
        r#"{"version": 1, "kind": "extend", "params": {"condition": {"m": 0, "h": [["", ""]], "u": []}}}"#,
    );
    let garbage = write("garbage.json", "{ not json");
    let wrong_kind = scenario("smz.json");
    let bad_field = write("badfield.json", r#"{"eps": [], "horizon": 1, "bogus": 1}"#);
    for (sub, path) in [("extend", &no_seed), ("slalom", &garbage), ("rapid", &wrong_kind), ("smz", &bad_field)] {
        let output = run(&[sub, "--input", path.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(2), "{sub} {}", path.display());
        assert!(String::from_utf8_lossy(&output.stderr).contains("schema error"));
    }
    assert_eq!(run(&["slalom"]).status.code(), Some(2));
}

#[test]
fn module_errors_land_in_the_report() {
    let mut caught: Value = serde_json::from_str(&fs::read_to_string(scenario("refine.json")).unwrap()).unwrap();
    // Label 6 has measure 1/4 at coordinate 2, above the 1/9 threshold.
    caught["params"]["f"][2] = Value::from(6);
    let input = write("refine_caught.json", &caught.to_string());
    let (code, value) = report("refine", &input, &[]);
    assert_eq!(code, 1);
    assert_eq!(value["error"]["module"], "name_calculus");
    assert!(value["error"]["message"].as_str().unwrap().contains("f(2) = 6"));
}

#[test]
fn selftest_passes_and_names_a_corrupted_criterion() {
    let output = run(&["selftest"]);
    let matrix = String::from_utf8(output.stdout).unwrap();
    assert_eq!(output.status.code(), Some(0), "{matrix}");
    assert_eq!(matrix.lines().filter(|l| l.contains("PASS")).count(), 11);

    let mut broken: Value = serde_json::from_str(forcing_lab::acceptance::BUNDLED_FIXTURE).unwrap();
    broken["diagram"]["constraints"][1]["expect"][0]["bound"] = Value::from("aleph_1");
    let path = write("broken_fixture.json", &broken.to_string());
    let output = run(&["selftest", "--input", path.to_str().unwrap()]);
    let matrix = String::from_utf8(output.stdout).unwrap();
    assert_eq!(output.status.code(), Some(1));
    let failing: Vec<&str> = matrix.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 1, "{matrix}");
    assert!(failing[0].contains("diagram"));

    let path = write("unreadable_fixture.json", "[1, 2");
    assert_eq!(run(&["selftest", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}
