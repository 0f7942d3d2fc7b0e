use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn crosscap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosscap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = crosscap(&all);
    let v: Value = serde_json::from_str(&stdout(&out)).expect("stdout is JSON");
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    (code(&out), v)
}

fn steps(v: &Value) -> Vec<&Value> {
    v["steps"].as_array().map(|a| a.iter().collect()).unwrap_or_default()
}

#[test]
fn theorem_a_passes_at_19() {
    let (c, v) = json(&["theorem", "A", "--genus", "19"]);
    assert_eq!(c, 0);
    assert_eq!(v["script"], "THMA");
    assert!(!steps(&v).is_empty());
    assert!(steps(&v).iter().all(|s| s["verdict"]["status"] == "pass"));
}

#[test]
fn parity_and_bound_violations_exit_2() {
    let out = crosscap(&["theorem", "B-even", "--genus", "25"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&crosscap(&["theorem", "A", "--genus", "17"])), 2);
    assert_eq!(code(&crosscap(&["theorem", "3.1", "--genus", "19"])), 2);
    assert_eq!(code(&crosscap(&[])), 2);
    let (c, v) = json(&["theorem", "2.1", "--genus", "4"]);
    assert_eq!(c, 2);
    assert!(v["error"].is_string());
}

#[test]
fn odd_branch_is_recorded() {
    let (c, v) = json(&["theorem", "B-odd", "--genus", "33"]);
    assert_eq!(c, 0);
    let branches: Vec<&str> = v["branches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_str().unwrap())
        .collect();
    assert!(branches.iter().any(|b| b.contains("16")), "{branches:?}");
    let ids: Vec<&str> = steps(&v).iter().map(|s| s["id"].as_str().unwrap()).collect();
    assert!(ids.iter().any(|id| id.ends_with("_alt")), "{ids:?}");
}

#[test]
fn certify_thm21_at_7() {
    let (c, v) = json(&["certify", "--set", "thm21", "--genus", "7"]);
    assert_eq!(c, 0);
    assert_eq!(v["order"]["computed"], "1451520");
    assert_eq!(v["order"]["certificate"], "reached-target");
}

#[test]
fn certify_two_element_set_in_quotient_mode() {
    let (c, v) = json(&["certify", "--set", "thmA", "--genus", "19", "--mode", "quotient"]);
    assert_eq!(c, 0);
    assert_eq!(v["order"]["computed"], v["order"]["expected"]);
    assert_eq!(v["order"]["degree"], (1u64 << 18) - 1);
}

#[test]
fn empty_custom_set_is_below_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.txt");
    std::fs::write(&path, "# no generators\n").unwrap();
    let (c, v) = json(&["certify", "--set", "custom", "--words", path.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert_eq!(v["order"]["computed"], "1");
    assert_eq!(v["order"]["certificate"], "below-target");
}

#[test]
fn custom_words_are_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("words.txt");
    std::fs::write(&path, "T\nA_1A_2^{-1}\nB_1B_2^{-1} # comment\nu_1\n").unwrap();
    let (c, v) = json(&[
        "certify",
        "--set",
        "custom",
        "--words",
        path.to_str().unwrap(),
        "--genus",
        "9",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["order"]["words"].as_array().unwrap().len(), 4);

    std::fs::write(&path, "Q_{1}\n").unwrap();
    let (c, _) = json(&["certify", "--set", "custom", "--words", path.to_str().unwrap()]);
    assert_eq!(c, 2);
}

#[test]
fn memory_guard_exits_3() {
    let (c, v) = json(&["certify", "--set", "thmB", "--genus", "26"]);
    assert_eq!(c, 3);
    assert!(v["error"].as_str().unwrap().contains("override"));
}

#[test]
fn certify_order_after_replay() {
    let (c, v) = json(&["theorem", "2.1", "--genus", "9", "--certify-order"]);
    assert_eq!(c, 0);
    assert_eq!(v["order"]["certificate"], "reached-target");
    let phases: Vec<&str> = v["timing"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(phases, ["replay", "certify"]);
}

fn text_verdicts(text: &str) -> BTreeSet<(String, String)> {
    text.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            let mark = it.next()?;
            let id = it.next()?;
            match mark {
                "PASS" => Some((id.to_string(), "pass".to_string())),
                "FAIL" => Some((id.to_string(), "fail".to_string())),
                _ => None,
            }
        })
        .collect()
}

#[test]
fn text_and_json_agree_on_verdicts() {
    for args in [
        ["theorem", "2.1", "--genus", "12"],
        ["theorem", "B-even", "--genus", "34"],
    ] {
        let text = stdout(&crosscap(&args));
        let (_, v) = json(&args);
        let from_json: BTreeSet<(String, String)> = steps(&v)
            .iter()
            .map(|s| {
                (
                    s["id"].as_str().unwrap().to_string(),
                    s["verdict"]["status"].as_str().unwrap().to_string(),
                )
            })
            .collect();
        assert_eq!(text_verdicts(&text), from_json);
        assert_eq!(from_json.len(), steps(&v).len());
    }
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    if let Some(o) = v.get_mut("order").and_then(|o| o.as_object_mut()) {
        o.remove("from_cache");
    }
    v
}

#[test]
fn reports_are_reproducible_and_cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["theorem", "2.1", "--genus", "11", "--certify-order"];
    let (_, plain) = json(&args);
    let (_, again) = json(&args);
    assert_eq!(without_timing(plain.clone()), without_timing(again));

    let mut cached_args = args.to_vec();
    cached_args.extend(["--cache-dir", cache]);
    let (_, first) = json(&cached_args);
    let (_, second) = json(&cached_args);
    assert_eq!(first["order"]["from_cache"], false);
    assert_eq!(second["order"]["from_cache"], true);
    assert_eq!(without_timing(plain), without_timing(second));
}

#[test]
fn dump_model_tables() {
    let g19 = stdout(&crosscap(&["--dump-model", "--genus", "19"]));
    assert!(g19.contains("a_2 = {1,2,3,4}"));
    let g8 = stdout(&crosscap(&["--dump-model", "--genus", "8"]));
    assert!(g8.lines().any(|l| l.starts_with("c_3 =")), "c_r at g=8");
    let g9 = stdout(&crosscap(&["--dump-model", "--genus", "9"]));
    assert!(g9.lines().any(|l| l.starts_with("c_3 =")));
    assert!(!g9.lines().any(|l| l.starts_with("c_4 =")), "no c_r at g=9");
}
