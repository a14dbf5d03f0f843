use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mia").chain(args.iter().copied());
    let code = mia_cli::dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = run(&a);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

#[test]
fn reference_algebra_verdicts() {
    let fig = fixture("fig_notwmia.json");
    let (code, v) = run_json(&["check-algebra", &fig, "--suite", "eq45,wMIA,dMIA"]);
    assert_eq!(code, 1);
    let reps = v["reports"].as_array().unwrap();
    assert_eq!(reps[0]["id"], "eq45");
    assert_eq!(reps[0]["holds"], true);
    assert_eq!(reps[1]["id"], "wMIA");
    assert_eq!(reps[1]["holds"], false);
    assert_eq!(reps[1]["witness"], serde_json::json!([["a"], ["a"]]));
    assert_eq!(reps[2]["holds"], false);
    let (code, _, _) = run(&["check-algebra", &fig, "--suite", "eq45"]);
    assert_eq!(code, 0);
}

#[test]
fn special_of_worked_example() {
    let (code, v) = run_json(&["special", &fixture("frame.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["relations_agree"], true);
    assert_eq!(v["frame"]["worlds"].as_array().unwrap().len(), 6);
    assert!(v["frame"].get("S").is_none());
    assert_eq!(v["frame"]["R"].as_array().unwrap().len(), 6);
    assert_eq!(v["frame"]["special"], true);
}

#[test]
fn special_output_is_a_loadable_frame() {
    let (_, v) = run_json(&["special", &fixture("frame.json")]);
    let dir = std::env::temp_dir().join(format!("mia-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("special.json");
    std::fs::write(&path, v["frame"].to_string()).unwrap();
    let p = path.to_string_lossy().into_owned();
    let (code, rep) = run_json(&["check-frame", &p, "--props", "special,wmia,bt2"]);
    assert_eq!(code, 1);
    let reps = rep["reports"].as_array().unwrap();
    assert_eq!(reps[0]["holds"], true);
    assert_eq!(reps[1]["holds"], true);
    assert_eq!(reps[2]["witness"], serde_json::json!(["x'", "y", "z"]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn soundness_on_wmia_frames() {
    for f in ["frame.json", "companion.json", "model.json"] {
        let (code, v) = run_json(&["sound", &fixture(f), "--depth", "1", "--vars", "2"]);
        assert_eq!(code, 0, "{f}");
        assert_eq!(v["all_valid"], true);
        assert_eq!(v["schemas"].as_array().unwrap().len(), 9);
    }
}

#[test]
fn soundness_failure_on_non_wmia_frame() {
    let f = fixture("not_wmia_frame.json");
    let (code, _, err) = run(&["sound", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("wMIA"), "{err}");
    let (code, v) = run_json(&["sound", &f, "--unchecked", "--depth", "0", "--vars", "1"]);
    assert_eq!(code, 1);
    let failing: Vec<&str> = v["schemas"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["valid"] == false)
        .map(|s| s["schema"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"T_U"), "{failing:?}");
}

#[test]
fn budget_overflow_is_exit_two() {
    let f = fixture("frame.json");
    let (code, _, err) = run(&["sound", &f, "--vars", "2", "--budget", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"), "{err}");
    let out = Command::new(env!("CARGO_BIN_EXE_mia"))
        .args(["sound", &f, "--vars", "2"])
        .env("MIA_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let (code, _, _) = run(&["search", "--algebras", "3", "--budget", "100"]);
    assert_eq!(code, 2);
}

#[test]
fn embeddings() {
    let (code, v) = run_json(&["embed", &fixture("top2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["worlds"], 4);
    assert_eq!(v["equations"]["holds"], true);
    let (code, _, _) = run(&["embed", &fixture("fig_notwmia.json")]);
    assert_eq!(code, 2);
    let (code, v) = run_json(&["embed-canonical", &fixture("top2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["worlds"], 2);
    let (code, v) = run_json(&["embed-canonical", &fixture("companion.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["map"]["x"], "u_x");
    assert_eq!(v["r_preserved"], true);
}

#[test]
fn complex_and_canonical_round_trip() {
    let (code, cm) = run_json(&["complex", &fixture("companion.json")]);
    assert_eq!(code, 0);
    assert_eq!(cm["atoms"], serde_json::json!(["x", "y", "z"]));
    assert_eq!(cm["f"]["x,z"], serde_json::json!(["y"]));
    let dir = std::env::temp_dir().join(format!("mia-cli-cm-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cm.json");
    std::fs::write(&path, cm.to_string()).unwrap();
    let p = path.to_string_lossy().into_owned();
    let (_, fast) = run_json(&["canonical", &p]);
    let (_, slow) = run_json(&["canonical", &p, "--exhaustive"]);
    assert_eq!(fast, slow);
    assert_eq!(fast["R"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn model_checking() {
    let m = fixture("model.json");
    let (code, v) = run_json(&["mc", &m, "--formula", "p0 & ~p1"]);
    assert_eq!(code, 1);
    assert_eq!(v["extension"], serde_json::json!(["x", "z"]));
    let (code, _, _) = run(&["mc", &m, "--formula", "p0 & ~p1", "--world", "x"]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["mc", &m, "--formula", "p0 & ~p1", "--world", "y"]);
    assert_eq!(code, 1);
    let (code, _, err) = run(&["mc", &m, "--formula", "p0 &"]);
    assert_eq!(code, 2);
    assert!(err.contains("syntax"), "{err}");
    let (code, _, _) = run(&["mc", &m, "--formula", "p5"]);
    assert_eq!(code, 2);
}

#[test]
fn equivalence_with_underlined_model() {
    let (code, v) = run_json(&["equiv", &fixture("model.json"), "--depth", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["pool_size"], 786);
    let (code, v) = run_json(&[
        "equiv",
        &fixture("model.json"),
        "--depth",
        "1",
        "--other",
        &fixture("frame.json"),
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["holds"], false);
}

#[test]
fn search_exit_codes() {
    let (code, v) = run_json(&[
        "search",
        "--algebras",
        "2",
        "--require",
        "dMIA",
        "--forbid",
        "eq45",
        "--limit",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["hits"][0]["index"], "4");
    let (code, v) = run_json(&["search", "--algebras", "2", "--require", "wMIA", "--forbid", "dMIA"]);
    assert_eq!(code, 1);
    assert_eq!(v["manifest"]["exhausted"], true);
    assert_eq!(v["manifest"]["examined"], "65536");
    let (code, _, _) = run(&["search", "--algebras", "2", "--require", "nonsense"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["search", "--frames", "5"]);
    assert_eq!(code, 2);
    let (code, v) = run_json(&["search", "--frames", "1", "--require", "wmia,bt1"]);
    assert_eq!(code, 0);
    assert_eq!(v["manifest"]["space"], "4");
}

#[test]
fn search_cursor_resumes() {
    let args = ["search", "--algebras", "1", "--require", "wMIA"];
    let (_, all) = run_json(&args);
    let mut tail = args.to_vec();
    tail.extend(["--cursor", "2"]);
    let (_, rest) = run_json(&tail);
    let idx = |v: &Value| -> Vec<String> {
        v["hits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|h| h["index"].as_str().unwrap().to_string())
            .collect()
    };
    let full = idx(&all);
    assert_eq!(full, ["0", "2", "3"]);
    assert_eq!(idx(&rest), ["2", "3"]);
}

#[test]
fn manifest_file_has_timing_stdout_does_not() {
    let dir = std::env::temp_dir().join(format!("mia-cli-man-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("manifest.json");
    let p = path.to_string_lossy().into_owned();
    let (code, v) = run_json(&["search", "--frames", "2", "--mode", "random:50:7", "--manifest", &p]);
    assert!(code == 0 || code == 1);
    assert!(v["manifest"].get("elapsed_ms").is_none());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(m.get("elapsed_ms").is_some());
    assert_eq!(m["mode"], "random:50:7");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_is_deterministic() {
    let cases: Vec<Vec<String>> = vec![
        vec!["check-algebra".into(), fixture("fig_notwmia.json")],
        vec!["special".into(), fixture("frame.json")],
        vec!["sound".into(), fixture("companion.json")],
        vec!["equiv".into(), fixture("model.json")],
        vec![
            "search".into(),
            "--frames".into(),
            "2".into(),
            "--mode".into(),
            "random:300:3".into(),
            "--require".into(),
            "wmia".into(),
        ],
        vec![
            "search".into(),
            "--algebras".into(),
            "2".into(),
            "--mode".into(),
            "stratified:500".into(),
            "--require".into(),
            "sigma".into(),
        ],
    ];
    for case in cases {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let mut first = args.clone();
        first.push("--json");
        let (c1, a, _) = run(&first);
        let mut second = first.clone();
        second.extend(["--threads", "1"]);
        let (c2, b, _) = run(&second);
        assert_eq!(c1, c2, "{case:?}");
        assert_eq!(a, b, "{case:?}");
        let (_, t1, _) = run(&args);
        let (_, t2, _) = run(&args);
        assert_eq!(t1, t2, "{case:?}");
    }
}

#[test]
fn usage_errors() {
    for args in [
        vec!["bogus"],
        vec!["check-algebra"],
        vec!["check-algebra", "/nonexistent/file.json"],
        vec!["check-frame", &fixture("fig_notwmia.json")],
        vec!["check-frame", &fixture("frame.json"), "--props", "bt9"],
        vec!["search", "--algebras", "2", "--frames", "2"],
        vec!["search", "--algebras", "2", "--mode", "sometimes"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("check-algebra"));
}
