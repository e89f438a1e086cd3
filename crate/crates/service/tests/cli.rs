mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use serde_json::Value;

use inquiry_core::script::{example_script, EXAMPLE_SCRIPT_JSON};
use inquiry_core::store::Store;
use inquiry_service::cli::{self, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};

use common::{drive, manager, plain_answer, SCRIPT_ID};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["inquiry"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_inquiry"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A store holding three completed sessions and one still active.
fn seeded_store(dir: &Path) -> PathBuf {
    let path = dir.join("sessions.ndjson");
    let script = example_script();
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    for k in 0..3 {
        let id = m.start_session(SCRIPT_ID).unwrap().session_id;
        drive(&m, &id, |q| match q {
            "Q4" => if k == 0 { "yes" } else { "no" }.into(),
            "Q3" => "exams cause stress because of family pressure".into(),
            "Q6" => "therapy is expensive and I am afraid of being judged".into(),
            _ => plain_answer(&script, q),
        });
    }
    let id = m.start_session(SCRIPT_ID).unwrap().session_id;
    m.submit_utterance(&id, "money worries").unwrap();
    path
}

#[test]
fn validate_good_script_is_silent_success() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, EXAMPLE_SCRIPT_JSON).unwrap();
    let o = run(&["validate", s(&good)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.out, "");
    assert_eq!(o.err, "");

    let bin = binary(&["validate", s(&good)]);
    assert_eq!(bin.status.code(), Some(0));
    assert!(bin.stdout.is_empty());
}

#[test]
fn validate_bad_script_lists_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(EXAMPLE_SCRIPT_JSON).unwrap();
    v["consistency_pairs"][0]["question_b"] = "NOPE".into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = run(&["validate", s(&bad)]);
    assert_eq!(o.code, EXIT_DOMAIN);
    assert!(o.out.contains("NOPE"), "{}", o.out);
    assert_eq!(o.out.lines().count(), 1);

    let unreadable = dir.path().join("missing.json");
    assert_eq!(run(&["validate", s(&unreadable)]).code, EXIT_DOMAIN);
}

#[test]
fn analyze_missing_store_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.ndjson");
    let o = run(&["analyze", "--store", s(&missing)]);
    assert_eq!(o.code, EXIT_DOMAIN);
    assert_eq!(o.err, format!("store not found: {}\n", missing.display()));
    assert_eq!(o.out, "");

    let bin = binary(&["analyze", "--store", s(&missing)]);
    assert_eq!(bin.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bin.stderr).contains(&format!("store not found: {}", missing.display())));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["serve", "--port", "0"]).code, EXIT_USAGE);
    assert_eq!(run(&["serve", "--port", "70000"]).code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&[]).code, EXIT_USAGE);
    assert_eq!(run(&["code", "--method", "astrology", "--store", "x"]).code, EXIT_USAGE);
    assert_eq!(run(&["quantify", "--units", "days/fortnight", "--text", "x"]).code, EXIT_USAGE);
    let bin = binary(&["serve", "--port", "0"]);
    assert_eq!(bin.status.code(), Some(2));
    assert!(!bin.stderr.is_empty());
}

#[test]
fn help_and_version_succeed() {
    let o = run(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    for sub in ["validate", "serve", "quantify", "code", "analyze", "export"] {
        assert!(o.out.contains(sub), "help lacks {sub}");
    }
    assert_eq!(run(&["--version"]).code, EXIT_OK);
}

#[test]
fn quantify_prints_entities_frequency_and_sentiment() {
    let o = run(&["quantify", "--units", "times/week", "--text", "I skip meals 3-5 times a week and feel awful"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["frequency"]["count"], 4.0);
    assert_eq!(v["frequency"]["per_day_rate"], 4.0 / 7.0);
    assert!(v["sentiment"]["score"].as_f64().unwrap() < 0.0);
    assert!(v["entities"].as_array().unwrap().iter().any(|e| e["lemma"] == "meal"));
}

#[test]
fn export_is_anonymized_ndjson_and_compacts() {
    let dir = tempfile::tempdir().unwrap();
    let store = seeded_store(dir.path());
    let before = std::fs::read_to_string(&store).unwrap().lines().count();
    let o = run(&["export", "--store", s(&store)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    let lines: Vec<Value> = o.out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.get("transcript").is_none()));
    let ids: Vec<&str> = lines.iter().map(|l| l["session_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let one = run(&["export", "--store", s(&store), "--session", ids[1]]);
    assert_eq!(one.out.lines().count(), 1);
    assert_eq!(run(&["export", "--store", s(&store), "--session", "feed"]).code, EXIT_DOMAIN);

    let compacted = run(&["export", "--store", s(&store), "--compact"]);
    assert_eq!(compacted.out, o.out);
    let after = std::fs::read_to_string(&store).unwrap().lines().count();
    assert!(before > after);
    assert_eq!(after, 4);
}

#[test]
fn code_methods_emit_ndjson() {
    let dir = tempfile::tempdir().unwrap();
    let store = seeded_store(dir.path());
    let parse = |o: &Outcome| -> Vec<Value> { o.out.lines().map(|l| serde_json::from_str(l).unwrap()).collect() };

    let emotion = run(&["code", "--method", "emotion", "--store", s(&store)]);
    assert_eq!(emotion.code, EXIT_OK, "{}", emotion.err);
    let rows = parse(&emotion);
    assert!(rows.iter().any(|r| r["question_id"] == "Q6" && r["label"] == "negative"));

    let hyp = run(&["code", "--method", "hypothesis", "--store", s(&store), "--hypothesis", "H0_professional_help"]);
    assert_eq!(hyp.code, EXIT_OK, "{}", hyp.err);
    let rows = parse(&hyp);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["supports"], 2);
    assert_eq!(rows[0]["refutes"], 1);
    let missing = run(&["code", "--method", "hypothesis", "--store", s(&store), "--hypothesis", "H9"]);
    assert_eq!(missing.code, EXIT_DOMAIN);
    assert_eq!(missing.err, "hypothesis not found: H9\n");

    let thematic = run(&["code", "--method", "thematic", "--store", s(&store)]);
    assert_eq!(thematic.code, EXIT_OK, "{}", thematic.err);
    assert!(!parse(&thematic).is_empty());

    let causation = run(&["code", "--method", "causation", "--store", s(&store)]);
    assert_eq!(causation.code, EXIT_OK, "{}", causation.err);
    assert!(parse(&causation).iter().any(|r| r["question_id"] == "Q3"));

    let inductive = run(&["code", "--method", "thematic", "--inductive", "--store", s(&store)]);
    assert_eq!(inductive.code, EXIT_OK, "{}", inductive.err);
}

#[test]
fn analyze_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let store = seeded_store(dir.path());
    let a = run(&["analyze", "--store", s(&store)]);
    let b = run(&["analyze", "--store", s(&store)]);
    assert_eq!(a.code, EXIT_OK, "{}", a.err);
    assert_eq!(a.out, b.out);
    let v: Value = serde_json::from_str(&a.out).unwrap();
    assert_eq!(v["sessions"]["completed"], 3);
    assert_eq!(v["alpha"], 0.05);

    let out = dir.path().join("report.json");
    let o = run(&["analyze", "--store", s(&store), "--out", s(&out), "--csv", "--alpha", "0.01"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.err);
    assert_eq!(o.out, "");
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["alpha"], 0.01);
    let csvs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("report.") && n.ends_with(".csv"))
        .collect();
    assert!(csvs.len() >= 4, "{csvs:?}");

    assert_eq!(run(&["analyze", "--store", s(&store), "--alpha", "1.5"]).code, EXIT_DOMAIN);
}
