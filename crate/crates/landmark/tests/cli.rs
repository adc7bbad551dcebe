use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use landmark::formats::read_predictions;
use landmark::{Bundle, EvalReport};
use landmark_core::RegionProgram;

fn landmark(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landmark")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) {
    let out = landmark(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON object");
    v["error"].as_str().unwrap().to_string()
}

fn trained(dir: &Path, template: &str) -> Bundle {
    ok(&["gen-corpus", "--template", template, "--docs", "6", "--seed", "3", "-o", "train"], dir);
    ok(&["train", "train", "train/annotations.json", "-o", "bundle.json", "--report", "report.txt"], dir);
    Bundle::load(&dir.join("bundle.json")).unwrap()
}

#[test]
fn empty_corpus_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    fs::write(dir.path().join("a.json"), "{}").unwrap();
    let out = landmark(&["train", "empty", "a.json", "-o", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "input");
}

#[test]
fn unknown_perturbation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = landmark(&["gen-corpus", "--perturb", "shuffle-everything", "-o", "x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_annotations_are_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen-corpus", "--docs", "2", "-o", "c"], dir.path());
    fs::write(dir.path().join("bad.json"), "[1,").unwrap();
    let out = landmark(&["train", "c", "bad.json", "-o", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flight_bundle_has_one_hops_tuple_per_field() {
    let dir = tempfile::tempdir().unwrap();
    let b = trained(dir.path(), "flight");
    let fields: Vec<&str> = b.programs.iter().map(|p| p.field.as_str()).collect();
    assert_eq!(fields, ["arrive", "booking", "depart", "passenger", "total"]);
    for p in &b.programs {
        assert_eq!(p.tuples.len(), 1, "{}", p.field);
        assert!(matches!(p.tuples[0].region_program, RegionProgram::Hops(_)));
    }
    assert_eq!(b.program("depart").unwrap().tuples[0].landmark, "Depart:");
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report.matches("training coverage: 6/6").count(), 5);
}

#[test]
fn invoice_chassis_is_a_path_disjunction() {
    let dir = tempfile::tempdir().unwrap();
    let b = trained(dir.path(), "invoice");
    let chassis = b.program("chassis").unwrap();
    assert_eq!(chassis.tuples[0].landmark, "Chassis number");
    let RegionProgram::Disjunct(d) = &chassis.tuples[0].region_program else { panic!("box region") };
    assert!(!d.paths.is_empty());
}

#[test]
fn inside_roi_mutation_yields_null() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path(), "flight");
    ok(&["gen-corpus", "--docs", "8", "--seed", "9", "--perturb", "mutate-inside-roi", "-o", "test"], dir.path());
    ok(&["extract", "bundle.json", "test", "-o", "preds.jsonl"], dir.path());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("test/manifest.json")).unwrap()).unwrap();
    let preds = read_predictions(&dir.path().join("preds.jsonl")).unwrap();
    let mut checked = 0;
    for entry in manifest["docs"].as_array().unwrap() {
        let Some(field) = entry["mutated_field"].as_str() else { continue };
        let name = entry["name"].as_str().unwrap();
        let p = preds.iter().find(|p| p.doc == name && p.field == field).unwrap();
        assert_eq!(p.value, None, "{name}/{field}");
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn newer_bundle_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path(), "flight");
    let path = dir.path().join("bundle.json");
    let text = fs::read_to_string(&path).unwrap().replacen("\"version\": 1", "\"version\": 2", 1);
    fs::write(&path, text).unwrap();
    let out = landmark(&["extract", "bundle.json", "train"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version 2"));
}

#[test]
fn hand_edited_landmark_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = trained(dir.path(), "flight");
    for p in &mut b.programs {
        if p.field == "total" {
            p.tuples[0].landmark = "Grand total:".into();
        }
    }
    b.save(&dir.path().join("edited.json")).unwrap();
    ok(&["extract", "edited.json", "train", "-o", "preds.jsonl"], dir.path());
    let preds = read_predictions(&dir.path().join("preds.jsonl")).unwrap();
    assert!(preds.iter().filter(|p| p.field == "total").all(|p| p.value.is_none()));
    assert!(preds.iter().filter(|p| p.field == "passenger").all(|p| p.value.is_some()));
}

#[test]
fn extract_then_eval_on_training_docs_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path(), "flight");
    ok(&["extract", "bundle.json", "train", "-o", "preds.jsonl"], dir.path());
    ok(&["eval", "preds.jsonl", "train/annotations.json", "-o", "eval.json"], dir.path());
    let report: EvalReport = serde_json::from_str(&fs::read_to_string(dir.path().join("eval.json")).unwrap()).unwrap();
    assert_eq!(report.fields.len(), 5);
    for (field, r) in &report.fields {
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0), "{field}");
    }
}

#[test]
fn gen_corpus_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        ok(&["gen-corpus", "--template", "invoice", "--docs", "4", "--seed", "5", "--perturb", "insert-ad-banner:2", "-o", "c"], d);
    }
    let mut names: Vec<_> = fs::read_dir(a.path().join("c")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(a.path().join("c").join(&n)).unwrap(), fs::read(b.path().join("c").join(&n)).unwrap());
    }
}
