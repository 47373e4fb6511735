use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn triad(args: &[&str]) -> Output {
    triad_env(args, &[])
}

fn triad_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_triad"));
    for (key, _) in std::env::vars().filter(|(k, _)| k.starts_with("TRIAD_")) {
        cmd.env_remove(key);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("spawn triad")
}

fn ok(args: &[&str]) -> String {
    let out = triad(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn lines(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// synth, baseline, parse, ground, evaluate and report into `dir`.
fn chain(dir: &Path) -> Vec<PathBuf> {
    let d = p(dir);
    let f = |name: &str| dir.join(name);
    ok(&["synth", "--seed", "11", "--out", d]);
    ok(&["agreement", "--set1", p(&f("annotator1.jsonl")), "--set2", p(&f("annotator2.jsonl")), "--out", d]);
    ok(&["split", "--seed", "11", "--gold", p(&f("gold.jsonl")), "--out", d]);
    ok(&["baseline", "--corpus", p(&f("corpus.jsonl")), "--out", d]);
    ok(&["parse", "--predictions", p(&f("predictions.jsonl")), "--out", d]);
    ok(&["ground", "--parsed", p(&f("parsed.jsonl")), "--corpus", p(&f("corpus.jsonl")), "--out", d]);
    ok(&["evaluate", "--corpus", p(&f("corpus.jsonl")), "--gold", p(&f("gold.jsonl")), "--parsed", p(&f("parsed.jsonl")), "--out", d]);
    ok(&[
        "report",
        "--split", p(&f("split.jsonl")),
        "--gold", p(&f("gold.jsonl")),
        "--agreement", p(&f("agreement.json")),
        "--evaluation", p(&f("evaluation.json")),
        "--grounding", p(&f("grounding_report.json")),
        "--out", d,
    ]);
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn split_with_seed_7_gives_reference_totals() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(dir.path());
    ok(&["synth", "--out", d]);
    let gold = dir.path().join("gold.jsonl");
    let summary = ok(&["split", "--seed", "7", "--ratios", "0.7,0.15,0.15", "--gold", p(&gold), "--out", d]);
    assert!(summary.starts_with("split: train 700, validation 150, test 150"), "{summary}");
    let manifest = lines(&dir.path().join("split.jsonl"));
    assert_eq!(manifest.len(), 1000);
    for name in ["train", "validation", "test"] {
        let n = manifest.iter().filter(|r| r["split"] == name).count();
        assert_eq!(n, if name == "train" { 700 } else { 150 });
    }
    let ids: Vec<&str> = manifest.iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]), "manifest sorted by id");
}

#[test]
fn full_chain_is_byte_identical_on_rerun() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files_a = chain(a.path());
    let files_b = chain(b.path());
    assert_eq!(files_a.len(), files_b.len());
    for (fa, fb) in files_a.iter().zip(&files_b) {
        assert_eq!(fa.file_name(), fb.file_name());
        assert_eq!(fs::read(fa).unwrap(), fs::read(fb).unwrap(), "{:?} differs", fa.file_name());
    }
    let report = fs::read_to_string(a.path().join("report.md")).unwrap();
    assert!(report.contains("## Evidence grounding: text span matching"));
    assert!(report.contains("## Inter-annotator agreement"));
}

#[test]
fn evaluate_lists_unmatched_ids() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(dir.path());
    ok(&["synth", "--strata", "3,2,1,0", "--out", d]);
    let f = |name: &str| dir.path().join(name);
    ok(&["baseline", "--corpus", p(&f("corpus.jsonl")), "--out", d]);
    ok(&["parse", "--predictions", p(&f("predictions.jsonl")), "--out", d]);
    let mut parsed = fs::read_to_string(f("parsed.jsonl")).unwrap();
    parsed.push_str(&parsed.lines().next().unwrap().replace("synth-0001", "ghost-7"));
    parsed.push('\n');
    fs::write(f("parsed.jsonl"), parsed).unwrap();

    let out = triad(&["evaluate", "--corpus", p(&f("corpus.jsonl")), "--gold", p(&f("gold.jsonl")), "--parsed", p(&f("parsed.jsonl")), "--out", d]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghost-7"));
    assert!(!f("evaluation.json").exists());
}

#[test]
fn malformed_line_is_reported_with_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    fs::write(&corpus, "{\"id\":\"a\",\"community\":\"PCOS\",\"text\":\"x\"}\n{\"community\":\"PCOS\",\"text\":\"y\"}\n").unwrap();
    let out = triad(&["filter", "--corpus", p(&corpus), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2: missing field `id`"), "{err}");
}

#[test]
fn duplicate_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let row = "{\"id\":\"a\",\"community\":\"PCOS\",\"text\":\"x\"}\n";
    fs::write(&corpus, row.repeat(2)).unwrap();
    let out = triad(&["baseline", "--corpus", p(&corpus), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate id \"a\""));
}

#[test]
fn filter_scrubs_then_keeps_keyword_posts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    fs::write(
        &corpus,
        concat!(
            "{\"id\":\"1\",\"community\":\"PCOS\",\"text\":\"thanks u/helper_99, my pcos is better\"}\n",
            "{\"id\":\"2\",\"community\":\"PCOS\",\"text\":\"nothing relevant\"}\n",
        ),
    )
    .unwrap();
    let summary = ok(&["filter", "--corpus", p(&corpus), "--out", p(dir.path())]);
    assert!(summary.starts_with("filter: kept 1 of 2"), "{summary}");
    let kept = lines(&dir.path().join("filtered.jsonl"));
    assert_eq!(kept[0]["text"], "thanks [USER], my pcos is better");
}

#[test]
fn config_file_then_env_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    fs::write(
        &corpus,
        concat!(
            "{\"id\":\"1\",\"community\":\"c\",\"text\":\"alpha\"}\n",
            "{\"id\":\"2\",\"community\":\"c\",\"text\":\"beta\"}\n",
            "{\"id\":\"3\",\"community\":\"c\",\"text\":\"gamma\"}\n",
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("from-config");
    let config = dir.path().join("triad.toml");
    fs::write(&config, format!("keyword = \"alpha\"\nout = {:?}\n", p(&out_dir))).unwrap();
    let args = ["filter", "--config", p(&config), "--corpus", p(&corpus)];

    let from_file = triad(&args);
    assert!(String::from_utf8_lossy(&from_file.stdout).contains("kept 1 of 3 posts mentioning \"alpha\""));
    assert!(out_dir.join("filtered.jsonl").exists());

    let from_env = triad_env(&args, &[("TRIAD_KEYWORD", "beta")]);
    assert!(String::from_utf8_lossy(&from_env.stdout).contains("\"beta\""));

    let mut with_flag = args.to_vec();
    with_flag.extend(["--keyword", "gamma"]);
    let from_flag = triad_env(&with_flag, &[("TRIAD_KEYWORD", "beta")]);
    assert!(String::from_utf8_lossy(&from_flag.stdout).contains("\"gamma\""));
}

#[test]
fn invalid_settings_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(dir.path());
    ok(&["synth", "--strata", "2,2,1,0", "--out", d]);
    let gold = dir.path().join("gold.jsonl");
    let corpus = dir.path().join("corpus.jsonl");
    for args in [
        vec!["split", "--ratios", "0.5,0.2,0.2", "--gold", p(&gold), "--out", d],
        vec!["sample", "-n", "6", "--corpus", p(&corpus), "--out", d],
        vec!["ground", "--threshold", "1.5", "--parsed", p(&gold), "--corpus", p(&corpus), "--out", d],
        vec!["report", "--out", d],
    ] {
        let out = triad(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unstructured_generation_counts_as_degraded() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("p.jsonl");
    fs::write(
        &preds,
        "{\"post_id\":\"b\",\"generation\":\"I think \\\"hate my body\\\" applies.\"}\n{\"post_id\":\"a\",\"generation\":\"BODY_IMAGE_DISTRESS: yes.\"}\n",
    )
    .unwrap();
    let summary = ok(&["parse", "--predictions", p(&preds), "--out", p(dir.path())]);
    assert!(summary.starts_with("parse: 2 generations, 2 degraded"), "{summary}");
    let parsed = lines(&dir.path().join("parsed.jsonl"));
    assert_eq!(parsed[0]["post_id"], "a");
    assert_eq!(parsed[0]["body_image"]["decision"], true);
    assert_eq!(parsed[1]["quotes"][0], "hate my body");
    assert_eq!(parsed[1]["parse_warnings"][0], "unstructured output");
}

#[test]
fn sample_is_seeded_and_order_preserving() {
    let dir = tempfile::tempdir().unwrap();
    let d = p(dir.path());
    ok(&["synth", "--strata", "30,20,10,0", "--out", d]);
    let corpus = dir.path().join("corpus.jsonl");
    let draw = |seed: &str| {
        ok(&["sample", "-n", "10", "--seed", seed, "--corpus", p(&corpus), "--out", d]);
        fs::read_to_string(dir.path().join("sample.jsonl")).unwrap()
    };
    let first = draw("5");
    assert_eq!(first, draw("5"));
    assert_ne!(first, draw("6"));
    let ids: Vec<String> = first.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string()).collect();
    assert_eq!(ids.len(), 10);
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
}
