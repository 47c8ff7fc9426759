use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use psylex::emit::{self, AgreementFile};
use psylex::io;
use psylex_core::corpus::{krippendorff_alpha, Difference, Level, ReliabilityMatrix};
use psylex_core::metrics::apply_trait_model;
use psylex_core::text::{FeatureSpace, FeatureVector};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn psylex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psylex"))
        .args(args)
        .env("PSYLEX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        Run {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn out(&self) -> &str {
        self.dir.path().to_str().unwrap()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.file(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn cmd(&self, cmd: &str, corpus: &str, extra: &[&str]) -> Output {
        let config = fixtures().join("config.json");
        let mut args = vec![cmd, "--corpus", corpus, "--config", config.to_str().unwrap(), "--out", self.out()];
        args.extend_from_slice(extra);
        psylex(&args)
    }
}

fn fixture_corpus() -> String {
    fixtures().join("corpus.jsonl").to_str().unwrap().to_string()
}

#[test]
fn score_writes_both_tables() {
    let run = Run::new();
    let o = run.cmd("score", &fixture_corpus(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let corpus = io::load_corpus(Path::new(&fixture_corpus())).unwrap();
    let agent_turns: usize = corpus
        .dialogs()
        .iter()
        .flat_map(|d| &d.turns)
        .filter(|t| t.speaker == psylex_core::corpus::Speaker::Agent)
        .count();
    let turn = emit::parse_metric_table(&read(run.file("turn_metrics.csv")), Path::new("t"), Level::Turn).unwrap();
    let dialog =
        emit::parse_metric_table(&read(run.file("dialog_metrics.csv")), Path::new("d"), Level::Dialog).unwrap();
    // three turn metrics per agent turn; five dialog metrics plus one turn mean
    assert_eq!(turn.len(), 3 * agent_turns);
    assert_eq!(dialog.len(), 6 * corpus.dialogs().len());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("missing (zero_emotion_vector)"), "{stdout}");
    assert!(stdout.contains("2.07944 nats"), "{stdout}");
}

#[test]
fn score_is_byte_identical_on_rerun() {
    let (a, b) = (Run::new(), Run::new());
    assert!(a.cmd("score", &fixture_corpus(), &[]).status.success());
    assert!(b.cmd("score", &fixture_corpus(), &["--set", "metrics.window=1"]).status.success());
    for f in ["turn_metrics.csv", "dialog_metrics.csv"] {
        assert_eq!(std::fs::read(a.file(f)).unwrap(), std::fs::read(b.file(f)).unwrap(), "{f}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let a = Run::new();
    assert!(a.cmd("score", &fixture_corpus(), &[]).status.success());
    let b = Run::new();
    let config = fixtures().join("config.json");
    let o = Command::new(env!("CARGO_BIN_EXE_psylex"))
        .args(["score", "--corpus", &fixture_corpus(), "--config", config.to_str().unwrap(), "--out", b.out()])
        .env("PSYLEX_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read(a.file("turn_metrics.csv")), read(b.file("turn_metrics.csv")));
}

#[test]
fn missing_lexicon_is_config_error() {
    let run = Run::new();
    let o = run.cmd("score", &fixture_corpus(), &["--set", "resources.emotion_lexicon=/nonexistent/emo.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/emo.csv"), "{}", stderr(&o));
}

#[test]
fn unconfigured_resource_is_config_error() {
    let run = Run::new();
    let o = psylex(&["score", "--corpus", &fixture_corpus(), "--out", run.out()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("emotion lexicon"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(psylex(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(psylex(&["score", "--bogus"]).status.code(), Some(2));
    let run = Run::new();
    assert_eq!(psylex(&["score", "--out", run.out()]).status.code(), Some(2));
    assert_eq!(run.cmd("score", &fixture_corpus(), &["--set", "metrics.window=0"]).status.code(), Some(2));
    assert_eq!(run.cmd("score", &fixture_corpus(), &["--set", "metrics.typo=1"]).status.code(), Some(2));
}

#[test]
fn corpus_problems_exit_3() {
    let run = Run::new();
    let good = read(fixture_corpus());
    let missing_speaker = run.write("a.jsonl", &good.replacen("\"speaker\": \"partner\", ", "", 1));
    let o = run.cmd("score", &missing_speaker, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("speaker"), "{}", stderr(&o));

    let out_of_bounds = run.write("b.jsonl", &good.replacen("[2, 2, 2]", "[2, 7, 2]", 1));
    let o = run.cmd("score", &out_of_bounds, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("overall"), "{}", stderr(&o));
}

const PERFECT: &str = r#"{"dialog_id":"d1","system_id":"s","annotations":{"overall":[4,4]},"turns":[{"turn_id":"t1","speaker":"agent","text":"hi","annotations":{"fluency":[3,3],"relevance":[2,2]}}]}
{"dialog_id":"d2","system_id":"s","annotations":{"overall":[2,2]},"turns":[{"turn_id":"t1","speaker":"agent","text":"yo","annotations":{"fluency":[5,5],"relevance":[1,1]}}]}
{"dialog_id":"d3","system_id":"s","annotations":{"overall":[2,2]},"turns":[{"turn_id":"t1","speaker":"agent","text":"ok","annotations":{"fluency":[5,5],"relevance":[4,4]}}]}
"#;

#[test]
fn agreement_perfect_fixture() {
    let run = Run::new();
    let corpus = run.write("c.jsonl", PERFECT);
    let o = psylex(&["agreement", "--corpus", &corpus, "--out", run.out()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: AgreementFile = serde_json::from_str(&read(run.file("agreement.json"))).unwrap();
    assert_eq!(report.levels.len(), 2);
    for level in &report.levels {
        assert_eq!(level.mean, Some(1.0));
        assert!(level.alphas.values().all(|a| *a == Some(1.0)));
    }
}

#[test]
fn agreement_matches_direct_alpha() {
    let run = Run::new();
    let o = psylex(&["agreement", "--corpus", &fixture_corpus(), "--out", run.out(), "--set", "agreement.difference=interval"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: AgreementFile = serde_json::from_str(&read(run.file("agreement.json"))).unwrap();
    assert_eq!(report.difference, "interval");

    // rebuild the annotator × unit matrix straight from the JSONL
    let mut rows: Vec<Vec<Option<f64>>> = vec![Vec::new(); 3];
    for line in read(fixture_corpus()).lines().skip(1) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for (i, r) in v["annotations"]["overall"].as_array().unwrap().iter().enumerate() {
            rows[i].push(r.as_f64());
        }
    }
    let alpha = krippendorff_alpha(&ReliabilityMatrix::new(rows).unwrap(), Difference::Interval).unwrap();
    let dialog = report.levels.iter().find(|l| l.level == "dialog").unwrap();
    let reported = dialog.alphas["overall"].unwrap();
    assert!((reported - alpha).abs() <= 5e-6 * alpha.abs().max(1.0), "{reported} vs {alpha}");
}

#[test]
fn agreement_without_annotations_exits_3() {
    let run = Run::new();
    let corpus = run.write(
        "c.jsonl",
        r#"{"dialog_id":"d1","system_id":"s","turns":[{"turn_id":"t1","speaker":"agent","text":"hi"}]}"#,
    );
    let o = psylex(&["agreement", "--corpus", &corpus, "--out", run.out()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn evaluate_emits_valid_tables() {
    let run = Run::new();
    let o = run.cmd("evaluate", &fixture_corpus(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = read(run.file("regression_turn_appropriateness.csv"));
    assert!(text.starts_with("level,judgement,traditional,psych_model,n,r2_T,r2_P,r2_PT,p_raw,p_corrected,stars"));
    let rows = emit::parse_regression(&text, Path::new("r")).unwrap();
    // two external metrics × (three psychological metrics + all_psych)
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r.level, "turn");
        assert!(["", "*", "**", "***"].contains(&r.stars.as_str()));
        if let (Some(p), Some(c)) = (r.p_raw, r.p_corrected) {
            assert!(c >= p && c <= 1.0);
        }
    }
    let h = emit::parse_heatmap(&read(run.file("heatmap_turn.json")), Path::new("h")).unwrap();
    for i in 0..h.order.len() {
        assert_eq!(h.matrix[i][i], Some(1.0));
        for j in 0..h.order.len() {
            assert_eq!(h.matrix[i][j], h.matrix[j][i]);
            assert_eq!(h.n[i][j], h.n[j][i]);
        }
    }
    assert!(h.order.contains(&"bleu".to_string()));
}

#[test]
fn evaluate_without_scores_exits_2() {
    let run = Run::new();
    let o = run.cmd("evaluate", &fixture_corpus(), &["--scores", "/nonexistent/scores.csv"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run.cmd("evaluate", &fixture_corpus(), &["--set", "evaluate.scores=null"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn evaluate_unknown_scores_id_exits_3() {
    let run = Run::new();
    let scores = run.write("s.csv", "dialog_id,turn_id,metric_name,value\nd99,t1,bleu,0.1\n");
    let o = run.cmd("evaluate", &fixture_corpus(), &["--scores", &scores]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("d99"), "{}", stderr(&o));
}

#[test]
fn evaluate_unknown_metric_exits_2() {
    let run = Run::new();
    let o = run.cmd("evaluate", &fixture_corpus(), &["--set", "evaluate.traditional=[\"meteor\"]"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn compare_three_systems() {
    let run = Run::new();
    let o = run.cmd("compare", &fixture_corpus(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = emit::parse_profiles(&read(run.file("profiles.csv")), Path::new("p")).unwrap();
    let systems: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.system_id.as_str()).collect();
    assert_eq!(systems.len(), 3);
    let mut by_metric: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in &rows {
        let n = r.normalized.unwrap();
        assert!((0.0..=1.0).contains(&n));
        by_metric.entry(&r.metric).or_default().push(n);
    }
    for (metric, values) in by_metric {
        let distinct = values.iter().any(|v| *v != values[0]);
        if distinct {
            assert!(values.contains(&0.0) && values.contains(&1.0), "{metric}: {values:?}");
        } else {
            assert!(values.iter().all(|v| *v == 0.5), "{metric}");
        }
    }
}

#[test]
fn compare_single_system_writes_raw_means() {
    let run = Run::new();
    let corpus = run.write("c.jsonl", PERFECT);
    let o = psylex(&[
        "compare",
        "--corpus",
        &corpus,
        "--out",
        run.out(),
        "--set",
        &format!("resources.emotion_lexicon={}", fixtures().join("emotion.csv").display()),
        "--set",
        "metrics.turn=[\"emotional_entropy\"]",
        "--set",
        "metrics.dialog=[\"emotional_entropy\"]",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let rows = emit::parse_profiles(&read(run.file("profiles.csv")), Path::new("p")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.system_id == "s" && r.normalized.is_none()));
}

fn training_files(run: &Run, noise: bool) -> (String, String) {
    let mut features = String::from("row_id,feature,value\n");
    let mut labels = String::from("row_id,value\n");
    for i in 0..40 {
        let a = (i as f64 * 0.37).sin();
        let b = (i as f64 * 0.11).cos();
        features += &format!("r{i},hello,{a}\nr{i},thank you,{b}\n");
        let y = 1.5 + 2.0 * a - 0.5 * b + if noise { 0.1 * ((i * 7 % 5) as f64 - 2.0) } else { 0.0 };
        labels += &format!("r{i},{y}\n");
    }
    (run.write("features.csv", &features), run.write("labels.csv", &labels))
}

#[test]
fn train_trait_noiseless_and_reloadable() {
    let run = Run::new();
    let (features, labels) = training_files(&run, false);
    let o = psylex(&[
        "train-trait", "--features", &features, "--labels", &labels, "--lambda", "0", "--folds", "10", "--out", run.out(),
        "--set", "train.trait_name=empathy",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: emit::CvReport = serde_json::from_str(&read(run.file("cv_report.json"))).unwrap();
    assert_eq!(report.r, Some(1.0));
    assert_eq!(report.n, 40);

    let model = io::load_trait_model(&run.file("trait_model.json")).unwrap();
    assert_eq!(model.trait_name, "empathy");
    let x = FeatureVector::from_values(
        FeatureSpace::Ngram,
        [("hello".to_string(), 0.25), ("thank you".to_string(), -1.0)].into(),
    );
    let y = apply_trait_model(&x, &model).unwrap();
    assert!((y - (1.5 + 0.5 + 0.5)).abs() < 1e-9, "{y}");
}

#[test]
fn train_trait_negative_lambda_exits_2() {
    let run = Run::new();
    let (features, labels) = training_files(&run, true);
    let o = psylex(&["train-trait", "--features", &features, "--labels", &labels, "--lambda", "-1", "--out", run.out()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = psylex(&["train-trait", "--labels", &labels, "--out", run.out()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_names_path() {
    let run = Run::new();
    let blocker = run.write("blocker", "");
    let out = format!("{blocker}/sub");
    let o = psylex(&["score", "--corpus", &fixture_corpus(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&out), "{}", stderr(&o));
}
