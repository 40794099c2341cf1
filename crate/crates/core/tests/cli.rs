mod common;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use common::fixture;
use tempfile::TempDir;

const GOLD: &str = "\
# source: demo
I\tO
have\tO
a\tO
bad\tB-SYM
headache\tI-SYM
and\tO
cough\tB-SYM
a\tI-SYM
lot\tI-SYM

Dyspnea\tB-SYM
since\tO
Monday\tO

no\tO
symptoms\tO
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_colloq-ner"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_reports_orphan_inside() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.iob", "my\tO\nhead\tI-SYM\nhurts\tO\n");
    let o = run(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\t1\torphan-inside\n");

    let o = run(&["validate", "--strict", s(&p)]);
    assert_eq!(o.status.code(), Some(1));

    let good = write(&dir, "good.iob", GOLD);
    let o = run(&["validate", "--strict", s(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
}

#[test]
fn eval_of_gold_against_itself_is_perfect() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "gold.iob", GOLD);
    let o = run(&["eval", "--gold", s(&p), "--pred", s(&p)]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        for k in 4..7 {
            assert_eq!(row[k].parse::<f64>().unwrap(), 1.0, "{row:?}");
        }
    }
}

#[test]
fn eval_counts_partial_overlap() {
    let dir = TempDir::new().unwrap();
    let gold = write(&dir, "gold.iob", GOLD);
    let pred_text = GOLD.replace("bad\tB-SYM\nheadache\tI-SYM", "bad\tO\nheadache\tB-SYM");
    let pred = write(&dir, "pred.iob", &pred_text);
    let o = run(&["eval", "--gold", s(&gold), "--pred", s(&pred), "--by-length"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("exact,2,1,1,"), "{out}");
    assert!(out.contains("partial,3,0,0,"), "{out}");
    assert!(out.contains("TP-1"), "{out}");
}

#[test]
fn eval_rejects_misaligned_corpora() {
    let dir = TempDir::new().unwrap();
    let gold = write(&dir, "gold.iob", GOLD);
    let pred = write(&dir, "pred.iob", &GOLD.replace("Monday", "Tuesday"));
    let o = run(&["eval", "--gold", s(&gold), "--pred", s(&pred)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn perturb_is_deterministic_and_pipes_into_stats() {
    let dir = TempDir::new().unwrap();
    let gold = write(&dir, "gold.iob", GOLD);
    let lex = fixture("lexicon_sample.tsv");
    let args = ["perturb", "--mode", "denormalize", "--lexicon", s(&lex), "--seed", "9", s(&gold)];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("since\tO"));
    assert!(!stdout(&a).contains("Dyspnea\t"));

    let mut child = bin()
        .args(["stats", "--format", "csv", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&a.stdout).unwrap();
    let stats = child.wait_with_output().unwrap();
    assert!(stats.status.success());
    let out = stdout(&stats);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("stdin,3,3,"), "{row}");
}

#[test]
fn perturb_writes_log() {
    let dir = TempDir::new().unwrap();
    let gold = write(&dir, "gold.iob", GOLD);
    let out = dir.path().join("out.iob");
    let log = dir.path().join("log.csv");
    let lex = fixture("lexicon_sample.tsv");
    let o = run(&[
        "perturb", "--mode", "denormalize", "--lexicon", s(&lex), "--log", s(&log), s(&gold), s(&out),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&log).unwrap();
    assert!(text.starts_with("sentence_index,old,new,variant_index\n"));
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("1,Dyspnea,"));
    assert!(fs::metadata(&out).unwrap().len() > 0);
}

#[test]
fn mix_is_seeded_and_checks_sizes() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.iob", GOLD);
    let b = write(&dir, "b.iob", &GOLD.replace("demo", "other"));
    let run_mix = |seed: &str, size: &str| run(&["mix", "--seed", seed, "--size", size, s(&a), s(&b)]);
    let x = run_mix("4", "4");
    let y = run_mix("4", "4");
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
    let out = stdout(&x);
    assert_eq!(out.matches("# source: a").count(), 2);
    assert_eq!(out.matches("# source: b").count(), 2);

    let too_big = run_mix("4", "8");
    assert_eq!(too_big.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&too_big.stderr).contains("corpus 'a' has 3 sentences but 4"));

    let bad = run_mix("4", "1");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn stats_repairs_unless_strict() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.iob", "my\tO\nhead\tI-SYM\nhurts\tO\n");
    let o = run(&["stats", "--format", "csv", s(&p)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(stdout(&o).contains("bad,1,1,1,"));
    let o = run(&["stats", "--strict", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rank_reproduces_a_score_column() {
    let grid = fixture("appendix_table1.csv");
    let o = run(&[
        "rank",
        "--grid",
        s(&grid),
        "--group",
        "colloquial=CLQ-Test,MedHelp,iCliniq",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "BioBERT Score").unwrap();
    let column: Vec<String> = rdr.records().map(|r| r.unwrap()[col].to_string()).collect();
    assert_eq!(
        column,
        ["5(0,3,2)", "4(0,1,3)", "6(0,3,3)", "5(2,0,3)", "3(2,0,1)", "0(0,0,0)", "3(2,0,1)"]
    );
}

#[test]
fn rank_rejects_unknown_test_set() {
    let grid = fixture("appendix_table1.csv");
    let o = run(&["rank", "--grid", s(&grid), "--group", "x=Nowhere"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_marks_top_values() {
    let grid = fixture("appendix_table1.csv");
    let o = run(&["report", "--grid", s(&grid), "--mark-top"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("| Test Set"));
    assert!(out.contains('*') && out.contains('^'));
}

#[test]
fn synth_is_reproducible() {
    let args = ["synth", "--sentences", "50", "--seed", "3", "--length-weights", "0.9,0.1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = colloq_ner::corpus::parse_corpus("s", &stdout(&a)).unwrap();
    assert_eq!(c.len(), 50);
    assert!(c.spans().unwrap().iter().all(|sp| sp.len() <= 2));
    assert_eq!(run(&["synth", "--length-weights", "x"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--gold", "x"]).status.code(), Some(2));
    assert_eq!(run(&["perturb", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_a_data_error() {
    let o = run(&["stats", "/nonexistent/file.iob"]);
    assert_eq!(o.status.code(), Some(1));
}
