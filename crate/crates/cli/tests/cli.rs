use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ainf_cli::corpus_files;
use ainf_cli::format::{emit, Loader};
use ainf_core::corpus;

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ainf-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn ainf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ainf")).current_dir(dir).env_remove("AINF_MAX_LEN").args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn emit_all(dir: &Path) {
    assert_eq!(code(&ainf(dir, &["corpus", "all", "--out", "."])), 0);
}

#[test]
fn parsed_files_equal_the_corpus_entities() {
    let dir = scratch("parse");
    for e in corpus::all() {
        corpus_files::write(&e, &dir).unwrap();
        let mut loader = Loader::new();
        for (file, doc) in corpus_files::documents(&e) {
            let p = dir.join(&file);
            let parsed = loader.load(&p).unwrap();
            assert_eq!(parsed, doc, "{file}");
            assert_eq!(emit(&parsed), fs::read_to_string(&p).unwrap(), "{file}");
        }
    }
}

#[test]
fn fmt_and_reemission_are_byte_identical() {
    let one = scratch("emit1");
    let two = scratch("emit2");
    emit_all(&one);
    emit_all(&two);
    let mut names: Vec<_> = fs::read_dir(&one).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 20);
    for n in names {
        let a = fs::read(one.join(&n)).unwrap();
        assert_eq!(a, fs::read(two.join(&n)).unwrap(), "{n:?}");
        let o = ainf(&one, &["fmt", n.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert_eq!(o.stdout, a, "{n:?}");
    }
}

#[test]
fn every_emitted_file_validates_as_documented() {
    let dir = scratch("validate");
    emit_all(&dir);
    for ent in fs::read_dir(&dir).unwrap() {
        let n = ent.unwrap().file_name().into_string().unwrap();
        let want = if n.starts_with("broken_") { 1 } else { 0 };
        let o = ainf(&dir, &["validate", &n]);
        assert_eq!(code(&o), want, "{n}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let o = ainf(&dir, &["validate", "broken_dual_numbers.cat"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("arity 3 objects (X,X,X,X)"));
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = scratch("parse_err");
    fs::write(dir.join("a.cat"), "kind category\nname a\nmode graded\ndegree 0\narity_bound 2\nobjects X\nhom X X : 1@0\nmu X X X : 1 q -> 1\n").unwrap();
    let o = ainf(&dir, &["validate", "a.cat"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("a.cat:8:14:"), "{}", String::from_utf8_lossy(&o.stderr));
    fs::write(dir.join("b.cat"), "name b\n").unwrap();
    assert_eq!(code(&ainf(&dir, &["validate", "b.cat"])), 2);
    fs::write(dir.join("c.form"), "kind form\nname c\ncategory missing.cat\n").unwrap();
    assert_eq!(code(&ainf(&dir, &["validate", "c.form"])), 2);
    fs::write(dir.join("loop.mor"), "kind morphism\nname l\nsource loop.mor\ntarget loop.mor\n").unwrap();
    assert_eq!(code(&ainf(&dir, &["validate", "loop.mor"])), 2);
}

#[test]
fn homology_examples() {
    let dir = scratch("homology");
    emit_all(&dir);
    let total = |args: &[&str]| -> u64 {
        let o = ainf(&dir, &[args, &["--json"]].concat());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["info"]["total_homology"].as_u64().unwrap()
    };
    assert_eq!(total(&["homology", "dual_numbers.cat", "--complex", "cc-chains", "--coeff", "diag", "--max-len", "0"]), 2);
    assert_eq!(total(&["homology", "k_field.cat", "--complex", "cc-cochains", "--max-len", "3"]), 1);
    assert_eq!(total(&["homology", "dual_numbers.cat", "--coeff", "zero"]), 0);
    assert_eq!(total(&["homology", "a2_quiver.cat", "--complex", "2cc-chains", "--coeff", "dual"]) > 0, true);
    assert_eq!(code(&ainf(&dir, &["homology", "k_field.cat", "--complex", "bogus"])), 2);
    assert_eq!(code(&ainf(&dir, &["homology", "k_field.cat", "--complex", "cc-cochains", "--max-len", "0"])), 2);
}

#[test]
fn max_len_comes_from_the_environment() {
    let dir = scratch("env");
    emit_all(&dir);
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ainf"));
        c.current_dir(&dir).args(["homology", "k_field.cat", "--json"]);
        match env {
            Some(v) => c.env("AINF_MAX_LEN", v),
            None => c.env_remove("AINF_MAX_LEN"),
        };
        c.output().unwrap()
    };
    let len = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["info"]["max_len"].as_u64().unwrap();
    assert_eq!(len(&run(None)), 3);
    assert_eq!(len(&run(Some("1"))), 1);
    assert_eq!(code(&run(Some("many"))), 2);
}

#[test]
fn json_reports_are_deterministic() {
    let dir = scratch("json");
    emit_all(&dir);
    let args = ["check-cy", "dual_numbers.cat", "--pairing", "dual_numbers.trace.form", "--cross-check", "--json"];
    let a = ainf(&dir, &args);
    let b = ainf(&dir, &args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["exit"], 0);
    assert_eq!(v["checks"]["agreement"]["passed"], true);
}

#[test]
fn diagram_command_runs_each_proposition() {
    let dir = scratch("diagram");
    emit_all(&dir);
    for w in ["dualization-phi", "pullback-dualization", "g-pullback", "g-dualization"] {
        let o = ainf(&dir, &["diagram", "--which", w, "k_field.cat", "dual_numbers.cat", "--samples", "3"]);
        assert_eq!(code(&o), 0, "{w}");
    }
    assert_eq!(code(&ainf(&dir, &["diagram", "--which", "nope", "k_field.cat"])), 2);
    assert_eq!(code(&ainf(&dir, &["diagram", "--which", "g-pullback", "broken_dual_numbers.cat"])), 2);
}

#[test]
fn unknown_corpus_name_is_an_input_error() {
    let dir = scratch("unknown");
    assert_eq!(code(&ainf(&dir, &["corpus", "no_such_entry", "--out", "."])), 2);
}
