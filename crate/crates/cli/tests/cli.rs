use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sftlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sftlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn sftlab")
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn shipped_corpus_passes() {
    let out = sftlab(&["corpus", "run", "corpus.txt"], &corpus_dir());
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("failed=0"), "{text}");
}

#[test]
fn shipped_corpus_passes_in_shuffled_order() {
    let out = Command::new(env!("CARGO_BIN_EXE_sftlab"))
        .args(["corpus", "run", "corpus.txt"])
        .current_dir(corpus_dir())
        .env("SFTLAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn empty_corpus_passes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.txt"), "# nothing here\n").unwrap();
    let out = sftlab(&["corpus", "run", "c.txt"], dir.path());
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("cases=0"));
}

#[test]
fn wrong_expectation_reports_one_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus_dir().join("golden-mean.sft"), dir.path().join("g.sft")).unwrap();
    std::fs::write(
        dir.path().join("c.txt"),
        "case right\nrun count --n 5 g.sft\nexpect exit=0 count=13\nwhy Fibonacci\n\n\
         case wrong\nrun count --n 5 g.sft\nexpect exit=0 count=14\nwhy deliberately off by one\n",
    )
    .unwrap();
    let out = sftlab(&["corpus", "run", "c.txt"], dir.path());
    let text = stdout(&out);
    assert_ne!(out.status.code(), Some(0));
    assert!(text.contains("failed=1"), "{text}");
    assert_eq!(text.matches("FAIL").count(), 1, "{text}");
    assert!(text.contains("case=right pass"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["check-empty", "--dim", "2", "--fuel", "4", "checkerboard-2d.sft"][..],
        &["attractor", "encode", "half.map", "half.trap", "--fuel", "3"][..],
        &["corpus", "run", "corpus.txt"][..],
    ] {
        let a = sftlab(args, &corpus_dir());
        let b = sftlab(args, &corpus_dir());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn compact_format_is_one_line() {
    let out = sftlab(&["--format", "compact", "count", "--n", "5", "golden-mean.sft"], &corpus_dir());
    let text = stdout(&out);
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    assert!(text.contains("count=13"));
}

#[test]
fn usage_errors_exit_64() {
    let out = sftlab(&["count", "--bogus"], &corpus_dir());
    assert_eq!(out.status.code(), Some(64));
    let out = sftlab(&["--jobs", "0", "count", "--n", "1", "golden-mean.sft"], &corpus_dir());
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn malformed_input_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.sft"), "dim 1\nalphabet 0 1\nfrobid\n").unwrap();
    let out = sftlab(&["check-empty-1d", "bad.sft"], dir.path());
    assert_eq!(out.status.code(), Some(65), "{}", stdout(&out));
    assert!(stdout(&out).contains("error=format"));
    let out = sftlab(&["check-empty-1d", "missing.sft"], dir.path());
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(sftlab(&["--help"], &corpus_dir()).status.code(), Some(0));
    assert_eq!(sftlab(&["--version"], &corpus_dir()).status.code(), Some(0));
}

#[test]
fn encode_writes_cylinder_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("forbidden.cyl");
    let out = sftlab(
        &["attractor", "encode", "half.map", "half.trap", "--fuel", "2", "--out", out_path.to_str().unwrap()],
        &corpus_dir(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("dim 1"), "{text}");
    assert!(text.contains("cylinder"));
}
