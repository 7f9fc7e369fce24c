//! Process-level checks of the binary: exit codes, file loading in both
//! formats, certificate files, and the CSV surface.

use std::path::PathBuf;
use std::process::{Command, Output};

use girthcs::binmat::{self, BuiltinMatrix};
use girthcs_cli::{EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn girthcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_girthcs")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Scratch file that cleans up after itself.
struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str, contents: &str) -> Self {
        let path = std::env::temp_dir()
            .join(format!("girthcs-cli-{}-{name}", std::process::id()));
        std::fs::write(&path, contents).expect("temp file");
        Scratch(path)
    }

    fn path(&self) -> &str {
        self.0.to_str().expect("utf-8 path")
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

#[test]
fn analyze_prints_the_profile() {
    let out = girthcs(&["analyze", "--builtin", "gp52"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    for line in ["girth = 10", "gamma = 2", "lambda = 1", "rows = 10", "cols = 15"] {
        assert!(text.contains(line), "missing `{line}` in:\n{text}");
    }
}

#[test]
fn usage_errors_exit_1() {
    // Unknown subcommand, unknown flag, missing source, unknown builtin,
    // conflicting sparsity flags.
    for args in [
        &["frobnicate"][..],
        &["analyze", "--bogus"][..],
        &["analyze"][..],
        &["analyze", "--builtin", "nope"][..],
        &["experiment", "--builtin", "cube", "--k", "1", "--k-min", "1", "--k-max", "2"][..],
        &["experiment", "--builtin", "cube", "--k-min", "1"][..],
        &["experiment", "--builtin", "cube", "--trials", "5"][..],
    ] {
        let out = girthcs(args);
        assert_eq!(out.status.code(), Some(EXIT_USAGE), "args: {args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    for args in [&["--help"][..], &["--version"][..], &["analyze", "--help"][..]] {
        let out = girthcs(args);
        assert_eq!(out.status.code(), Some(EXIT_OK), "args: {args:?}");
    }
}

#[test]
fn data_errors_exit_2() {
    let garbage = Scratch::new("garbage.alist", "not numbers\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "--file", "/nonexistent/matrix.alist"],
        vec!["analyze", "--file", garbage.path(), "--format", "alist"],
        vec!["bounds", "--builtin", "euclid_plane", "--k", "2"],
        vec!["recover", "--builtin", "euclid_plane", "--signal", "1,0"],
        vec!["nsp", "--builtin", "gp52", "--k", "10"],
        vec!["generate", "--rows", "3", "--cols", "5", "--gamma", "4"],
        vec!["experiment", "--builtin", "cube", "--k", "1", "--trials", "0"],
    ];
    for args in cases {
        let out = girthcs(&args);
        assert_eq!(out.status.code(), Some(EXIT_DATA), "args: {args:?}\n{}", stderr(&out));
    }
}

#[test]
fn missing_file_reports_file_not_found() {
    let out = girthcs(&["analyze", "--file", "missing.alist"]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));
    assert!(stderr(&out).contains("file not found"), "stderr: {}", stderr(&out));
}

#[test]
fn loads_both_formats_with_sniffing_and_override() {
    let h = BuiltinMatrix::Cube.matrix();
    let alist = Scratch::new("cube.alist", &binmat::save_alist(&h));
    let dense = Scratch::new("cube.txt", &binmat::save_dense(&h));
    for args in [
        vec!["analyze", "--file", alist.path()],
        vec!["analyze", "--file", dense.path()],
        vec!["analyze", "--file", alist.path(), "--format", "alist"],
        vec!["analyze", "--file", dense.path(), "--format", "dense"],
    ] {
        let out = girthcs(&args);
        assert_eq!(out.status.code(), Some(EXIT_OK), "args: {args:?}\n{}", stderr(&out));
        assert!(stdout(&out).contains("girth = 8"), "args: {args:?}");
    }
    // Misdeclared format must fail loudly, not misparse.
    let out = girthcs(&["analyze", "--file", dense.path(), "--format", "alist"]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));
}

#[test]
fn certify_accepts_a_certificate_file() {
    // A nullspace vector distinct from the embedded one, written with mixed
    // entry syntax (rational, decimal, comments) to exercise the parser.
    let cert = Scratch::new(
        "cert.txt",
        "# difference of two perfect matchings, halved\n1/2\n-0.5\n0\n-1/2 # middle\n0\n0.5\n",
    );
    let out =
        girthcs(&["certify", "--builtin", "euclid_plane", "--certificate", cert.path()]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(EXIT_OK), "stderr: {}", stderr(&out));
    assert!(text.contains("in_nullspace = true"), "output:\n{text}");
    assert!(text.contains("coordinate_bound = holds"), "output:\n{text}");

    // A matrix from --file has no embedded certificate to fall back on.
    let h = BuiltinMatrix::EuclidPlane.matrix();
    let dense = Scratch::new("euclid.txt", &binmat::save_dense(&h));
    let out = girthcs(&["certify", "--file", dense.path()]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));

    // Not a nullspace vector: report printed, data error signalled.
    let bad = Scratch::new("bad-cert.txt", "1\n0\n0\n0\n0\n0\n");
    let out =
        girthcs(&["certify", "--builtin", "euclid_plane", "--certificate", bad.path()]);
    assert_eq!(out.status.code(), Some(EXIT_DATA));
    assert!(stdout(&out).contains("in_nullspace = false"));
}

#[test]
fn recover_reports_the_boundary_tie() {
    let out =
        girthcs(&["recover", "--builtin", "euclid_plane", "--signal", "1,0,-1,0,0,0"]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("l1 = 2"), "output:\n{text}");
    assert!(text.contains("alternate_optimum = true"), "output:\n{text}");
}

#[test]
fn experiment_writes_csv_with_the_pinned_header() {
    let out = girthcs(&[
        "experiment",
        "--builtin",
        "euclid_plane",
        "--k",
        "1",
        "--exhaustive",
        "--trials",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some(
            "matrix_id,n,m,gamma,girth,lambda,c0,k,trial,support,signs,success,\
             linf_err,l1_ratio,l2_ratio,linf_ratio,alt_opt,residual"
        )
    );
    assert_eq!(lines.count(), 12, "6 supports x 2 signs");
    assert!(stderr(&out).contains("rate 1"), "stderr: {}", stderr(&out));
}

#[test]
fn generated_matrices_round_trip_through_analyze() {
    let file = std::env::temp_dir()
        .join(format!("girthcs-cli-{}-gen.alist", std::process::id()));
    let out = girthcs(&[
        "generate",
        "--rows",
        "6",
        "--cols",
        "9",
        "--gamma",
        "2",
        "--girth",
        "6",
        "--seed",
        "11",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK), "stderr: {}", stderr(&out));
    let analyzed = girthcs(&["analyze", "--file", file.to_str().unwrap()]);
    let _ = std::fs::remove_file(&file);
    assert_eq!(analyzed.status.code(), Some(EXIT_OK));
    let text = stdout(&analyzed);
    assert!(text.contains("gamma = 2"), "output:\n{text}");
    // The generator keeps restarting until it reaches the target girth.
    let girth_line = text.lines().find(|l| l.starts_with("girth = ")).expect("girth line");
    let girth: usize = girth_line.trim_start_matches("girth = ").parse().expect("finite girth");
    assert!(girth >= 6, "target girth missed: {text}");
}
