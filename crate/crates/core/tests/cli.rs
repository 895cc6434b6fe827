//! End-to-end tests of the command-line interface: exit codes, report
//! schemas, and byte-identical determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_curve-koszul")
}

fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../jobs")
        .canonicalize()
        .expect("jobs directory")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn thm11_genus2_passes_with_exit_0() {
    let job = jobs_dir().join("genus2_bicanonical.job");
    let out = run(&["--job", job.to_str().unwrap(), "verify-thm11"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("exceptional: true"), "{text}");
    assert!(text.contains("verdict:     pass"), "{text}");
}

#[test]
fn koszul_cell_klein() {
    let job = jobs_dir().join("klein_bicanonical.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "koszul",
        "--p",
        "4",
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("dim K_(4,1) = 0"), "{}", stdout(&out));
}

#[test]
fn json_report_schema() {
    let job = jobs_dir().join("genus2_bicanonical.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "betti",
        "--qmax",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    for key in [
        "curve",
        "field",
        "B",
        "L",
        "g",
        "degL",
        "gon",
        "exceptional",
        "dims",
        "verdict",
    ] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(v["g"], 2);
    assert_eq!(v["degL"], 4);
    assert_eq!(v["gon"], 2);
    assert_eq!(v["exceptional"], true);
    assert_eq!(v["dims"][0][0], 1, "K_(0,0) = 1");
    assert_eq!(v["dims"][1][1], 1, "K_(1,1) = 1 (exceptional)");
    assert_eq!(v["verdict"], true);
}

#[test]
fn csv_report_has_cell_rows() {
    let job = jobs_dir().join("genus2_bicanonical.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "betti",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("curve,field,B,L,g,degL,gon,exceptional,verdict\n"));
    assert!(text.contains("\np,q,dim\n"), "{text}");
    assert!(text.contains("\n1,1,1\n"), "K_(1,1)=1 row: {text}");
}

#[test]
fn deterministic_output() {
    let job = jobs_dir().join("klein_bicanonical.job");
    let args = [
        "--job",
        job.to_str().unwrap(),
        "verify-thm11",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "byte-identical reruns");
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn field_override_runs_over_prime_field() {
    let job = jobs_dir().join("genus2_bicanonical.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "--field",
        "Fp:10007",
        "betti",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["field"], "Fp:10007");
    assert_eq!(v["dims"][1][1], 1, "same table after good reduction");
}

#[test]
fn verdict_false_exits_1() {
    // omega = H on the Klein quartic is not 2-very ample (hyperflexes)
    let job = jobs_dir().join("klein_adjoint.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "--field",
        "Fp:11",
        "pva",
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("violating divisor"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_2() {
    // missing job file
    let out = run(&["--job", "/nonexistent.job", "betti"]);
    assert_eq!(out.status.code(), Some(2));
    // point not on the curve: positioned semantic diagnostic
    let dir = std::env::temp_dir().join("ck-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.job");
    std::fs::write(
        &bad,
        "family = plane\nF = \"x^3*y + y^3*z + z^3*x\"\nfield = Q\nL = \"2*H - 1*(1:1:1)\"\n",
    )
    .unwrap();
    let out = run(&["--job", bad.to_str().unwrap(), "betti"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("not on the curve"), "{err}");
    // bad flag value
    let job = jobs_dir().join("genus2_bicanonical.job");
    let out = run(&["--job", job.to_str().unwrap(), "--field", "Fp:12", "betti"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gonality_family_formula_with_witness() {
    let job = jobs_dir().join("genus3_bicanonical.job");
    let out = run(&["--job", job.to_str().unwrap(), "gonality"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("gonality:    2"), "{text}");
    assert!(text.contains("witness pencil"), "{text}");
}

#[test]
fn verify_cor_exceptional_subcase() {
    let job = jobs_dir().join("klein_adjoint.job");
    let out = run(&[
        "--job",
        job.to_str().unwrap(),
        "verify-cor",
        "--p",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["exceptional"], true);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["dims"][0][0], 3, "K_(1,1) = 3 on the plane-curve subcase");
}
