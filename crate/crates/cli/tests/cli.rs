use std::path::Path;
use std::process::Command;

use inertia_lab::linalg::ComplexMatrix;
use inertia_lab::{BipartiteDims, C64};
use inertia_lab_cli::{run, MatrixFile};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("inertia-lab").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let r = cli(&full);
    (r.code, serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout)))
}

fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix, dims: BipartiteDims) -> String {
    let path = dir.join(name);
    MatrixFile::from_matrix(m, dims).write(&path).unwrap();
    path.display().to_string()
}

fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

fn max_entangled_projector() -> ComplexMatrix {
    let d = dims(3, 3);
    let mut psi = vec![C64::new(0.0, 0.0); 9];
    for i in 0..3 {
        psi[d.index(i, i)] = C64::new(1.0 / 3f64.sqrt(), 0.0);
    }
    ComplexMatrix::outer(&psi)
}

#[test]
fn inertia_of_identity_and_maximally_entangled_state() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_matrix(dir.path(), "id.json", &ComplexMatrix::identity(9), dims(3, 3));
    let (code, v) = json(&["inertia", "--input", &id, "--dims", "3x3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["inertia"], "(0,0,9)");
    assert_eq!(v["results"]["partial_transpose_inertia"], "(0,0,9)");

    let me = write_matrix(dir.path(), "me.json", &max_entangled_projector(), dims(3, 3));
    let r = cli(&["inertia", "--input", &me]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("In(M^Gamma) = (3,0,6)"), "{}", r.stdout);
    assert!(r.stdout.contains("In(M)       = (0,8,1)"), "{}", r.stdout);
}

#[test]
fn inertia_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"dim_a\": 3, ").unwrap();
    let r = cli(&["inertia", "--input", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cannot parse"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let mut skew = ComplexMatrix::identity(4);
    skew[(0, 1)] = C64::new(1.0, 0.0);
    let skew = write_matrix(dir.path(), "skew.json", &skew, dims(2, 2));
    assert_eq!(cli(&["inertia", "--input", &skew]).code, 3);

    let id = write_matrix(dir.path(), "id.json", &ComplexMatrix::identity(6), dims(2, 3));
    assert_eq!(cli(&["inertia", "--input", &id, "--dims", "3x2"]).code, 4);
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"dim_a":2,"dim_b":2,"re":[1,0,0],"im":[0,0,0]}"#).unwrap();
    assert_eq!(cli(&["inertia", "--input", short.to_str().unwrap()]).code, 4);

    assert_eq!(cli(&["inertia", "--input", dir.path().join("missing.json").to_str().unwrap()]).code, 6);
    assert_eq!(cli(&["search", "--dims", "3by3", "--target", "1,0,8"]).code, 2);
    assert_eq!(cli(&["search", "--dims", "3x3", "--target", "1,0"]).code, 2);
}

#[test]
fn search_writes_a_witness_that_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let r = cli(&["search", "--dims", "3x3", "--target", "1,0,8", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("FOUND (1,0,8)"), "{}", r.stdout);
    let (code, v) = json(&["inertia", "--input", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["partial_transpose_inertia"], "(1,0,8)");
    assert_eq!(v["results"]["inertia"], "(0,0,9)");

    let r = cli(&["search", "--dims", "2x3", "--target", "1,2,3"]);
    assert!(r.stdout.starts_with("FOUND (1,2,3)"), "{}", r.stdout);
}

#[test]
fn excluded_target_is_reported_as_corroboration() {
    let (code, v) = json(&["search", "--dims", "3x3", "--target", "3,2,4", "--restarts", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["status"], "not-found");
    assert_eq!(v["results"]["catalog_standing"], "known exclusion");
    assert!(v["results"]["note"].as_str().unwrap().contains("corroboration, not proof"));
    assert!(v["results"]["witness_path"].is_null());
    let r = cli(&["search", "--dims", "3x3", "--target", "3,2,4", "--restarts", "4"]);
    assert!(r.stdout.starts_with("NOT FOUND (consistent with exclusion)"), "{}", r.stdout);
    assert!(r.stdout.contains("not proof"));
}

#[test]
fn catalog_queries() {
    let (_, v) = json(&["catalog", "--dims", "3x3"]);
    assert_eq!(v["results"]["members"].as_array().unwrap().len(), 13);
    assert_eq!(v["results"]["excluded"].as_array().unwrap().len(), 2);
    assert_eq!(v["results"]["complete"], true);
    let (_, v) = json(&["catalog", "--dims", "2x3"]);
    assert_eq!(v["results"]["members"].as_array().unwrap().len(), 4);
    assert_eq!(v["results"]["complete"], true);
    let (_, v) = json(&["catalog", "--dims", "3x4"]);
    assert_eq!(v["results"]["family"].as_array().unwrap().len(), 21);
    assert_eq!(v["results"]["excluded"].as_array().unwrap().len(), 9);
    assert_eq!(v["results"]["complete"], false);
}

#[test]
fn verify_commands() {
    let r = cli(&["verify", "all", "--trials", "500"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(!r.stdout.contains("FAIL"));
    let (code, v) = json(&["verify", "cross-lem", "--trials", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["all_passed"], true);
    let r = cli(&["verify", "no-such-lemma"]);
    assert_eq!(r.code, 5);
    assert!(r.stderr.contains("no-such-lemma"));
}

#[test]
fn census_commands() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["2x3", "3x3"] {
        let out = dir.path().join(format!("{d}.csv"));
        let (code, v) = json(&["census", "--dims", d, "--samples", "10000", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["results"]["flagged"], false);
        let csv = std::fs::read_to_string(&out).unwrap();
        assert_eq!(csv.lines().next(), Some("neg,zero,pos,count"));
        let total: usize = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 10000);
    }
    let (code, v) = json(&["census", "--dims", "3x4", "--samples", "10000"]);
    assert_eq!(code, 0);
    assert!(v["results"]["excluded_hits"].as_array().unwrap().is_empty());
    assert_eq!(cli(&["census", "--dims", "2x2", "--samples", "0"]).code, 2);
    assert_eq!(cli(&["census", "--dims", "2x2", "--ranks", "5"]).code, 2);
}

#[test]
fn repeated_commands_give_identical_payloads() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["search", "--dims", "3x3", "--target", "2,2,5", "--seed", "3"],
        vec!["census", "--dims", "3x3", "--samples", "2000", "--seed", "5"],
        vec!["verify", "all", "--trials", "30", "--seed", "8"],
        vec!["catalog", "--dims", "3x4"],
    ] {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        let mut first = vec!["--report", a.to_str().unwrap()];
        first.extend(&args);
        let mut second = vec!["--report", b.to_str().unwrap()];
        second.extend(&args);
        let (ra, rb) = (cli(&first), cli(&second));
        assert_eq!(ra.stdout, rb.stdout);
        let pa: inertia_lab_cli::RunReport = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
        let pb: inertia_lab_cli::RunReport = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&pa.payload()).unwrap(), serde_json::to_string(&pb.payload()).unwrap());
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_inertia-lab");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o = status(&["catalog", "--dims", "2x3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("complete: true"));
    assert_eq!(status(&["verify", "bogus"]).status.code(), Some(5));
    assert_eq!(status(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(status(&["--version"]).status.code(), Some(0));
}
