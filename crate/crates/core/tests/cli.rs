use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tempfile::TempDir;

use dilation::cli::document::{self, MapDoc, MatrixDoc, PovmDoc};
use dilation::cp::MatrixMap;
use dilation::linalg;
use dilation::povm::Povm;

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.out))
    }
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dilation::cli::run(std::iter::once("dilation").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &TempDir, name: &str, doc: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(doc).unwrap()).unwrap();
    path.display().to_string()
}

fn map_file(dir: &TempDir, name: &str, phi: &MatrixMap) -> String {
    write(dir, name, &document::to_document("map", None, &MapDoc::from_map(phi)))
}

fn matrix_file(dir: &TempDir, name: &str, rows: usize, cols: usize, entries: &[f64]) -> String {
    let doc = MatrixDoc::from_matrix(&linalg::real(rows, cols, entries));
    write(dir, name, &document::to_document("matrix", None, &doc))
}

fn trine() -> Povm {
    let effects = (0..3)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / 3.0;
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            linalg::real(2, 2, &[c * c, c * s, c * s, s * s]).scale(2.0 / 3.0)
        })
        .collect();
    Povm::new(effects).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn as_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn transpose_is_refuted_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "t.json", &MatrixMap::transpose(2));
    let r = run(&["--json", "check-cp", &input]);
    assert_eq!(r.code, 1);
    let v = r.json();
    assert_eq!(v["verdict"], "fail");
    assert!((v["min_choi_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn depolarizing_passes_with_exit_zero() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "d.json", &MatrixMap::depolarizing(2));
    let r = run(&["--json", "check-cp", &input]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["kraus_count"], 4);
}

#[test]
fn trine_dilates_into_three_dimensions() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "trine.json", &document::to_document("povm", None, &PovmDoc::from_povm(&trine())));
    let cert = path(&dir, "n.json");
    let r = run(&["--json", "naimark", &input, "--out", as_str(&cert)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["k_dim"], 3);
    assert_eq!(r.json()["verdict"], "constructed");
    assert_eq!(run(&["verify-naimark", as_str(&cert)]).code, 0);
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "d.json", &MatrixMap::depolarizing(2));
    let cert = path(&dir, "st.json");
    assert_eq!(run(&["stinespring", &input, "--out", as_str(&cert)]).code, 0);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut doc["pair"]["v"]["entries"][0][0];
    *entry = json!(entry.as_f64().unwrap() + 1e-3);
    std::fs::write(&cert, doc.to_string()).unwrap();
    let r = run(&["--json", "verify-dilation", as_str(&cert)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["verdict"], "fail");
}

#[test]
fn jordan_block_fails_bram_and_hyponormality() {
    let dir = TempDir::new().unwrap();
    let input = matrix_file(&dir, "j.json", 2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let r = run(&["--json", "bram", "--degree", "1", &input]);
    assert_eq!(r.code, 1);
    assert!((r.json()["schur_min_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    let r = run(&["--json", "hyponormal", &input]);
    assert_eq!(r.code, 1);
    assert!((r.json()["min_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn von_neumann_on_the_jordan_block() {
    let dir = TempDir::new().unwrap();
    let input = matrix_file(&dir, "j.json", 2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let r = run(&["--json", "von-neumann", "--poly", "1,0:1,0", "--grid", "64", &input]);
    assert_eq!(r.code, 0, "{}", r.err);
    let lhs = r.json()["lhs"].as_f64().unwrap();
    assert!((lhs - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
}

#[test]
fn non_contraction_is_refuted() {
    let dir = TempDir::new().unwrap();
    let input = matrix_file(&dir, "big.json", 1, 1, &[2.0]);
    let r = run(&["halmos", &input]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("not a contraction"), "{}", r.out);
}

#[test]
fn malformed_input_exits_two_with_field_path() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.json", &json!({"format": 1, "kind": "map", "d": "two", "n": 2}));
    let r = run(&["check-cp", &input]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("bad.json") && r.err.contains("field `d`"), "{}", r.err);

    let short = write(&dir, "short.json", &json!({"format": 1, "kind": "matrix", "rows": 2, "cols": 2, "entries": [[1.0, 0.0]]}));
    let r = run(&["halmos", &short]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("short.json"), "{}", r.err);
}

#[test]
fn wrong_kind_and_missing_file_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "d.json", &MatrixMap::depolarizing(2));
    let r = run(&["halmos", &input]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("expected kind matrix"), "{}", r.err);
    let missing = path(&dir, "missing.json");
    assert_eq!(run(&["check-cp", as_str(&missing)]).code, 2);
}

#[test]
fn coarse_grid_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = matrix_file(&dir, "a.json", 1, 1, &[0.5]);
    let r = run(&["von-neumann", "--poly", "1,1,1,1", "--grid", "4", &input]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("too coarse"), "{}", r.err);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&[]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    for name in ["check-cp", "stinespring", "naimark", "dilate-contraction", "bram", "ucp-tower", "fuzz-tower"] {
        assert!(help.out.contains(name), "help lacks {name}");
    }
}

#[test]
fn out_requires_a_certificate() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "d.json", &MatrixMap::depolarizing(2));
    let out = path(&dir, "x.json");
    assert_eq!(run(&["check-cp", &input, "--out", as_str(&out)]).code, 2);
    assert!(!out.exists());
}

#[test]
fn quiet_suppresses_stdout() {
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "d.json", &MatrixMap::depolarizing(2));
    let r = run(&["--quiet", "check-cp", &input]);
    assert_eq!(r.code, 0);
    assert!(r.out.is_empty());
}

#[test]
fn tolerance_flag_overrides_document() {
    // Choi eigenvalues of depolarizing + s * transpose on M_2 are 1/2 + s and 1/2 - s.
    let s = 0.5 + 1e-7;
    let t = MatrixMap::transpose(2);
    let scaled = MatrixMap::from_images(2, 2, t.images().iter().map(|m| m.scale(s)).collect()).unwrap();
    let phi = MatrixMap::depolarizing(2).add(&scaled).unwrap();
    let dir = TempDir::new().unwrap();
    let input = map_file(&dir, "m.json", &phi);
    assert_eq!(run(&["check-cp", &input]).code, 1);
    assert_eq!(run(&["--tol", "1e-6", "check-cp", &input]).code, 0);

    let mut doc = document::to_document("map", None, &MapDoc::from_map(&phi));
    doc["tol"] = json!({"psd_tol": 1e-6});
    let loose = write(&dir, "loose.json", &doc);
    assert_eq!(run(&["check-cp", &loose]).code, 0);
    assert_eq!(run(&["--tol", "1e-9", "check-cp", &loose]).code, 1);
}

#[test]
fn fuzz_reports_are_seeded() {
    let a = run(&["--json", "fuzz-kernel", "--seed", "3", "--trials", "4"]);
    let b = run(&["--json", "fuzz-kernel", "--seed", "3", "--trials", "4"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    assert_eq!(a.json()["failures"], 0);
}
