use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodic-nls")).args(args).output().expect("run binary")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_exit_codes() {
    let o = cli(&["classify", "--alpha", "1", "--omega", "1", "--c-re", "-1.41421356237", "--c-im", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["family"], "FamilyD_minus");
    let o = cli(&["classify", "--alpha", "1", "--omega", "0", "--c-re", "-1", "--c-im", "0"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "NotAdmissible");
    assert_eq!(code(&cli(&["classify", "--alpha", "1", "--omega", "0", "--c-re", "-1"])), 2);
    assert_eq!(code(&cli(&["classify", "--alpha", "-1", "--omega", "1", "--c-re", "0", "--c-im", "0"])), 2);
}

#[test]
fn gate_rejects_plus_family() {
    let o = cli(&["gate", "--alpha", "1", "--omega", "1", "--c-re", "1.4142135623730951"]);
    assert_eq!(code(&o), 3);
    assert!(json(&o)["verdict"]["Rejected"]["QbPole"].is_array());
}

#[test]
fn spectral_and_poles() {
    let o = cli(&["spectral", "--alpha", "1", "--omega", "1", "--c-re", "-1.4142135623730951", "--k-re", "0.37"]);
    assert_eq!(code(&o), 0);
    let q = &json(&o)["qb"];
    // Q^b = -i / (2k + i sqrt 2)
    let k = num_complex::Complex64::new(0.37, 0.0);
    let want = -num_complex::Complex64::i() / (2.0 * k + num_complex::Complex64::new(0.0, 2f64.sqrt()));
    assert!((q[0].as_f64().unwrap() - want.re).abs() < 1e-10 && (q[1].as_f64().unwrap() - want.im).abs() < 1e-10);
    let o = cli(&["spectral", "--alpha", "1", "--omega", "1", "--c-re", "-1.4142135623730951", "--ns", "5", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("k_re,k_im,re_qb"));
    let o = cli(&["poles", "--alpha", "0.5", "--omega", "2", "--c-re", "-0.75", "--n-max", "8"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["upper"].as_array().unwrap().len(), 8);
    assert!(v["real_pass"].as_bool().unwrap());
}

#[test]
fn build_eval_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("d.json");
    let o = cli(&["build", "--alpha", "1", "--omega", "1", "--c-re", "-1.4142135623730951", "-o", path(&desc)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&desc).unwrap()).unwrap();
    assert_eq!(v["omega"], 1.0);
    assert!((v["poles"][0][1].as_f64().unwrap() - 0.5).abs() < 1e-14);
    assert!((v["residues"][0][1].as_f64().unwrap() + 0.41421356237309503).abs() < 1e-8);

    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let o = cli(&["--threads", "1", "eval", "--descriptor", path(&desc), "--format", "csv", "-o", path(&csv1)]);
    assert_eq!(code(&o), 0);
    let o = cli(&["--threads", "4", "eval", "--descriptor", path(&desc), "--format", "csv", "-o", path(&csv2)]);
    assert_eq!(code(&o), 0);
    let a = std::fs::read(&csv1).unwrap();
    assert_eq!(a, std::fs::read(&csv2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("x,t,re_u,im_u"));
    assert_eq!(text.lines().count(), 1 + 51 * 41);

    let o = cli(&[
        "verify", "--descriptor", path(&desc), "--alpha", "1", "--omega", "1", "--c-re", "-1.4142135623730951", "--nx", "11",
        "--nt", "9",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn zero_pair_builds_empty_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("p.json");
    std::fs::write(&pair, r#"{"type":"fourier","tau":2.0,"g0":[],"g1":[]}"#).unwrap();
    let o = cli(&["build", "--pair", path(&pair)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["poles"].as_array().unwrap().len(), 0);
}

#[test]
fn eval_domain_and_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("s.json");
    // |d1| = 1 exactly at x = 1 when |h1| = e for k1 = i/2
    let e = std::f64::consts::E;
    std::fs::write(&desc, format!(r#"{{"omega":1,"poles":[[0,0.5]],"residues":[[{e},0]]}}"#)).unwrap();
    let o = cli(&["eval", "--descriptor", path(&desc), "--x0", "0", "--x1", "2", "--nx", "3", "--nt", "2"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(x, t) = (1"));
    let o = cli(&["eval", "--descriptor", path(&desc), "--x0", "-1"]);
    assert_eq!(code(&o), 2);
    let o = cli(&["eval", "--descriptor", path(&desc), "--nx", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn closed_forms_and_failed_verification() {
    let o = cli(&["eval-closed", "--form", "family-d", "--cf-alpha", "1", "--cf-omega", "1", "--nx", "2", "--nt", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0"));
    let o = cli(&["verify", "--form", "family-d", "--cf-alpha", "1", "--cf-omega", "1", "--nx", "6", "--nt", "5"]);
    assert_eq!(code(&o), 0);
    // the two-pole form has large derivatives near x = 0: the residual check fails
    let o = cli(&["verify", "--form", "two-pole", "--x1", "3", "--t1", "6.283185307179586", "--nx", "11", "--nt", "11"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["pass"], false);
}
