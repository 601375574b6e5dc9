use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

use phid::io;
use phid_core::zoo::make_rlc5;
use phid_core::StateSpace;

fn phid(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phid"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = phid(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    phid(dir, args).status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn transfer_error(model: &StateSpace, reference: &StateSpace) -> f64 {
    (0..40)
        .map(|k| {
            let s = Complex64::new(0.0, 10f64.powf(-1.0 + 4.0 * k as f64 / 39.0));
            let want = reference.eval_transfer(s).unwrap();
            (model.eval_transfer(s).unwrap() - &want).norm() / want.norm()
        })
        .fold(0.0, f64::max)
}

fn rlc5_samples(dir: &Path) {
    ok(dir, &["zoo", "export", "rlc5", "-o", "rlc5.json"]);
    ok(dir, &["sample", "rlc5.json", "--grid", "0.1,1000,20", "--scale", "log", "-o", "s.csv"]);
    fs::write(dir.join("d.json"), "{\"D\": [[2]]}").unwrap();
}

#[test]
fn zoo_lists_every_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["zoo", "list"]);
    for name in ["analytic", "rlc5", "ladder"] {
        assert!(out.contains(name), "{out}");
    }
    assert_eq!(code(dir.path(), &["zoo", "export", "nope", "-o", "x.json"]), 2);
}

#[test]
fn identify_recovers_rlc5() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rlc5_samples(d);
    let out = ok(d, &["identify", "s.csv", "--tol", "1e-10", "--D", "given:d.json", "-o", "id.json", "--sv", "sv.csv"]);
    assert_eq!(out.trim(), "order 5");
    let model = io::model_from_value(&json(d.join("id.json"))).unwrap();
    assert!(model.is_real());
    assert!(transfer_error(&model, &make_rlc5()) <= 1e-6);

    let sv = fs::read_to_string(d.join("sv.csv")).unwrap();
    let mut lines = sv.lines();
    assert_eq!(lines.next(), Some("index,value"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 20);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
    assert!(values[5] / values[0] <= 1e-12);
}

#[test]
fn ph_pipeline_is_passive_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rlc5_samples(d);
    assert_eq!(ok(d, &["ph", "s.csv", "--D", "given:d.json", "-o", "a.json", "--diag", "diag.json"]).trim(), "order 5");
    ok(d, &["ph", "s.csv", "--D", "given:d.json", "-o", "b.json", "--diag", "diag2.json"]);
    assert_eq!(fs::read(d.join("a.json")).unwrap(), fs::read(d.join("b.json")).unwrap());
    assert_eq!(fs::read(d.join("diag.json")).unwrap(), fs::read(d.join("diag2.json")).unwrap());

    let form = io::ph_from_value(&json(d.join("a.json"))).unwrap();
    assert!(form.is_normalized());
    assert!(transfer_error(&phid_core::reconstruct(&form), &make_rlc5()) <= 1e-6);
    let diag = json(d.join("diag.json"));
    assert_eq!(diag["order"], 5);
    assert_eq!(diag["zeros"].as_array().unwrap().len(), 5);
    assert!(diag["max_interpolation_residual"].as_f64().unwrap() <= 1e-8);

    ok(d, &["validate", "a.json", "--sweep", "0.01,1e4,100", "--sweep-csv", "sweep.csv", "-o", "report.json"]);
    let report = json(d.join("report.json"));
    assert_eq!(report["kind"], "ph");
    assert_eq!(report["passed"], true);
    assert_ne!(report["certificate"]["verdict"], "invalid");
    let sweep = fs::read_to_string(d.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 101);
    assert!(sweep.starts_with("omega,lambda_min\n"));
}

#[test]
fn estimated_feedthrough_and_band() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["zoo", "export", "ladder", "--sections", "20", "-o", "lad.json"]);
    ok(d, &["sample", "lad.json", "--grid", "0.1,1000,200", "-o", "s.csv"]);
    fs::write(d.join("d.json"), "[[1]]").unwrap();
    ok(d, &["ph", "s.csv", "-o", "full.json", "--diag", "full_diag.json"]);
    ok(d, &[
        "ph", "s.csv", "--D", "given:d.json", "--band", "5,15", "--reference", "lad.json", "-o", "band.json", "--diag",
        "band_diag.json",
    ]);
    let full = json(d.join("full_diag.json"));
    let band = json(d.join("band_diag.json"));
    assert!(band["order"].as_u64().unwrap() <= full["order"].as_u64().unwrap());
    assert!(band["in_band_error"].as_f64().unwrap() <= 1e-6);
    assert!(band["out_of_band_error"].as_f64().is_some());
    assert!(full["in_band_error"].is_null());

    assert_eq!(code(d, &["ph", "s.csv", "--D", "given:d.json", "--band", "1e6,1e7", "-o", "x.json"]), 2);
    assert_eq!(code(d, &["ph", "s.csv", "--band", "15,5", "-o", "x.json"]), 2);
}

#[test]
fn zeros_feed_interpolation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["zoo", "export", "rlc5", "-o", "rlc5.json"]);
    assert_eq!(ok(d, &["zeros", "rlc5.json", "-o", "all.csv"]).trim(), "10 zeros");
    ok(d, &["zeros", "rlc5.json", "--rhp", "-o", "rhp.csv", "--data", "data.json"]);
    let rhp = fs::read_to_string(d.join("rhp.csv")).unwrap();
    let mut lines = rhp.lines();
    assert_eq!(lines.next(), Some("re,im,re_r1,im_r1"));
    for line in lines {
        let re: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(re > 0.0);
    }
    assert_eq!(ok(d, &["interpolate", "data.json", "-o", "ph.json"]).trim(), "order 5");
    let form = io::ph_from_value(&json(d.join("ph.json"))).unwrap();
    assert!(transfer_error(&phid_core::reconstruct(&form), &make_rlc5()) <= 1e-8);
}

#[test]
fn general_tangential_data_interpolate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Z(s) = 1 + 1/(s + 1) sampled at s = 1 (right) and s = 2 (left)
    fs::write(
        d.join("data.json"),
        r#"{"m": 1, "D": [[1]],
            "rights": [{"lambda": [1, 0], "r": [[1, 0]], "w": [[1.5, 0]]}],
            "lefts": [{"mu": [2, 0], "ell": [[1, 0]], "v": [[1.3333333333333333, 0]]}]}"#,
    )
    .unwrap();
    assert_eq!(ok(d, &["interpolate", "data.json", "-o", "model.json"]).trim(), "order 1");
    let model = io::model_from_value(&json(d.join("model.json"))).unwrap();
    let z = model.eval_transfer(Complex64::new(0.0, 0.0)).unwrap()[(0, 0)];
    assert!((z - Complex64::new(2.0, 0.0)).norm() <= 1e-12);
}

#[test]
fn certificate_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["zoo", "export", "analytic", "-o", "an.json"]);
    fs::write(d.join("good.json"), "{\"X\": [[1, 0], [0, 1]]}").unwrap();
    fs::write(d.join("bad.json"), "[[100, 0], [0, 100]]").unwrap();
    ok(d, &["validate", "an.json", "--certificate", "good.json", "-o", "r1.json"]);
    let r1 = json(d.join("r1.json"));
    assert_eq!(r1["kind"], "model");
    assert_eq!(r1["certificate"]["verdict"], "strict");
    assert!(r1.get("sweep").is_none());

    assert_eq!(code(d, &["validate", "an.json", "--certificate", "bad.json", "-o", "r2.json"]), 2);
    let r2 = json(d.join("r2.json"));
    assert_eq!(r2["certificate"]["verdict"], "invalid");
    assert_eq!(r2["passed"], false);

    ok(d, &["validate", "an.json", "-o", "r3.json"]);
    assert_eq!(json(d.join("r3.json"))["sweep"]["points"], 200);
}

#[test]
fn exit_codes_separate_data_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rlc5_samples(d);
    fs::write(d.join("broken.json"), "{").unwrap();
    assert_eq!(code(d, &["validate", "broken.json", "-o", "r.json"]), 2);
    assert_eq!(code(d, &["zeros", "missing.json", "-o", "z.csv"]), 2);
    assert_eq!(code(d, &["sample", "rlc5.json", "--grid", "1,0.1,5", "-o", "x.csv"]), 2);
    assert_eq!(code(d, &["identify", "s.csv", "--D", "given", "-o", "x.json"]), 2);

    // negated samples: the estimated D fails, a forced positive D reaches the
    // non-passive reduced model
    let text = fs::read_to_string(d.join("s.csv")).unwrap();
    let mut neg = String::new();
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            neg.push_str(line);
        } else {
            let mut fields = line.split(',');
            neg.push_str(fields.next().unwrap());
            for f in fields {
                neg.push_str(&format!(",{}", -f.parse::<f64>().unwrap()));
            }
        }
        neg.push('\n');
    }
    fs::write(d.join("neg.csv"), neg).unwrap();
    assert_eq!(code(d, &["ph", "neg.csv", "-o", "x.json"]), 2);
    assert_eq!(code(d, &["ph", "neg.csv", "--D", "given:d.json", "-o", "x.json"]), 3);
    assert!(!d.join("x.json").exists());
}

#[test]
fn dof_and_bode() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ok(d, &["dof", "--n", "5", "--m", "2"]).trim(), "20");
    assert_eq!(ok(d, &["dof", "--n", "5", "--m", "2", "--rank", "1"]).trim(), "23");
    assert_eq!(code(d, &["dof", "--n", "5", "--m", "2", "--rank", "3"]), 2);

    ok(d, &["zoo", "export", "analytic", "-o", "an.json"]);
    ok(d, &["bode", "an.json", "--grid", "1,3,3", "--scale", "lin", "-o", "bode.csv"]);
    let text = fs::read_to_string(d.join("bode.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "omega,abs_z11,abs_z12,abs_z21,abs_z22");
    assert_eq!(lines.len(), 4);
    let model = phid_core::zoo::make_analytic(-1.0, 1.0, 2.0).unwrap();
    let z = model.eval_transfer(Complex64::new(0.0, 2.0)).unwrap();
    let row: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[2] - z[(0, 1)].norm()).abs() <= 1e-15);
}

#[test]
fn ladder_exports_in_both_forms() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["zoo", "export", "ladder", "--sections", "3", "--ph", "-o", "ph.json"]);
    ok(d, &["zoo", "export", "ladder", "--sections", "3", "-o", "ss.json"]);
    let form = io::ph_from_value(&json(d.join("ph.json"))).unwrap();
    let model = io::model_from_value(&json(d.join("ss.json"))).unwrap();
    assert_eq!(phid_core::reconstruct(&form), model);
    ok(d, &["validate", "ph.json", "-o", "r.json"]);
    assert_eq!(json(d.join("r.json"))["certificate"]["verdict"], "strict");
}
