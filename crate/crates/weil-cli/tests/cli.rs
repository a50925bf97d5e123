use std::path::PathBuf;
use std::process::{Command, Output};

use num_bigint::BigInt;
use serde_json::Value;

use weil_core::cyclotomic::{phi_reduce, CycNum, ResidueField};

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil")).args(args).output().expect("run weil")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

/// Compares against tests/golden/<name>; WEIL_REGENERATE_GOLDEN=1 rewrites it.
fn golden(name: &str, bytes: &[u8]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var("WEIL_REGENERATE_GOLDEN").as_deref() == Ok("1") {
        std::fs::write(&path, bytes).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert!(expected == bytes, "{name} differs from golden output");
}

#[test]
fn build_universal_golden() {
    let out = weil(&["build", "--p", "3", "--f", "1", "--m", "1", "--ring", "A"]);
    assert_eq!(out.status.code(), Some(0));
    golden("build_p3_A.json", &out.stdout);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    for g in v["generators"].as_array().unwrap() {
        let m = g["matrix"].as_array().unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|r| r.as_array().unwrap().len() == 3));
    }
}

fn cyc_from_json(v: &Value) -> CycNum {
    let p = v["p"].as_u64().unwrap() as u32;
    let coeffs = v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| match c {
            Value::String(s) => s.parse::<BigInt>().unwrap(),
            n => BigInt::from(n.as_i64().unwrap()),
        })
        .collect();
    CycNum::new(p, coeffs, v["denom_exp"].as_u64().unwrap() as u32)
}

#[test]
fn residue_build_is_reduction_of_universal() {
    let univ = stdout_json(&weil(&["build", "--p", "3", "--ring", "A"]));
    let out = weil(&["build", "--p", "3", "--ring", "Fl:7"]);
    assert_eq!(out.status.code(), Some(0));
    golden("build_p3_F7.json", &out.stdout);
    let red = stdout_json(&out);
    let field = ResidueField::new(7, 3).unwrap();
    let (ug, rg) = (univ["generators"].as_array().unwrap(), red["generators"].as_array().unwrap());
    assert_eq!(ug.len(), rg.len());
    for (u, r) in ug.iter().zip(rg) {
        assert_eq!(u["g"], r["g"]);
        let (um, rm) = (u["matrix"].as_array().unwrap(), r["matrix"].as_array().unwrap());
        for (urow, rrow) in um.iter().zip(rm) {
            for (ue, re) in urow.as_array().unwrap().iter().zip(rrow.as_array().unwrap()) {
                let x = phi_reduce(&cyc_from_json(ue), &field).unwrap();
                let coeffs: Vec<u64> = re["coeffs"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
                assert_eq!(x.coeffs(), coeffs.as_slice());
            }
        }
    }
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["build", "--p", "2", "--m", "1"][..],
        &["build", "--p", "9"],
        &["build", "--p", "3", "--ring", "Fl:3"],
        &["build", "--p", "3", "--ring", "B"],
        &["build", "--p", "3", "--m", "5"],
        &["verify", "--p", "3", "--checks", "nope"],
        &["theta", "--q", "4", "--ideal", "X-1,Z-1"],
        &["theta", "--q", "3", "--ideal", "X-1,Z-3"],
    ] {
        let out = weil(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_cocycle_f3() {
    let out = weil(&["verify", "--p", "3", "--checks", "cocycle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"][0]["pairs_tested"], 576);
    assert_eq!(v["checks"][0]["failure_count"], 0);
}

#[test]
fn verify_schur_char_two() {
    let out = weil(&["verify", "--p", "3", "--ring", "Fl:2", "--checks", "schur"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let pairs = v["checks"][0]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 16);
    assert!(pairs.iter().all(|p| p["rank"] == 1));
}

#[test]
fn verify_all_checks_sp4() {
    let out = weil(&["verify", "--p", "3", "--m", "2", "--pairs", "200", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let cocycle = v["checks"].as_array().unwrap().iter().find(|c| c["check"] == "cocycle").unwrap();
    assert_eq!(cocycle["pairs_tested"], 200);
    assert_eq!(cocycle["seed"], 5);
}

#[test]
fn corrupted_section_exits_one_with_pair() {
    let out = weil(&["verify", "--p", "3", "--checks", "cocycle", "--corrupt-section"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
    let first = &v["checks"][0]["failures"][0];
    assert!(first["g1"].is_array() && first["g2"].is_array());
    assert_eq!(v["checks"][0]["failure_count"], 216);
}

#[test]
fn theta_examples() {
    let out = weil(&["theta", "--q", "3", "--ideal", "X-1,Z-1"]);
    assert_eq!(out.status.code(), Some(0));
    golden("theta_q3_trivial.json", &out.stdout);
    let v = stdout_json(&out);
    assert_eq!(v["torsion"], serde_json::json!([2]));
    assert_eq!(v["free_rank"], 1);

    let v = stdout_json(&weil(&["theta-gl1", "--q", "7", "--ideal", "X-7,Z-1"]));
    assert_eq!(v["torsion"], serde_json::json!([6]));
    assert_eq!(v["free_rank"], 1);
    assert_eq!(v["free_action"]["X"], 7);

    let v = stdout_json(&weil(&["theta", "--q", "3", "--ideal", "X-1,Z-1", "--mod", "5"]));
    assert_eq!(v["torsion"], serde_json::json!([]));
    let v = stdout_json(&weil(&["theta", "--q", "3", "--ideal", "X-1,Z-1", "--mod", "2"]));
    assert_eq!(v["torsion"], serde_json::json!([2]));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--p", "3", "--m", "2", "--checks", "cocycle,extend", "--pairs", "50", "--seed", "11"];
    let a = weil(&args);
    let b = weil(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("weil-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("theta.json");
    let out = weil(&["theta", "--q", "9", "--ideal", "X-1,Z-1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["torsion"], serde_json::json!([8]));
    std::fs::remove_dir_all(&dir).ok();
}
