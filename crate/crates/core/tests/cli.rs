use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn sympfact(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sympfact"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn doc(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

#[test]
fn factor_sl2_reads_files_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"rows":2,"cols":2,"ring":{"kind":"gaussian"},"entries":[["2","3"],["1","2"]]}"#).unwrap();
    let (code, out, _) = sympfact(&["factor-sl2", path.to_str().unwrap()], "");
    assert_eq!(code, 0);
    let v = doc(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["count"], 4);
    let params: Vec<&str> = v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .zip([(1, 0), (0, 1), (1, 0), (0, 1)])
        .map(|(f, (i, j))| f["matrix"]["entries"][i][j].as_str().unwrap())
        .collect();
    assert_eq!(params, ["0", "1", "1", "1"]);
    let (code, out2, _) = sympfact(&["factor-sl2", "-"], &std::fs::read_to_string(&path).unwrap());
    assert_eq!(code, 0);
    assert_eq!(out, out2);
}

#[test]
fn output_is_a_fixed_point_of_verify_and_parse() {
    let (_, out, _) = sympfact(&["factor-sl2", "--g3", "2"], "[[3, 1], [5, 2]]");
    assert_eq!(sympfact(&["verify"], &out).0, 0);
    let v = doc(&out);
    let reparsed = sympfact::json::unitri_from_json::<sympfact::Scalar>(&v, &Default::default()).unwrap();
    let again = sympfact::json::unitri_to_json(&reparsed);
    for key in ["factors", "target", "starts_lower", "frame"] {
        assert_eq!(again[key], v[key]);
    }
}

#[test]
fn tampered_factorization_fails_verification() {
    let (_, out, _) = sympfact(&["factor-sl2"], "[[2,3],[1,2]]");
    let mut v = doc(&out);
    v["factors"][2]["matrix"]["entries"][1][0] = json!("7/2");
    let (code, out, _) = sympfact(&["verify"], &v.to_string());
    assert_eq!(code, 1);
    assert_eq!(doc(&out)["verified"], false);
}

#[test]
fn factor_sp_and_exp_factor() {
    let m = r#"[[2,2,1,2],[2,1,2,0],[1,0,1,0],[0,1,0,1]]"#;
    let sp = sympfact::Matrix::<sympfact::Scalar>::from_ints(&[&[2, 2, 1, 2], &[2, 1, 2, 0], &[1, 0, 1, 0], &[0, 1, 0, 1]]);
    assert!(sp.is_symplectic(&sympfact::SymplecticForm::j(2)).unwrap());
    let (code, out, err) = sympfact(&["factor-sp", "--count-check", "4"], m);
    assert_eq!(code, 0, "{err}");
    let v = doc(&out);
    assert_eq!(v["frame"], "jtilde");
    assert_eq!(v["checks"]["symplectic"], json!([true, true, true, true]));
    assert_eq!(sympfact(&["verify"], &out).0, 0);

    let (code, out, _) = sympfact(&["exp-factor"], m);
    assert_eq!(code, 0);
    let e = doc(&out);
    assert_eq!((e["count"].as_u64(), &e["in_sp"]), (Some(3), &json!(true)));
    assert_eq!(sympfact(&["verify"], &out).0, 0);

    let (code, out, _) = sympfact(&["exp-factor"], &v.to_string());
    assert_eq!(code, 0);
    assert_eq!(doc(&out)["count"], 3);
}

#[test]
fn expand_elementary_counts() {
    let (code, out, _) = sympfact(&["expand-elementary"], "[[1,2],[2,3]]");
    assert_eq!(code, 0);
    let v = doc(&out);
    assert_eq!((v["count"].as_u64(), v["bound"].as_u64()), (Some(3), Some(3)));
    assert_eq!(sympfact(&["verify"], &out).0, 0);
    let (_, out, _) = sympfact(&["expand-elementary", "--lower"], "[[0,0],[0,5]]");
    assert_eq!(doc(&out)["count"], 1);
    assert_eq!(sympfact(&["expand-elementary"], "[[1,2],[3,4]]").0, 2);
}

#[test]
fn polynomial_input() {
    let m = json!({"rows": 2, "cols": 2, "ring": {"kind": "poly", "vars": ["z"]},
                   "entries": [["1", "z"], ["z", "z^2+1"]]});
    let (code, out, _) = sympfact(&["factor-sl2"], &m.to_string());
    assert_eq!(code, 0);
    assert_eq!(doc(&out)["method"], "four_factor");
    let (code, out, _) = sympfact(&["factor-sl2", "--ring", "poly", "--vars", "z"], "[[\"z^2+1\", \"z\"], [\"z\", \"1\"]]");
    assert_eq!(code, 0);
    assert_eq!(doc(&out)["method"], "euclid");
}

#[test]
fn obstruction_demo_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("loops.csv");
    let (code, out, _) = sympfact(&["obstruction-demo", "--samples", "256", "--csv", csv.to_str().unwrap()], "");
    assert_eq!(code, 0);
    let v = doc(&out);
    assert_eq!((v["degree_start"].as_i64(), v["degree_end"].as_i64()), (Some(2), Some(1)));
    assert_eq!(v["restriction_start"], "-z^2");
    assert_eq!(v["restriction_end"], "z");
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 256);
    assert_eq!(sympfact(&["obstruction-demo", "--samples", "8"], "").0, 2);
}

#[test]
fn errors_exit_two() {
    let (code, _, err) = sympfact(&["factor-sl2"], "{\"rows\": 2,");
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");
    assert_eq!(sympfact(&["factor-sl2"], "[[1,1],[1,1]]").0, 2);
    assert_eq!(sympfact(&["factor-sp"], "[[2,0],[0,1]]").0, 2);
    assert_eq!(sympfact(&["factor-sl2", "--frobnicate"], "").0, 2);
    assert_eq!(sympfact(&["no-such-command"], "").0, 2);
    assert_eq!(sympfact(&["verify"], "{}").0, 2);
}

#[test]
fn selftest_runs() {
    let (code, out, _) = sympfact(&["selftest", "--cases", "10", "--parallel"], "");
    assert_eq!(code, 0);
    let v = doc(&out);
    assert_eq!(v["passed"], true);
    assert!(v["suites"].as_array().unwrap().len() >= 10);
}
